//! Spin-s linear algebra substrate: spin operators, rotations, coherent
//! states and their overlaps.
//!
//! Basis convention: amplitude index k = 0..2s refers to the eigenstate
//! |s-k, n_z> of s_z, so index 0 is the maximal-weight state.

use nalgebra::{DMatrix, DVector};

use crate::error::{EvrepError, Result};
use crate::C64;

/// Spin quantum number stored as the integer 2s.
///
/// Fixes the Hilbert-space dimension d = 2s+1 and the quorum size
/// N_s = (2s+1)^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoS(u32);

impl TwoS {
    pub fn new(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(EvrepError::InvalidArgument(
                "two_s must be >= 1 (s >= 1/2)".into(),
            ));
        }
        Ok(TwoS(two_s))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// s as a float (half-integer or integer).
    pub fn spin(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Hilbert-space dimension d = 2s+1.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Quorum size N_s = (2s+1)^2.
    pub fn quorum_size(self) -> usize {
        self.dim() * self.dim()
    }
}

/// A point on the unit sphere, (theta, phi) in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// `theta` must lie in [0, pi]; `phi` is wrapped into [0, 2pi).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(EvrepError::InvalidArgument(
                "direction angles must be finite".into(),
            ));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(EvrepError::InvalidArgument(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        let tau = 2.0 * std::f64::consts::PI;
        let mut phi = phi.rem_euclid(tau);
        if phi >= tau {
            phi = 0.0;
        }
        Ok(Direction { theta, phi })
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn phi(self) -> f64 {
        self.phi
    }

    /// Cartesian unit vector (sin t cos p, sin t sin p, cos t).
    pub fn unit_vector(self) -> [f64; 3] {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        let (sp, cp) = (self.phi.sin(), self.phi.cos());
        [st * cp, st * sp, ct]
    }

    /// Stereographic coordinate z = tan(theta/2) e^{i phi}.
    ///
    /// Undefined at the south pole; returns `None` for theta within
    /// 1e-9 of pi.
    pub fn stereo(self) -> Option<C64> {
        if self.theta >= std::f64::consts::PI - 1e-9 {
            return None;
        }
        let r = (self.theta / 2.0).tan();
        Some(C64::from_polar(r, self.phi))
    }

    /// Recover (theta, phi) from a Cartesian vector (need not be
    /// exactly normalized; it is projected onto the sphere).
    pub fn from_unit_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(EvrepError::InvalidArgument(
                "cannot normalize a near-zero vector".into(),
            ));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Direction::new(theta, phi)
    }

    /// Cosine of the angle between two directions.
    pub fn dot(self, other: Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }
}

/// A normalized pure state in the 2s+1 dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(EvrepError::InvalidArgument("empty state vector".into()));
        }
        Ok(StateVector { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// The rank-1 projector |psi><psi|.
    pub fn projector(&self) -> HermitianOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        HermitianOperator::new(m).expect("projector is hermitian by construction")
    }
}

/// A d x d complex matrix constrained to be hermitian at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

const HERMITICITY_TOL: f64 = 1e-12;

impl HermitianOperator {
    /// Checks hermiticity within 1e-12 (relative to the largest entry)
    /// and stores the symmetrized matrix (A + A')/2.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.is_empty() {
            return Err(EvrepError::InvalidArgument(
                "hermitian operator must be square and non-empty".into(),
            ));
        }
        let adj = matrix.adjoint();
        let residual = (&matrix - &adj).camax();
        let scale = matrix.camax().max(1.0);
        if residual > HERMITICITY_TOL * scale {
            return Err(EvrepError::NotHermitian { residual });
        }
        let matrix = (matrix + adj) * C64::new(0.5, 0.0);
        Ok(HermitianOperator { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// Trace; the imaginary part is zero for a hermitian matrix.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Real expectation value <psi|A|psi>.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(EvrepError::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        let v = psi.amplitudes();
        Ok((v.adjoint() * &self.matrix * v)[(0, 0)].re)
    }

    /// Spectral decomposition: eigenvalues ascending, matching
    /// eigenvector columns.
    pub fn eigh(&self) -> (DVector<f64>, DMatrix<C64>) {
        let se = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
        let eigenvalues = DVector::from_iterator(
            self.dim(),
            order.iter().map(|&i| se.eigenvalues[i]),
        );
        let eigenvectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&i| se.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        (eigenvalues, eigenvectors)
    }

    pub fn lambda_min(&self) -> f64 {
        let (evals, _) = self.eigh();
        evals[0]
    }

    /// Apply a real function to the spectrum: f(A) = V f(D) V'.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let (evals, vecs) = self.eigh();
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            evals.iter().map(|&l| C64::new(f(l), 0.0)),
        ));
        let m = &vecs * d * vecs.adjoint();
        HermitianOperator::new(m).expect("spectral map of a hermitian matrix is hermitian")
    }

    pub fn scaled(&self, factor: f64) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix * C64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &other.matrix,
        }
    }

    /// Real trace of the product Tr[A B] of two hermitian operators.
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(EvrepError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        // Tr[A B] = sum_ij A_ij B_ji; real since both are hermitian.
        let mut t = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                t += self.matrix[(i, j)] * other.matrix[(j, i)];
            }
        }
        Ok(t.re)
    }

    /// The commutator [A, B]; anti-hermitian, returned as a raw matrix.
    pub fn commutator(&self, other: &HermitianOperator) -> DMatrix<C64> {
        &self.matrix * &other.matrix - &other.matrix * &self.matrix
    }

    pub fn max_norm(&self) -> f64 {
        self.matrix.camax()
    }
}

/// A d x d unitary rotation matrix U = exp(-i angle axis . s).
#[derive(Debug, Clone)]
pub struct RotationOperator {
    matrix: DMatrix<C64>,
}

impl RotationOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim == 0 {
            return Err(EvrepError::InvalidArgument(
                "rotation operator must be square and non-empty".into(),
            ));
        }
        let residual = (&matrix * matrix.adjoint() - DMatrix::<C64>::identity(dim, dim)).camax();
        if residual > 1e-10 {
            return Err(EvrepError::InvalidArgument(format!(
                "matrix is not unitary: |U U' - E| = {residual:.3e}"
            )));
        }
        let det = matrix.determinant().norm();
        if (det - 1.0).abs() > 1e-10 {
            return Err(EvrepError::InvalidArgument(format!(
                "matrix determinant has modulus {det}, expected 1"
            )));
        }
        Ok(RotationOperator { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(EvrepError::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        StateVector::new(&self.matrix * psi.amplitudes())
    }

    /// Conjugation U A U'.
    pub fn conjugate(&self, op: &HermitianOperator) -> Result<HermitianOperator> {
        if op.dim() != self.dim() {
            return Err(EvrepError::DimensionMismatch {
                expected: self.dim(),
                got: op.dim(),
            });
        }
        HermitianOperator::new(&self.matrix * op.matrix() * self.matrix.adjoint())
    }
}

/// Spin operators (s_x, s_y, s_z) in the |s-k, n_z> basis.
///
/// s_z is diagonal with entries s, s-1, ..., -s; the transverse
/// components follow from the ladder operators.
pub fn spin_operators(two_s: TwoS) -> (HermitianOperator, HermitianOperator, HermitianOperator) {
    let d = two_s.dim();
    let s = two_s.spin();

    let mut sz = DMatrix::<C64>::zeros(d, d);
    for k in 0..d {
        sz[(k, k)] = C64::new(s - k as f64, 0.0);
    }

    // s_plus maps |m> to sqrt(s(s+1) - m(m+1)) |m+1>, i.e. index k to k-1.
    let mut sp = DMatrix::<C64>::zeros(d, d);
    for k in 1..d {
        let m = s - k as f64;
        sp[(k - 1, k)] = C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let sm = sp.adjoint();

    let sx = (&sp + &sm) * C64::new(0.5, 0.0);
    let sy = (&sp - &sm) * C64::new(0.0, -0.5);

    (
        HermitianOperator::new(sx).expect("s_x is hermitian"),
        HermitianOperator::new(sy).expect("s_y is hermitian"),
        HermitianOperator::new(sz).expect("s_z is hermitian"),
    )
}

/// The component axis . s of the spin operator along a unit vector.
pub fn spin_along(two_s: TwoS, axis: [f64; 3]) -> Result<HermitianOperator> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(EvrepError::InvalidArgument(format!(
            "axis must be a unit vector (norm = {norm})"
        )));
    }
    let (sx, sy, sz) = spin_operators(two_s);
    Ok(sx.scaled(axis[0]).add(&sy.scaled(axis[1])).add(&sz.scaled(axis[2])))
}

/// U = exp(-i angle axis . s), via spectral decomposition of the
/// hermitian generator.
pub fn rotation_operator(two_s: TwoS, axis: [f64; 3], angle: f64) -> Result<RotationOperator> {
    let generator = spin_along(two_s, axis)?;
    let (evals, vecs) = generator.eigh();
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        generator.dim(),
        evals.iter().map(|&l| C64::from_polar(1.0, -angle * l)),
    ));
    RotationOperator::new(&vecs * phases * vecs.adjoint())
}

/// Square roots of the binomial coefficients C(2s, k), k = 0..2s.
///
/// Log-domain accumulation past two_s = 60 keeps the intermediate
/// products bounded for large spins.
fn sqrt_binomials(two_s: u32) -> Vec<f64> {
    let n = two_s as usize;
    let mut out = Vec::with_capacity(n + 1);
    if two_s <= 60 {
        let mut c = 1.0f64;
        out.push(1.0);
        for k in 0..n {
            c *= (n - k) as f64 / (k + 1) as f64;
            out.push(c.sqrt());
        }
    } else {
        let mut log_c = 0.0f64;
        out.push(1.0);
        for k in 0..n {
            log_c += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
            out.push((0.5 * log_c).exp());
        }
    }
    out
}

/// The coherent spin state |n>: eigenstate of s . n with eigenvalue s.
///
/// Built from the stereographic expansion in z = tan(theta/2) e^{i phi}
/// away from the south pole, and from the rotation
/// exp(-i theta m(phi) . s) |s, n_z> near theta = pi where z diverges.
/// Both routes carry the same phase convention.
pub fn coherent_state(two_s: TwoS, dir: Direction) -> StateVector {
    match dir.stereo() {
        Some(z) => {
            let d = two_s.dim();
            let s = two_s.spin();
            let prefactor = (1.0 + z.norm_sqr()).powf(-s);
            let binom = sqrt_binomials(two_s.get());
            let mut amps = DVector::<C64>::zeros(d);
            let mut zk = C64::new(1.0, 0.0);
            for k in 0..d {
                amps[k] = C64::new(prefactor * binom[k], 0.0) * zk;
                zk *= z;
            }
            StateVector::new(amps).expect("d >= 2")
        }
        None => {
            let axis = [-dir.phi().sin(), dir.phi().cos(), 0.0];
            let u = rotation_operator(two_s, axis, dir.theta())
                .expect("axis is unit by construction");
            let mut north = DVector::<C64>::zeros(two_s.dim());
            north[0] = C64::new(1.0, 0.0);
            u.apply(&StateVector::new(north).expect("d >= 2"))
                .expect("dimensions agree")
        }
    }
}

/// Inner product <a|b>.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(EvrepError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok((a.amplitudes().adjoint() * b.amplitudes())[(0, 0)])
}

/// Rodrigues rotation of a 3-vector about a unit axis.
pub fn rotate_vector(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let dot = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
    let cross = [
        axis[1] * v[2] - axis[2] * v[1],
        axis[2] * v[0] - axis[0] * v[2],
        axis[0] * v[1] - axis[1] * v[0],
    ];
    [
        v[0] * c + cross[0] * s + axis[0] * dot * (1.0 - c),
        v[1] * c + cross[1] * s + axis[1] * dot * (1.0 - c),
        v[2] * c + cross[2] * s + axis[2] * dot * (1.0 - c),
    ]
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton iteration from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Max-norm residual of the coherent-state resolution of identity,
/// (2s+1)/(4pi) * integral |n><n| dn - E, evaluated by product
/// quadrature (Gauss-Legendre in cos theta, uniform in phi).
///
/// Exact (residual at rounding level) once grid_order >= 2s+1.
pub fn resolution_of_identity_residual(two_s: TwoS, grid_order: usize) -> f64 {
    let d = two_s.dim();
    let (nodes, weights) = gauss_legendre(grid_order.max(1));
    let n_phi = grid_order.max(1);
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;

    let mut acc = DMatrix::<C64>::zeros(d, d);
    for (&ct, &w) in nodes.iter().zip(&weights) {
        let theta = ct.clamp(-1.0, 1.0).acos();
        for j in 0..n_phi {
            let phi = dphi * j as f64;
            let dir = Direction::new(theta, phi).expect("grid angles in range");
            let psi = coherent_state(two_s, dir);
            acc += psi.amplitudes() * psi.amplitudes().adjoint() * C64::new(w * dphi, 0.0);
        }
    }
    acc *= C64::new(two_s.dim() as f64 / (4.0 * std::f64::consts::PI), 0.0);
    (acc - DMatrix::<C64>::identity(d, d)).camax()
}
