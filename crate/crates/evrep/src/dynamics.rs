//! Time evolution carried entirely by the probability vector.
//!
//! Von Neumann evolution of rho translates into a constant linear
//! system dP/dt = L P on the quorum probabilities, with
//! L_nm = (1/(2s+1)) Tr[Q_n (-i)[H, Q^m]] (hbar = 1). The generator is
//! integrated with a fixed-step classical Runge-Kutta scheme and checked
//! against exact unitary propagation.

use nalgebra::{DMatrix, DVector};

use crate::error::{EvrepError, Result};
use crate::quorum::Quorum;
use crate::spincore::HermitianOperator;
use crate::tomography::{exact_probabilities, DensityMatrix, ProbabilityVector};
use crate::C64;

/// The linear generator of probability-space dynamics for a fixed
/// Hamiltonian.
#[derive(Debug, Clone)]
pub struct EvolutionGenerator {
    matrix: DMatrix<f64>,
    hamiltonian: HermitianOperator,
}

impl EvolutionGenerator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    /// dP/dt at the given probability vector.
    pub fn apply(&self, p: &ProbabilityVector) -> Result<DVector<f64>> {
        if p.len() != self.matrix.nrows() {
            return Err(EvrepError::DimensionMismatch {
                expected: self.matrix.nrows(),
                got: p.len(),
            });
        }
        Ok(&self.matrix * DVector::from_column_slice(p.values()))
    }
}

/// Build L from the quorum and a Hamiltonian.
pub fn evolution_generator(q: &Quorum, hamiltonian: &HermitianOperator) -> Result<EvolutionGenerator> {
    let dim = q.two_s().dim();
    if hamiltonian.dim() != dim {
        return Err(EvrepError::DimensionMismatch {
            expected: dim,
            got: hamiltonian.dim(),
        });
    }
    let n = q.len();
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    for (m, dual) in q.duals().iter().enumerate() {
        // (-i)[H, Q^m] is hermitian since the commutator is anti-hermitian.
        let deriv = HermitianOperator::new(
            hamiltonian.commutator(dual) * C64::new(0.0, -1.0),
        )?;
        for (row, kernel) in q.kernels().iter().enumerate() {
            matrix[(row, m)] = kernel.trace_product(&deriv)? / dim as f64;
        }
    }
    Ok(EvolutionGenerator {
        matrix,
        hamiltonian: hamiltonian.clone(),
    })
}

/// One classical fourth-order Runge-Kutta step of dP/dt = L P.
fn rk4_step(l: &DMatrix<f64>, p: &DVector<f64>, dt: f64) -> DVector<f64> {
    let k1 = l * p;
    let k2 = l * (p + &k1 * (dt / 2.0));
    let k3 = l * (p + &k2 * (dt / 2.0));
    let k4 = l * (p + &k3 * dt);
    p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Integrate to time `t` with fixed step `dt` (the final step is
/// shortened to land exactly on `t`). Returns the endpoint.
pub fn propagate(
    g: &EvolutionGenerator,
    p0: &ProbabilityVector,
    t: f64,
    dt: f64,
) -> Result<ProbabilityVector> {
    let trajectory = propagate_trajectory(g, p0, t, dt)?;
    let (_, values) = trajectory.into_iter().last().expect("at least the initial row");
    ProbabilityVector::new(values, None)
}

/// Integrate and record every accepted step, starting with (0, p0).
pub fn propagate_trajectory(
    g: &EvolutionGenerator,
    p0: &ProbabilityVector,
    t: f64,
    dt: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if !t.is_finite() || !dt.is_finite() || t < 0.0 || dt <= 0.0 {
        return Err(EvrepError::InvalidArgument(format!(
            "invalid propagation times t = {t}, dt = {dt}"
        )));
    }
    if p0.len() != g.matrix.nrows() {
        return Err(EvrepError::DimensionMismatch {
            expected: g.matrix.nrows(),
            got: p0.len(),
        });
    }
    let mut p = DVector::from_column_slice(p0.values());
    let mut rows = vec![(0.0, p0.values().to_vec())];
    let mut time = 0.0;
    while time < t - 1e-15 * t.max(1.0) {
        let step = dt.min(t - time);
        p = rk4_step(&g.matrix, &p, step);
        time += step;
        rows.push((time, p.iter().copied().collect()));
    }
    Ok(rows)
}

/// Oracle: rho(t) = U rho0 U' with U = exp(-i H t) via spectral
/// decomposition, then exact quorum probabilities.
pub fn exact_propagate(
    q: &Quorum,
    rho0: &DensityMatrix,
    hamiltonian: &HermitianOperator,
    t: f64,
) -> Result<ProbabilityVector> {
    let dim = q.two_s().dim();
    if rho0.dim() != dim || hamiltonian.dim() != dim {
        return Err(EvrepError::DimensionMismatch {
            expected: dim,
            got: rho0.dim().max(hamiltonian.dim()),
        });
    }
    let (evals, vecs) = hamiltonian.eigh();
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        evals.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    ));
    let u = &vecs * phases * vecs.adjoint();
    let rho_t = HermitianOperator::new(&u * rho0.op().matrix() * u.adjoint())?;
    exact_probabilities(q, &DensityMatrix::raw(rho_t))
}
