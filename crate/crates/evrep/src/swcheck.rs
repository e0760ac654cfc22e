//! Numerical certification of the kernel-family axioms: hermiticity,
//! completeness, bi-orthogonality and rotation covariance, exposed as a
//! diagnostic suite over a built quorum.

use serde::{Deserialize, Serialize};

use crate::error::{EvrepError, Result};
use crate::quorum::Quorum;
use crate::spincore::{
    coherent_state, rotate_vector, rotation_operator, Direction, HermitianOperator,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(name: &str, residual: f64, threshold: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            residual,
            threshold,
            pass: residual < threshold,
        }
    }
}

/// Largest deviation from hermiticity over a family of raw matrices.
pub fn hermiticity_residual_raw(mats: &[nalgebra::DMatrix<crate::C64>]) -> f64 {
    mats.iter()
        .map(|m| (m - m.adjoint()).camax())
        .fold(0.0, f64::max)
}

/// Largest deviation from hermiticity over a kernel family.
pub fn max_nonhermiticity(ops: &[HermitianOperator]) -> f64 {
    ops.iter()
        .map(|op| (op.matrix() - op.matrix().adjoint()).camax())
        .fold(0.0, f64::max)
}

/// Hermiticity of both kernel families.
pub fn check_hermiticity(q: &Quorum) -> CheckReport {
    let residual = max_nonhermiticity(q.kernels()).max(max_nonhermiticity(q.duals()));
    CheckReport::new("hermiticity", residual, 1e-10)
}

/// Both resolutions of the identity, with the weights taken as the
/// symbols of the unity (the traces of the opposite family).
pub fn check_completeness(q: &Quorum) -> CheckReport {
    let dim = q.two_s().dim();
    let e = HermitianOperator::identity(dim);
    let mut by_duals = HermitianOperator::zeros(dim);
    let mut by_kernels = HermitianOperator::zeros(dim);
    let mut symbol_residual = 0.0f64;
    for (kernel, dual) in q.kernels().iter().zip(q.duals()) {
        by_duals = by_duals.add(&dual.scaled(kernel.trace() / dim as f64));
        by_kernels = by_kernels.add(&kernel.scaled(dual.trace() / dim as f64));
        // Lower symbol of unity is identically one.
        symbol_residual = symbol_residual.max((kernel.trace() - 1.0).abs());
    }
    let residual = by_duals
        .sub(&e)
        .max_norm()
        .max(by_kernels.sub(&e).max_norm())
        .max(symbol_residual);
    CheckReport::new("completeness", residual, 1e-9)
}

/// Residual of (1/(2s+1)) Tr[Q_n Q^n'] = delta over all index pairs.
pub fn biorthogonality_residual(
    kernels: &[HermitianOperator],
    duals: &[HermitianOperator],
    dim: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for (i, kernel) in kernels.iter().enumerate() {
        for (j, dual) in duals.iter().enumerate() {
            let t = kernel
                .trace_product(dual)
                .expect("families share the dimension")
                / dim as f64;
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((t - want).abs());
        }
    }
    worst
}

pub fn check_biorthogonality(q: &Quorum) -> CheckReport {
    let residual = biorthogonality_residual(q.kernels(), q.duals(), q.two_s().dim());
    CheckReport::new("biorthogonality", residual, 1e-9)
}

/// Covariance: U_R Q_n U_R' must equal the projector onto the coherent
/// state at the rotated direction R n_n.
///
/// The rotated direction generally lies outside the scheme; covariance
/// is a property of the kernels, not of the index set.
pub fn check_covariance(q: &Quorum, axis: [f64; 3], angle: f64) -> Result<CheckReport> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(EvrepError::InvalidArgument(format!(
            "axis must be a unit vector (norm = {norm})"
        )));
    }
    let u = rotation_operator(q.two_s(), axis, angle)?;
    let mut residual = 0.0f64;
    for (kernel, dir) in q.kernels().iter().zip(q.scheme().directions()) {
        let rotated_kernel = u.conjugate(kernel)?;
        let rotated_dir = Direction::from_unit_vector(rotate_vector(dir.unit_vector(), axis, angle))?;
        let target = coherent_state(q.two_s(), rotated_dir).projector();
        residual = residual.max(rotated_kernel.sub(&target).max_norm());
    }
    Ok(CheckReport::new("covariance", residual, 1e-9))
}

/// The z rotation by 2pi/(2s+1) maps the kernel set onto a permutation
/// of itself for cone-based schemes; returns the worst matching
/// residual.
pub fn rotation_permutation_residual(q: &Quorum) -> Result<f64> {
    let step = 2.0 * std::f64::consts::PI / q.two_s().dim() as f64;
    let u = rotation_operator(q.two_s(), [0.0, 0.0, 1.0], step)?;
    let mut worst = 0.0f64;
    for kernel in q.kernels() {
        let rotated = u.conjugate(kernel)?;
        let best = q
            .kernels()
            .iter()
            .map(|other| rotated.sub(other).max_norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Full diagnostic suite with a deterministic covariance probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwReport {
    pub two_s: u32,
    pub checks: Vec<CheckReport>,
    pub all_pass: bool,
}

pub fn run_all(q: &Quorum) -> Result<SwReport> {
    let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
    let mut checks = vec![
        check_hermiticity(q),
        check_completeness(q),
        check_biorthogonality(q),
        check_covariance(q, [inv_sqrt3, inv_sqrt3, inv_sqrt3], 0.83)?,
    ];
    let perm = rotation_permutation_residual(q)?;
    checks.push(CheckReport::new("rotation_permutation", perm, 1e-9));
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(SwReport {
        two_s: q.two_s().get(),
        checks,
        all_pass,
    })
}
