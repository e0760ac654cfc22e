//! Simulated Stern-Gerlach tomography: exact quorum probabilities,
//! finite-statistics sampling, linear reconstruction and probability
//! validation.
//!
//! The probabilities P_n = <n_n|rho|n_n> are genuine probabilities
//! (each in [0, 1]) but refer to incompatible measurements, so they do
//! not sum to one; normalization of rho instead constrains the weighted
//! sum (1/(2s+1)) sum_n Tr[Q^n] P_n = 1.

use rand_distr::{Binomial, Distribution};

use crate::error::{EvrepError, Result};
use crate::quorum::Quorum;
use crate::spincore::{HermitianOperator, StateVector};
use crate::symbols::{reconstruct_from_lower, SymbolVector, Variance};

/// A hermitian operator playing the role of a state.
///
/// `new` enforces the full state invariants (positive semidefinite,
/// unit trace); `raw` wraps any hermitian matrix, as produced by the
/// linear inversion of noisy frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
    normalized: bool,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let lambda_min = op.lambda_min();
        if lambda_min < -1e-10 {
            return Err(EvrepError::InvalidState { lambda_min });
        }
        let trace = op.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(EvrepError::InvalidArgument(format!(
                "density matrix trace = {trace}, expected 1"
            )));
        }
        Ok(DensityMatrix {
            op,
            normalized: true,
        })
    }

    /// Wrap a hermitian operator without state checks.
    pub fn raw(op: HermitianOperator) -> Self {
        DensityMatrix {
            op,
            normalized: false,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            op: HermitianOperator::identity(dim).scaled(1.0 / dim as f64),
            normalized: true,
        }
    }

    pub fn pure(psi: &StateVector) -> Self {
        DensityMatrix {
            op: psi.projector(),
            normalized: true,
        }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    pub fn lambda_min(&self) -> f64 {
        self.op.lambda_min()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// True when the wrapped operator satisfies the state invariants.
    pub fn is_physical(&self) -> bool {
        self.lambda_min() >= -1e-10 && (self.trace() - 1.0).abs() < 1e-10
    }
}

/// N_s probabilities (or sampled relative frequencies when `shots` is
/// set), one per quorum direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    values: Vec<f64>,
    shots: Option<u64>,
}

impl ProbabilityVector {
    pub fn new(values: Vec<f64>, shots: Option<u64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EvrepError::InvalidArgument(
                "probabilities must be finite".into(),
            ));
        }
        Ok(ProbabilityVector { values, shots })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    /// Exact mode: computed from a state, not sampled.
    pub fn is_exact(&self) -> bool {
        self.shots.is_none()
    }

    pub fn as_lower_symbol(&self) -> SymbolVector {
        SymbolVector::new(self.values.clone(), Variance::Lower)
            .expect("probability entries are finite")
    }
}

/// P_n = <n_n|rho|n_n> for every quorum direction.
///
/// Rejects operators that are not positive semidefinite; entries at
/// rounding distance outside [0, 1] are clamped.
pub fn exact_probabilities(q: &Quorum, rho: &DensityMatrix) -> Result<ProbabilityVector> {
    if rho.dim() != q.two_s().dim() {
        return Err(EvrepError::DimensionMismatch {
            expected: q.two_s().dim(),
            got: rho.dim(),
        });
    }
    let lambda_min = rho.lambda_min();
    if lambda_min < -1e-8 {
        return Err(EvrepError::InvalidState { lambda_min });
    }
    let values = q
        .kernels()
        .iter()
        .map(|k| {
            rho.op()
                .trace_product(k)
                .map(|p| p.clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    ProbabilityVector::new(values, None)
}

/// Simulate finite statistics: each direction draws an independent
/// Binomial(shots, P_n) count and reports the relative frequency.
/// Deterministic for a fixed seed.
pub fn sample_counts(p: &ProbabilityVector, shots: u64, seed: u64) -> Result<ProbabilityVector> {
    if shots == 0 {
        return Err(EvrepError::InvalidArgument("shots must be positive".into()));
    }
    if !p.is_exact() {
        return Err(EvrepError::InvalidArgument(
            "sample_counts expects exact-mode probabilities".into(),
        ));
    }
    let mut rng = crate::ensemble::seeded_rng(seed);
    let values = p
        .values()
        .iter()
        .map(|&prob| {
            if !(0.0..=1.0).contains(&prob) {
                return Err(EvrepError::InvalidArgument(format!(
                    "probability {prob} outside [0, 1]"
                )));
            }
            let dist = Binomial::new(shots, prob).expect("probability validated");
            Ok(dist.sample(&mut rng) as f64 / shots as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    ProbabilityVector::new(values, Some(shots))
}

/// Linear inversion: rho = (1/(2s+1)) sum_n P_n Q^n.
///
/// The estimate is returned raw; with sampled frequencies it is
/// generally neither normalized nor positive. See
/// [`ReconstructionDiagnostics`] and [`psd_project`].
pub fn reconstruct_density(q: &Quorum, p: &ProbabilityVector) -> Result<DensityMatrix> {
    if p.len() != q.len() {
        return Err(EvrepError::DimensionMismatch {
            expected: q.len(),
            got: p.len(),
        });
    }
    let op = reconstruct_from_lower(q, &p.as_lower_symbol())?;
    Ok(DensityMatrix::raw(op))
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ReconstructionDiagnostics {
    pub trace: f64,
    pub lambda_min: f64,
}

pub fn diagnostics(rho: &DensityMatrix) -> ReconstructionDiagnostics {
    ReconstructionDiagnostics {
        trace: rho.trace(),
        lambda_min: rho.lambda_min(),
    }
}

/// Outcome of the probability-vector sanity checks; never fails, only
/// reports.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ValidationReport {
    /// Every entry lies in [0, 1].
    pub in_range: bool,
    pub sum: f64,
    /// 0 < sum < (2s+1)^2, strictly.
    pub sum_in_bounds: bool,
    /// |(1/(2s+1)) sum_n Tr[Q^n] P_n - 1|.
    pub normalization_residual: f64,
    pub pass: bool,
}

pub fn validate_probabilities(q: &Quorum, p: &ProbabilityVector) -> ValidationReport {
    let in_range = p.values().iter().all(|&v| (0.0..=1.0).contains(&v));
    let sum: f64 = p.values().iter().sum();
    let n_s = q.len() as f64;
    let sum_in_bounds = sum > 0.0 && sum < n_s;
    let dim = q.two_s().dim() as f64;
    let weighted: f64 = q
        .duals()
        .iter()
        .zip(p.values())
        .map(|(dual, &prob)| dual.trace() * prob)
        .sum();
    let normalization_residual = (weighted / dim - 1.0).abs();
    ValidationReport {
        in_range,
        sum,
        sum_in_bounds,
        normalization_residual,
        pass: in_range && sum_in_bounds && normalization_residual < 1e-6,
    }
}

/// Divide by the trace. Idempotent; fails on vanishing trace.
pub fn normalize(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let trace = rho.trace();
    if trace <= 1e-12 {
        return Err(EvrepError::DegenerateState { trace });
    }
    DensityMatrix::new(rho.op().scaled(1.0 / trace)).map_err(|_| EvrepError::InvalidState {
        lambda_min: rho.lambda_min(),
    })
}

/// Clip negative eigenvalues to zero, then renormalize the trace to
/// one. Idempotent on valid states.
pub fn psd_project(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let clipped = rho.op().spectral_map(|l| l.max(0.0));
    let trace = clipped.trace();
    if trace <= 1e-12 {
        return Err(EvrepError::DegenerateState { trace });
    }
    DensityMatrix::new(clipped.scaled(1.0 / trace))
}

/// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(EvrepError::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let sqrt_rho = rho.op().spectral_map(|l| l.max(0.0).sqrt());
    let inner = HermitianOperator::new(
        sqrt_rho.matrix() * sigma.op().matrix() * sqrt_rho.matrix(),
    )?;
    let (evals, _) = inner.eigh();
    let root_trace: f64 = evals.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(root_trace * root_trace)
}
