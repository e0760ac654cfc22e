//! The two-sided symbol calculus: lower and upper symbols, operator
//! reconstruction from either symbol, and trace pairings.
//!
//! The lower symbol of A collects the expectations Tr[A Q_n] against the
//! quorum kernels; the upper symbol pairs against the dual kernels. The
//! two are related by the Gram metric and either one determines the
//! operator.

use nalgebra::DVector;

use crate::error::{EvrepError, Result};
use crate::quorum::Quorum;
use crate::spincore::HermitianOperator;

/// Which kernel family a symbol was taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    /// Covariant: paired with the quorum kernels Q_n (probabilities live here).
    Lower,
    /// Contravariant: paired with the dual kernels.
    Upper,
}

/// N_s real numbers tagged with their variance.
///
/// The tag prevents silently mixing the two symbol types in pairings;
/// for well-conditioned schemes the numbers can look deceptively alike.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector {
    values: DVector<f64>,
    variance: Variance,
}

impl SymbolVector {
    pub fn new(values: Vec<f64>, variance: Variance) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EvrepError::InvalidArgument(
                "symbol values must be finite".into(),
            ));
        }
        Ok(SymbolVector {
            values: DVector::from_vec(values),
            variance,
        })
    }

    pub fn from_dvector(values: DVector<f64>, variance: Variance) -> Result<Self> {
        Self::new(values.iter().copied().collect(), variance)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }
}

fn check_operator_dim(q: &Quorum, a: &HermitianOperator) -> Result<()> {
    let d = q.two_s().dim();
    if a.dim() != d {
        return Err(EvrepError::DimensionMismatch {
            expected: d,
            got: a.dim(),
        });
    }
    Ok(())
}

fn check_symbol_len(q: &Quorum, sym: &SymbolVector) -> Result<()> {
    let n = q.two_s().quorum_size();
    if sym.len() != n {
        return Err(EvrepError::DimensionMismatch {
            expected: n,
            got: sym.len(),
        });
    }
    Ok(())
}

/// Lower symbol: values_n = Tr[A Q_n] = <n_n|A|n_n>.
pub fn lower_symbol(q: &Quorum, a: &HermitianOperator) -> Result<SymbolVector> {
    check_operator_dim(q, a)?;
    let values = q
        .kernels()
        .iter()
        .map(|k| a.trace_product(k))
        .collect::<Result<Vec<f64>>>()?;
    SymbolVector::new(values, Variance::Lower)
}

/// Upper symbol: values^n = Tr[A Q^n] against the dual kernels.
pub fn upper_symbol(q: &Quorum, a: &HermitianOperator) -> Result<SymbolVector> {
    check_operator_dim(q, a)?;
    let values = q
        .duals()
        .iter()
        .map(|k| a.trace_product(k))
        .collect::<Result<Vec<f64>>>()?;
    SymbolVector::new(values, Variance::Upper)
}

/// Invert a lower symbol: A = (1/(2s+1)) sum_n values_n Q^n.
pub fn reconstruct_from_lower(q: &Quorum, sym: &SymbolVector) -> Result<HermitianOperator> {
    check_symbol_len(q, sym)?;
    if sym.variance() != Variance::Lower {
        return Err(EvrepError::InvalidArgument(
            "reconstruct_from_lower requires a lower symbol".into(),
        ));
    }
    Ok(expand(q.duals(), sym, q.two_s().dim() as f64))
}

/// Invert an upper symbol: A = (1/(2s+1)) sum_n values^n Q_n.
pub fn reconstruct_from_upper(q: &Quorum, sym: &SymbolVector) -> Result<HermitianOperator> {
    check_symbol_len(q, sym)?;
    if sym.variance() != Variance::Upper {
        return Err(EvrepError::InvalidArgument(
            "reconstruct_from_upper requires an upper symbol".into(),
        ));
    }
    Ok(expand(q.kernels(), sym, q.two_s().dim() as f64))
}

fn expand(kernels: &[HermitianOperator], sym: &SymbolVector, dim: f64) -> HermitianOperator {
    let mut acc = HermitianOperator::zeros(kernels[0].dim());
    for (k, &c) in kernels.iter().zip(sym.values().iter()) {
        acc = acc.add(&k.scaled(c / dim));
    }
    acc
}

/// Tr[A B] from the symbols alone.
///
/// Mixed variance uses the bi-orthogonal pairing
/// (1/(2s+1)) sum_n a^n b_n; same-variance pairs contract through the
/// metric, (1/(2s+1)^2) sum G_{nn'} a^n b^{n'} for two upper symbols and
/// sum (G^-1)_{nn'} a_n b_{n'} for two lower ones. All routes agree with
/// the direct matrix trace.
pub fn trace_pairing(q: &Quorum, a: &SymbolVector, b: &SymbolVector) -> Result<f64> {
    check_symbol_len(q, a)?;
    check_symbol_len(q, b)?;
    let d = q.two_s().dim() as f64;
    let value = match (a.variance(), b.variance()) {
        (Variance::Lower, Variance::Upper) | (Variance::Upper, Variance::Lower) => {
            a.values().dot(b.values()) / d
        }
        (Variance::Upper, Variance::Upper) => {
            (a.values().transpose() * q.gram() * b.values())[(0, 0)] / (d * d)
        }
        (Variance::Lower, Variance::Lower) => {
            (a.values().transpose() * q.gram_inverse() * b.values())[(0, 0)]
        }
    };
    Ok(value)
}
