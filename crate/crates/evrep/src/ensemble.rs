//! Seeded random states and operators for simulations and tests.
//!
//! Mixed states are drawn from the Hilbert-Schmidt ensemble
//! (rho = X X' / Tr[X X'] with X complex Gaussian); pure states from
//! normalized Gaussian vectors.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spincore::{HermitianOperator, StateVector};
use crate::tomography::DensityMatrix;
use crate::C64;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let x = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let h = (&x + x.adjoint()) * C64::new(0.5, 0.0);
    HermitianOperator::new(h).expect("symmetrized matrix is hermitian")
}

pub fn random_pure(dim: usize, rng: &mut impl Rng) -> StateVector {
    let mut v = DVector::from_fn(dim, |_, _| gaussian_complex(rng));
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    StateVector::new(v).expect("dim >= 1")
}

pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let x = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let m = &x * x.adjoint();
    let trace = m.trace().re;
    let op = HermitianOperator::new(m / C64::new(trace, 0.0)).expect("X X' is hermitian");
    DensityMatrix::new(op).expect("Hilbert-Schmidt sample is a valid state")
}
