//! Property-based invariants over randomized inputs.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use proptest::prelude::*;

use evrep::ensemble::{random_hermitian, seeded_rng};
use evrep::quorum::{DirectionScheme, Quorum};
use evrep::spincore::{coherent_state, overlap, spin_along, Direction, TwoS};
use evrep::symbols::{
    lower_symbol, reconstruct_from_lower, reconstruct_from_upper, upper_symbol, SymbolVector,
    Variance,
};
use evrep::tomography::{exact_probabilities, sample_counts, DensityMatrix, ProbabilityVector};

fn quorum(two_s: u32) -> Arc<Quorum> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Quorum>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(two_s)
        .or_insert_with(|| {
            Arc::new(Quorum::build(DirectionScheme::standard(TwoS::new(two_s).unwrap())).unwrap())
        })
        .clone()
}

fn direction() -> impl Strategy<Value = Direction> {
    // Uniform on the sphere, poles included through cos(theta).
    (-1.0f64..=1.0, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(c, phi)| Direction::new(c.acos(), phi).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_law_holds_everywhere(two_s in 1u32..=8, a in direction(), b in direction()) {
        let two_s = TwoS::new(two_s).unwrap();
        let (pa, pb) = (coherent_state(two_s, a), coherent_state(two_s, b));
        let got = overlap(&pa, &pb).unwrap().norm_sqr();
        let want = ((1.0 + a.dot(b)) / 2.0).powi(two_s.get() as i32);
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_is_extremal_eigenstate(two_s in 1u32..=8, dir in direction()) {
        let two_s = TwoS::new(two_s).unwrap();
        let psi = coherent_state(two_s, dir);
        let sn = spin_along(two_s, dir.unit_vector()).unwrap();
        let expect = sn.expectation(&psi).unwrap();
        prop_assert!((expect - two_s.spin()).abs() < 1e-12);
    }

    #[test]
    fn symbols_are_linear(two_s in 1u32..=4, seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let q = quorum(two_s);
        let mut rng = seeded_rng(seed);
        let x = random_hermitian(q.two_s().dim(), &mut rng);
        let y = random_hermitian(q.two_s().dim(), &mut rng);
        let combo = x.scaled(a).add(&y.scaled(b));
        for (sym, sx, sy) in [
            (lower_symbol(&q, &combo).unwrap(), lower_symbol(&q, &x).unwrap(), lower_symbol(&q, &y).unwrap()),
            (upper_symbol(&q, &combo).unwrap(), upper_symbol(&q, &x).unwrap(), upper_symbol(&q, &y).unwrap()),
        ] {
            let direct = sx.values() * a + sy.values() * b;
            prop_assert!((sym.values() - direct).amax() < 1e-8);
        }
    }

    #[test]
    fn round_trip_through_either_symbol(two_s in 1u32..=6, seed in 0u64..1000) {
        let q = quorum(two_s);
        let x = random_hermitian(q.two_s().dim(), &mut seeded_rng(seed));
        let from_lower = reconstruct_from_lower(&q, &lower_symbol(&q, &x).unwrap()).unwrap();
        let from_upper = reconstruct_from_upper(&q, &upper_symbol(&q, &x).unwrap()).unwrap();
        prop_assert!(from_lower.sub(&x).max_norm() < 1e-9);
        prop_assert!(from_upper.sub(&x).max_norm() < 1e-9);
    }

    #[test]
    fn metric_round_trip_is_identity(two_s in 1u32..=5, values in proptest::collection::vec(-5.0f64..5.0, 1..50)) {
        let q = quorum(two_s);
        let n = q.len();
        let values: Vec<f64> = (0..n).map(|i| values[i % values.len()]).collect();
        let lower = SymbolVector::new(values.clone(), Variance::Lower).unwrap();
        let back = q.metric_lower(&q.metric_raise(&lower).unwrap()).unwrap();
        let diff = (back.values() - nalgebra::DVector::from_vec(values)).amax();
        prop_assert!(diff < 1e-8);
    }

    #[test]
    fn pure_state_probabilities_in_range(two_s in 1u32..=6, dir in direction()) {
        let q = quorum(two_s);
        let rho = DensityMatrix::pure(&coherent_state(q.two_s(), dir));
        let p = exact_probabilities(&q, &rho).unwrap();
        let sum: f64 = p.values().iter().sum();
        prop_assert!(p.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!(sum > 0.0 && sum < q.len() as f64);
    }

    #[test]
    fn sampling_is_reproducible_and_bounded(
        values in proptest::collection::vec(0.0f64..=1.0, 4..20),
        shots in 1u64..10_000,
        seed in 0u64..1000,
    ) {
        let p = ProbabilityVector::new(values, None).unwrap();
        let a = sample_counts(&p, shots, seed).unwrap();
        let b = sample_counts(&p, shots, seed).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert!(a.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn direction_unit_vector_round_trip(dir in direction()) {
        let back = Direction::from_unit_vector(dir.unit_vector()).unwrap();
        prop_assert!(dir.dot(back) > 1.0 - 1e-12);
    }
}
