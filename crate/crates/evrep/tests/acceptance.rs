//! Acceptance suite: one test per release criterion, each printing a
//! single PASS/FAIL line with the measured figure of merit.
//!
//! Spin values are encoded as two_s = 2s throughout; the recurring
//! ranges are two_s in {1, 2, 3, 4, 6, 10} (s = 1/2 ... 5) and
//! two_s up to 20 (s = 10).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::Rng;

use evrep::dynamics::{evolution_generator, exact_propagate, propagate};
use evrep::ensemble::{random_density, random_hermitian, random_pure, seeded_rng};
use evrep::quorum::{condition_report, DirectionScheme, Quorum};
use evrep::spincore::{
    coherent_state, overlap, resolution_of_identity_residual, spin_along, Direction, TwoS,
};
use evrep::swcheck;
use evrep::symbols::{lower_symbol, trace_pairing, upper_symbol};
use evrep::tomography::{
    exact_probabilities, reconstruct_density, sample_counts, validate_probabilities, DensityMatrix,
};

const HALF_TO_FIVE: [u32; 6] = [1, 2, 3, 4, 6, 10];

fn quorum(two_s: u32) -> Arc<Quorum> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Quorum>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(two_s)
        .or_insert_with(|| {
            Arc::new(
                Quorum::build(DirectionScheme::standard(TwoS::new(two_s).unwrap()))
                    .expect("standard scheme is invertible"),
            )
        })
        .clone()
}

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

#[test]
fn criterion_01_round_trip_exactness() {
    let start = Instant::now();
    let mut rng = seeded_rng(101);
    let mut worst = 0.0f64;
    for &two_s in &HALF_TO_FIVE {
        let q = quorum(two_s);
        for _ in 0..50 {
            let rho = random_density(q.two_s().dim(), &mut rng);
            let p = exact_probabilities(&q, &rho).unwrap();
            let back = reconstruct_density(&q, &p).unwrap();
            worst = worst.max(back.op().sub(rho.op()).max_norm());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "01 round-trip exactness",
        worst < 1e-9 && elapsed < 30.0,
        &format!("worst residual {worst:.2e}, {elapsed:.1} s"),
    );
}

#[test]
fn criterion_02_biorthogonality() {
    let mut worst = 0.0f64;
    for &two_s in &HALF_TO_FIVE {
        let q = quorum(two_s);
        worst = worst.max(swcheck::biorthogonality_residual(
            q.kernels(),
            q.duals(),
            q.two_s().dim(),
        ));
    }
    verdict(
        "02 bi-orthogonality",
        worst < 1e-9,
        &format!("worst residual {worst:.2e}"),
    );
}

#[test]
fn criterion_03_metric_positive_definite() {
    let mut worst_cond = 0.0f64;
    let mut min_lambda = f64::INFINITY;
    let mut pass = true;
    for two_s in 1..=20u32 {
        let report = condition_report(&DirectionScheme::standard(TwoS::new(two_s).unwrap()));
        pass &= report.lambda_min > 0.0 && report.condition_number.is_finite();
        worst_cond = worst_cond.max(report.condition_number);
        min_lambda = min_lambda.min(report.lambda_min);
    }
    verdict(
        "03 metric positive definiteness",
        pass,
        &format!("min lambda_min {min_lambda:.2e}, max condition {worst_cond:.2e}"),
    );
}

#[test]
fn criterion_04_positivity_and_bounds() {
    let mut rng = seeded_rng(104);
    let mut pass = true;
    let mut checked = 0usize;
    while checked < 500 {
        let two_s = HALF_TO_FIVE[checked % HALF_TO_FIVE.len()];
        let q = quorum(two_s);
        let rho = if checked.is_multiple_of(2) {
            random_density(q.two_s().dim(), &mut rng)
        } else {
            DensityMatrix::pure(&random_pure(q.two_s().dim(), &mut rng))
        };
        let p = exact_probabilities(&q, &rho).unwrap();
        let sum: f64 = p.values().iter().sum();
        pass &= p.values().iter().all(|&v| (0.0..=1.0).contains(&v));
        pass &= sum > 0.0 && sum < q.len() as f64;
        checked += 1;
    }
    let mut mixed_residual = 0.0f64;
    for &two_s in &HALF_TO_FIVE {
        let q = quorum(two_s);
        let p = exact_probabilities(&q, &DensityMatrix::maximally_mixed(q.two_s().dim())).unwrap();
        let sum: f64 = p.values().iter().sum();
        mixed_residual = mixed_residual.max((sum - q.two_s().dim() as f64).abs());
    }
    verdict(
        "04 positivity and bounds",
        pass && mixed_residual < 1e-10,
        &format!("{checked} states, maximally mixed sum residual {mixed_residual:.2e}"),
    );
}

#[test]
fn criterion_05_normalization_constraint() {
    let mut rng = seeded_rng(105);
    let mut worst = 0.0f64;
    for &two_s in &HALF_TO_FIVE {
        let q = quorum(two_s);
        for i in 0..20 {
            let rho = if i % 2 == 0 {
                random_density(q.two_s().dim(), &mut rng)
            } else {
                DensityMatrix::pure(&random_pure(q.two_s().dim(), &mut rng))
            };
            let p = exact_probabilities(&q, &rho).unwrap();
            let report = validate_probabilities(&q, &p);
            worst = worst.max(report.normalization_residual);
        }
    }
    verdict(
        "05 normalization constraint",
        worst < 1e-9,
        &format!("worst residual {worst:.2e}"),
    );
}

#[test]
fn criterion_06_trace_pairing_consistency() {
    let mut rng = seeded_rng(106);
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    while pairs < 100 {
        let two_s = (pairs % 6 + 1) as u32;
        let q = quorum(two_s);
        let dim = q.two_s().dim();
        let a = random_hermitian(dim, &mut rng);
        let b = random_hermitian(dim, &mut rng);
        let direct = a.trace_product(&b).unwrap();
        let (alo, aup) = (lower_symbol(&q, &a).unwrap(), upper_symbol(&q, &a).unwrap());
        let (blo, bup) = (lower_symbol(&q, &b).unwrap(), upper_symbol(&q, &b).unwrap());
        for t in [
            trace_pairing(&q, &aup, &blo).unwrap(),
            trace_pairing(&q, &alo, &bup).unwrap(),
            trace_pairing(&q, &aup, &bup).unwrap(),
            trace_pairing(&q, &alo, &blo).unwrap(),
        ] {
            worst = worst.max((t - direct).abs());
        }
        pairs += 1;
    }
    verdict(
        "06 trace-pairing consistency",
        worst < 1e-9,
        &format!("{pairs} pairs, worst deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_07_sw_axioms() {
    let mut pass = true;
    let mut worst = 0.0f64;
    for two_s in 1..=10u32 {
        let q = quorum(two_s);
        let report = swcheck::run_all(&q).unwrap();
        pass &= report.all_pass;
        for check in &report.checks {
            worst = worst.max(check.residual / check.threshold * 1e-9);
        }
    }
    // Negative controls: a perturbed dual must trip the hermiticity
    // probe, and pairing the primal family against itself must break
    // bi-orthogonality.
    let q = quorum(4);
    let mut raw: Vec<_> = q.duals().iter().map(|d| d.matrix().clone()).collect();
    raw[0][(0, 1)] += evrep::C64::new(1e-4, 0.0);
    let controls_fail = swcheck::hermiticity_residual_raw(&raw) > 1e-10
        && swcheck::biorthogonality_residual(q.kernels(), q.kernels(), q.two_s().dim()) > 1e-9;
    verdict(
        "07 SW axioms and negative controls",
        pass && controls_fail,
        &format!("worst scaled residual {worst:.2e}, negative controls trip: {controls_fail}"),
    );
}

#[test]
fn criterion_08_coherent_state_identities() {
    let mut rng = seeded_rng(108);
    let mut eigen_worst = 0.0f64;
    let mut overlap_worst = 0.0f64;
    let mut quad_worst = 0.0f64;
    for two_s in 1..=20u32 {
        let two_s = TwoS::new(two_s).unwrap();
        let s = two_s.spin();
        for _ in 0..100 {
            let (a, b) = (random_direction(&mut rng), random_direction(&mut rng));
            let sn = spin_along(two_s, a.unit_vector()).unwrap();
            let psi = coherent_state(two_s, a);
            let chi = coherent_state(two_s, b);
            let residual = (sn.matrix() * psi.amplitudes()
                - psi.amplitudes() * evrep::C64::new(s, 0.0))
            .norm();
            eigen_worst = eigen_worst.max(residual);
            let got = overlap(&psi, &chi).unwrap().norm_sqr();
            let want = ((1.0 + a.dot(b)) / 2.0).powi(two_s.get() as i32);
            overlap_worst = overlap_worst.max((got - want).abs());
        }
        quad_worst = quad_worst.max(resolution_of_identity_residual(two_s, two_s.dim() + 1));
    }
    verdict(
        "08 coherent-state identities",
        eigen_worst < 1e-10 && overlap_worst < 1e-10 && quad_worst < 1e-10,
        &format!(
            "eigen {eigen_worst:.2e}, overlap law {overlap_worst:.2e}, quadrature {quad_worst:.2e}"
        ),
    );
}

fn random_direction(rng: &mut impl Rng) -> Direction {
    let cos_theta: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Direction::new(cos_theta.acos(), phi).unwrap()
}

#[test]
fn criterion_09_dynamics_equivalence() {
    let mut rng = seeded_rng(109);
    let mut worst = 0.0f64;
    for two_s in 1..=6u32 {
        let q = quorum(two_s);
        let dim = q.two_s().dim();
        let h = random_hermitian(dim, &mut rng);
        let rho = random_density(dim, &mut rng);
        let g = evolution_generator(&q, &h).unwrap();
        let p0 = exact_probabilities(&q, &rho).unwrap();
        // Max error over t in [0, 10], sampled each 0.5.
        for checkpoint in 1..=20 {
            let t = checkpoint as f64 * 0.5;
            let p = propagate(&g, &p0, t, 1e-3).unwrap();
            let exact = exact_propagate(&q, &rho, &h, t).unwrap();
            let err = p
                .values()
                .iter()
                .zip(exact.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            worst = worst.max(err);
        }
    }
    // Integrator order from endpoint-error halving at a coarse step.
    let q = quorum(4);
    let h = random_hermitian(5, &mut rng);
    let rho = random_density(5, &mut rng);
    let g = evolution_generator(&q, &h).unwrap();
    let p0 = exact_probabilities(&q, &rho).unwrap();
    let t = 2.0;
    let exact = exact_propagate(&q, &rho, &h, t).unwrap();
    let endpoint_err = |dt: f64| {
        let p = propagate(&g, &p0, t, dt).unwrap();
        p.values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    };
    let errors = [endpoint_err(0.2), endpoint_err(0.1), endpoint_err(0.05)];
    let orders = [
        (errors[0] / errors[1]).log2(),
        (errors[1] / errors[2]).log2(),
    ];
    let order = (orders[0] + orders[1]) / 2.0;
    verdict(
        "09 dynamics equivalence",
        worst < 1e-6 && (order - 4.0).abs() < 0.3,
        &format!("worst trajectory error {worst:.2e}, observed order {order:.2}"),
    );
}

#[test]
fn criterion_10_statistical_scaling() {
    let q = quorum(2);
    let shots_grid: [u64; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];
    let mut slopes: Vec<f64> = (0..20u64)
        .map(|seed| {
            let rho = random_density(q.two_s().dim(), &mut seeded_rng(1000 + seed));
            let p = exact_probabilities(&q, &rho).unwrap();
            let points: Vec<(f64, f64)> = shots_grid
                .iter()
                .map(|&shots| {
                    let f = sample_counts(&p, shots, seed).unwrap();
                    let est = reconstruct_density(&q, &f).unwrap();
                    let err = est.op().sub(rho.op()).max_norm();
                    ((shots as f64).ln(), err.ln())
                })
                .collect();
            least_squares_slope(&points)
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let median = (slopes[9] + slopes[10]) / 2.0;
    verdict(
        "10 statistical scaling",
        (median + 0.5).abs() < 0.15,
        &format!("median log-log slope {median:.3}"),
    );
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x / n, sy + y / n));
    let num: f64 = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    num / den
}
