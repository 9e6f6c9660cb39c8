//! Library results against closed forms and small dense solves done here.

use std::sync::Arc;

use num_rational::BigRational;

use resistnet::embedding::{dyadic_pair, solve_monopole, tree_harmonic_direct, tree_harmonic_energy_curve};
use resistnet::energy::energy;
use resistnet::exact::{format_rational, ratio};
use resistnet::graph::WeightedGraph;
use resistnet::recursion::{evaluate_pairs, matrix_product_pair, q_limit};
use resistnet::solver::SolverOptions;
use resistnet::spectral::{resolvent_delta, solve_ab_deficiency, NormalizationVerdict};

/// Solves a 3×3 system by Cramer's rule.
fn cramer(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][k] = b[i];
        }
        *xk = det(m) / d;
    }
    x
}

#[test]
fn resolvent_on_unit_path_matches_dense_solve() {
    let g = Arc::new(WeightedGraph::from_edges(3, 0, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap());
    let r = resolvent_delta(&g, 1, &SolverOptions::default()).unwrap();
    // I + Δ on the path 0-1-2
    let expected = cramer([[2.0, -1.0, 0.0], [-1.0, 3.0, -1.0], [0.0, -1.0, 2.0]], [0.0, 1.0, 0.0]);
    for (u, e) in r.vector.values().iter().zip(expected) {
        assert!((u - e).abs() < 1e-14, "{u} vs {e}");
    }
}

#[test]
fn monopole_on_half_line_matches_closed_form() {
    // Δw = −δ_0, w(N) = 0 on c(n−1, n) = 2ⁿ: δw(n) = 2⁻ⁿ, energy 1 − 2⁻ᴺ.
    let depth = 12;
    let map = dyadic_pair(depth).unwrap();
    let (w, _) = solve_monopole(map.target(), &SolverOptions::default()).unwrap();
    for n in 0..=depth {
        let expected: f64 = -((n + 1)..=depth).map(|k| 0.5f64.powi(k as i32)).sum::<f64>();
        assert!((w.value(n) - expected).abs() < 1e-13);
    }
    assert!((energy(&w) - (1.0 - 0.5f64.powi(depth as i32))).abs() < 1e-13);
}

#[test]
fn tree_harmonic_energy_matches_level_recursion() {
    // Level increments halve; the two halves give energy 1 / (1 − 2⁻ᴺ).
    let options = SolverOptions::default();
    for depth in 3..=9 {
        let h = tree_harmonic_direct(1.0, depth, &options).unwrap();
        let expected = 1.0 / (1.0 - 0.5f64.powi(depth as i32));
        assert!((h.energy - expected).abs() < 1e-10, "depth {depth}: {} vs {expected}", h.energy);
    }
    let curve = tree_harmonic_energy_curve(1.0, 3..=10, &options).unwrap();
    for r in &curve.increment_ratios {
        assert!((r - 0.5).abs() < 0.05, "{r}");
    }
}

#[test]
fn matrix_products_agree_with_recursion() {
    for xi in [ratio(1, 2), ratio(1, 3), ratio(5, 7)] {
        let pairs = evaluate_pairs(&xi, 10);
        for (n, pair) in pairs.iter().enumerate().skip(1) {
            assert_eq!(&matrix_product_pair(n, &xi).unwrap(), pair);
        }
    }
}

#[test]
fn q_limit_is_monotone_and_bounded() {
    let limit = q_limit(&ratio(1, 2), 1e-12, 10_000).unwrap();
    assert!(limit.monotone && limit.above_one && limit.within_bound);
    let q200 = resistnet::exact::to_f64(&evaluate_pairs(&ratio(1, 2), 200)[200].1);
    assert!((limit.value - q200).abs() < 1e-9 * q200);
}

#[test]
fn ab_normalization_is_flagged() {
    let report = solve_ab_deficiency(2.0, 3.0, 30).unwrap();
    assert_eq!(report.normalization, NormalizationVerdict::InconsistentAsWritten);
    // p₁ ≡ 1 at every ξ, so the two one-sided values sum to 2.
    let p1 = |xi: BigRational| evaluate_pairs(&xi, 1)[1].0.clone();
    assert_eq!(format_rational(&(p1(ratio(1, 2)) + p1(ratio(1, 3)))), "2");
    assert_eq!(report.normalization_value, "2");
}
