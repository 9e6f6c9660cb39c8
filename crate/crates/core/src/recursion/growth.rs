//! Growth laws of `p_n(ξ)`, `q_n(ξ)` at a fixed exact `ξ ∈ (0, 1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::pair::{check_xi, evaluate_pairs};
use crate::exact::{format_rational, to_f64};
use crate::{Error, Result};

/// Above this value of `M = 1/ξ` the cubic bound `p_n ≤ n³` is known to hold.
pub fn cubic_threshold() -> f64 {
    ((2.0f64 / 3.0).sqrt() / std::f64::consts::E).exp()
}

/// Largest exponent tried by the polynomial-bound search.
pub const MAX_EXPONENT: u32 = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub xi: String,
    pub n_max: usize,
    /// `n ≤ p_n(ξ)` for all `1 ≤ n ≤ n_max`.
    pub lower_bound_holds: bool,
    pub lower_bound_first_failure: Option<usize>,
    /// Whether `1/ξ` exceeds [`cubic_threshold`].
    pub cubic_hypothesis: bool,
    /// `p_n(ξ) ≤ n³`, checked only under the hypothesis.
    pub cubic_bound_holds: Option<bool>,
    /// Smallest `m ≤ 12` with `p_n ≤ n^m` and `q_n ≤ (n+1)^m − n^m` for all `n ≤ n_max`.
    pub minimal_exponent: Option<u32>,
    /// `p_n = 1 + Σ_{x=1}^{n−1} q_x` exactly for all `1 ≤ n ≤ n_max`.
    pub telescoping_holds: bool,
    /// Least-squares slope of `p_n` against `n` over the second half of the run.
    pub fitted_slope: f64,
    /// `√ξ / (1 − √ξ)`, the scale the slope is compared with.
    pub reference_slope: f64,
}

fn int_pow(n: usize, m: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n).pow(m))
}

pub fn growth_bounds_report(xi: &BigRational, n_max: usize) -> Result<GrowthReport> {
    check_xi(xi)?;
    if n_max < 10 {
        return Err(Error::InvalidParameter(format!("n_max must be >= 10, got {n_max}")));
    }
    let pairs = evaluate_pairs(xi, n_max);

    let lower_bound_first_failure =
        (1..=n_max).find(|&n| pairs[n].0 < BigRational::from_integer(BigInt::from(n)));

    let xi_f = to_f64(xi);
    let cubic_hypothesis = 1.0 / xi_f > cubic_threshold();
    let cubic_bound_holds =
        cubic_hypothesis.then(|| (1..=n_max).all(|n| pairs[n].0 <= int_pow(n, 3)));

    let minimal_exponent = (1..=MAX_EXPONENT).find(|&m| {
        (1..=n_max).all(|n| {
            pairs[n].0 <= int_pow(n, m) && pairs[n].1 <= int_pow(n + 1, m) - int_pow(n, m)
        })
    });

    let mut running = BigRational::one();
    let mut telescoping_holds = true;
    for (p, q) in &pairs[1..=n_max] {
        if *p != running {
            telescoping_holds = false;
        }
        running += q;
    }

    let lo = n_max / 2;
    let pts: Vec<(f64, f64)> = (lo..=n_max).map(|n| (n as f64, to_f64(&pairs[n].0))).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let root = xi_f.sqrt();

    Ok(GrowthReport {
        xi: format_rational(xi),
        n_max,
        lower_bound_holds: lower_bound_first_failure.is_none(),
        lower_bound_first_failure,
        cubic_hypothesis,
        cubic_bound_holds,
        minimal_exponent,
        telescoping_holds,
        fitted_slope: sxy / sxx,
        reference_slope: root / (1.0 - root),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QLimit {
    pub xi: String,
    pub value: f64,
    pub iterations: usize,
    /// `q_{n+1} > q_n` at every step taken.
    pub monotone: bool,
    pub above_one: bool,
    /// `max_n ξⁿ p_n(ξ)²` over the run.
    pub max_a: f64,
    /// `1 + √(Aξ)/(1 − √ξ)`.
    pub upper_bound: f64,
    pub within_bound: bool,
}

/// Iterates until `q_{n+1} − q_n < tol · q_n` and returns `q_n` as a float.
pub fn q_limit(xi: &BigRational, tol: f64, cap: usize) -> Result<QLimit> {
    check_xi(xi)?;
    let mut p = BigRational::zero();
    let mut q = BigRational::one();
    let mut xi_n = BigRational::one();
    let mut monotone = true;
    let mut max_a = 0.0f64;
    for n in 0..cap {
        xi_n *= xi;
        let p_next = &p + &q;
        let q_next = &q + &xi_n * &p_next;
        let a = to_f64(&(&xi_n * &p_next * &p_next));
        max_a = max_a.max(a);
        if q_next <= q {
            monotone = false;
        }
        let step = to_f64(&(&q_next - &q));
        let q_f = to_f64(&q);
        p = p_next;
        q = q_next;
        if step < tol * q_f {
            let value = to_f64(&q);
            let xi_f = to_f64(xi);
            let upper_bound = 1.0 + (max_a * xi_f).sqrt() / (1.0 - xi_f.sqrt());
            return Ok(QLimit {
                xi: format_rational(xi),
                value,
                iterations: n + 1,
                monotone,
                above_one: value > 1.0,
                max_a,
                upper_bound,
                within_bound: value <= upper_bound,
            });
        }
    }
    Err(Error::IterationCap {
        cap,
        last_increment: to_f64(&(&xi_n * &p)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn threshold_value() {
        let t = cubic_threshold();
        assert!((t - 1.3504).abs() < 1e-4, "{t}");
    }

    #[test]
    fn report_at_one_half() {
        let r = growth_bounds_report(&ratio(1, 2), 40).unwrap();
        assert!(r.lower_bound_holds);
        assert!(r.cubic_hypothesis);
        assert_eq!(r.cubic_bound_holds, Some(true));
        assert!(r.telescoping_holds);
        assert!(r.minimal_exponent.is_some());
        assert!(growth_bounds_report(&ratio(1, 2), 9).is_err());
    }

    #[test]
    fn report_below_threshold_searches_exponent() {
        // M = 5/4 is below the cubic threshold.
        let r = growth_bounds_report(&ratio(4, 5), 30).unwrap();
        assert!(!r.cubic_hypothesis);
        assert_eq!(r.cubic_bound_holds, None);
        assert!(r.lower_bound_holds);
    }

    #[test]
    fn limit_near_zero() {
        let r = q_limit(&ratio(1, 100), 1e-15, 1000).unwrap();
        assert!(r.monotone && r.above_one && r.within_bound);
        assert!((r.value - 1.0102).abs() < 0.05);
    }

    #[test]
    fn cap_is_reported() {
        assert!(matches!(
            q_limit(&ratio(1, 2), 0.0, 5),
            Err(Error::IterationCap { cap: 5, .. })
        ));
    }
}
