//! Convergence diagnostics for partial sums computed on a truncation.
//!
//! A truncated series can only suggest convergence. The verdict here looks at
//! the increments over three dyadic windows `[N/8, N/4)`, `[N/4, N/2)`,
//! `[N/2, N)` of an increment sequence of length `N`.

use serde::{Deserialize, Serialize};

/// Window sums must shrink by at least this factor for a convergent verdict.
pub const WINDOW_RATIO: f64 = 0.95;
/// Increments staying above this fraction of the first one mean divergence.
pub const DIVERGENCE_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TailVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostic {
    pub verdict: TailVerdict,
    pub window_sums: [f64; 3],
    pub window_ratios: [f64; 2],
    pub first_increment: f64,
    pub min_late_increment: f64,
    pub last_increment: f64,
}

fn window_ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        b / a
    }
}

/// Classifies the series whose terms are `increments` (absolute values used).
pub fn classify_increments(increments: &[f64]) -> TailDiagnostic {
    let n = increments.len();
    let abs: Vec<f64> = increments.iter().map(|v| v.abs()).collect();
    let window = |lo: usize, hi: usize| abs[lo.min(n)..hi.min(n)].iter().sum::<f64>();
    let window_sums = [window(n / 8, n / 4), window(n / 4, n / 2), window(n / 2, n)];
    let window_ratios = [
        window_ratio(window_sums[0], window_sums[1]),
        window_ratio(window_sums[1], window_sums[2]),
    ];
    let first_increment = abs.iter().copied().find(|&v| v > 0.0).unwrap_or(0.0);
    let min_late_increment = abs[n / 2..].iter().copied().fold(f64::INFINITY, f64::min);
    let last_increment = abs.last().copied().unwrap_or(0.0);

    let verdict = if n < 8 {
        TailVerdict::Inconclusive
    } else if window_ratios.iter().all(|&r| r < WINDOW_RATIO) {
        TailVerdict::Convergent
    } else if first_increment > 0.0 && min_late_increment >= DIVERGENCE_FLOOR * first_increment {
        TailVerdict::Divergent
    } else {
        TailVerdict::Inconclusive
    };
    TailDiagnostic {
        verdict,
        window_sums,
        window_ratios,
        first_increment,
        min_late_increment: if min_late_increment.is_finite() { min_late_increment } else { 0.0 },
        last_increment,
    }
}

/// Running sums of `terms`.
pub fn partial_sums(terms: &[f64]) -> Vec<f64> {
    terms
        .iter()
        .scan(0.0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_terms_converge() {
        let terms: Vec<f64> = (0..100).map(|n| 0.5f64.powi(n)).collect();
        assert_eq!(classify_increments(&terms).verdict, TailVerdict::Convergent);
    }

    #[test]
    fn constant_terms_diverge() {
        let terms = vec![1.0; 100];
        assert_eq!(classify_increments(&terms).verdict, TailVerdict::Divergent);
    }

    #[test]
    fn slowly_decaying_terms_diverge() {
        let terms: Vec<f64> = (1..200).map(|n| 1.0 / n as f64).collect();
        assert_eq!(classify_increments(&terms).verdict, TailVerdict::Divergent);
    }

    #[test]
    fn flat_tail_after_large_head_is_inconclusive() {
        let mut terms = vec![1e6];
        terms.extend(std::iter::repeat_n(1.0, 99));
        assert_eq!(classify_increments(&terms).verdict, TailVerdict::Inconclusive);
    }

    #[test]
    fn zero_terms_converge() {
        assert_eq!(classify_increments(&[0.0; 64]).verdict, TailVerdict::Convergent);
    }

    #[test]
    fn sums_accumulate() {
        assert_eq!(partial_sums(&[1.0, 2.0, 3.0]), vec![1.0, 3.0, 6.0]);
    }
}
