//! The pair recursion `p_{n+1} = p_n + q_n`, `q_{n+1} = q_n + ξ^{n+1} p_{n+1}`
//! from `(p_0, q_0) = (0, 1)`, symbolically and at exact rational `ξ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::XiPoly;
use crate::exact::pow;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyPair {
    pub n: usize,
    pub p: XiPoly,
    pub q: XiPoly,
}

impl PolyPair {
    /// `(p_0, q_0) = (0, 1)`.
    pub fn initial() -> Self {
        PolyPair {
            n: 0,
            p: XiPoly::zero(),
            q: XiPoly::one(),
        }
    }

    pub fn eval(&self, xi: &BigRational) -> (BigRational, BigRational) {
        (self.p.eval(xi), self.q.eval(xi))
    }
}

pub fn recursion_step(pair: &PolyPair) -> PolyPair {
    let n = pair.n + 1;
    let p = &pair.p + &pair.q;
    let q = &pair.q + &p.shift(n);
    PolyPair { n, p, q }
}

/// `(p_n, q_n)` for `n = 0..=n_max`.
pub fn pair_sequence(n_max: usize) -> Vec<PolyPair> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PolyPair::initial());
    for _ in 0..n_max {
        let next = recursion_step(out.last().expect("sequence is never empty"));
        out.push(next);
    }
    out
}

pub(crate) fn check_xi(xi: &BigRational) -> Result<()> {
    if *xi <= BigRational::zero() || *xi >= BigRational::one() {
        return Err(Error::InvalidParameter(format!("ξ must lie in (0, 1), got {xi}")));
    }
    Ok(())
}

type Mat2 = [[BigRational; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let entry = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// `(p_n(ξ), q_n(ξ))` as the product `M_n ⋯ M_1 (0, 1)ᵀ` with
/// `M_k = [[1, 1], [ξ^k, 1 + ξ^k]]`, computed by multiplying the matrices.
pub fn matrix_product_pair(n: usize, xi: &BigRational) -> Result<(BigRational, BigRational)> {
    if n == 0 {
        return Err(Error::InvalidParameter("matrix product needs n >= 1".into()));
    }
    check_xi(xi)?;
    let one = BigRational::one();
    let zero = BigRational::zero();
    let mut acc: Mat2 = [[one.clone(), zero.clone()], [zero, one.clone()]];
    let mut xi_k = one.clone();
    for _ in 1..=n {
        xi_k *= xi;
        let m: Mat2 = [[one.clone(), one.clone()], [xi_k.clone(), &one + &xi_k]];
        acc = mat_mul(&m, &acc);
    }
    let [[_, p], [_, q]] = acc;
    Ok((p, q))
}

/// Runs the recursion at exact `ξ` from state `(p, q)` at index `start`,
/// returning the states for indices `start..=n_max`.
pub fn rational_pairs(
    xi: &BigRational,
    start: usize,
    initial: (BigRational, BigRational),
    n_max: usize,
) -> Vec<(BigRational, BigRational)> {
    let mut out = Vec::with_capacity(n_max.saturating_sub(start) + 1);
    let mut xi_k = pow(xi, start as i32);
    out.push(initial);
    for _ in start..n_max {
        let (p, q) = out.last().expect("sequence is never empty");
        xi_k *= xi;
        let p_next = p + q;
        let q_next = q + &xi_k * &p_next;
        out.push((p_next, q_next));
    }
    out
}

/// `p_n(ξ)`, `q_n(ξ)` for `ξ = a/b` as integers over the common
/// denominator `b^{n(n+1)/2}`.
///
/// The recursion runs on integer numerators, so no gcd is taken until a
/// reduced rational is requested.
#[derive(Clone, Debug)]
pub struct ScaledPairs {
    pub a: BigInt,
    pub b: BigInt,
    /// `(P_n, Q_n)` with `p_n = P_n / D_n`, `q_n = Q_n / D_n`.
    pub numerators: Vec<(BigInt, BigInt)>,
    /// `D_n = b^{n(n+1)/2}`.
    pub denominators: Vec<BigInt>,
}

impl ScaledPairs {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// Reduced `p_n(ξ)`.
    pub fn p(&self, n: usize) -> BigRational {
        BigRational::new(self.numerators[n].0.clone(), self.denominators[n].clone())
    }

    /// Reduced `q_n(ξ)`.
    pub fn q(&self, n: usize) -> BigRational {
        BigRational::new(self.numerators[n].1.clone(), self.denominators[n].clone())
    }

    /// `p_n(ξ)` as a float without reducing first.
    pub fn p_f64(&self, n: usize) -> f64 {
        crate::exact::to_f64(&BigRational::new_raw(self.numerators[n].0.clone(), self.denominators[n].clone()))
    }

    /// `q_n(ξ)` as a float without reducing first.
    pub fn q_f64(&self, n: usize) -> f64 {
        crate::exact::to_f64(&BigRational::new_raw(self.numerators[n].1.clone(), self.denominators[n].clone()))
    }
}

pub fn scaled_pairs(xi: &BigRational, n_max: usize) -> ScaledPairs {
    let a = xi.numer().clone();
    let b = xi.denom().clone();
    let mut numerators = Vec::with_capacity(n_max + 1);
    let mut denominators = Vec::with_capacity(n_max + 1);
    numerators.push((BigInt::zero(), BigInt::one()));
    denominators.push(BigInt::one());
    let (mut a_k, mut b_k) = (BigInt::one(), BigInt::one());
    for n in 0..n_max {
        a_k *= &a;
        b_k *= &b;
        let (p, q) = &numerators[n];
        // p' = p + q; q' = q + ξ^{n+1} p', over the new denominator D·b^{n+1}.
        let sum = p + q;
        let q_next = q * &b_k + &a_k * &sum;
        let p_next = sum * &b_k;
        denominators.push(&denominators[n] * &b_k);
        numerators.push((p_next, q_next));
    }
    ScaledPairs {
        a,
        b,
        numerators,
        denominators,
    }
}

/// `(p_n(ξ), q_n(ξ))` for `n = 0..=n_max` at exact `ξ`, reduced.
pub fn evaluate_pairs(xi: &BigRational, n_max: usize) -> Vec<(BigRational, BigRational)> {
    let scaled = scaled_pairs(xi, n_max);
    (0..scaled.len()).map(|n| (scaled.p(n), scaled.q(n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn scaled_pairs_match_rational_recursion() {
        for xi in [ratio(1, 2), ratio(2, 3), ratio(3, 7)] {
            let direct = rational_pairs(&xi, 0, (BigRational::zero(), BigRational::one()), 25);
            assert_eq!(evaluate_pairs(&xi, 25), direct);
        }
    }

    #[test]
    fn first_rows() {
        let seq = pair_sequence(3);
        assert_eq!(seq[1].p, XiPoly::from_i64(&[1]));
        assert_eq!(seq[1].q, XiPoly::from_i64(&[1, 1]));
        assert_eq!(seq[2].p, XiPoly::from_i64(&[2, 1]));
        assert_eq!(seq[2].q, XiPoly::from_i64(&[1, 1, 2, 1]));
        assert_eq!(seq[3].p, XiPoly::from_i64(&[3, 2, 2, 1]));
        assert_eq!(seq[3].q, XiPoly::from_i64(&[1, 1, 2, 4, 2, 2, 1]));
    }

    #[test]
    fn matrix_product_examples() {
        let half = ratio(1, 2);
        assert_eq!(matrix_product_pair(1, &half).unwrap(), (ratio(1, 1), ratio(3, 2)));
        assert_eq!(matrix_product_pair(2, &half).unwrap(), (ratio(5, 2), ratio(17, 8)));
        assert!(matrix_product_pair(0, &half).is_err());
        assert!(matrix_product_pair(2, &ratio(1, 1)).is_err());
    }

    #[test]
    fn rational_pairs_match_symbolic() {
        let xi = ratio(2, 5);
        let seq = pair_sequence(12);
        let values = evaluate_pairs(&xi, 12);
        for (pair, (p, q)) in seq.iter().zip(&values) {
            assert_eq!(&pair.p.eval(&xi), p);
            assert_eq!(&pair.q.eval(&xi), q);
        }
    }
}
