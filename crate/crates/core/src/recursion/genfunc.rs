//! Generating functions `P(X) = Σ p_n Xⁿ`, `Q(X) = Σ q_n Xⁿ` and exact
//! coefficient-wise checks of the identities they satisfy.

use serde::{Deserialize, Serialize};

use super::pair::pair_sequence;
use super::poly::XiPoly;
use super::series::FormalSeries;
use crate::{Error, Result};

pub fn genfunc_p(order: usize) -> FormalSeries {
    FormalSeries::new(order, pair_sequence(order).into_iter().map(|pair| pair.p).collect())
}

pub fn genfunc_q(order: usize) -> FormalSeries {
    FormalSeries::new(order, pair_sequence(order).into_iter().map(|pair| pair.q).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub order: usize,
    pub holds: bool,
    pub first_mismatch: Option<usize>,
}

impl IdentityCheck {
    fn new(name: &str, order: usize, first_mismatch: Option<usize>) -> Self {
        IdentityCheck {
            name: name.to_string(),
            order,
            holds: first_mismatch.is_none(),
            first_mismatch,
        }
    }
}

/// First order at which `X(P + Q) = P` fails for the given series.
pub fn identity_p_mismatch(p: &FormalSeries, q: &FormalSeries) -> Result<Option<usize>> {
    let lhs = p.add(q)?.shift_x(1);
    lhs.first_difference(p)
}

/// First order at which `Q = 1 + XQ + P(ξX)` fails for the given series.
pub fn identity_q_mismatch(p: &FormalSeries, q: &FormalSeries) -> Result<Option<usize>> {
    let order = q.order();
    let rhs = FormalSeries::one(order)
        .add(&q.shift_x(1))?
        .add(&p.substitute_xi_x())?;
    q.first_difference(&rhs)
}

/// `X(P + Q) = P` up to `X^K`.
pub fn check_identity_p(order: usize) -> IdentityCheck {
    let mismatch = identity_p_mismatch(&genfunc_p(order), &genfunc_q(order))
        .expect("series share their order");
    IdentityCheck::new("X(P+Q) = P", order, mismatch)
}

/// `Q(X) = 1 + XQ(X) + P(ξX)` up to `X^K`.
pub fn check_identity_q(order: usize) -> IdentityCheck {
    let mismatch = identity_q_mismatch(&genfunc_p(order), &genfunc_q(order))
        .expect("series share their order");
    IdentityCheck::new("Q = 1 + XQ + P(xi X)", order, mismatch)
}

/// `∏_{k ∈ ks} (1 − ξ^k X)^{-2}` to order `K`.
pub fn inverse_square_product(order: usize, ks: impl IntoIterator<Item = usize>) -> FormalSeries {
    let mut denom = FormalSeries::one(order);
    for k in ks {
        let factor = FormalSeries::linear(order, XiPoly::one(), -&XiPoly::monomial(k));
        denom = denom.mul(&factor).expect("same order");
        denom = denom.mul(&factor).expect("same order");
    }
    denom.reciprocal().expect("constant term is 1")
}

/// `ξ^e Xⁿ ∏_{k=lo..=hi} (1 − ξ^k X)^{-2}`.
fn term(order: usize, xi_power: usize, n: usize, lo: usize, hi: usize) -> FormalSeries {
    if n > order {
        return FormalSeries::zero(order);
    }
    inverse_square_product(order, lo..=hi)
        .shift_x(n)
        .scale(&XiPoly::monomial(xi_power))
}

/// `Σ_{n=1..n_max} ξ^{n(n+1)/2} Xⁿ / ((1−X)²(1−ξX)²⋯(1−ξⁿX)²)`.
pub fn repr_p_product_to_n(order: usize, n_max: usize) -> FormalSeries {
    (1..=n_max).fold(FormalSeries::zero(order), |acc, n| {
        acc.add(&term(order, n * (n + 1) / 2, n, 0, n)).expect("same order")
    })
}

/// `Σ_{n=1..n_max} ξ^{n(n−1)/2} Xⁿ / ((1−X)²(1−ξX)²⋯(1−ξ^{n−1}X)²)`.
pub fn repr_p_product_to_n_minus_one(order: usize, n_max: usize) -> FormalSeries {
    (1..=n_max).fold(FormalSeries::zero(order), |acc, n| {
        acc.add(&term(order, n * (n - 1) / 2, n, 0, n - 1)).expect("same order")
    })
}

/// `(1/(1−X)) (1 + Σ_{n=1..n_max} ξ^{n(n+1)/2} Xⁿ / ((1−ξX)²⋯(1−ξⁿX)²))`.
pub fn repr_q(order: usize, n_max: usize) -> FormalSeries {
    let inner = (1..=n_max).fold(FormalSeries::one(order), |acc, n| {
        acc.add(&term(order, n * (n + 1) / 2, n, 1, n)).expect("same order")
    });
    let geometric = FormalSeries::linear(order, XiPoly::one(), XiPoly::constant(-1))
        .reciprocal()
        .expect("constant term is 1");
    geometric.mul(&inner).expect("same order")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMismatch {
    pub k: usize,
    pub expected: String,
    pub found: String,
    pub difference: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReprCheck {
    pub name: String,
    pub order: usize,
    pub terms: usize,
    pub holds: bool,
    pub mismatches: Vec<CoefficientMismatch>,
}

fn compare(name: &str, expected: &FormalSeries, found: &FormalSeries, terms: usize) -> ReprCheck {
    let mismatches: Vec<CoefficientMismatch> = expected
        .coeffs()
        .iter()
        .zip(found.coeffs())
        .enumerate()
        .filter(|(_, (e, f))| e != f)
        .map(|(k, (e, f))| CoefficientMismatch {
            k,
            expected: e.to_string(),
            found: f.to_string(),
            difference: (f - e).to_string(),
        })
        .collect();
    ReprCheck {
        name: name.to_string(),
        order: expected.order(),
        terms,
        holds: mismatches.is_empty(),
        mismatches,
    }
}

fn check_terms(order: usize, n_max: usize) -> Result<()> {
    if n_max < order {
        return Err(Error::InvalidParameter(format!(
            "need at least {order} series terms to fix coefficients up to X^{order}, got {n_max}"
        )));
    }
    // A term with n > K carries Xⁿ and cannot reach order K.
    debug_assert!(term(order, 0, order + 1, 0, 0).coeffs().iter().all(XiPoly::is_zero));
    Ok(())
}

/// Compares `P` against the product expansion with factors `(1−ξ^kX)²`, `k = 0..n`.
pub fn check_repr_p(order: usize, n_max: usize) -> Result<ReprCheck> {
    check_terms(order, n_max)?;
    Ok(compare(
        "P = sum xi^{n(n+1)/2} X^n / prod_{k=0..n} (1 - xi^k X)^2",
        &genfunc_p(order),
        &repr_p_product_to_n(order, n_max),
        n_max,
    ))
}

/// Compares `P` against the product expansion with factors `k = 0..n−1`.
pub fn check_repr_p_shifted(order: usize, n_max: usize) -> Result<ReprCheck> {
    check_terms(order, n_max)?;
    Ok(compare(
        "P = sum xi^{n(n-1)/2} X^n / prod_{k=0..n-1} (1 - xi^k X)^2",
        &genfunc_p(order),
        &repr_p_product_to_n_minus_one(order, n_max),
        n_max,
    ))
}

/// Compares `Q` against `(1/(1−X))(1 + Σ ξ^{n(n+1)/2} Xⁿ / ∏_{k=1..n}(1−ξ^kX)²)`.
pub fn check_repr_q(order: usize, n_max: usize) -> Result<ReprCheck> {
    check_terms(order, n_max)?;
    Ok(compare(
        "Q = (1/(1-X)) (1 + sum xi^{n(n+1)/2} X^n / prod_{k=1..n} (1 - xi^k X)^2)",
        &genfunc_q(order),
        &repr_q(order, n_max),
        n_max,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductFormulaCheck {
    pub xi: f64,
    pub x: f64,
    /// `∏_{k≥1} (1 − ξ^k X)`.
    pub product: f64,
    /// `exp(−ξX/(1−X))`.
    pub exponential: f64,
    pub difference: f64,
}

/// Numerically compares `∏_{k≥1}(1 − ξ^k X)` with `exp(−ξX/(1−X))`.
pub fn product_formula_check(xi: f64, x: f64) -> Result<ProductFormulaCheck> {
    if !(0.0 < xi && xi < 1.0) || !(x.abs() < 1.0) {
        return Err(Error::InvalidParameter("need 0 < ξ < 1 and |X| < 1".into()));
    }
    let mut product = 1.0;
    let mut xi_k = xi;
    while xi_k > f64::EPSILON * 1e-3 {
        product *= 1.0 - xi_k * x;
        xi_k *= xi;
    }
    let exponential = (-xi * x / (1.0 - x)).exp();
    Ok(ProductFormulaCheck {
        xi,
        x,
        product,
        exponential,
        difference: product - exponential,
    })
}
