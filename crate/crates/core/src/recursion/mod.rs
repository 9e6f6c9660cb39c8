//! Exact arithmetic for the polynomial pair `(p_n, q_n)` in `ξ = 1/M`.
//!
//! The pair drives the deficiency vectors of the geometric chains:
//! `u(n) = q_n(ξ)` and `δu(n) = ξⁿ p_n(ξ)`.

mod genfunc;
mod growth;
mod pair;
mod poly;
mod series;

pub use genfunc::{
    check_identity_p, check_identity_q, check_repr_p, check_repr_p_shifted, check_repr_q,
    genfunc_p, genfunc_q, identity_p_mismatch, identity_q_mismatch, inverse_square_product,
    product_formula_check, repr_p_product_to_n, repr_p_product_to_n_minus_one, repr_q,
    CoefficientMismatch, IdentityCheck, ProductFormulaCheck, ReprCheck,
};
pub use growth::{cubic_threshold, growth_bounds_report, q_limit, GrowthReport, QLimit, MAX_EXPONENT};
pub use pair::{
    evaluate_pairs, matrix_product_pair, pair_sequence, rational_pairs, recursion_step, scaled_pairs, PolyPair,
    ScaledPairs,
};
pub use poly::XiPoly;
pub use series::FormalSeries;
