//! Dense univariate polynomials in `ξ` with arbitrary-precision integer
//! coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficients indexed by power of `ξ`, never with a trailing zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct XiPoly {
    coeffs: Vec<BigInt>,
}

impl XiPoly {
    pub fn zero() -> Self {
        XiPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// `ξ^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        XiPoly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        XiPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    /// Multiplies by `ξ^k`.
    pub fn shift(&self, k: usize) -> XiPoly {
        if self.is_zero() {
            return XiPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        XiPoly { coeffs }
    }

    pub fn scale(&self, a: &BigInt) -> XiPoly {
        XiPoly::from_coeffs(self.coeffs.iter().map(|c| c * a).collect())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, xi: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * xi + BigRational::from_integer(c.clone())
        })
    }

    pub fn eval_f64(&self, xi: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * xi + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Coefficients low to high, joined by `;` (`0` for the zero polynomial).
    pub fn to_semicolon_list(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
    }

    pub fn from_semicolon_list(text: &str) -> Option<XiPoly> {
        let coeffs: Option<Vec<BigInt>> = text.split(';').map(|s| s.trim().parse().ok()).collect();
        coeffs.map(XiPoly::from_coeffs)
    }

    fn zip_with(&self, other: &XiPoly, f: impl Fn(BigInt, BigInt) -> BigInt) -> XiPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        XiPoly::from_coeffs((0..n).map(|k| f(self.coeff(k), other.coeff(k))).collect())
    }
}

impl Add for &XiPoly {
    type Output = XiPoly;
    fn add(self, rhs: &XiPoly) -> XiPoly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &XiPoly {
    type Output = XiPoly;
    fn sub(self, rhs: &XiPoly) -> XiPoly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &XiPoly {
    type Output = XiPoly;
    fn neg(self) -> XiPoly {
        XiPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &XiPoly {
    type Output = XiPoly;
    fn mul(self, rhs: &XiPoly) -> XiPoly {
        if self.is_zero() || rhs.is_zero() {
            return XiPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        XiPoly::from_coeffs(coeffs)
    }
}

impl fmt::Display for XiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "ξ")?,
                (1, false) => write!(f, "{mag}ξ")?,
                (_, true) => write!(f, "ξ^{k}")?,
                (_, false) => write!(f, "{mag}ξ^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn canonical_form_drops_trailing_zeros() {
        let p = XiPoly::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(XiPoly::from_i64(&[0, 0]).degree(), None);
        let diff = &p - &p;
        assert!(diff.is_zero());
    }

    #[test]
    fn arithmetic() {
        let a = XiPoly::from_i64(&[1, 1]);
        let b = XiPoly::from_i64(&[1, -1]);
        assert_eq!(&a * &b, XiPoly::from_i64(&[1, 0, -1]));
        assert_eq!(&a + &b, XiPoly::constant(2));
        assert_eq!(a.shift(2), XiPoly::from_i64(&[0, 0, 1, 1]));
        assert_eq!(-&a, XiPoly::from_i64(&[-1, -1]));
    }

    #[test]
    fn evaluation() {
        let q2 = XiPoly::from_i64(&[1, 1, 2, 1]);
        assert_eq!(q2.eval(&ratio(1, 2)), ratio(17, 8));
        assert_eq!(q2.eval_f64(0.5), 2.125);
    }

    #[test]
    fn text_forms() {
        let q2 = XiPoly::from_i64(&[1, 1, 2, 1]);
        assert_eq!(q2.to_string(), "1 + ξ + 2ξ^2 + ξ^3");
        assert_eq!(q2.to_semicolon_list(), "1;1;2;1");
        assert_eq!(XiPoly::from_semicolon_list("1;1;2;1"), Some(q2));
        assert_eq!(XiPoly::from_i64(&[0, -3]).to_string(), "-3ξ");
    }
}
