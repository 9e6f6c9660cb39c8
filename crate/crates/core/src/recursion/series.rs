//! Power series in `X` truncated at order `K`, with coefficients in `ℤ[ξ]`.

use num_traits::One;

use super::poly::XiPoly;
use crate::{Error, Result};

/// Coefficients of `X^0 … X^K`; everything above `X^K` is discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    order: usize,
    coeffs: Vec<XiPoly>,
}

impl FormalSeries {
    /// Pads or truncates `coeffs` to order `K`.
    pub fn new(order: usize, mut coeffs: Vec<XiPoly>) -> Self {
        coeffs.resize(order + 1, XiPoly::zero());
        FormalSeries { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        Self::new(order, vec![XiPoly::one()])
    }

    /// `c_0 + c_1 X` for polynomial coefficients.
    pub fn linear(order: usize, c0: XiPoly, c1: XiPoly) -> Self {
        Self::new(order, vec![c0, c1])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[XiPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &XiPoly {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, value: XiPoly) {
        self.coeffs[k] = value;
    }

    /// Explicit re-truncation to a lower (or padding to a higher) order.
    pub fn truncate(&self, order: usize) -> FormalSeries {
        Self::new(order, self.coeffs.clone())
    }

    fn same_order(&self, other: &FormalSeries) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.same_order(other)?;
        Ok(FormalSeries {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.same_order(other)?;
        Ok(FormalSeries {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.same_order(other)?;
        let mut coeffs = vec![XiPoly::zero(); self.order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=self.order - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(FormalSeries { order: self.order, coeffs })
    }

    /// Multiplies every coefficient by a polynomial in `ξ`.
    pub fn scale(&self, factor: &XiPoly) -> FormalSeries {
        FormalSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiplies by `X^k`.
    pub fn shift_x(&self, k: usize) -> FormalSeries {
        let mut coeffs = vec![XiPoly::zero(); k.min(self.order + 1)];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(self.order, coeffs)
    }

    /// The substitution `X ↦ ξX`: coefficient `k` gains a factor `ξ^k`.
    pub fn substitute_xi_x(&self) -> FormalSeries {
        FormalSeries {
            order: self.order,
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| c.shift(k)).collect(),
        }
    }

    /// `1/f` for a series with constant term exactly `1`, by the recurrence
    /// `g_0 = 1`, `g_k = −Σ_{j=1..k} f_j g_{k−j}`.
    pub fn reciprocal(&self) -> Result<FormalSeries> {
        let c0 = &self.coeffs[0];
        if c0.degree() != Some(0) || !c0.constant_term().is_one() {
            return Err(Error::NonUnitSeries);
        }
        let mut g: Vec<XiPoly> = Vec::with_capacity(self.order + 1);
        g.push(XiPoly::one());
        for k in 1..=self.order {
            let mut acc = XiPoly::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !g[k - j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &g[k - j]);
                }
            }
            g.push(-&acc);
        }
        Ok(FormalSeries { order: self.order, coeffs: g })
    }

    /// Index of the first coefficient that differs, if any.
    pub fn first_difference(&self, other: &FormalSeries) -> Result<Option<usize>> {
        self.same_order(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).position(|(a, b)| a != b))
    }
}
