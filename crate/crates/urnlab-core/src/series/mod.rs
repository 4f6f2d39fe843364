//! Exact formal power series over the rationals.
//!
//! A [`FormalSeries`] is a truncated generalized series
//! `x^offset * (c_0 + c_1 x^step + c_2 x^{2 step} + ...)` with exact rational
//! coefficients and rational exponents. All arithmetic in this module is
//! exact: no floating point anywhere.
//!
//! The heavy lifting (multiplication, composition, reversion, rational powers
//! by the Miller recurrence) happens on plain dense coefficient vectors in
//! the compressed variable `x^step`; see [`dense`].

pub mod dense;
pub mod expand;

use crate::error::{Result, UrnError};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

pub use expand::{
    factorize_psi, i_series, k_series_at_one, psi_series_at_zero, singular_expansion,
    SingularExpansion,
};

/// Default truncation order used by callers that do not care.
pub const DEFAULT_ORDER: usize = 20;

/// Truncated series `x^offset * sum_k coeffs[k] x^{k*step}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    /// Display label of the variable.
    pub var: String,
    /// Exponent of the leading prefactor.
    pub offset: Rational64,
    /// Exponent gap between successive terms; strictly positive.
    pub step: Rational64,
    /// Exact coefficients; `coeffs.len()` is the truncation order.
    pub coeffs: Vec<BigRational>,
}

impl FormalSeries {
    pub fn new(var: &str, offset: Rational64, step: Rational64, coeffs: Vec<BigRational>) -> Self {
        assert!(step > Rational64::zero(), "series step must be positive");
        FormalSeries {
            var: var.into(),
            offset,
            step,
            coeffs: coeffs,
        }
    }

    /// Number of retained coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent of the k-th term.
    pub fn exponent(&self, k: usize) -> Rational64 {
        self.offset + self.step * Rational64::from_integer(k as i64)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Coefficient-wise equality up to a shared truncation order.
    pub fn agrees_to(&self, other: &FormalSeries, order: usize) -> bool {
        if self.offset != other.offset || self.step != other.step {
            return false;
        }
        (0..order).all(|k| self.coeff(k) == other.coeff(k))
    }

    /// Product; the factors must share the same step.
    pub fn mul(&self, other: &FormalSeries) -> FormalSeries {
        assert_eq!(self.step, other.step, "step mismatch in series product");
        let n = self.order().min(other.order());
        FormalSeries {
            var: self.var.clone(),
            offset: self.offset + other.offset,
            step: self.step,
            coeffs: dense::mul(&self.coeffs, &other.coeffs, n),
        }
    }

    /// Integer power (exponent >= 1).
    pub fn powi(&self, e: u32) -> FormalSeries {
        assert!(e >= 1);
        let n = self.order();
        FormalSeries {
            var: self.var.clone(),
            offset: self.offset * Rational64::from_integer(e as i64),
            step: self.step,
            coeffs: dense::pow(&self.coeffs, e as u64, n),
        }
    }

    /// Termwise derivative d/dx.
    pub fn derivative(&self) -> FormalSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = self.exponent(k);
                c * BigRational::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()))
            })
            .collect();
        FormalSeries {
            var: self.var.clone(),
            offset: self.offset - Rational64::from_integer(1),
            step: self.step,
            coeffs,
        }
    }

    /// Evaluation at a positive real point (fractional exponents allowed).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.exponent(k);
            let ef = *e.numer() as f64 / *e.denom() as f64;
            acc += c.to_f64().unwrap_or(f64::NAN) * x.powf(ef);
        }
        acc
    }

    /// Evaluation at a real point of either sign; requires nonnegative
    /// integer exponents.
    pub fn eval_f64_signed(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.exponent(k);
            assert!(
                e.is_integer() && !e.numer().is_negative(),
                "signed evaluation needs nonnegative integer exponents"
            );
            acc += c.to_f64().unwrap_or(f64::NAN) * x.powi(*e.numer() as i32);
        }
        acc
    }

    /// Evaluation at a complex point; requires integer exponents.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.exponent(k);
            if !e.is_integer() || e.numer().is_negative() {
                return Err(UrnError::OutOfRange(format!(
                    "complex evaluation needs nonnegative integer exponents, got {e}"
                )));
            }
            acc += c.to_f64().unwrap_or(f64::NAN) * z.powu(*e.numer() as u32);
        }
        Ok(acc)
    }

    /// JSON export: list of `[exponent-numerator, exponent-denominator,
    /// coeff-numerator, coeff-denominator]`, zero terms omitted.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let e = self.exponent(k);
                serde_json::json!([
                    *e.numer(),
                    *e.denom(),
                    c.numer().to_string(),
                    c.denom().to_string()
                ])
            })
            .collect();
        serde_json::json!({ "var": self.var, "terms": terms })
    }
}

fn fmt_rat(c: &BigRational) -> String {
    if c.denom() == &BigInt::from(1) {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_exp(e: Rational64) -> String {
    if e.is_integer() {
        format!("{}", e.numer())
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.exponent(k);
            let (sep, c_abs) = if first {
                ("", c.clone())
            } else if c.is_negative() {
                (" - ", -c.clone())
            } else {
                (" + ", c.clone())
            };
            write!(f, "{sep}")?;
            if e.is_zero() {
                write!(f, "{}", fmt_rat(&c_abs))?;
            } else if c_abs == BigRational::from(BigInt::from(1)) {
                if e == Rational64::from_integer(1) {
                    write!(f, "{}", self.var)?;
                } else {
                    write!(f, "{}^{}", self.var, fmt_exp(e))?;
                }
            } else if e == Rational64::from_integer(1) {
                write!(f, "{}·{}", fmt_rat(&c_abs), self.var)?;
            } else {
                write!(f, "{}·{}^{}", fmt_rat(&c_abs), self.var, fmt_exp(e))?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(
            f,
            " + O({}^{})",
            self.var,
            fmt_exp(self.exponent(self.coeffs.len()))
        )
    }
}
