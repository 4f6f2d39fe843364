//! High-precision real arithmetic helpers.
//!
//! Wraps MPFR floats (via `rug`) and provides tanh-sinh quadrature for the
//! analytic kernel. Working precision defaults to 50 significant decimal
//! digits and can be overridden through the `URNLAB_PRECISION` environment
//! variable.

use crate::error::{Result, UrnError};
use num_rational::BigRational;
use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

/// Decimal digits of working precision (env `URNLAB_PRECISION`, default 50).
pub fn precision_digits() -> u32 {
    std::env::var("URNLAB_PRECISION")
        .ok()
        .and_then(|v| v.parse::<u32>().ok())
        .map(|d| d.clamp(15, 5000))
        .unwrap_or(50)
}

/// Bits of mantissa for a digit count, with guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

/// Default working precision in bits.
pub fn precision_bits() -> u32 {
    bits_for_digits(precision_digits())
}

pub fn f64_to(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

pub fn u64_to(prec: u32, x: u64) -> Float {
    Float::with_val(prec, x)
}

/// Exact conversion of a big rational to a float at the given precision.
pub fn rational_to(prec: u32, r: &BigRational) -> Float {
    let q: rug::Rational = r
        .to_string()
        .parse()
        .expect("BigRational always prints a valid rational");
    Float::with_val(prec, q)
}

/// x^(p/q) for positive x.
pub fn pow_ratio(x: &Float, p: i64, q: u64) -> Float {
    let prec = x.prec();
    let e = Float::with_val(prec, p) / Float::with_val(prec, q);
    Float::with_val(prec, x.pow(&e))
}

/// Formats a float with `digits` significant decimal digits.
pub fn to_decimal_string(x: &Float, digits: usize) -> String {
    let (sign, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
    let sign = if sign { "-" } else { "" };
    match exp {
        Some(e) if mantissa != "0" => {
            let m = mantissa.trim_end_matches('0');
            let m = if m.is_empty() { "0" } else { m };
            if e >= 1 && (e as usize) <= m.len() {
                let (int, frac) = m.split_at(e as usize);
                if frac.is_empty() {
                    format!("{sign}{int}")
                } else {
                    format!("{sign}{int}.{frac}")
                }
            } else if e >= 1 && (e as usize) <= digits + 4 {
                let zeros = "0".repeat(e as usize - m.len());
                format!("{sign}{m}{zeros}")
            } else if e <= 0 && e > -6 {
                let zeros = "0".repeat((-e) as usize);
                format!("{sign}0.{zeros}{m}")
            } else {
                format!("{sign}0.{m}e{e}")
            }
        }
        _ => format!("{sign}0"),
    }
}

/// One tanh-sinh abscissa/weight pair on (-1, 1).
struct Node {
    x: Float,
    w: Float,
}

/// Tanh-sinh quadrature rule; nodes are cached per level so repeated
/// integrations at the same precision reuse the transcendental evaluations.
pub struct TanhSinh {
    prec: u32,
    /// levels[l] holds the nodes introduced at level l (odd multiples of the
    /// step for l > 0), positive abscissas only.
    levels: Vec<Vec<Node>>,
}

impl TanhSinh {
    pub fn new(prec: u32) -> Self {
        TanhSinh {
            prec,
            levels: Vec::new(),
        }
    }

    fn ensure_level(&mut self, level: usize) {
        use std::f64::consts::LN_10;
        while self.levels.len() <= level {
            let l = self.levels.len();
            let prec = self.prec;
            let half_pi = Float::with_val(prec, rug::float::Constant::Pi) / 2u32;
            // cutoff: weights below ~10^-(digits+15) contribute nothing
            let cut = -((prec as f64) * std::f64::consts::LN_2 / LN_10 + 15.0) * LN_10;
            let h = Float::with_val(prec, 1.0) >> (l as u32); // 2^-l
            let mut nodes = Vec::new();
            let mut j: u64 = if l == 0 { 0 } else { 1 };
            let stride = if l == 0 { 1 } else { 2 };
            loop {
                let t = Float::with_val(prec, j) * &h;
                let sinh_t = t.clone().sinh();
                let u = Float::with_val(prec, &half_pi * &sinh_t);
                let cosh_u = u.clone().cosh();
                // w = (pi/2) cosh(t) / cosh^2((pi/2) sinh t)
                let w = Float::with_val(prec, &half_pi * &t.clone().cosh())
                    / Float::with_val(prec, &cosh_u * &cosh_u);
                let x = u.tanh();
                let log_w = w.clone().ln().to_f64();
                nodes.push(Node { x, w });
                if log_w < cut && j > 2 {
                    break;
                }
                j += stride;
                if j > 100_000 {
                    break;
                }
            }
            self.levels.push(nodes);
        }
    }

    /// Integrates f over [a, b] to a target relative accuracy. The integrand
    /// must be finite on the closed interval.
    pub fn integrate<F: FnMut(&Float) -> Float>(
        &mut self,
        mut f: F,
        a: &Float,
        b: &Float,
        target_rel: f64,
        max_level: usize,
    ) -> Result<Float> {
        let prec = self.prec;
        let center = Float::with_val(prec, a + b) / 2u32;
        let radius = Float::with_val(prec, b - a) / 2u32;
        let mut sum = Float::with_val(prec, 0);
        let mut prev: Option<Float> = None;
        let mut estimate = f64::INFINITY;
        for level in 0..=max_level {
            self.ensure_level(level);
            let mut level_sum = Float::with_val(prec, 0);
            for node in &self.levels[level] {
                let dx = Float::with_val(prec, &node.x * &radius);
                if node.x.to_f64() == 0.0 {
                    level_sum += Float::with_val(prec, &node.w * &f(&center));
                } else {
                    let xp = Float::with_val(prec, &center + &dx);
                    let xm = Float::with_val(prec, &center - &dx);
                    let v = Float::with_val(prec, f(&xp) + f(&xm));
                    level_sum += Float::with_val(prec, &node.w * &v);
                }
            }
            // S_l = S_{l-1}/2 + 2^{-l} * (sum over the new nodes)
            sum = if level == 0 {
                level_sum
            } else {
                sum / 2u32 + (level_sum >> level as u32)
            };
            let value = Float::with_val(prec, &sum * &radius);
            if let Some(p) = prev {
                let diff = Float::with_val(prec, &value - &p).abs();
                let scale = value.clone().abs().max(&Float::with_val(prec, 1e-300));
                estimate = (diff / scale).to_f64();
                if estimate < target_rel && level >= 3 {
                    return Ok(value);
                }
            }
            prev = Some(value);
        }
        if estimate < target_rel * 100.0 {
            // converged to within two digits of the target; accept
            return Ok(prev.unwrap());
        }
        Err(UrnError::ToleranceNotMet {
            estimate,
            target: target_rel,
        })
    }
}
