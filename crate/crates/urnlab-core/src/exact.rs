//! Exact ground-truth engine: the full law of the black count by dynamic
//! programming over history counts, in exact rational arithmetic.
//!
//! This module deliberately contains no closed-form cleverness. Every state
//! transition applies the replacement matrix once, so the results serve as an
//! independent oracle for all analytic modules. The state is the black count
//! alone: the balance condition makes the white count `t_n - x` deterministic.

use crate::error::{Result, UrnError};
use crate::urn::{history_count, UrnSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::io::Write;

/// Counts of length-`n` histories by final black count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryPolynomial {
    pub n: u64,
    /// black count -> number of histories ending there (all keys divisible by a)
    pub coeffs: BTreeMap<u64, BigInt>,
}

impl HistoryPolynomial {
    /// The time-zero polynomial: a single empty history at the initial state.
    pub fn initial(spec: &UrnSpec) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(spec.a0, BigInt::one());
        HistoryPolynomial { n: 0, coeffs }
    }

    pub fn total(&self) -> BigInt {
        self.coeffs.values().sum()
    }
}

/// Exact law of the black count at a fixed time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: u64,
    pub probs: BTreeMap<u64, BigRational>,
}

impl ExactDistribution {
    pub fn prob(&self, x: u64) -> BigRational {
        self.probs
            .get(&x)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Exact mean of the black count.
    pub fn mean(&self) -> BigRational {
        self.probs
            .iter()
            .map(|(x, p)| p * BigRational::from(BigInt::from(*x)))
            .sum()
    }

    /// Exact variance of the black count.
    pub fn variance(&self) -> BigRational {
        let m = self.mean();
        let m2: BigRational = self
            .probs
            .iter()
            .map(|(x, p)| p * BigRational::from(BigInt::from(x * x)))
            .sum();
        m2 - &m * &m
    }

    /// CSV export with columns `x,numerator,denominator,float`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,numerator,denominator,float\n");
        for (x, p) in &self.probs {
            out.push_str(&format!(
                "{},{},{},{}\n",
                x,
                p.numer(),
                p.denom(),
                p.to_f64().unwrap_or(f64::NAN)
            ));
        }
        out
    }

    /// JSON export mirroring the CSV columns; exact parts as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .probs
            .iter()
            .map(|(x, p)| {
                serde_json::json!({
                    "x": x,
                    "numerator": p.numer().to_string(),
                    "denominator": p.denom().to_string(),
                    "float": p.to_f64().unwrap_or(f64::NAN),
                })
            })
            .collect();
        serde_json::json!({ "n": self.n, "probs": entries })
    }

    /// Writes the CSV form to a writer.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// One application of the replacement matrix to every state.
///
/// A state `x` with `c` histories and `w = t_n - x` white balls contributes
/// `x * c` histories to `x - a` (a black ball was drawn) and `w * c` histories
/// to `x + b + s` (a white ball was drawn).
pub fn step(spec: &UrnSpec, hp: &HistoryPolynomial) -> Result<HistoryPolynomial> {
    let t_n = spec.population(hp.n);
    let mut next: BTreeMap<u64, BigInt> = BTreeMap::new();
    for (&x, c) in &hp.coeffs {
        debug_assert!(x <= t_n);
        let w = t_n - x;
        if x > 0 {
            if x < spec.a {
                return Err(UrnError::InternalTenabilityBreach { n: hp.n, x });
            }
            *next.entry(x - spec.a).or_insert_with(BigInt::zero) += c * BigInt::from(x);
        }
        if w > 0 {
            if w < spec.b {
                return Err(UrnError::InternalTenabilityBreach { n: hp.n, x });
            }
            *next.entry(x + spec.b + spec.s).or_insert_with(BigInt::zero) += c * BigInt::from(w);
        }
    }
    Ok(HistoryPolynomial {
        n: hp.n + 1,
        coeffs: next,
    })
}

/// History polynomial at time `n` (n-fold step from the initial point mass).
pub fn history_polynomial(spec: &UrnSpec, n: u64) -> Result<HistoryPolynomial> {
    let mut hp = HistoryPolynomial::initial(spec);
    for _ in 0..n {
        hp = step(spec, &hp)?;
    }
    Ok(hp)
}

/// Exact law of the black count at time `n`.
pub fn exact_distribution(spec: &UrnSpec, n: u64) -> Result<ExactDistribution> {
    let hp = history_polynomial(spec, n)?;
    let total = history_count(spec, n);
    debug_assert_eq!(hp.total(), total);
    let probs = hp
        .coeffs
        .into_iter()
        .map(|(x, c)| (x, BigRational::new(c, total.clone())))
        .collect();
    Ok(ExactDistribution { n, probs })
}

/// Exact falling-factorial moment `E[X_n (X_n - 1) ... (X_n - r + 1)]`.
pub fn exact_factorial_moment(spec: &UrnSpec, n: u64, r: u32) -> Result<BigRational> {
    let dist = exact_distribution(spec, n)?;
    let mut acc = BigRational::zero();
    for (&x, p) in &dist.probs {
        let mut falling = BigInt::one();
        let xi = BigInt::from(x);
        for k in 0..r {
            falling *= &xi - BigInt::from(k);
        }
        acc += p * BigRational::from(falling);
    }
    Ok(acc)
}

/// The probability generating function at time `n` as an exact polynomial:
/// pairs `(exponent, coefficient)` in increasing exponent order.
pub fn pgf_polynomial(spec: &UrnSpec, n: u64) -> Result<Vec<(u64, BigRational)>> {
    let dist = exact_distribution(spec, n)?;
    Ok(dist.probs.into_iter().collect())
}

/// Evaluates a PGF polynomial at a rational point.
pub fn eval_pgf(poly: &[(u64, BigRational)], u: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for (e, c) in poly {
        let mut p = BigRational::one();
        for _ in 0..*e {
            p *= u;
        }
        acc += c * p;
    }
    acc
}

/// Float-valued variant of the same DP for large horizons.
///
/// Approximate: probabilities are propagated in f64 and renormalization is
/// never applied, so tiny drift (~1e-14) accumulates. Adequate for the
/// rate-function and CLT comparisons at n up to a few thousand; use
/// [`exact_distribution`] wherever exactness matters.
pub fn float_distribution(spec: &UrnSpec, n: u64) -> Vec<(u64, f64)> {
    let mut probs: BTreeMap<u64, f64> = BTreeMap::new();
    probs.insert(spec.a0, 1.0);
    for m in 0..n {
        let t_n = spec.population(m) as f64;
        let mut next: BTreeMap<u64, f64> = BTreeMap::new();
        for (&x, &p) in &probs {
            let w = spec.population(m) - x;
            if x > 0 {
                *next.entry(x - spec.a).or_insert(0.0) += p * (x as f64) / t_n;
            }
            if w > 0 {
                *next.entry(x + spec.b + spec.s).or_insert(0.0) += p * (w as f64) / t_n;
            }
        }
        probs = next;
    }
    probs.into_iter().collect()
}

/// Mean and variance of a float distribution.
pub fn float_mean_variance(dist: &[(u64, f64)]) -> (f64, f64) {
    let mean: f64 = dist.iter().map(|(x, p)| *x as f64 * p).sum();
    let var: f64 = dist
        .iter()
        .map(|(x, p)| {
            let d = *x as f64 - mean;
            d * d * p
        })
        .sum();
    (mean, var)
}

/// Checks the coefficient transcription of the fundamental PDE at one step:
/// `h_{n+1}(u) = (s n + t0) u^{b+s} h_n(u) + (u^{1-a} - u^{b+s+1}) h_n'(u)`.
///
/// `u^{1-a} h_n'(u)` is a polynomial because every reachable x is divisible
/// by a; the function verifies that divisibility rather than assuming it.
pub fn pde_recurrence_holds(
    spec: &UrnSpec,
    hp: &HistoryPolynomial,
    next: &HistoryPolynomial,
) -> bool {
    let mut rhs: BTreeMap<u64, BigInt> = BTreeMap::new();
    let drift = BigInt::from(spec.s * hp.n + spec.t0());
    for (&x, c) in &hp.coeffs {
        // (s n + t0) u^{b+s} h_n(u)
        *rhs.entry(x + spec.b + spec.s).or_insert_with(BigInt::zero) += &drift * c;
        if x > 0 {
            // u^{1-a} h_n'(u): term x c u^{x-1} -> x c u^{x-a}
            if x < spec.a || x % spec.a != 0 {
                return false;
            }
            *rhs.entry(x - spec.a).or_insert_with(BigInt::zero) += c * BigInt::from(x);
            // -u^{b+s+1} h_n'(u): term -x c u^{x+b+s}
            let e = x + spec.b + spec.s;
            let entry = rhs.entry(e).or_insert_with(BigInt::zero);
            *entry -= c * BigInt::from(x);
        }
    }
    rhs.retain(|_, v| !v.is_zero());
    rhs == next.coeffs
}
