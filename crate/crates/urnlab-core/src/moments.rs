//! Closed-form and asymptotic moments of the black count.
//!
//! Three layers:
//! - universal asymptotic mean/variance slopes, exact rationals in the
//!   matrix entries;
//! - the binomial-ratio closed form for factorial moments of any order,
//!   assembled from the singular-expansion coefficients `a_k` and the Taylor
//!   coefficients of `K` at 1;
//! - for the 2-3 tree urn, the polynomial family `P_r` with
//!   `E[X_n^(falling r)] = P_r(n+2)` for `n >= 6r - 1`, generated by
//!   `exp(v L(x)) = sum_r x^r/r! P_r(v)` with `L = -log K(1+x)`.

use crate::error::{Result, UrnError};
use crate::series::dense::{self, Dense};
use crate::series::expand::{k_series_at_one, singular_expansion};
use crate::urn::{validate, UrnSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact linear growth rates of mean and variance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticMoments {
    /// `s (s+b) / (s+h)`
    pub mean_slope: BigRational,
    /// `s h^2 (s+a)(s+b) / ((s+h)^2 (s+2h))`
    pub variance_slope: BigRational,
}

/// Exact asymptotic slopes from the matrix entries.
pub fn asymptotic_moments(spec: &UrnSpec) -> Result<AsymptoticMoments> {
    validate(spec)?;
    let (a, b, s, h) = (spec.a, spec.b, spec.s, spec.h());
    let mean_slope = dense::rat_u(s * (s + b), s + h);
    let variance_slope = dense::rat_u(s * h * h * (s + a) * (s + b), 1)
        / dense::rat_u((s + h) * (s + h) * (s + 2 * h), 1);
    Ok(AsymptoticMoments {
        mean_slope,
        variance_slope,
    })
}

/// One moment polynomial `P_r`, valid from `validity_threshold` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPolynomial {
    pub r: u32,
    /// Coefficients by power of v; `coefficients[0] = 0` for r >= 1.
    pub coefficients: Vec<BigRational>,
    /// Smallest n for which `E[X_n^(falling r)] = P_r(n+2)` exactly.
    pub validity_threshold: u64,
}

impl MomentPolynomial {
    pub fn eval(&self, v: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * v + c;
        }
        acc
    }

    pub fn eval_at(&self, v: u64) -> BigRational {
        self.eval(&BigRational::from(BigInt::from(v)))
    }
}

/// The polynomials `P_1 .. P_{r_max}` for the 2-3 tree urn.
pub fn t23_moment_polynomials(r_max: u32) -> Vec<MomentPolynomial> {
    assert!(r_max >= 1);
    let n = r_max as usize + 1;
    let k = k_series_at_one(&UrnSpec::two_three_tree(), n);
    let l = {
        let mut v = dense::log_unit(&k.coeffs, n);
        for c in v.iter_mut() {
            *c = -c.clone();
        }
        v
    };
    // P_r coefficient of v^m is r!/m! [x^r] L^m
    let mut l_pow: Vec<Dense> = vec![dense::one(n)];
    for m in 1..=r_max as usize {
        l_pow.push(dense::mul(&l_pow[m - 1], &l, n));
    }
    let mut out = Vec::new();
    let mut r_fact = BigRational::one();
    for r in 1..=r_max {
        r_fact *= BigRational::from(BigInt::from(r));
        let mut coeffs = vec![BigRational::zero(); r as usize + 1];
        let mut m_fact = BigRational::one();
        for m in 1..=r as usize {
            m_fact *= BigRational::from(BigInt::from(m));
            coeffs[m] = &r_fact / &m_fact * &l_pow[m][r as usize];
        }
        out.push(MomentPolynomial {
            r,
            coefficients: coeffs,
            validity_threshold: 6 * r as u64 - 1,
        });
    }
    out
}

/// The factorial moment `E[X_n^(falling r)]` as an evaluable finite linear
/// combination of binomial ratios: each term contributes
/// `coef * prod_{i<n} (gamma + i)/(t0/s + i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormMoment {
    pub r: u32,
    /// `(coefficient, gamma)` pairs; gamma = (t0 - k h)/s + m.
    pub terms: Vec<(BigRational, BigRational)>,
    t0_over_s: BigRational,
}

impl ClosedFormMoment {
    /// Exact evaluation at time `n`.
    pub fn eval(&self, n: u64) -> BigRational {
        let mut acc = BigRational::zero();
        for (coef, gamma) in &self.terms {
            let mut prod = coef.clone();
            let mut top = gamma.clone();
            let mut bot = self.t0_over_s.clone();
            for _ in 0..n {
                if top.is_zero() {
                    prod = BigRational::zero();
                    break;
                }
                prod = prod * &top / &bot;
                top += BigRational::one();
                bot += BigRational::one();
            }
            acc += prod;
        }
        acc
    }

    pub fn eval_f64(&self, n: u64) -> f64 {
        use num_traits::ToPrimitive;
        self.eval(n).to_f64().unwrap_or(f64::NAN)
    }
}

/// Assembles the closed binomial form of the r-th factorial moment from the
/// singular expansion (`a_k`) and the K-series at 1.
///
/// In this normalization every coefficient is an exact rational for every
/// tenable urn: the only candidate irrationality, `s^{k h / s}` carried by
/// the k-th singular term, cancels against the matching power of `K(1) = 1/s`
/// once the moment is normalized by the total history count.
pub fn closed_form_factorial_moment(spec: &UrnSpec, r: u32) -> Result<ClosedFormMoment> {
    let d = validate(spec)?;
    let (s, h, t0) = (spec.s, d.h, d.t0);
    let t0_over_s = dense::rat_u(t0, s);
    if r == 0 {
        return Ok(ClosedFormMoment {
            r,
            terms: vec![(BigRational::one(), t0_over_s.clone())],
            t0_over_s,
        });
    }
    let n = r as usize + 1;
    let se = singular_expansion(spec, n)?;
    let k_ser = k_series_at_one(spec, n);

    // P(x) = 1 - (1+x)^h and S(x) = K(1+x) - 1/s, truncated to degree r
    let mut p_poly = dense::zeros(n);
    let mut binom = BigRational::one();
    for i in 1..n.min(h as usize + 1) {
        binom = binom * dense::rat_u(h - i as u64 + 1, i as u64);
        p_poly[i] = -binom.clone();
    }
    let mut s_poly = k_ser.coeffs.clone();
    s_poly[0] = BigRational::zero();

    let mut r_fact = BigRational::one();
    for i in 2..=r as u64 {
        r_fact *= BigRational::from(BigInt::from(i));
    }

    let mut terms = Vec::new();
    for k in 0..=r {
        let p_k = dense::pow(&p_poly, k as u64, n);
        let theta = dense::rat(k as i64 * h as i64 - t0 as i64, s as i64);
        for m in 0..=(r - k) {
            let s_m = dense::pow(&s_poly, m as u64, n);
            let c = dense::mul(&p_k, &s_m, n)[r as usize].clone();
            if c.is_zero() {
                continue;
            }
            // generalized binomial C(theta, m)
            let mut ch = BigRational::one();
            for i in 0..m {
                ch = ch * (&theta - BigRational::from(BigInt::from(i)))
                    / BigRational::from(BigInt::from(i + 1));
            }
            let mut s_pow_m = BigRational::one();
            for _ in 0..m {
                s_pow_m *= dense::rat_u(s, 1);
            }
            let coef = &r_fact * &se.a_k[k as usize] * s_pow_m * ch * c;
            if coef.is_zero() {
                continue;
            }
            let gamma = dense::rat(t0 as i64 - (k as i64) * h as i64, s as i64)
                + BigRational::from(BigInt::from(m));
            terms.push((coef, gamma));
        }
    }
    Ok(ClosedFormMoment {
        r,
        terms,
        t0_over_s,
    })
}

/// Exact variance of the 2-3 tree urn for `n >= 11`, by the moment-polynomial
/// algebra `V = P_2(n+2) + P_1(n+2) - P_1(n+2)^2`. Comes out linear:
/// `432 (n+2) / 637`.
pub fn variance_exact_t23(n: u64) -> Result<BigRational> {
    if n < 11 {
        return Err(UrnError::OutOfRange(format!(
            "exact polynomial variance requires n >= 11, got {n}"
        )));
    }
    let polys = t23_moment_polynomials(2);
    let v = BigRational::from(BigInt::from(n + 2));
    let p1 = polys[0].eval(&v);
    let p2 = polys[1].eval(&v);
    Ok(p2 + &p1 - &p1 * &p1)
}

/// CSV table comparing exact and closed-form factorial moments:
/// columns `n,r,exact,closed_form,difference`.
pub fn moment_table_csv(spec: &UrnSpec, r_max: u32, n_max: u64) -> Result<String> {
    let mut out = String::from("n,r,exact,closed_form,difference\n");
    let mut forms = Vec::new();
    for r in 1..=r_max {
        forms.push(closed_form_factorial_moment(spec, r)?);
    }
    for n in 0..=n_max {
        for r in 1..=r_max {
            let exact = crate::exact::exact_factorial_moment(spec, n, r)?;
            let cf = forms[(r - 1) as usize].eval(n);
            let diff = &exact - &cf;
            out.push_str(&format!("{n},{r},{exact},{cf},{diff}\n"));
        }
    }
    Ok(out)
}
