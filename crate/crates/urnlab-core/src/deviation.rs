//! Left-tail large deviations: the rate function
//! `R(xi) = max_{lambda in (0,1)} log(s lambda^xi K(lambda))` and the
//! extreme-deviation asymptotics for the all-white event.
//!
//! `K'` is obtained from the certified ODE
//! `K'(lambda) = (s lambda^{h-1} K(lambda) - lambda^{a-1}) / (1 - lambda^h)`
//! rather than by numeric differentiation; near lambda = 1 (where that
//! quotient cancels catastrophically) both K and K' switch to the exact
//! Taylor series, which is the solution of the same ODE.

use crate::analytic::rho;
use crate::error::{Result, UrnError};
use crate::hp::{self, TanhSinh};
use crate::moments::asymptotic_moments;
use crate::series::expand::k_series_at_one;
use crate::urn::{validate, UrnSpec};
use num_traits::ToPrimitive;
use rug::ops::Pow;
use rug::Float;

/// One point on the rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    /// Deviation level, in balls per step.
    pub xi: f64,
    /// The interior maximizer of `lambda^xi K(lambda)`.
    pub lambda0: f64,
    /// `R(xi)`, in nats per step.
    pub rate: f64,
}

/// Reusable high-precision evaluator of K and K'.
pub struct KEvaluator {
    spec: UrnSpec,
    prec: u32,
    ts: TanhSinh,
    series_deriv: Vec<rug::Float>,
    series_coeffs: Vec<rug::Float>,
}

const SERIES_RADIUS: f64 = 0.1;

impl KEvaluator {
    pub fn new(spec: &UrnSpec, prec: u32) -> Result<Self> {
        validate(spec)?;
        let digits = (prec as f64 * std::f64::consts::LN_2 / std::f64::consts::LN_10) as usize;
        let order = 2 * digits.max(30);
        let series = k_series_at_one(spec, order);
        let series_coeffs: Vec<Float> = series
            .coeffs
            .iter()
            .map(|c| hp::rational_to(prec, c))
            .collect();
        let series_deriv: Vec<Float> = series
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| hp::rational_to(prec, c) * Float::with_val(prec, j as u64))
            .collect();
        Ok(KEvaluator {
            spec: *spec,
            prec,
            ts: TanhSinh::new(prec),
            series_deriv,
            series_coeffs,
        })
    }

    fn horner(coeffs: &[Float], x: &Float, prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 0);
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn k(&mut self, lam: &Float) -> Result<Float> {
        let prec = self.prec;
        let l64 = lam.to_f64();
        if (1.0 - l64).abs() <= SERIES_RADIUS {
            let x = Float::with_val(prec, lam - 1u32);
            return Ok(Self::horner(&self.series_coeffs, &x, prec));
        }
        let (spec, h) = (self.spec, self.spec.h());
        let tau = hp::pow_ratio(&(Float::with_val(prec, 1) - lam), 1, h);
        let tail = crate::analytic::tail_integral_hp(&spec, &mut self.ts, &tau, prec)?;
        let one_minus_lh =
            Float::with_val(prec, 1) - Float::with_val(prec, lam.clone().pow(h as u32));
        Ok(tail * hp::pow_ratio(&one_minus_lh, -(spec.s as i64), h))
    }

    pub fn k_prime(&mut self, lam: &Float) -> Result<Float> {
        let prec = self.prec;
        let l64 = lam.to_f64();
        if (1.0 - l64).abs() <= SERIES_RADIUS {
            let x = Float::with_val(prec, lam - 1u32);
            return Ok(Self::horner(&self.series_deriv, &x, prec));
        }
        let (a, s, h) = (self.spec.a, self.spec.s, self.spec.h());
        let k = self.k(lam)?;
        let num =
            Float::with_val(prec, s) * Float::with_val(prec, lam.clone().pow(h as u32 - 1)) * k
                - Float::with_val(prec, lam.clone().pow(a as u32 - 1));
        let den = Float::with_val(prec, 1) - Float::with_val(prec, lam.clone().pow(h as u32));
        Ok(num / den)
    }

    /// `g(lambda) = lambda K'(lambda)/K(lambda) + xi`; the tilt equation.
    fn tilt(&mut self, lam: &Float, xi: &Float) -> Result<Float> {
        let k = self.k(lam)?;
        let kp = self.k_prime(lam)?;
        Ok(Float::with_val(self.prec, lam * &kp) / k + xi)
    }

    /// `log(s lambda^xi K(lambda))`.
    fn objective(&mut self, lam: &Float, xi: &Float) -> Result<Float> {
        let prec = self.prec;
        let k = self.k(lam)?;
        let log_lam = Float::with_val(prec, lam.clone().ln());
        Ok(Float::with_val(prec, self.spec.s).ln() + xi.clone() * log_lam + k.ln())
    }
}

/// The rate point at deviation level `xi in (0, mean_slope)`.
///
/// `lambda0` is found by bracketed bisection on the tilt equation; the
/// returned rate is cross-checked against a direct golden-section
/// maximization of the objective to 1e-8.
///
/// This is the left tail of the black count. The right-tail regime is the
/// left tail of the white count: call this on [`UrnSpec::mirror`].
pub fn rate_function(spec: &UrnSpec, xi: f64) -> Result<RatePoint> {
    validate(spec)?;
    let slope = asymptotic_moments(spec)?
        .mean_slope
        .to_f64()
        .expect("slope is a small rational");
    if !(xi > 0.0 && xi < slope) {
        return Err(UrnError::OutOfRange(format!(
            "rate function needs xi in (0, {slope}), got {xi}"
        )));
    }
    let prec = hp::precision_bits();
    let mut ev = KEvaluator::new(spec, prec)?;
    let xi_f = Float::with_val(prec, xi);

    // bracket: g(1) = xi - mean_slope < 0; g decays to xi > 0 at 0+
    let mut lo = Float::with_val(prec, 1e-3);
    let mut tries = 0;
    while ev.tilt(&lo, &xi_f)?.is_sign_negative() {
        lo = Float::with_val(prec, &lo / 32u32);
        tries += 1;
        if tries > 60 {
            return Err(UrnError::RootNotBracketed {
                lo: lo.to_f64(),
                hi: 1.0,
            });
        }
    }
    let mut hi = Float::with_val(prec, 1);
    // bisection; the objective is stationary at the root, so lambda0 accuracy
    // well beyond sqrt(target) is enough for full rate accuracy
    for _ in 0..(prec / 2).max(80) {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if ev.tilt(&mid, &xi_f)?.is_sign_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda0 = Float::with_val(prec, &lo + &hi) / 2u32;
    let rate = ev.objective(&lambda0, &xi_f)?;

    // independent golden-section maximization of the same objective
    let golden_rate = golden_section_rate(&mut ev, &xi_f, prec)?;
    let drift = Float::with_val(prec, &rate - &golden_rate).abs().to_f64();
    if drift > 1e-8 {
        return Err(UrnError::ToleranceNotMet {
            estimate: drift,
            target: 1e-8,
        });
    }

    Ok(RatePoint {
        xi,
        lambda0: lambda0.to_f64(),
        rate: rate.to_f64(),
    })
}

fn golden_section_rate(ev: &mut KEvaluator, xi: &Float, prec: u32) -> Result<Float> {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-9f64, 1.0 - 1e-12);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let mut fc = ev.objective(&Float::with_val(prec, c), xi)?;
    let mut fd = ev.objective(&Float::with_val(prec, d), xi)?;
    while (b - a) > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = ev.objective(&Float::with_val(prec, c), xi)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = ev.objective(&Float::with_val(prec, d), xi)?;
        }
    }
    ev.objective(&Float::with_val(prec, 0.5 * (a + b)), xi)
}

/// The maximizer found by golden-section search alone (test oracle).
pub fn golden_section_lambda(spec: &UrnSpec, xi: f64) -> Result<f64> {
    let prec = hp::precision_bits();
    let mut ev = KEvaluator::new(spec, prec)?;
    let xi_f = Float::with_val(prec, xi);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-9f64, 1.0 - 1e-12);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let mut fc = ev.objective(&Float::with_val(prec, c), &xi_f)?;
    let mut fd = ev.objective(&Float::with_val(prec, d), &xi_f)?;
    while (b - a) > 1e-9 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = ev.objective(&Float::with_val(prec, c), &xi_f)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = ev.objective(&Float::with_val(prec, d), &xi_f)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Rate curve on a grid spanning (0.01, 0.99) of the admissible interval.
pub fn rate_curve(spec: &UrnSpec, grid: usize) -> Result<Vec<RatePoint>> {
    if grid < 2 {
        return Err(UrnError::OutOfRange("rate curve needs grid >= 2".into()));
    }
    let slope = asymptotic_moments(spec)?.mean_slope.to_f64().unwrap();
    let mut out = Vec::with_capacity(grid);
    for i in 0..grid {
        let frac = 0.01 + 0.98 * i as f64 / (grid - 1) as f64;
        out.push(rate_function(spec, slope * frac)?);
    }
    Ok(out)
}

/// CSV export with columns `xi,lambda0,rate`.
pub fn rate_csv(points: &[RatePoint]) -> String {
    let mut out = String::from("xi,lambda0,rate\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.xi, p.lambda0, p.rate));
    }
    out
}

/// Extreme-deviation estimate for the all-white event:
/// `(h/a) (s rho)^{-n - t0/s}` on the admissible congruence class of n,
/// exact zero off it (the state is unreachable).
pub fn extreme_deviation(spec: &UrnSpec, n: u64) -> Result<f64> {
    let d = validate(spec)?;
    let class = d.balance_class;
    if n % class != (spec.a0 / spec.a) % class {
        return Ok(0.0);
    }
    let prec = hp::precision_bits();
    let s_rho = rho(spec, prec) * Float::with_val(prec, spec.s);
    let expo =
        Float::with_val(prec, n) + Float::with_val(prec, d.t0) / Float::with_val(prec, spec.s);
    let value = Float::with_val(prec, class) * hp::pow_ratio(&s_rho.recip(), 1, 1).pow(&expo);
    Ok(value.to_f64())
}

/// `-(1/n) log P(X_n <= xi n)` from the float DP (empirical convergence
/// diagnostics toward the rate function).
pub fn empirical_left_tail_rate(spec: &UrnSpec, xi: f64, n: u64) -> f64 {
    let dist = crate::exact::float_distribution(spec, n);
    let cum: f64 = dist
        .iter()
        .filter(|(x, _)| (*x as f64) <= xi * n as f64)
        .map(|(_, p)| p)
        .sum();
    -cum.ln() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::rho_gamma;
    use crate::exact::exact_distribution;
    use num_traits::ToPrimitive;

    fn t23() -> UrnSpec {
        UrnSpec::two_three_tree()
    }

    #[test]
    fn rate_regression_point() {
        // frozen from an independent 30-digit golden-section maximization
        let p = rate_function(&t23(), 0.3).unwrap();
        assert!(
            (p.lambda0 - 0.6521446411250646).abs() < 1e-10,
            "{}",
            p.lambda0
        );
        assert!((p.rate - 0.05566615641395523).abs() < 1e-11, "{}", p.rate);
    }

    #[test]
    fn rate_vanishes_at_the_mean() {
        let p = rate_function(&t23(), 4.0 / 7.0 * (1.0 - 1e-8)).unwrap();
        assert!(p.rate.abs() < 1e-6, "{}", p.rate);
        assert!(p.lambda0 > 0.999999);
    }

    #[test]
    fn rate_approaches_log_s_rho_at_zero() {
        let expect = (rho_gamma(&t23(), 64).to_f64()).ln();
        let p = rate_function(&t23(), 4.0 / 7.0 * 1e-8).unwrap();
        assert!((p.rate - expect).abs() < 1e-6, "{} vs {expect}", p.rate);
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(
            rate_function(&t23(), 0.0),
            Err(UrnError::OutOfRange(_))
        ));
        assert!(matches!(
            rate_function(&t23(), 0.58),
            Err(UrnError::OutOfRange(_))
        ));
    }

    #[test]
    fn root_and_golden_section_agree() {
        for xi in [0.15, 0.3, 0.45] {
            let p = rate_function(&t23(), xi).unwrap();
            let lam_g = golden_section_lambda(&t23(), xi).unwrap();
            assert!(
                (p.lambda0 - lam_g).abs() < 1e-6,
                "xi {xi}: {} vs {lam_g}",
                p.lambda0
            );
        }
    }

    /// R is strictly decreasing and convex across the admissible interval.
    #[test]
    fn rate_curve_shape() {
        let slope = 4.0 / 7.0;
        let xs: Vec<f64> = (0..10).map(|i| slope * (0.05 + 0.10 * i as f64)).collect();
        let rs: Vec<f64> = xs
            .iter()
            .map(|&x| rate_function(&t23(), x).unwrap().rate)
            .collect();
        for w in rs.windows(2) {
            assert!(w[1] < w[0], "not decreasing: {rs:?}");
        }
        for w in rs.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] > 0.0, "not convex: {rs:?}");
        }
    }

    #[test]
    fn extreme_deviation_congruence() {
        let spec = t23();
        // off the congruence class the probability is exactly zero
        assert_eq!(extreme_deviation(&spec, 9).unwrap(), 0.0);
        assert_eq!(extreme_deviation(&spec, 11).unwrap(), 0.0);
        // exact-engine support agrees
        let d9 = exact_distribution(&spec, 9).unwrap();
        assert!(!d9.probs.contains_key(&0));
        // on the class: 3 rho^{-n-2}, and the exact probability is close
        let n = 13u64;
        let approx = extreme_deviation(&spec, n).unwrap();
        let exact = exact_distribution(&spec, n)
            .unwrap()
            .prob(0)
            .to_f64()
            .unwrap();
        let ratio = exact / approx;
        assert!(
            (ratio - 1.0).abs() < 2f64.powi(-(n as i32 - 4)),
            "ratio {ratio}"
        );
    }

    #[test]
    fn empirical_rate_moves_toward_limit() {
        // fast version of the convergence check (the acceptance suite runs
        // the full doubling ladder)
        let spec = t23();
        let r = rate_function(&spec, 0.4).unwrap().rate;
        let e100 = empirical_left_tail_rate(&spec, 0.4, 100);
        let e200 = empirical_left_tail_rate(&spec, 0.4, 200);
        assert!((e200 - r).abs() < (e100 - r).abs());
    }
}
