//! Numeric evaluation of the model's special functions and the kite /
//! fundamental-polygon geometry.
//!
//! The radius of convergence `rho = I(1)` is computed two independent ways:
//! by the Euler Beta/Gamma product and by quadrature of the Abelian integral.
//! The endpoint singularity of the integrand at u = 1 is removed by the
//! substitution `1 - t = tau^h` (the curve's own uniformizer), which renders
//! the integrand analytic on the whole interval, so tanh-sinh quadrature
//! converges geometrically.

use crate::error::{Result, UrnError};
use crate::hp::{self, TanhSinh};
use crate::series::expand::omega_over_h;
use crate::urn::{validate, UrnSpec};
use num_complex::Complex64;
use num_rational::Rational64;
use rug::ops::Pow;
use rug::Float;
use std::f64::consts::PI;

/// Singularity data of a validated spec, with `rho` at working precision.
#[derive(Debug, Clone)]
pub struct AnalyticProfile {
    pub rho: Float,
    pub a: u64,
    pub b: u64,
    pub s: u64,
    pub h: u64,
    pub t0: u64,
    /// `h / s`
    pub puiseux_exponent: Rational64,
    /// `-t0 / s`
    pub singular_exponent: Rational64,
}

/// `delta(u) = (1 - u^h)^{1/h}`, principal branch.
pub fn delta(spec: &UrnSpec, u: Complex64) -> Complex64 {
    let h = spec.h();
    let w = Complex64::new(1.0, 0.0) - u.powu(h as u32);
    w.powf(1.0 / h as f64)
}

fn float_poly_eval(coeffs: &[num_rational::BigRational], x: &Float, prec: u32) -> Float {
    let mut acc = Float::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        acc = acc * x + hp::rational_to(prec, c);
    }
    acc
}

/// `rho - I(u)` for `u = 1 - tau^h`, by the uniformizing substitution:
/// `h^{s/h} * int_0^tau (1-y^h)^{a-1} (Omega(y^h)/h)^{-(a+b)/h} y^{s-1} dy`.
/// The integrand is analytic on [0, 1].
pub(crate) fn tail_integral_hp(
    spec: &UrnSpec,
    ts: &mut TanhSinh,
    tau_hi: &Float,
    prec: u32,
) -> Result<Float> {
    let (a, b, s, h) = (spec.a, spec.b, spec.s, spec.h());
    let om = omega_over_h(h, h as usize);
    let target = 0.5f64.powi(prec as i32 - 12);
    let integrand = |y: &Float| -> Float {
        let w = Float::with_val(prec, y.clone().pow(h as u32));
        let one_minus_w = Float::with_val(prec, 1) - &w;
        let pa = Float::with_val(prec, one_minus_w.pow((a - 1) as u32));
        let pom = hp::pow_ratio(&float_poly_eval(&om, &w, prec), -((a + b) as i64), h);
        let ys = Float::with_val(prec, y.clone().pow((s - 1) as u32));
        pa * pom * ys
    };
    let zero = Float::with_val(prec, 0);
    let v = ts.integrate(integrand, &zero, tau_hi, target, 11)?;
    Ok(hp::pow_ratio(&Float::with_val(prec, h), s as i64, h) * v)
}

/// The Abelian integral `I(u)` for real `u` in [0, 1], by high-precision
/// quadrature. Away from 1 the integrand is integrated directly; near 1 the
/// uniformized tail is used.
pub fn abelian_i(spec: &UrnSpec, u: f64, prec: u32) -> Result<Float> {
    validate(spec)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(UrnError::OutOfRange(format!(
            "abelian_i needs u in [0,1], got {u}"
        )));
    }
    let (a, b, h) = (spec.a, spec.b, spec.h());
    let mut ts = TanhSinh::new(prec);
    if u == 0.0 {
        return Ok(Float::with_val(prec, 0));
    }
    if u <= 0.7 {
        let target = 0.5f64.powi(prec as i32 - 12);
        let integrand = |t: &Float| -> Float {
            let w = Float::with_val(prec, 1) - Float::with_val(prec, t.clone().pow(h as u32));
            let ta = Float::with_val(prec, t.clone().pow((a - 1) as u32));
            ta * hp::pow_ratio(&w, -((a + b) as i64), h)
        };
        let zero = Float::with_val(prec, 0);
        let uu = Float::with_val(prec, u);
        return ts.integrate(integrand, &zero, &uu, target, 11);
    }
    let one = Float::with_val(prec, 1);
    let rho_q = tail_integral_hp(spec, &mut ts, &one, prec)?;
    let tau = hp::pow_ratio(&(Float::with_val(prec, 1) - Float::with_val(prec, u)), 1, h);
    let tail = tail_integral_hp(spec, &mut ts, &tau, prec)?;
    Ok(rho_q - tail)
}

/// `rho = (1/h) Gamma(a/h) Gamma(s/h) / Gamma((a+s)/h)` (Beta route).
pub fn rho_gamma(spec: &UrnSpec, prec: u32) -> Float {
    let h = spec.h();
    let g = |num: u64| -> Float { (Float::with_val(prec, num) / Float::with_val(prec, h)).gamma() };
    g(spec.a) * g(spec.s) / g(spec.a + spec.s) / Float::with_val(prec, h)
}

/// `rho = I(1)` by quadrature of the uniformized tail integral.
pub fn rho_quadrature(spec: &UrnSpec, prec: u32) -> Result<Float> {
    let mut ts = TanhSinh::new(prec);
    let one = Float::with_val(prec, 1);
    tail_integral_hp(spec, &mut ts, &one, prec)
}

/// The dominant singularity radius at working precision (Beta route).
pub fn rho(spec: &UrnSpec, prec: u32) -> Float {
    rho_gamma(spec, prec)
}

/// Builds the analytic profile, cross-validating the two routes to `rho`.
pub fn analytic_profile(spec: &UrnSpec) -> Result<AnalyticProfile> {
    let d = validate(spec)?;
    let prec = hp::precision_bits();
    let r_gamma = rho_gamma(spec, prec);
    let r_quad = rho_quadrature(spec, prec)?;
    let diff = Float::with_val(prec, &r_gamma - &r_quad).abs().to_f64();
    if diff > 1e-10 {
        return Err(UrnError::ToleranceNotMet {
            estimate: diff,
            target: 1e-10,
        });
    }
    Ok(AnalyticProfile {
        rho: r_gamma,
        a: spec.a,
        b: spec.b,
        s: spec.s,
        h: d.h,
        t0: d.t0,
        puiseux_exponent: Rational64::new(d.h as i64, spec.s as i64),
        singular_exponent: Rational64::new(-(d.t0 as i64), spec.s as i64),
    })
}

/// `K(lambda) = (1 - lambda^h)^{-s/h} * int_lambda^1 t^{a-1} (1-t^h)^{-(a+b)/h} dt`
/// for real lambda in [0, 1]. `K(1) = 1/s` (removable), `K(0) = rho`.
pub fn k_integral(spec: &UrnSpec, lambda: f64, prec: u32) -> Result<Float> {
    validate(spec)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(UrnError::OutOfRange(format!(
            "K needs lambda in [0,1], got {lambda}"
        )));
    }
    if lambda == 1.0 {
        return Ok(Float::with_val(prec, 1) / Float::with_val(prec, spec.s));
    }
    let h = spec.h();
    let mut ts = TanhSinh::new(prec);
    let lam = Float::with_val(prec, lambda);
    let tau = hp::pow_ratio(&(Float::with_val(prec, 1) - &lam), 1, h);
    let tail = tail_integral_hp(spec, &mut ts, &tau, prec)?;
    let one_minus_lh = Float::with_val(prec, 1) - Float::with_val(prec, lam.pow(h as u32));
    Ok(tail * hp::pow_ratio(&one_minus_lh, -(spec.s as i64), h))
}

// ---------------------------------------------------------------------------
// Kite geometry by branch-tracked path integration
// ---------------------------------------------------------------------------

/// The elementary kite: images of the sector corners under `I`, with the
/// interior angles fixed by the local exponents of the map.
#[derive(Debug, Clone)]
pub struct KiteGeometry {
    /// `[0, I(1), I(+inf), I(e^{2 i pi / h})]`
    pub vertices: [Complex64; 4],
    /// Interior angles at those vertices: `[2 pi a/h, pi s/h, 2 pi b/h, pi s/h]`.
    pub angles: [f64; 4],
    /// Number of rotated kites in the fundamental polygon: `h / a`.
    pub polygon_vertex_count: u64,
    /// Continued argument of `1 - t^h` on the ray `(1, +inf)`, recorded from
    /// the numeric continuation (the principal branch on (0,1) is the seed).
    /// `delta` then carries the fixed argument `ray_argument / h` there.
    pub ray_argument: f64,
}

/// Tracks a continuous determination of `arg(1 - t^h)` along a path.
struct BranchTracker {
    h: u32,
    exponent: f64,
    last_arg: Option<f64>,
}

impl BranchTracker {
    fn new(spec: &UrnSpec) -> Self {
        BranchTracker {
            h: spec.h() as u32,
            exponent: -((spec.a + spec.b) as f64) / spec.h() as f64,
            last_arg: None,
        }
    }

    /// `delta(t)^{-(a+b)}` with the branch continued from previous calls.
    fn delta_pow(&mut self, t: Complex64) -> Result<Complex64> {
        let w = Complex64::new(1.0, 0.0) - t.powu(self.h);
        let raw = w.arg();
        let arg = match self.last_arg {
            None => raw,
            Some(prev) => {
                // unwrap to the 2 pi k branch nearest the previous node
                let k = ((prev - raw) / (2.0 * PI)).round();
                let cand = raw + 2.0 * PI * k;
                let jump = (cand - prev).abs();
                if jump > PI / 4.0 {
                    return Err(UrnError::BranchTrackingFailure {
                        jump,
                        at: format!("{t}"),
                    });
                }
                cand
            }
        };
        self.last_arg = Some(arg);
        let log = Complex64::new(w.norm().ln(), arg);
        Ok((log * self.exponent).exp())
    }
}

/// 64-bit Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        // Newton iteration from the Chebyshev-like initial guess
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Integrates `t^{a-1} delta(t)^{-(a+b)}` along the standard continuation
/// path `[0, 1-r] + upper arc around 1 + (1+r, +inf)`, returning the limit
/// value `I(+inf)` together with the recorded ray argument of `1 - t^h`.
fn vertex_at_infinity(spec: &UrnSpec) -> Result<(Complex64, f64)> {
    let a = spec.a as u32;
    let r = 0.3f64;
    let nodes = gauss_legendre(32);
    let mut tracker = BranchTracker::new(spec);
    let mut total = Complex64::new(0.0, 0.0);

    // a path segment given by a parameterization and its derivative
    let integrate_seg = |tracker: &mut BranchTracker,
                         lo: f64,
                         hi: f64,
                         map: &dyn Fn(f64) -> (Complex64, Complex64)|
     -> Result<Complex64> {
        let c = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in &nodes {
            let (t, dt) = map(c + half * x);
            let f = t.powu(a - 1) * tracker.delta_pow(t)?;
            acc += w * f * dt;
        }
        Ok(acc * half)
    };

    // real leg [0, 1-r]
    for (lo, hi) in [(0.0, 0.35), (0.35, 1.0 - r)] {
        total += integrate_seg(&mut tracker, lo, hi, &|x| {
            (Complex64::new(x, 0.0), Complex64::new(1.0, 0.0))
        })?;
    }
    // upper semicircular arc around 1, from angle pi to 0
    for (lo, hi) in [(PI, 0.5 * PI), (0.5 * PI, 0.0)] {
        total += integrate_seg(&mut tracker, lo, hi, &|th| {
            let e = Complex64::new(0.0, th).exp();
            (
                Complex64::new(1.0, 0.0) + r * e,
                r * Complex64::new(0.0, 1.0) * e,
            )
        })?;
    }
    // unbounded leg via t = 1/w: int f(t) dt = int_0^{1/(1+r)} f(1/w) / w^2 dw.
    // Panels walk w downward (t upward) so the branch continuation stays in
    // path order; the substitution keeps each panel positively oriented.
    let w_hi = 1.0 / (1.0 + r);
    for (lo, hi) in [(0.5, w_hi), (0.25, 0.5), (0.0, 0.25)] {
        total += integrate_seg(&mut tracker, lo, hi, &|sig| {
            let w = hi + lo - sig;
            let t = 1.0 / w;
            (Complex64::new(t, 0.0), Complex64::new(1.0 / (w * w), 0.0))
        })?;
    }
    let ray_argument = tracker.last_arg.unwrap_or(0.0);
    Ok((total, ray_argument))
}

/// Computes the elementary kite by numeric path integration with branch
/// tracking, plus the exact rotation image of `rho`.
pub fn kite(spec: &UrnSpec) -> Result<KiteGeometry> {
    let d = validate(spec)?;
    let prec = hp::precision_bits();
    let rho_v = rho(spec, prec).to_f64();
    let (v_inf, ray_argument) = vertex_at_infinity(spec)?;
    let h = d.h as f64;
    let (a, b, s) = (spec.a as f64, spec.b as f64, spec.s as f64);
    let rot = Complex64::new(0.0, 2.0 * PI * a / h).exp();
    Ok(KiteGeometry {
        vertices: [
            Complex64::new(0.0, 0.0),
            Complex64::new(rho_v, 0.0),
            v_inf,
            rho_v * rot,
        ],
        angles: [2.0 * PI * a / h, PI * s / h, 2.0 * PI * b / h, PI * s / h],
        polygon_vertex_count: d.h / spec.a,
        ray_argument,
    })
}

/// Boundary of the fundamental polygon: `h/a` rotated copies of the two
/// outer kite edges. Each edge is traced by sampling the integral along the
/// sector boundary; the second edge of every kite is the reflected image of
/// the first.
pub fn polygon_boundary_points(spec: &UrnSpec, samples: usize) -> Result<Vec<(Complex64, String)>> {
    if samples < 8 {
        return Err(UrnError::OutOfRange(format!(
            "polygon boundary needs samples >= 8, got {samples}"
        )));
    }
    let d = validate(spec)?;
    let prec = hp::bits_for_digits(30);
    let geometry = kite(spec)?;
    let rho_v = rho(spec, prec).to_f64();
    let mirror = spec.mirror();
    let rho_m = rho(&mirror, prec).to_f64();
    // phase of delta^{-(a+b)} on the ray, from the recorded continuation
    let phase = Complex64::new(
        0.0,
        geometry.ray_argument * -((spec.a + spec.b) as f64) / d.h as f64,
    )
    .exp();

    // edge A: rho -> I(inf), image of the ray [1, inf) under I
    let mut edge_a = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let w = 1.0 - i as f64 / samples as f64;
        let i_m = abelian_i(&mirror, w, prec)?.to_f64();
        edge_a.push(Complex64::new(rho_v, 0.0) + phase * (rho_m - i_m));
    }

    let kites = d.h / spec.a;
    let mut points = Vec::with_capacity(2 * (samples + 1) * kites as usize);
    for j in 0..kites {
        let rot = Complex64::new(0.0, 2.0 * PI * (spec.a * j) as f64 / d.h as f64).exp();
        for p in &edge_a {
            points.push((rot * p, format!("kite{j}-a")));
        }
        // edge B: I(inf) -> rho * e^{2 i pi a / h}, reflection of edge A
        let rot_b = rot * Complex64::new(0.0, 2.0 * PI * spec.a as f64 / d.h as f64).exp();
        for p in edge_a.iter().rev() {
            points.push((rot_b * p.conj(), format!("kite{j}-b")));
        }
    }
    Ok(points)
}

/// CSV export of boundary points with columns `re,im,segment`.
pub fn boundary_csv(points: &[(Complex64, String)]) -> String {
    let mut out = String::from("re,im,segment\n");
    for (p, label) in points {
        out.push_str(&format!("{},{},{}\n", p.re, p.im, label));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::expand::{i_series, k_series_at_one};
    use crate::testpool::small_pool;

    fn t23() -> UrnSpec {
        UrnSpec::two_three_tree()
    }

    const PREC: u32 = 200;

    #[test]
    fn delta_examples() {
        let spec = t23(); // h = 6
        let one = delta(&spec, Complex64::new(0.0, 0.0));
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let zero = delta(&spec, Complex64::new(1.0, 0.0));
        assert!(zero.norm() < 1e-15);
        let p = UrnSpec::pentagonal(); // h = 5
        let v = delta(&p, Complex64::new(0.5, 0.0));
        let expect = (1.0 - 0.5f64.powi(5)).powf(0.2);
        assert!((v.re - expect).abs() < 1e-15 && v.im.abs() < 1e-18);
    }

    #[test]
    fn rho_two_routes_agree_to_many_digits() {
        for spec in [t23(), UrnSpec::pentagonal(), UrnSpec::new(1, 1, 1, 1, 0)] {
            let g = rho_gamma(&spec, PREC);
            let q = rho_quadrature(&spec, PREC).unwrap();
            let diff = Float::with_val(PREC, &g - &q).abs().to_f64();
            assert!(diff < 1e-40, "spec {spec:?}: diff {diff:e}");
        }
    }

    #[test]
    fn rho_t23_reference_value() {
        // pinned from an independent 55-digit evaluation of the Gamma product
        let r = rho(&t23(), hp::bits_for_digits(55));
        let s = hp::to_decimal_string(&r, 50);
        assert_eq!(s, "1.402182105325454261175019079050294135463022205424");
    }

    #[test]
    fn abelian_examples() {
        let spec = t23();
        assert_eq!(abelian_i(&spec, 0.0, PREC).unwrap().to_f64(), 0.0);
        // I(1) = rho
        let i1 = abelian_i(&spec, 1.0, PREC).unwrap();
        let diff = Float::with_val(PREC, &i1 - &rho_gamma(&spec, PREC))
            .abs()
            .to_f64();
        assert!(diff < 1e-40, "diff {diff:e}");
        // matches the truncated series at u = 0.5
        for spec in small_pool() {
            let series = i_series(&spec, 40);
            let direct = abelian_i(&spec, 0.5, PREC).unwrap().to_f64();
            assert!(
                (series.eval_f64(0.5) - direct).abs() < 1e-8,
                "spec {spec:?}"
            );
        }
        // continuity across the internal split point at u = 0.7
        let below = abelian_i(&spec, 0.7 - 1e-9, PREC).unwrap().to_f64();
        let above = abelian_i(&spec, 0.7 + 1e-9, PREC).unwrap().to_f64();
        assert!((below - above).abs() < 1e-8);
    }

    #[test]
    fn profile_fields() {
        let p = analytic_profile(&t23()).unwrap();
        assert!(p.rho.to_f64() > 0.0);
        assert_eq!((p.a, p.b, p.s, p.h, p.t0), (2, 3, 1, 6, 2));
        assert_eq!(p.puiseux_exponent, Rational64::from_integer(6));
        assert_eq!(p.singular_exponent, Rational64::from_integer(-2));
    }

    #[test]
    fn k_examples() {
        let spec = t23();
        // K(1) = 1/s, K(0) = rho
        assert_eq!(k_integral(&spec, 1.0, PREC).unwrap().to_f64(), 1.0);
        let k0 = k_integral(&spec, 0.0, PREC).unwrap();
        let diff = Float::with_val(PREC, &k0 - &rho_gamma(&spec, PREC))
            .abs()
            .to_f64();
        assert!(diff < 1e-40);
        // K(0.99) matches the exact Taylor series at u-1 = -0.01
        let series = k_series_at_one(&spec, 30);
        let k99 = k_integral(&spec, 0.99, PREC).unwrap().to_f64();
        assert!((series.eval_f64_signed(-0.01) - k99).abs() < 1e-8);
        // pinned independent value of K(1/2)
        let k_half = k_integral(&spec, 0.5, hp::bits_for_digits(30))
            .unwrap()
            .to_f64();
        assert!((k_half - 1.280127417448893941153286).abs() < 1e-15);
    }

    /// Central-difference residual check certifying the ODE
    /// `(1-u^h) K'(u) = s u^{h-1} K(u) - u^{a-1}` on the quadrature-based K.
    #[test]
    fn k_ode_residual() {
        let prec = hp::bits_for_digits(40);
        for spec in [t23(), UrnSpec::pentagonal()] {
            let (a, s, h) = (spec.a, spec.s, spec.h());
            for u in [0.1, 0.5, 0.9] {
                let step = 1e-5;
                let kp = (k_integral(&spec, u + step, prec).unwrap().to_f64()
                    - k_integral(&spec, u - step, prec).unwrap().to_f64())
                    / (2.0 * step);
                let k = k_integral(&spec, u, prec).unwrap().to_f64();
                let resid = (1.0 - u.powi(h as i32)) * kp - s as f64 * u.powi(h as i32 - 1) * k
                    + u.powi(a as i32 - 1);
                assert!(resid.abs() < 1e-8, "spec {spec:?} u {u}: resid {resid:e}");
            }
        }
    }

    #[test]
    fn k_strictly_decreasing() {
        for spec in small_pool() {
            let prec = hp::bits_for_digits(30);
            let mut prev = f64::INFINITY;
            for i in 0..=10 {
                let lam = i as f64 / 10.0;
                let k = k_integral(&spec, lam, prec).unwrap().to_f64();
                assert!(k < prev, "spec {spec:?} lambda {lam}");
                prev = k;
            }
        }
    }

    #[test]
    fn kite_two_three_tree() {
        let spec = t23();
        let g = kite(&spec).unwrap();
        let rho_v = g.vertices[1].re;
        // |I(inf)| = rho / 2 (modulus of (1/4, +-sqrt3/4) scaled by rho)
        assert!(
            (g.vertices[2].norm() - rho_v / 2.0).abs() < 1e-9,
            "{:?}",
            g.vertices[2]
        );
        // I(inf) = rho (1 -+ e^{+-i pi/6} sqrt3/2): real part rho/4
        assert!((g.vertices[2].re - rho_v / 4.0).abs() < 1e-9);
        // angle at the origin is 2 pi a / h = 2 pi / 3
        assert!((g.angles[0] - 2.0 * PI / 3.0).abs() < 1e-15);
        // interior angles of the Euclidean quadrilateral sum to 2 pi
        let total: f64 = g.angles.iter().sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
        // fourth vertex is the rotation image of rho on the circle
        assert!((g.vertices[3].norm() - rho_v).abs() < 1e-12);
        assert_eq!(g.polygon_vertex_count, 3);
    }

    #[test]
    fn kite_angle_sum_is_full_turn_for_all() {
        for spec in small_pool() {
            let g = kite(&spec).unwrap();
            let total: f64 = g.angles.iter().sum();
            assert!((total - 2.0 * PI).abs() < 1e-12, "spec {spec:?}");
        }
    }

    #[test]
    fn kite_vertex_matches_beta_product() {
        // I(inf) = rho + e^{i pi (a+b)/h} (1/h) B(b/h, s/h); the sign of the
        // imaginary part is fixed by continuation above the real axis.
        for spec in [t23(), UrnSpec::pentagonal(), UrnSpec::new(1, 2, 1, 1, 0)] {
            let g = kite(&spec).unwrap();
            let prec = hp::bits_for_digits(30);
            let rho_v = rho(&spec, prec).to_f64();
            let rho_m = rho(&spec.mirror(), prec).to_f64();
            let h = spec.h() as f64;
            let phase = Complex64::new(0.0, g.ray_argument * -((spec.a + spec.b) as f64) / h).exp();
            let expect = Complex64::new(rho_v, 0.0) + phase * rho_m;
            assert!((g.vertices[2] - expect).norm() < 1e-9, "spec {spec:?}");
            // the recorded ray argument is +-pi
            assert!((g.ray_argument.abs() - PI).abs() < 1e-9);
        }
    }

    #[test]
    fn polygon_boundary_pentagonal_star() {
        let spec = UrnSpec::pentagonal();
        let pts = polygon_boundary_points(&spec, 16).unwrap();
        // five kites, two edges each, 17 points per edge
        assert_eq!(pts.len(), 5 * 2 * 17);
        // closure
        let first = pts.first().unwrap().0;
        let last = pts.last().unwrap().0;
        assert!((first - last).norm() < 1e-9);
        // the star tips are the I(inf) vertices; with s/h = 3/5 > 1/2 they
        // reach beyond the disc |z| = rho, while the inner corners sit at rho
        let g = kite(&spec).unwrap();
        let tip = g.vertices[2].norm();
        let rho_v = rho(&spec, hp::bits_for_digits(30)).to_f64();
        assert!(tip > rho_v);
        let max_r = pts.iter().map(|(p, _)| p.norm()).fold(0.0, f64::max);
        let min_r = pts
            .iter()
            .map(|(p, _)| p.norm())
            .fold(f64::INFINITY, f64::min);
        assert!((max_r - tip).abs() < 1e-9);
        assert!((min_r - rho_v).abs() < 1e-9);
        let csv = boundary_csv(&pts);
        assert!(csv.starts_with("re,im,segment\n"));
    }

    #[test]
    fn polygon_rejects_tiny_sample_count() {
        assert!(matches!(
            polygon_boundary_points(&t23(), 4),
            Err(UrnError::OutOfRange(_))
        ));
    }

    /// |I(u e^{i theta})| < I(u) strictly for theta not a multiple of 2 pi/h.
    #[test]
    fn strict_modulus_inequality_on_rays() {
        for spec in [t23(), UrnSpec::pentagonal()] {
            let series = i_series(&spec, 120);
            let h = spec.h();
            for &u in &[0.3, 0.6, 0.85] {
                let base = series.eval_f64(u);
                for k in 0..h {
                    // halfway between consecutive symmetry rays
                    let theta = 2.0 * PI * (k as f64 + 0.5) / h as f64;
                    let z = Complex64::from_polar(u, theta);
                    let v = series.eval_complex(z).unwrap();
                    assert!(v.norm() < base, "spec {spec:?} u {u} theta {theta}");
                }
            }
        }
    }

    #[test]
    fn branch_tracker_rejects_wild_jumps() {
        let spec = t23();
        let mut tracker = BranchTracker::new(&spec);
        tracker.delta_pow(Complex64::new(0.5, 0.0)).unwrap();
        // jumping straight across the cut: arg flips by ~2 pi more than pi/4
        let err = tracker.delta_pow(Complex64::new(1.3, -1e-12)).unwrap_err();
        assert!(matches!(err, UrnError::BranchTrackingFailure { .. }));
    }
}
