//! Weierstrass elliptic function evaluation.
//!
//! The evaluator reduces the argument modulo the period lattice to the
//! Voronoi cell of the nearest lattice point and sums the Laurent series
//! there; with a reduced basis the reduced argument stays well inside the
//! series' disc of convergence. The raw lattice sum (slowly, conditionally
//! convergent) is kept only as a test oracle; lattice invariants are
//! computed independently through the Eisenstein q-series.

use crate::error::{Result, UrnError};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

/// A period lattice spanned by two R-independent complex generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub gen1: Complex64,
    pub gen2: Complex64,
}

impl Lattice {
    pub fn new(gen1: Complex64, gen2: Complex64) -> Result<Self> {
        let det = gen1.re * gen2.im - gen1.im * gen2.re;
        if det.abs() < 1e-12 * gen1.norm() * gen2.norm() {
            return Err(UrnError::OutOfRange(
                "lattice generators must be independent over the reals".into(),
            ));
        }
        Ok(Lattice { gen1, gen2 })
    }

    /// The hexagonal lattice generated by `e^{i pi/6}` and `e^{-i pi/6}`.
    pub fn hexagonal() -> Self {
        Lattice {
            gen1: Complex64::from_polar(1.0, PI / 6.0),
            gen2: Complex64::from_polar(1.0, -PI / 6.0),
        }
    }

    /// The lattice scaled by a complex factor.
    pub fn scaled(&self, c: Complex64) -> Self {
        Lattice {
            gen1: c * self.gen1,
            gen2: c * self.gen2,
        }
    }

    /// Gauss-reduced basis: gen1 is a shortest vector.
    fn reduced_basis(&self) -> (Complex64, Complex64) {
        let (mut u, mut v) = (self.gen1, self.gen2);
        if u.norm_sqr() > v.norm_sqr() {
            std::mem::swap(&mut u, &mut v);
        }
        for _ in 0..64 {
            let mu = ((v * u.conj()).re / u.norm_sqr()).round();
            let w = v - mu * u;
            if w.norm_sqr() >= u.norm_sqr() {
                return (u, w);
            }
            v = u;
            u = w;
        }
        (u, v)
    }

    /// Point of the lattice nearest to z, as (point, integer coordinates in
    /// the original basis is not tracked; only the point is needed).
    pub fn nearest_point(&self, z: Complex64) -> Complex64 {
        let (u, v) = self.reduced_basis();
        let det = u.re * v.im - u.im * v.re;
        let x = (z.re * v.im - z.im * v.re) / det;
        let y = (u.re * z.im - u.im * z.re) / det;
        let (x0, y0) = (x.round() as i64, y.round() as i64);
        let mut best = Complex64::new(f64::INFINITY, 0.0);
        let mut best_d = f64::INFINITY;
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                let w = (x0 + dx) as f64 * u + (y0 + dy) as f64 * v;
                let d = (z - w).norm_sqr();
                if d < best_d {
                    best_d = d;
                    best = w;
                }
            }
        }
        best
    }

    /// Members at squared norm <= r2 (symmetric truncation used by the
    /// lattice-sum oracle and the probability sums).
    pub fn points_in_ball(&self, r2: f64) -> Vec<Complex64> {
        let (u, v) = self.reduced_basis();
        // conservative coefficient bound from the reduced basis
        let det = (u.re * v.im - u.im * v.re).abs();
        let bound1 = (r2.sqrt() * v.norm() / det).ceil() as i64 + 1;
        let bound2 = (r2.sqrt() * u.norm() / det).ceil() as i64 + 1;
        let mut out = Vec::new();
        for i in -bound1..=bound1 {
            for j in -bound2..=bound2 {
                let w = i as f64 * u + j as f64 * v;
                if w.norm_sqr() <= r2 + 1e-9 {
                    out.push(w);
                }
            }
        }
        out
    }
}

/// Laurent data of the Weierstrass function for given invariants:
/// `wp(z) = z^{-2} + sum_{k>=2} c_k z^{2k-2}` with `c_2 = g2/20`,
/// `c_3 = g3/28`, and the quadratic recurrence
/// `c_k = 3/((2k+1)(k-3)) sum_{m=2}^{k-2} c_m c_{k-m}` for k >= 4.
/// The recurrence is certified by the differential-equation residual test
/// rather than taken on faith.
#[derive(Debug, Clone)]
pub struct WeierstrassParams {
    pub g2: Complex64,
    pub g3: Complex64,
    /// Exact coefficients `c_2, c_3, ...` when the invariants are rational.
    pub laurent_exact: Option<Vec<BigRational>>,
    laurent: Vec<Complex64>,
}

fn laurent_from_invariants_f64(g2: Complex64, g3: Complex64, terms: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); terms.max(4)];
    if terms > 2 {
        c[2] = g2 / 20.0;
    }
    if terms > 3 {
        c[3] = g3 / 28.0;
    }
    for k in 4..terms {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 2..=(k - 2) {
            acc += c[m] * c[k - m];
        }
        c[k] = acc * 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64);
    }
    c.truncate(terms);
    c
}

impl WeierstrassParams {
    /// Exact-rational Laurent data for rational invariants.
    pub fn from_rational_invariants(g2: BigRational, g3: BigRational, terms: usize) -> Self {
        let mut c = vec![BigRational::zero(); terms.max(4)];
        if terms > 2 {
            c[2] = &g2 / BigRational::from(num_bigint::BigInt::from(20));
        }
        if terms > 3 {
            c[3] = &g3 / BigRational::from(num_bigint::BigInt::from(28));
        }
        for k in 4..terms {
            let mut acc = BigRational::zero();
            for m in 2..=(k - 2) {
                acc += &c[m] * &c[k - m];
            }
            c[k] = acc * BigRational::from(num_bigint::BigInt::from(3))
                / BigRational::from(num_bigint::BigInt::from((2 * k + 1) * (k - 3)));
        }
        c.truncate(terms);
        let laurent = c
            .iter()
            .map(|x| Complex64::new(x.to_f64().unwrap_or(f64::NAN), 0.0))
            .collect();
        WeierstrassParams {
            g2: Complex64::new(g2.to_f64().unwrap_or(f64::NAN), 0.0),
            g3: Complex64::new(g3.to_f64().unwrap_or(f64::NAN), 0.0),
            laurent_exact: Some(c),
            laurent,
        }
    }

    pub fn from_invariants(g2: Complex64, g3: Complex64, terms: usize) -> Self {
        WeierstrassParams {
            g2,
            g3,
            laurent_exact: None,
            laurent: laurent_from_invariants_f64(g2, g3, terms),
        }
    }

    /// Invariants of a lattice through the Eisenstein q-series
    /// (`E4`, `E6` at the reduced period ratio) — independent of the Laurent
    /// recurrence and of the raw lattice sum.
    pub fn from_lattice(lattice: &Lattice, terms: usize) -> Self {
        let (w1, w2) = lattice.reduced_basis();
        let mut tau = w2 / w1;
        if tau.im < 0.0 {
            tau = -tau; // -w2 spans the same lattice
        }
        let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
        let sigma = |p: u32, n: u64| -> f64 {
            (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| (d as f64).powi(p as i32))
                .sum()
        };
        let mut e4 = Complex64::new(1.0, 0.0);
        let mut e6 = Complex64::new(1.0, 0.0);
        let mut qn = Complex64::new(1.0, 0.0);
        for n in 1..=40u64 {
            qn *= q;
            e4 += 240.0 * sigma(3, n) * qn;
            e6 -= 504.0 * sigma(5, n) * qn;
        }
        let pi4 = PI.powi(4);
        let pi6 = PI.powi(6);
        let g2 = Complex64::new(4.0 * pi4 / 3.0, 0.0) * e4 / w1.powu(4);
        let g3 = Complex64::new(8.0 * pi6 / 27.0, 0.0) * e6 / w1.powu(6);
        Self::from_invariants(g2, g3, terms)
    }
}

/// Evaluates the Weierstrass function by lattice reduction plus Laurent
/// series around the nearest lattice point.
pub fn wp(z: Complex64, params: &WeierstrassParams, lattice: &Lattice) -> Result<Complex64> {
    let z0 = z - lattice.nearest_point(z);
    if z0.norm() < 1e-12 {
        return Err(UrnError::PoleAt(format!("{z}")));
    }
    let z2 = z0 * z0;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in params.laurent.iter().skip(2).rev() {
        acc = acc * z2 + c;
    }
    Ok(1.0 / z2 + acc * z2)
}

/// Termwise-differentiated Laurent series for the derivative.
pub fn wp_prime(z: Complex64, params: &WeierstrassParams, lattice: &Lattice) -> Result<Complex64> {
    let z0 = z - lattice.nearest_point(z);
    if z0.norm() < 1e-12 {
        return Err(UrnError::PoleAt(format!("{z}")));
    }
    let z2 = z0 * z0;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in params.laurent.iter().enumerate().skip(2).rev() {
        acc = acc * z2 + (2 * k - 2) as f64 * c;
    }
    Ok(-2.0 / (z2 * z0) + acc * z0)
}

/// Direct truncated lattice sum of the defining series (test oracle):
/// `1/z^2 + sum_{w != 0, |w| <= R} (1/(z-w)^2 - 1/w^2)`.
/// Truncating on complete norm balls keeps the symmetric cancellations, so
/// the residual decays polynomially in R.
pub fn wp_lattice_sum(z: Complex64, lattice: &Lattice, radius: f64) -> Complex64 {
    let mut acc = 1.0 / (z * z);
    for w in lattice.points_in_ball(radius * radius) {
        if w.norm_sqr() < 1e-18 {
            continue;
        }
        let d = z - w;
        acc += 1.0 / (d * d) - 1.0 / (w * w);
    }
    acc
}
