//! Everything specific to the elliptic urns: the classifier for the six
//! irreducible matrices whose fundamental function is doubly periodic, the
//! Weierstrass evaluator, the closed elliptic form of the 2-3 tree urn's
//! fundamental function, and the exact lattice-sum representation of its
//! probability generating function.

pub mod weierstrass;

use crate::analytic;
use crate::error::{Result, UrnError};
use crate::hp;
use crate::series::expand::i_series;
use crate::urn::{validate, UrnSpec};
use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;
use std::sync::OnceLock;
pub use weierstrass::{wp, wp_lattice_sum, wp_prime, Lattice, WeierstrassParams};

/// Outcome of the elliptic classification of a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EllipticVerdict {
    pub is_elliptic: bool,
    /// One of 'A'..'F' for the canonical irreducible cases.
    pub matched_case: Option<char>,
    pub reason: String,
}

/// The six irreducible elliptic matrices with initial conditions that make
/// the fundamental function meromorphic (`a0 = lcm(a, s)`, `b0 = 0`).
pub fn canonical_cases() -> &'static [(char, UrnSpec); 6] {
    static CASES: OnceLock<[(char, UrnSpec); 6]> = OnceLock::new();
    CASES.get_or_init(|| {
        let with_init = |a: u64, b: u64, s: u64| UrnSpec::new(a, b, s, a.lcm(&s), 0);
        [
            ('A', with_init(2, 3, 1)),
            ('B', with_init(1, 2, 1)),
            ('C', with_init(1, 1, 1)),
            ('D', with_init(1, 1, 2)),
            ('E', with_init(1, 3, 2)),
            ('F', with_init(1, 2, 3)),
        ]
    })
}

/// Classifies a tenable spec: elliptic iff the matrix is arithmetically
/// irreducible, the Puiseux exponent h/s is integral, and (a, b, s) matches
/// one of the six canonical cases up to the color swap a <-> b.
pub fn classify(spec: &UrnSpec) -> Result<EllipticVerdict> {
    validate(spec)?;
    let (a, b, s, h) = (spec.a, spec.b, spec.s, spec.h());
    let g = a.gcd(&(a + s)).gcd(&(b + s)).gcd(&b);
    if g != 1 {
        return Ok(EllipticVerdict {
            is_elliptic: false,
            matched_case: None,
            reason: format!("arithmetically reducible: gcd of matrix entries is {g}"),
        });
    }
    if h % s != 0 {
        let d = h.gcd(&s);
        return Ok(EllipticVerdict {
            is_elliptic: false,
            matched_case: None,
            reason: format!("h/s = {}/{} fractional", h / d, s / d),
        });
    }
    for (case, c) in canonical_cases() {
        if (c.a, c.b, c.s) == (a, b, s) {
            return Ok(EllipticVerdict {
                is_elliptic: true,
                matched_case: Some(*case),
                reason: format!("matrix of case {case}"),
            });
        }
        if (c.b, c.a, c.s) == (a, b, s) {
            return Ok(EllipticVerdict {
                is_elliptic: true,
                matched_case: Some(*case),
                reason: format!("matrix of case {case} up to color swap"),
            });
        }
    }
    // unreachable for tenable irreducible matrices with integral h/s,
    // by the triple classification
    Ok(EllipticVerdict {
        is_elliptic: false,
        matched_case: None,
        reason: "integral Puiseux exponent but not among the six irreducible cases".into(),
    })
}

/// All triples x <= y <= z <= bound with gcd 1 and
/// x | y+z, y | z+x, z | x+y.
pub fn solve_triples(bound: u64) -> Vec<(u64, u64, u64)> {
    assert!(bound >= 3);
    let mut out = Vec::new();
    for x in 1..=bound {
        for y in x..=bound {
            for z in y..=bound {
                if x.gcd(&y).gcd(&z) == 1
                    && (y + z) % x == 0
                    && (z + x) % y == 0
                    && (x + y) % z == 0
                {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

/// Enumerates all tenable, arithmetically irreducible subtractive matrices
/// with balance <= s_max, filters by the classifier and returns the
/// canonical representatives found (one per case, canonical orientation).
pub fn enumerate_elliptic(s_max: u64) -> Vec<UrnSpec> {
    assert!(s_max >= 1);
    let mut found = Vec::new();
    // tenability bounds a and b by 3s
    for s in 1..=s_max {
        for a in 1..=3 * s {
            for b in 1..=3 * s {
                if (b + s) % a != 0 || (a + s) % b != 0 {
                    continue;
                }
                let spec = UrnSpec::new(a, b, s, a.lcm(&s), 0);
                let verdict = classify(&spec).expect("constructed spec is tenable");
                if let Some(case) = verdict.matched_case {
                    if !found.contains(&case) {
                        found.push(case);
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found
        .into_iter()
        .map(|case| {
            canonical_cases()
                .iter()
                .find(|(c, _)| *c == case)
                .expect("case letter comes from the table")
                .1
        })
        .collect()
}

/// JSON verdicts for a batch of specs.
pub fn verdicts_json(specs: &[UrnSpec]) -> serde_json::Value {
    let items: Vec<serde_json::Value> = specs
        .iter()
        .map(|spec| {
            let v = classify(spec).expect("enumeration produces tenable specs");
            serde_json::json!({
                "spec": spec,
                "is_elliptic": v.is_elliptic,
                "matched_case": v.matched_case.map(|c| c.to_string()),
                "reason": v.reason,
            })
        })
        .collect();
    serde_json::Value::Array(items)
}

// ---------------------------------------------------------------------------
// The 2-3 tree urn's elliptic form
// ---------------------------------------------------------------------------

fn t23_rho() -> f64 {
    static RHO: OnceLock<f64> = OnceLock::new();
    *RHO.get_or_init(|| analytic::rho(&UrnSpec::two_three_tree(), hp::precision_bits()).to_f64())
}

struct T23Elliptic {
    rho: f64,
    hex: Lattice,
    hex_params: WeierstrassParams,
    scaled: Lattice,
    scaled_params: WeierstrassParams,
}

fn t23_elliptic() -> &'static T23Elliptic {
    static CTX: OnceLock<T23Elliptic> = OnceLock::new();
    CTX.get_or_init(|| {
        let rho = t23_rho();
        let hex = Lattice::hexagonal();
        let scale = Complex64::new(rho * 3f64.sqrt(), 0.0);
        T23Elliptic {
            rho,
            hex,
            hex_params: WeierstrassParams::from_lattice(&hex, 48),
            scaled: hex.scaled(scale),
            scaled_params: WeierstrassParams::from_rational_invariants(
                crate::series::dense::rat(0, 1),
                crate::series::dense::rat(-4, 1),
                48,
            ),
        }
    })
}

/// The fundamental function of the 2-3 tree urn on the whole plane, as a
/// Weierstrass function: evaluates both the scaled hexagonal-lattice form
/// `(rho sqrt3)^{-2} wp((z - rho)/(rho sqrt3); Lambda_hex)` and the
/// invariant form `wp(z - rho | g2 = 0, g3 = -4)`, and requires them to
/// agree to 1e-8.
pub fn psi_elliptic(z: Complex64) -> Result<Complex64> {
    let ctx = t23_elliptic();
    let scale = Complex64::new(ctx.rho * 3f64.sqrt(), 0.0);
    let shifted = z - Complex64::new(ctx.rho, 0.0);
    let route_hex = wp(shifted / scale, &ctx.hex_params, &ctx.hex)? / (scale * scale);
    let route_inv = wp(shifted, &ctx.scaled_params, &ctx.scaled)?;
    let drift = (route_hex - route_inv).norm();
    if drift > 1e-8 {
        return Err(UrnError::ToleranceNotMet {
            estimate: drift,
            target: 1e-8,
        });
    }
    Ok(route_inv)
}

/// Complex evaluation of K for the 2-3 tree urn on |u| < 0.9 via the series
/// form of the Abelian integral (convergent there) and the principal delta.
fn t23_k_complex(u: Complex64) -> Result<Complex64> {
    static SERIES: OnceLock<Vec<f64>> = OnceLock::new();
    let coeffs = SERIES.get_or_init(|| {
        use num_traits::ToPrimitive;
        i_series(&UrnSpec::two_three_tree(), 220)
            .coeffs
            .iter()
            .map(|c| c.to_f64().unwrap())
            .collect()
    });
    if u.norm() > 0.9 {
        return Err(UrnError::OutOfRange(format!(
            "lattice PGF needs |u| <= 0.9 inside the disc, got |u| = {}",
            u.norm()
        )));
    }
    let spec = UrnSpec::two_three_tree();
    let u2 = u * u;
    let u6 = u2 * u2 * u2;
    let mut i_val = Complex64::new(0.0, 0.0);
    let mut term = u2;
    for c in coeffs {
        i_val += c * term;
        term *= u6;
    }
    let delta = analytic::delta(&spec, u);
    Ok((Complex64::new(t23_rho(), 0.0) - i_val) / delta)
}

/// Exact lattice representation of the PGF of the 2-3 tree urn at time n:
/// `p_n(u) = sum_{n1, n2} (K(u) + (rho sqrt3 / delta(u)) (n1 e^{i pi/6} +
/// n2 e^{-i pi/6}))^{-n-2}`, truncated over complete hexagonal norm shells
/// of index up to `radius`, with a crude integral tail bound.
pub fn lattice_pgf(n: u64, u: Complex64, radius: u64, tolerance: f64) -> Result<Complex64> {
    if n < 1 {
        return Err(UrnError::OutOfRange("lattice PGF needs n >= 1".into()));
    }
    if radius < 3 {
        return Err(UrnError::OutOfRange("lattice PGF needs radius >= 3".into()));
    }
    // at u = 1 the lattice terms escape to infinity and only the center
    // term K(1)^{-n-2} = 1 survives
    if (u - Complex64::new(1.0, 0.0)).norm() < 1e-14 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let spec = UrnSpec::two_three_tree();
    let k_u = t23_k_complex(u)?;
    let delta = analytic::delta(&spec, u);
    let scale = Complex64::new(t23_rho() * 3f64.sqrt(), 0.0) / delta;

    // tail: terms beyond |w| = radius decay like (|scale| |w|)^{-n-2};
    // integral comparison over the lattice of density 2/sqrt3 per unit area
    let sn = scale.norm();
    let tail_bound =
        8.0 * sn.powi(-(n as i32) - 2) * (radius as f64 - 1.0).powi(-(n as i32)) / n as f64;
    if !tail_bound.is_finite() || tail_bound > tolerance {
        return Err(UrnError::TailTooLarge {
            bound: tail_bound,
            tolerance,
        });
    }

    let hex = Lattice::hexagonal();
    let mut acc = Complex64::new(0.0, 0.0);
    for w in hex.points_in_ball((radius * radius) as f64) {
        let base = k_u + scale * w;
        acc += base.powi(-(n as i32) - 2);
    }
    Ok(acc)
}

/// CSV comparison of the lattice PGF against the exact engine:
/// columns `n,u,lattice,exact,difference` at a fixed real evaluation point.
pub fn pgf_comparison_csv(n_max: u64, u: f64, radius: u64) -> Result<String> {
    use num_traits::ToPrimitive;
    let spec = UrnSpec::two_three_tree();
    let mut out = String::from("n,u,lattice,exact,difference\n");
    for n in 2..=n_max {
        let lat = lattice_pgf(n, Complex64::new(u, 0.0), radius, 1e-3)?.re;
        let poly = crate::exact::pgf_polynomial(&spec, n)?;
        let exact: f64 = poly
            .iter()
            .map(|(e, c)| c.to_f64().unwrap() * u.powi(*e as i32))
            .sum();
        out.push_str(&format!("{n},{u},{lat},{exact},{}\n", lat - exact));
    }
    Ok(out)
}
