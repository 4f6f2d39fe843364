//! Dense truncated power-series arithmetic over `BigRational`.
//!
//! Vectors are coefficient lists of ordinary power series in one compressed
//! variable; index k holds the coefficient of the k-th power. Everything is
//! truncated to a caller-supplied length `n`.

use crate::error::{Result, UrnError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Dense = Vec<BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_u(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zeros(n: usize) -> Dense {
    vec![BigRational::zero(); n]
}

pub fn one(n: usize) -> Dense {
    let mut v = zeros(n);
    v[0] = BigRational::one();
    v
}

pub fn get(f: &Dense, k: usize) -> BigRational {
    f.get(k).cloned().unwrap_or_else(BigRational::zero)
}

pub fn add(f: &Dense, g: &Dense, n: usize) -> Dense {
    (0..n).map(|k| get(f, k) + get(g, k)).collect()
}

pub fn sub(f: &Dense, g: &Dense, n: usize) -> Dense {
    (0..n).map(|k| get(f, k) - get(g, k)).collect()
}

pub fn mul(f: &Dense, g: &Dense, n: usize) -> Dense {
    let mut r = zeros(n);
    for (i, a) in f.iter().enumerate().take(n) {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            if i + j >= n {
                break;
            }
            if !b.is_zero() {
                r[i + j] += a * b;
            }
        }
    }
    r
}

/// Integer power by binary exponentiation.
pub fn pow(f: &Dense, e: u64, n: usize) -> Dense {
    let mut r = one(n);
    if e == 0 {
        return r;
    }
    let mut base: Dense = f.iter().take(n).cloned().collect();
    let mut e = e;
    loop {
        if e & 1 == 1 {
            r = mul(&r, &base, n);
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = mul(&base, &base, n);
    }
    r
}

/// Rational power of a series with unit constant term, by the Miller
/// recurrence: m c_m = sum_{k=1..m} (alpha k - (m-k)) u_k c_{m-k}.
pub fn pow_rational(u: &Dense, alpha: &BigRational, n: usize) -> Dense {
    assert!(u[0].is_one(), "pow_rational needs unit constant term");
    let mut c = zeros(n);
    c[0] = BigRational::one();
    for m in 1..n {
        let mut acc = BigRational::zero();
        for k in 1..=m {
            let uk = get(u, k);
            if uk.is_zero() {
                continue;
            }
            let factor =
                alpha * BigRational::from(BigInt::from(k)) - BigRational::from(BigInt::from(m - k));
            acc += factor * uk * &c[m - k];
        }
        c[m] = acc / BigRational::from(BigInt::from(m));
    }
    c
}

/// log of a series with unit constant term:
/// m l_m = m u_m - sum_{k=1..m-1} k l_k u_{m-k}.
pub fn log_unit(u: &Dense, n: usize) -> Dense {
    assert!(u[0].is_one(), "log_unit needs unit constant term");
    let mut l = zeros(n);
    for m in 1..n {
        let mut acc = BigRational::from(BigInt::from(m)) * get(u, m);
        for k in 1..m {
            if !l[k].is_zero() {
                acc -= BigRational::from(BigInt::from(k)) * &l[k] * get(u, m - k);
            }
        }
        l[m] = acc / BigRational::from(BigInt::from(m));
    }
    l
}

/// Composition f(g) for g with zero constant term (Horner scheme).
pub fn compose(f: &Dense, g: &Dense, n: usize) -> Dense {
    assert!(g.is_empty() || g[0].is_zero(), "composition needs g(0) = 0");
    let mut r = zeros(n);
    for c in f.iter().take(n).rev() {
        r = mul(&r, g, n);
        r[0] += c;
    }
    r
}

/// Multiply by the variable: shift coefficients up by one.
pub fn shift_up(f: &Dense, n: usize) -> Dense {
    let mut r = zeros(n);
    for k in 1..n {
        r[k] = get(f, k - 1);
    }
    r
}

/// Substitute `w -> c w`: coefficient k picks up a factor c^k.
pub fn scale_var(f: &Dense, c: &BigRational) -> Dense {
    let mut p = BigRational::one();
    f.iter()
        .map(|a| {
            let r = a * &p;
            p *= c;
            r
        })
        .collect()
}

/// Reciprocal 1/f of a series with nonzero constant term.
pub fn invert(f: &Dense, n: usize) -> Dense {
    assert!(!f[0].is_zero(), "inversion needs nonzero constant term");
    let mut q = zeros(n);
    q[0] = f[0].recip();
    for k in 1..n {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            let fi = get(f, i);
            if !fi.is_zero() {
                acc += fi * &q[k - i];
            }
        }
        q[k] = -acc / &f[0];
    }
    q
}

/// Solves the compressed reversion problem: given `z = y F(y^m)` with
/// `F(0) != 0`, returns `G` such that `y = z G(z^m)`, i.e. the root of
/// `Phi(G) = G F(W G^m) - 1` in `W = z^m`. Newton iteration with doubling
/// truncation; each step solves to twice the current order.
pub fn revert_compressed(f: &Dense, m: u64, n: usize) -> Result<Dense> {
    if f.is_empty() || f[0].is_zero() {
        return Err(UrnError::ReversionFailure(
            "vanishing leading coefficient".into(),
        ));
    }
    // F'(w), for the Newton derivative
    let fp: Dense = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
        .collect();
    let mut g = vec![f[0].recip()];
    let mut k = 1usize;
    while k < n {
        k = (2 * k).min(n);
        g.resize(k, BigRational::zero());
        let arg = shift_up(&pow(&g, m, k), k); // A = W G^m
        let c_at = compose(f, &arg, k); // F(A)
        let mut phi = mul(&g, &c_at, k);
        phi[0] -= BigRational::one();
        if phi.iter().all(|c| c.is_zero()) {
            continue;
        }
        // Phi'(G) = F(A) + m F'(A) W G^m
        let cp_at = compose(&fp, &arg, k);
        let mut phip = mul(&cp_at, &arg, k);
        for c in phip.iter_mut() {
            *c *= BigRational::from(BigInt::from(m));
        }
        let phip = add(&c_at, &phip, k);
        let delta = mul(&phi, &invert(&phip, k), k);
        g = sub(&g, &delta, k);
    }
    Ok(g)
}

/// Coefficients of (1 - w)^e for integer e >= 0, truncated.
pub fn one_minus_w_pow(e: u64, n: usize) -> Dense {
    let mut v = zeros(n);
    let mut c = BigRational::one();
    for k in 0..n.min(e as usize + 1) {
        v[k] = c.clone();
        // next binomial coefficient with alternating sign
        c = -c * rat_u(e - k as u64, k as u64 + 1);
    }
    v
}
