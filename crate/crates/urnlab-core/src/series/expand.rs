//! Exact series expansions of the urn's special functions.
//!
//! All expansions live on the Fermat curve u^h + v^h = 1 attached to the
//! model. The key objects:
//!
//! - `I(u) = int_0^u t^{a-1} (1-t^h)^{-(a+b)/h} dt`, expanded termwise from
//!   the binomial series; only exponents `a + j h` occur.
//! - `psi`, defined implicitly by `psi(I(u)) = u^{a0} (1-u^h)^{-t0/h}`,
//!   expanded at the origin by exact reversion in the variable `y = u^a`.
//! - the singular expansion of `psi` at its dominant singularity `rho`,
//!   carried against the variable `W = s (rho - z)` so every coefficient is
//!   an exact rational.
//! - `K(u) = (1-u^h)^{-s/h} int_u^1 ...`, Taylor-expanded at u = 1 through
//!   the linear ODE `(1-u^h) K' = s u^{h-1} K - u^{a-1}`, `K(1) = 1/s`.

use super::dense::{self, Dense};
use super::FormalSeries;
use crate::error::{Result, UrnError};
use crate::urn::{validate, UrnSpec};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

/// Puiseux data of `psi` at `rho`:
/// `psi(z) = W^{prefactor} * sum_k a_k W^{k * puiseux_step}`, `W = s (rho - z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularExpansion {
    /// `-t0 / s`.
    pub prefactor_exponent: Rational64,
    /// `h / s`.
    pub puiseux_step: Rational64,
    /// Coefficients of the analytic factor; `a_k[0] = 1`.
    pub a_k: Vec<BigRational>,
}

/// Binomial-series coefficients of I in the compressed variable:
/// `I = y * F(y^m)` with `y = u^a`, `m = h/a`,
/// `F_j = rf((a+b)/h, j) / j! / (a + j h)`.
pub(crate) fn i_series_compressed(spec: &UrnSpec, n: usize) -> Dense {
    let h = spec.h();
    let alpha = dense::rat_u(spec.a + spec.b, h);
    let mut coeffs = Vec::with_capacity(n);
    let mut c = BigRational::one();
    for j in 0..n as u64 {
        if j > 0 {
            c = c * (&alpha + BigRational::from(BigInt::from(j - 1)))
                / BigRational::from(BigInt::from(j));
        }
        coeffs.push(&c * dense::rat_u(1, spec.a + j * h));
    }
    coeffs
}

/// The Abelian integral `I(u)` as an exact series at the origin.
pub fn i_series(spec: &UrnSpec, order: usize) -> FormalSeries {
    assert!(order >= 1);
    FormalSeries::new(
        "u",
        Rational64::from_integer(spec.a as i64),
        Rational64::from_integer(spec.h() as i64),
        i_series_compressed(spec, order),
    )
}

/// Compressed inverse of the Abelian integral: `y(z) = z * G(z^m)` where
/// `y = u^a` and `z = I(u)`. Depends only on the matrix, not on (a0, b0).
pub(crate) fn inverse_abelian_compressed(spec: &UrnSpec, n: usize) -> Result<Dense> {
    let m = spec.h() / spec.a;
    dense::revert_compressed(&i_series_compressed(spec, n), m, n)
}

/// Taylor expansion of `psi` at the origin.
///
/// With `J(u) = u^{a0} (1-u^h)^{-t0/h}` and `y = u^a`, reversion gives
/// `psi(z) = y(z)^{a0/a} * (1 - y(z)^m)^{-t0/h}`; only exponents
/// `a0/a + j h/a` occur, realizing the support periodicity of the model.
pub fn psi_series_at_zero(spec: &UrnSpec, order: usize) -> Result<FormalSeries> {
    validate(spec)?;
    let n = order;
    let h = spec.h();
    let m = h / spec.a;
    let p = spec.a0 / spec.a;
    let g = inverse_abelian_compressed(spec, n)?;
    let g_p = dense::pow(&g, p, n);
    let y_m = dense::shift_up(&dense::pow(&g, m, n), n); // y^m = W G^m in W = z^m
    let mut one_minus_ym = dense::zeros(n);
    one_minus_ym[0] = BigRational::one();
    let one_minus_ym = dense::sub(&one_minus_ym, &y_m, n);
    let b = dense::pow_rational(&one_minus_ym, &-dense::rat_u(spec.t0(), h), n);
    Ok(FormalSeries::new(
        "z",
        Rational64::new(spec.a0 as i64, spec.a as i64),
        Rational64::new(h as i64, spec.a as i64),
        dense::mul(&g_p, &b, n),
    ))
}

/// The polynomial `Omega(w)/h` where `Omega(y^h) = ((1-(1-y^h)^h)/y^h)` is
/// the h-th power of the analytic factor of `delta` at u = 1.
pub(crate) fn omega_over_h(h: u64, n: usize) -> Dense {
    let mut v = dense::zeros(n);
    // Omega/h = sum_{k>=0} (-1)^k C(h, k+1)/h w^k
    let mut binom = BigRational::from(BigInt::from(h)); // C(h,1)
    for k in 0..n.min(h as usize) {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        v[k] = &binom * dense::rat(sign, h as i64);
        binom = binom * dense::rat_u(h - (k as u64 + 1), k as u64 + 2);
    }
    v
}

/// The singular expansion of `psi` at `rho`, with exact rational
/// coefficients against the variable `W = s (rho - z)`.
///
/// Construction: with the uniformizer `1 - u = tau^h` and `T = h^{1/h} tau`,
/// `W = T^s U(T^h / h)` and `psi = T^{-t0} V(T^h / h)` where U, V are
/// explicit rational series. Taking the exact s-th root of W and reverting
/// eliminates T; the irrational scale h^{1/h} never enters any coefficient.
/// A full round-trip identity is re-checked; a mismatch (which would falsify
/// the rationality of the normalization) raises `NormalizationBreach`.
pub fn singular_expansion(spec: &UrnSpec, order: usize) -> Result<SingularExpansion> {
    validate(spec)?;
    let n = order + 2;
    let (a, b, s, h, a0, t0) = (spec.a, spec.b, spec.s, spec.h(), spec.a0, spec.t0());
    let om = omega_over_h(h, n);

    // rho - z = (1/s)(h^{1/h} tau)^s U(tau^h):
    //   E = (1-w)^{a-1} (Omega/h)^{-(a+b)/h},  U_k = E_k * s/(s+kh)
    let e = dense::mul(
        &dense::one_minus_w_pow(a - 1, n),
        &dense::pow_rational(&om, &-dense::rat_u(a + b, h), n),
        n,
    );
    let u_series: Dense = e
        .iter()
        .enumerate()
        .map(|(k, c)| c * dense::rat_u(s, s + k as u64 * h))
        .collect();
    // psi = (h^{1/h} tau)^{-t0} V(tau^h): V = (1-w)^{a0} (Omega/h)^{-t0/h}
    let v_series = dense::mul(
        &dense::one_minus_w_pow(a0, n),
        &dense::pow_rational(&om, &-dense::rat_u(t0, h), n),
        n,
    );
    // rescale tau^h -> T^h/h
    let inv_h = dense::rat(1, h as i64);
    let u_hat = dense::scale_var(&u_series, &inv_h);
    let v_hat = dense::scale_var(&v_series, &inv_h);

    // W^{1/s} = T C(T^h) with C = U_hat^{1/s}; revert to T = W^{1/s} D(W^{h/s})
    let c_series = dense::pow_rational(&u_hat, &dense::rat_u(1, s), n);
    let d_series = dense::revert_compressed(&c_series, h, n)?;

    // A(x) = D(x)^{-t0} V_hat(x D(x)^h)
    let d_inv_t0 = dense::pow_rational(&d_series, &-dense::rat_u(t0, 1), n);
    let arg = dense::shift_up(&dense::pow(&d_series, h, n), n);
    let a_series = dense::mul(&d_inv_t0, &dense::compose(&v_hat, &arg, n), n);

    // Round-trip: V_hat(x) must equal U_hat^{-t0/s} A(x U_hat^{h/s}).
    let lhs = &v_hat;
    let pref = dense::pow_rational(&u_hat, &-dense::rat_u(t0, s), n);
    let arg2 = dense::shift_up(&dense::pow_rational(&u_hat, &dense::rat_u(h, s), n), n);
    let rhs = dense::mul(&pref, &dense::compose(&a_series, &arg2, n), n);
    for k in 0..order {
        if lhs[k] != rhs[k] {
            return Err(UrnError::NormalizationBreach(format!(
                "round-trip mismatch at order {k}: {} vs {}",
                lhs[k], rhs[k]
            )));
        }
    }

    let mut a_k: Vec<BigRational> = a_series.into_iter().take(order).collect();
    if let Some(first) = a_k.first_mut() {
        debug_assert!(first.is_one());
        *first = BigRational::one();
    }
    Ok(SingularExpansion {
        prefactor_exponent: Rational64::new(-(t0 as i64), s as i64),
        puiseux_step: Rational64::new(h as i64, s as i64),
        a_k,
    })
}

/// Exact Taylor series of `K` at u = 1, in the variable `x = u - 1`.
///
/// Solves the coefficient recurrence of the ODE
/// `(1-u^h) K'(u) = s u^{h-1} K(u) - u^{a-1}` with `K(1) = 1/s`
/// (the removable singularity pins the constant term). The ODE itself is
/// certified against the quadrature-based K by a residual test elsewhere.
pub fn k_series_at_one(spec: &UrnSpec, order: usize) -> FormalSeries {
    assert!(order >= 1);
    let (a, s, h) = (spec.a, spec.s, spec.h());
    // P(x) = 1-(1+x)^h, Q(x) = s(1+x)^{h-1}, R(x) = (1+x)^{a-1}
    let binom = |top: u64, k: u64| -> BigRational {
        if k > top {
            return BigRational::zero();
        }
        let mut c = BigRational::one();
        for i in 0..k {
            c = c * dense::rat_u(top - i, i + 1);
        }
        c
    };
    let mut k = vec![BigRational::zero(); order];
    k[0] = dense::rat_u(1, s);
    for m in 1..order as u64 {
        let mut acc = binom(a - 1, m); // R_m
        for i in 2..=m {
            // P_i = -C(h, i)
            let p_i = -binom(h, i);
            if !p_i.is_zero() {
                acc += p_i * BigRational::from(BigInt::from(m + 1 - i)) * &k[(m + 1 - i) as usize];
            }
        }
        for i in 1..=m {
            let q_i = BigRational::from(BigInt::from(s)) * binom(h - 1, i);
            if !q_i.is_zero() {
                acc -= q_i * &k[(m - i) as usize];
            }
        }
        k[m as usize] = acc / dense::rat_u(h * m + s, 1);
    }
    FormalSeries::new("h", Rational64::zero(), Rational64::one(), k)
}

/// The initial-condition factorization `psi = psi_I^{a0/a} * psi_II^{b0/b}`:
/// returns the two factors for an urn's matrix, expanded at the origin.
/// `psi_I` corresponds to starting with exactly `a` black balls, `psi_II`
/// to starting with exactly `b` white balls.
pub fn factorize_psi(spec: &UrnSpec, order: usize) -> Result<(FormalSeries, FormalSeries)> {
    let spec_i = UrnSpec::new(spec.a, spec.b, spec.s, spec.a, 0);
    let spec_ii = UrnSpec::new(spec.a, spec.b, spec.s, 0, spec.b);
    Ok((
        psi_series_at_zero(&spec_i, order)?,
        psi_series_at_zero(&spec_ii, order)?,
    ))
}
