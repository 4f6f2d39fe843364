//! Urn model definition, tenability validation and deterministic counting.
//!
//! A balanced two-color urn with subtraction is described by the replacement
//! matrix `(-a, a+s; b+s, -b)` together with an initial composition
//! `(a0, b0)`. Drawing a black ball removes `a` black balls and inserts
//! `a+s` white ones; drawing a white ball inserts `b+s` black balls and
//! removes `b` white ones. Every step grows the population by exactly `s`,
//! so the size at time `n` is the deterministic `t0 + n*s`.

use crate::error::{Result, UrnError};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// A balanced subtractive urn model: matrix magnitudes plus the initial composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UrnSpec {
    /// Black-diagonal magnitude (the matrix entry is `-a`).
    pub a: u64,
    /// White-diagonal magnitude (the matrix entry is `-b`).
    pub b: u64,
    /// Balance: net growth of the population per step.
    pub s: u64,
    /// Initial number of black balls.
    pub a0: u64,
    /// Initial number of white balls.
    pub b0: u64,
}

/// Quantities derived from a validated spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Initial population size `a0 + b0`.
    pub t0: u64,
    /// Complexity index `a + b + s`.
    pub h: u64,
    /// Periodicity modulus `h / a` of the support of the black count.
    pub balance_class: u64,
}

impl UrnSpec {
    pub fn new(a: u64, b: u64, s: u64, a0: u64, b0: u64) -> Self {
        UrnSpec { a, b, s, a0, b0 }
    }

    /// The 2-3 tree urn `(-2, 3; 4, -3)` started with two black balls.
    pub fn two_three_tree() -> Self {
        UrnSpec::new(2, 3, 1, 2, 0)
    }

    /// The urn `(-1, 4; 4, -1)` whose fundamental polygon is a five-branch star.
    pub fn pentagonal() -> Self {
        UrnSpec::new(1, 1, 3, 1, 0)
    }

    /// Population size at time `n`.
    pub fn population(&self, n: u64) -> u64 {
        self.a0 + self.b0 + n * self.s
    }

    /// Complexity index `h = a + b + s`.
    pub fn h(&self) -> u64 {
        self.a + self.b + self.s
    }

    pub fn t0(&self) -> u64 {
        self.a0 + self.b0
    }

    /// Same matrix with the roles of the two colors exchanged.
    pub fn mirror(&self) -> Self {
        UrnSpec::new(self.b, self.a, self.s, self.b0, self.a0)
    }
}

/// Checks positivity and the tenability divisibilities, returning the derived
/// constants on success.
///
/// Tenability requires `a | a0`, `b | b0`, `a | b+s` and `b | a+s`; together
/// these guarantee the process can never be asked to remove more balls of a
/// color than are present. They also force `a | h` and `b | h`.
pub fn validate(spec: &UrnSpec) -> Result<DerivedConstants> {
    for (name, v) in [("a", spec.a), ("b", spec.b), ("s", spec.s)] {
        if v == 0 {
            return Err(UrnError::NonPositiveParameter(format!(
                "{name} must be >= 1"
            )));
        }
    }
    if spec.a0 + spec.b0 == 0 {
        return Err(UrnError::NonPositiveParameter(
            "empty urn: a0 + b0 must be >= 1".into(),
        ));
    }
    if spec.a0 % spec.a != 0 {
        return Err(UrnError::TenabilityViolation(format!(
            "a = {} does not divide a0 = {}",
            spec.a, spec.a0
        )));
    }
    if spec.b0 % spec.b != 0 {
        return Err(UrnError::TenabilityViolation(format!(
            "b = {} does not divide b0 = {}",
            spec.b, spec.b0
        )));
    }
    if (spec.b + spec.s) % spec.a != 0 {
        return Err(UrnError::TenabilityViolation(format!(
            "a = {} does not divide b + s = {}",
            spec.a,
            spec.b + spec.s
        )));
    }
    if (spec.a + spec.s) % spec.b != 0 {
        return Err(UrnError::TenabilityViolation(format!(
            "b = {} does not divide a + s = {}",
            spec.b,
            spec.a + spec.s
        )));
    }
    let h = spec.h();
    debug_assert_eq!(h % spec.a, 0);
    Ok(DerivedConstants {
        t0: spec.t0(),
        h,
        balance_class: h / spec.a,
    })
}

/// Total number of evolution histories of length `n`:
/// `t0 (t0+s) (t0+2s) ... (t0+(n-1)s)`.
pub fn history_count(spec: &UrnSpec, n: u64) -> BigInt {
    let mut total = BigInt::from(1u32);
    let mut t = spec.t0();
    for _ in 0..n {
        total *= BigInt::from(t);
        t += spec.s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testpool::tenable_pool;
    use num_traits::One;

    #[test]
    fn validate_two_three_tree() {
        let d = validate(&UrnSpec::new(2, 3, 1, 2, 0)).unwrap();
        assert_eq!(d.t0, 2);
        assert_eq!(d.h, 6);
        assert_eq!(d.balance_class, 3);
    }

    #[test]
    fn validate_rejects_nondivisible_a0() {
        let err = validate(&UrnSpec::new(2, 3, 1, 3, 0)).unwrap_err();
        match err {
            UrnError::TenabilityViolation(msg) => assert!(msg.contains("a0")),
            other => panic!("expected tenability violation, got {other:?}"),
        }
    }

    #[test]
    fn validate_pentagonal() {
        let d = validate(&UrnSpec::new(1, 1, 3, 1, 0)).unwrap();
        assert_eq!(d.t0, 1);
        assert_eq!(d.h, 5);
        assert_eq!(d.balance_class, 5);
    }

    #[test]
    fn validate_rejects_empty_and_nonpositive() {
        assert!(matches!(
            validate(&UrnSpec::new(1, 1, 1, 0, 0)),
            Err(UrnError::NonPositiveParameter(_))
        ));
        assert!(matches!(
            validate(&UrnSpec::new(1, 1, 0, 1, 0)),
            Err(UrnError::NonPositiveParameter(_))
        ));
    }

    #[test]
    fn validate_is_pure() {
        let spec = UrnSpec::two_three_tree();
        assert_eq!(validate(&spec).unwrap(), validate(&spec).unwrap());
    }

    #[test]
    fn history_count_examples() {
        // t0 = 2, s = 1, n = 3: 2*3*4
        assert_eq!(
            history_count(&UrnSpec::new(2, 3, 1, 2, 0), 3),
            BigInt::from(24)
        );
        // t0 = 3, s = 3, n = 2: 3*6
        assert_eq!(
            history_count(&UrnSpec::new(1, 1, 3, 3, 0), 2),
            BigInt::from(18)
        );
        // t0 = 2, s = 1, n = 10: 2*3*...*11 = 11!/1!
        let mut fact11 = BigInt::one();
        for k in 2..=11u32 {
            fact11 *= k;
        }
        assert_eq!(history_count(&UrnSpec::new(2, 3, 1, 2, 0), 10), fact11);
    }

    #[test]
    fn history_count_recurrence() {
        for spec in tenable_pool() {
            let mut prev = history_count(&spec, 0);
            for n in 0..50u64 {
                let next = history_count(&spec, n + 1);
                assert_eq!(next, &prev * BigInt::from(spec.population(n)));
                prev = next;
            }
        }
    }

    /// Both closed forms of the history count agree when s | t0:
    /// the product form equals n! s^n C(n + t0/s - 1, n).
    #[test]
    fn history_count_closed_form() {
        let mut checked = 0;
        for spec in tenable_pool() {
            let t0 = spec.t0();
            if t0 % spec.s != 0 {
                continue;
            }
            let q = t0 / spec.s;
            for n in 0..=30u64 {
                let mut rhs = BigInt::one();
                for k in 1..=n {
                    rhs *= BigInt::from(k) * BigInt::from(spec.s); // n! s^n
                }
                // C(n + q - 1, n) = prod_{i=1..n} (q - 1 + i) / i
                let mut num = BigInt::one();
                let mut den = BigInt::one();
                for i in 1..=n {
                    num *= BigInt::from(q - 1 + i);
                    den *= BigInt::from(i);
                }
                rhs = rhs * num / den;
                assert_eq!(history_count(&spec, n), rhs, "spec {spec:?} n {n}");
            }
            checked += 1;
        }
        assert!(checked >= 10, "pool too small: {checked}");
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = UrnSpec::two_three_tree();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"a":2,"b":3,"s":1,"a0":2,"b0":0}"#);
        let back: UrnSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
