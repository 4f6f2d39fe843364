//! Exact and asymptotic analysis of balanced two-color urn processes with
//! subtraction: exact composition laws by dynamic programming, exact series
//! expansions of the attached Abelian integrals, singularity data, moment
//! polynomials, large-deviation rates, elliptic representations, and Monte
//! Carlo simulation — every analytic result cross-validated against the
//! exact combinatorial engine.

pub mod analytic;
pub mod deviation;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod hp;
pub mod moments;
pub mod series;
pub mod simulate;
pub mod urn;

#[doc(hidden)]
pub mod testpool;

pub use error::{Result, UrnError};
pub use urn::{history_count, validate, DerivedConstants, UrnSpec};
