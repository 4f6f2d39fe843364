//! Monte Carlo simulation of urn histories and Gaussian-limit diagnostics.
//!
//! The simulator is a sanity layer: it draws actual histories with a seeded,
//! stream-splittable generator ("same seed, same histories"). The Gaussian
//! diagnostics are measured against the DP engines, not against samples:
//! the Kolmogorov distance is computed between the standardized law of the
//! black count and the standard normal CDF, with the standardization taken
//! from the exact (or float-DP) mean and variance.

use crate::error::{Result, UrnError};
use crate::exact::{float_distribution, float_mean_variance};
use crate::urn::{validate, UrnSpec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Reproducible simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
}

/// Empirical distribution of the black count at the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub n: u64,
    pub trials: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn frequency(&self, x: u64) -> f64 {
        *self.counts.get(&x).unwrap_or(&0) as f64 / self.trials as f64
    }

    pub fn mean(&self) -> f64 {
        self.counts
            .iter()
            .map(|(x, c)| *x as f64 * *c as f64)
            .sum::<f64>()
            / self.trials as f64
    }

    /// CSV export with columns `x,count,frequency`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,count,frequency\n");
        for (x, c) in &self.counts {
            out.push_str(&format!("{},{},{}\n", x, c, *c as f64 / self.trials as f64));
        }
        out
    }
}

/// Gaussian-limit diagnostic at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CltReport {
    pub n: u64,
    /// sup-norm distance between the standardized law and the normal CDF
    pub ks_distance: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Runs `trials` independent histories; each trial draws a ball uniformly
/// from the current composition and applies the matrix row. Trial t uses
/// stream t of the seeded generator, so the result is independent of any
/// execution order and bit-identical across runs.
pub fn simulate(spec: &UrnSpec, config: &SimConfig) -> Result<Histogram> {
    validate(spec)?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for trial in 0..config.trials {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(trial);
        let (mut black, mut white) = (spec.a0, spec.b0);
        for _ in 0..config.horizon {
            let t = black + white;
            let pick = rng.gen_range(0..t);
            if pick < black {
                black -= spec.a;
                white += spec.a + spec.s;
            } else {
                white -= spec.b;
                black += spec.b + spec.s;
            }
        }
        *counts.entry(black).or_insert(0) += 1;
    }
    Ok(Histogram {
        n: config.horizon,
        trials: config.trials,
        counts,
    })
}

/// Standard normal CDF at 60-bit precision (exceeds every tolerance here).
fn normal_cdf(x: f64) -> f64 {
    let v = Float::with_val(64, -x / std::f64::consts::SQRT_2);
    (v.erfc() / 2u32).to_f64()
}

/// Kolmogorov distance between a discrete law and the standard normal after
/// standardizing by the law's own mean and standard deviation.
fn ks_against_normal(dist: &[(u64, f64)], mean: f64, sd: f64) -> f64 {
    let mut cdf = 0.0;
    let mut worst = 0.0f64;
    for (x, p) in dist {
        let z = (*x as f64 - mean) / sd;
        let phi = normal_cdf(z);
        worst = worst.max((cdf - phi).abs()); // just before the atom
        cdf += p;
        worst = worst.max((cdf - phi).abs()); // just after
    }
    worst
}

/// Gaussian diagnostic at horizon n, measured on the float-DP law of the
/// black count standardized by its exact mean and variance.
pub fn clt_report(spec: &UrnSpec, n: u64) -> Result<CltReport> {
    validate(spec)?;
    let dist = float_distribution(spec, n);
    let (mean, variance) = float_mean_variance(&dist);
    if variance <= 1e-12 {
        return Err(UrnError::DegenerateDistribution(n));
    }
    let ks = ks_against_normal(&dist, mean, variance.sqrt());
    Ok(CltReport {
        n,
        ks_distance: ks,
        mean,
        variance,
    })
}

pub fn clt_report_json(report: &CltReport) -> serde_json::Value {
    serde_json::json!({
        "n": report.n,
        "ks_distance": report.ks_distance,
        "mean": report.mean,
        "variance": report.variance,
    })
}
