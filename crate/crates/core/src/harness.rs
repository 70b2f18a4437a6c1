//! Synthetic risk profiles and the five-way comparison report.
//!
//! Profiles are drawn from a latent risk curve over a hyperparameter grid
//! `lambda_i = 0.1 + 0.01 i`; each classifier's empirical and test errors are
//! independent binomial draws around its latent risk.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{fp_solve, optimal_posterior_linear};
use crate::types::{
    ClassifierEntry, ConstantPolicy, DiscreteDistribution, DistanceKind, FixedPointConfig,
    PosteriorResult, RiskProfile,
};

/// Identifier of the generator behind [`generate_profile`].
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Separable,
    Moderate,
    Noisy,
}

impl Shape {
    /// Latent risk range.
    pub fn range(self) -> (f64, f64) {
        match self {
            Shape::Separable => (0.0, 0.02),
            Shape::Moderate => (0.05, 0.25),
            Shape::Noisy => (0.2, 0.45),
        }
    }

    /// Jitter scale as a fraction of the range width.
    fn jitter(self) -> f64 {
        match self {
            Shape::Separable => 0.1,
            Shape::Moderate => 0.15,
            Shape::Noisy => 0.2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Separable => "separable",
            Shape::Moderate => "moderate",
            Shape::Noisy => "noisy",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "separable" => Ok(Shape::Separable),
            "moderate" => Ok(Shape::Moderate),
            "noisy" => Ok(Shape::Noisy),
            other => Err(Error::InvalidGenerator(format!("unknown shape '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub h: usize,
    /// Validation sample size, which becomes the profile's `m`.
    pub v: u64,
    pub shape: Shape,
    pub seed: u64,
    pub test_size: Option<u64>,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.h == 0 {
            return Err(Error::InvalidGenerator("h must be at least 1".into()));
        }
        if self.v == 0 {
            return Err(Error::InvalidGenerator("v must be at least 1".into()));
        }
        if self.test_size == Some(0) {
            return Err(Error::InvalidGenerator("test size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Hyperparameter value attached to classifier `i`.
pub fn param_value(i: usize) -> f64 {
    0.1 + 0.01 * i as f64
}

/// Latent true risks: a rising curve across the range plus clamped
/// Gaussian jitter.
pub fn latent_risks(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    spec.validate()?;
    let (lo, hi) = spec.shape.range();
    let width = hi - lo;
    let noise = Normal::new(0.0, spec.shape.jitter() * width)
        .map_err(|e| Error::InvalidGenerator(e.to_string()))?;
    let denom = (spec.h.max(2) - 1) as f64;
    Ok((0..spec.h)
        .map(|i| {
            let base = lo + width * i as f64 / denom;
            (base + noise.sample(rng)).clamp(lo, hi)
        })
        .collect())
}

/// Draws a profile whose classifiers have the given latent risks.
pub fn sample_profile(latent: &[f64], v: u64, test_size: Option<u64>, rng: &mut ChaCha8Rng) -> Result<RiskProfile> {
    let draw = |n: u64, p: f64, rng: &mut ChaCha8Rng| -> Result<f64> {
        let b = Binomial::new(n, p).map_err(|e| Error::InvalidGenerator(e.to_string()))?;
        Ok(b.sample(rng) as f64 / n as f64)
    };
    let mut entries = Vec::with_capacity(latent.len());
    for (i, &l) in latent.iter().enumerate() {
        let emp = draw(v, l, rng)?;
        let test = match test_size {
            Some(t) => Some(draw(t, l, rng)?),
            None => None,
        };
        entries.push(ClassifierEntry {
            id: i as i64,
            param_value: Some(param_value(i)),
            emp_risk: emp,
            test_err: test,
        });
    }
    RiskProfile::new(entries, v)
}

/// Profile together with the latent risks it was drawn from.
pub fn generate_with_latent(spec: &GeneratorSpec) -> Result<(RiskProfile, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let latent = latent_risks(spec, &mut rng)?;
    let profile = sample_profile(&latent, spec.v, spec.test_size, &mut rng)?;
    Ok((profile, latent))
}

/// Deterministic synthetic profile for `spec`.
pub fn generate_profile(spec: &GeneratorSpec) -> Result<RiskProfile> {
    generate_with_latent(spec).map(|(p, _)| p)
}

/// `sum_i q_i * test_err_i`.
pub fn gibbs_test_error(q: &DiscreteDistribution, profile: &RiskProfile) -> Result<f64> {
    if q.len() != profile.len() {
        return Err(Error::LengthMismatch {
            expected: profile.len(),
            found: q.len(),
        });
    }
    let errs = profile.test_errors().ok_or(Error::MissingTestErrors)?;
    Ok(q.expectation(&errs))
}

/// Herfindahl-Hirschman index `sum_i q_i^2`.
pub fn hhi(q: &DiscreteDistribution) -> f64 {
    q.weights().iter().map(|w| w * w).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub kind: DistanceKind,
    pub bound: Option<f64>,
    pub saturated: bool,
    pub gibbs_emp_risk: Option<f64>,
    pub gibbs_test_error: Option<f64>,
    pub hhi: Option<f64>,
    pub support_size: Option<usize>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub converged: Option<bool>,
    pub log_ik: Option<f64>,
    pub wall_time_secs: f64,
    /// Set instead of the numeric columns when the kind failed.
    pub error: Option<String>,
    #[serde(skip)]
    pub posterior: Option<DiscreteDistribution>,
}

impl ComparisonRow {
    fn from_result(res: &PosteriorResult, profile: &RiskProfile, secs: f64) -> Self {
        ComparisonRow {
            kind: res.kind,
            bound: Some(res.bound.value),
            saturated: res.bound.saturated,
            gibbs_emp_risk: Some(res.bound.gibbs_emp_risk),
            gibbs_test_error: gibbs_test_error(&res.posterior, profile).ok(),
            hhi: Some(hhi(&res.posterior)),
            support_size: Some(res.support_size),
            iterations: Some(res.iterations),
            residual: Some(res.residual),
            converged: Some(res.converged),
            log_ik: Some(res.bound.log_ik),
            wall_time_secs: secs,
            error: None,
            posterior: Some(res.posterior.clone()),
        }
    }

    fn failed(kind: DistanceKind, err: &Error, secs: f64) -> Self {
        ComparisonRow {
            kind,
            bound: None,
            saturated: false,
            gibbs_emp_risk: None,
            gibbs_test_error: None,
            hhi: None,
            support_size: None,
            iterations: None,
            residual: None,
            converged: None,
            log_ik: None,
            wall_time_secs: secs,
            error: Some(err.to_string()),
            posterior: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub sample_size: u64,
    pub delta: f64,
    pub constant_policy: ConstantPolicy,
    /// One row per kind in the order of [`DistanceKind::ALL`].
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn row(&self, kind: DistanceKind) -> &ComparisonRow {
        self.rows.iter().find(|r| r.kind == kind).expect("every kind has a row")
    }
}

/// Optimizes all five bounds under a uniform prior. A failing kind yields a
/// row with an error label; the other rows are unaffected.
pub fn compare_all(
    profile: &RiskProfile,
    delta: f64,
    config: &FixedPointConfig,
    policy: ConstantPolicy,
) -> Result<ComparisonReport> {
    let prior = DiscreteDistribution::uniform(profile.len())?;
    let rows: Vec<ComparisonRow> = DistanceKind::ALL
        .par_iter()
        .map(|&kind| {
            let start = Instant::now();
            let res = match kind {
                DistanceKind::Lin => optimal_posterior_linear(profile, &prior, delta),
                _ => fp_solve(kind, profile, &prior, delta, config, policy),
            };
            let secs = start.elapsed().as_secs_f64();
            match res {
                Ok(r) => ComparisonRow::from_result(&r, profile, secs),
                Err(e) => ComparisonRow::failed(kind, &e, secs),
            }
        })
        .collect();
    Ok(ComparisonReport {
        sample_size: profile.sample_size(),
        delta,
        constant_policy: policy,
        rows,
    })
}
