//! Domain types shared by every module: risk profiles, distributions over the
//! classifier set, bound specifications and optimizer results.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::log_sum_exp;

/// Lower bound on posterior weights in fixed-point iterations.
pub const DEFAULT_POSITIVITY_FLOOR: f64 = 1e-15;

/// Distance function between Gibbs empirical risk and Gibbs true risk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    /// `l - lhat`
    Lin,
    /// `(l - lhat)^2`
    Sq,
    /// `2 (l - lhat)^2`
    Pinsker,
    /// Sixth-degree refinement of Pinsker's inequality.
    Ch,
    /// Binary relative entropy.
    Kl,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 5] = [
        DistanceKind::Lin,
        DistanceKind::Sq,
        DistanceKind::Pinsker,
        DistanceKind::Ch,
        DistanceKind::Kl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::Lin => "lin",
            DistanceKind::Sq => "sq",
            DistanceKind::Pinsker => "pinsker",
            DistanceKind::Ch => "ch",
            DistanceKind::Kl => "kl",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lin" | "linear" => Ok(DistanceKind::Lin),
            "sq" | "squared" => Ok(DistanceKind::Sq),
            "pinsker" | "p" => Ok(DistanceKind::Pinsker),
            "ch" => Ok(DistanceKind::Ch),
            "kl" => Ok(DistanceKind::Kl),
            other => Err(format!("unknown distance kind '{other}'")),
        }
    }
}

/// How the threshold constant `I^K_phi(m)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantPolicy {
    /// Supremum of the binomial moment, evaluated in log-space.
    #[serde(rename = "exact")]
    ExactLogspace,
    /// The distribution-free constant `2 sqrt(m)`.
    #[serde(rename = "two-sqrt-m")]
    TwoSqrtM,
    /// Same numbers as `ExactLogspace`; kept as a separate label for reports.
    #[serde(rename = "begin-exact")]
    BeginExact,
}

impl ConstantPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstantPolicy::ExactLogspace => "exact",
            ConstantPolicy::TwoSqrtM => "two-sqrt-m",
            ConstantPolicy::BeginExact => "begin-exact",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, ConstantPolicy::ExactLogspace | ConstantPolicy::BeginExact)
    }
}

impl fmt::Display for ConstantPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstantPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" | "exact-logspace" => Ok(ConstantPolicy::ExactLogspace),
            "two-sqrt-m" | "2sqrtm" => Ok(ConstantPolicy::TwoSqrtM),
            "begin-exact" | "begin" => Ok(ConstantPolicy::BeginExact),
            other => Err(format!("unknown constant policy '{other}'")),
        }
    }
}

/// One classifier of the finite set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierEntry {
    pub id: i64,
    /// Hyperparameter the classifier was trained with, if known.
    pub param_value: Option<f64>,
    pub emp_risk: f64,
    pub test_err: Option<f64>,
}

impl ClassifierEntry {
    pub fn new(id: i64, emp_risk: f64) -> Self {
        ClassifierEntry {
            id,
            param_value: None,
            emp_risk,
            test_err: None,
        }
    }
}

/// Empirical risks of the classifier set and the size of the sample they were
/// measured on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskProfile {
    entries: Vec<ClassifierEntry>,
    sample_size: u64,
}

impl RiskProfile {
    /// Builds a validated profile.
    pub fn new(entries: Vec<ClassifierEntry>, sample_size: u64) -> Result<Self> {
        validate_profile(RiskProfile {
            entries,
            sample_size,
        })
    }

    /// Profile with ids `0..n` and no test errors.
    pub fn from_risks(risks: &[f64], sample_size: u64) -> Result<Self> {
        let entries = risks
            .iter()
            .enumerate()
            .map(|(i, &r)| ClassifierEntry::new(i as i64, r))
            .collect();
        Self::new(entries, sample_size)
    }

    pub fn entries(&self) -> &[ClassifierEntry] {
        &self.entries
    }

    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn risks(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.emp_risk).collect()
    }

    /// Test errors of every entry, or `None` if any entry lacks one.
    pub fn test_errors(&self) -> Option<Vec<f64>> {
        self.entries.iter().map(|e| e.test_err).collect()
    }

    /// True when every empirical risk is identical.
    pub fn has_constant_risk(&self) -> bool {
        let first = self.entries[0].emp_risk;
        self.entries.iter().all(|e| e.emp_risk == first)
    }

    /// Indices sorted by non-decreasing empirical risk; ties keep id order.
    pub fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| {
            let (ea, eb) = (&self.entries[a], &self.entries[b]);
            ea.emp_risk
                .total_cmp(&eb.emp_risk)
                .then(ea.id.cmp(&eb.id))
        });
        order
    }

    /// Sub-profile made of the given entries, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<RiskProfile> {
        let entries = indices.iter().map(|&i| self.entries[i].clone()).collect();
        RiskProfile::new(entries, self.sample_size)
    }
}

/// Checks every profile invariant and hands the profile back.
pub fn validate_profile(raw: RiskProfile) -> Result<RiskProfile> {
    if raw.entries.is_empty() {
        return Err(Error::EmptyProfile);
    }
    if raw.sample_size == 0 {
        return Err(Error::BadSampleSize);
    }
    let in_unit = |x: f64| (0.0..=1.0).contains(&x);
    let mut seen = HashSet::with_capacity(raw.entries.len());
    for (index, e) in raw.entries.iter().enumerate() {
        if !in_unit(e.emp_risk) {
            return Err(Error::RiskOutOfRange { index });
        }
        if let Some(t) = e.test_err {
            if !in_unit(t) {
                return Err(Error::RiskOutOfRange { index });
            }
        }
        if !seen.insert(e.id) {
            return Err(Error::DuplicateId(e.id));
        }
    }
    Ok(raw)
}

/// A probability distribution over the classifier set, stored as normalized
/// log-weights. Zero weights are `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    log_weights: Vec<f64>,
}

impl DiscreteDistribution {
    /// Normalizes non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { index });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { index });
            }
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::AllZero);
        }
        let logs = weights.iter().map(|w| w.ln()).collect();
        Self::from_log_weights(logs)
    }

    /// Normalizes unnormalized log-weights with log-sum-exp.
    pub fn from_log_weights(mut log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &lw) in log_weights.iter().enumerate() {
            if lw.is_nan() || lw == f64::INFINITY {
                return Err(Error::NonFiniteWeight { index });
            }
        }
        let norm = log_sum_exp(&log_weights);
        if norm == f64::NEG_INFINITY {
            return Err(Error::AllZero);
        }
        for lw in &mut log_weights {
            *lw -= norm;
        }
        // At large magnitudes `norm` carries an absolute rounding error of
        // ulp(norm); a second pass on the shifted values removes it.
        let residual = log_sum_exp(&log_weights);
        if residual != 0.0 {
            for lw in &mut log_weights {
                *lw -= residual;
            }
        }
        Ok(DiscreteDistribution { log_weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyWeights);
        }
        let lw = -(n as f64).ln();
        Ok(DiscreteDistribution {
            log_weights: vec![lw; n],
        })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: at + 1,
            });
        }
        let mut log_weights = vec![f64::NEG_INFINITY; n];
        log_weights[at] = 0.0;
        Ok(DiscreteDistribution { log_weights })
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|lw| lw.exp()).collect()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.log_weights[i].exp()
    }

    /// All weights at or above `floor`.
    pub fn is_strictly_positive(&self, floor: f64) -> bool {
        let lf = floor.ln();
        self.log_weights.iter().all(|&lw| lw >= lf && lw.is_finite())
    }

    /// Number of weights strictly above `floor`.
    pub fn support_size(&self, floor: f64) -> usize {
        let lf = floor.ln();
        self.log_weights.iter().filter(|&&lw| lw > lf).count()
    }

    /// Whether every weight equals `1/n` up to `tol` in log-space.
    pub fn is_uniform(&self, tol: f64) -> bool {
        let target = -(self.len() as f64).ln();
        self.log_weights.iter().all(|&lw| (lw - target).abs() <= tol)
    }

    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.log_weights
            .iter()
            .zip(values)
            .map(|(lw, v)| lw.exp() * v)
            .sum()
    }
}

/// Builds a distribution from raw weights; see [`DiscreteDistribution::from_weights`].
pub fn make_distribution(weights: &[f64]) -> Result<DiscreteDistribution> {
    DiscreteDistribution::from_weights(weights)
}

/// Which bound to compute and with what threshold constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    pub kind: DistanceKind,
    pub delta: f64,
    pub constant_policy: ConstantPolicy,
}

impl BoundSpec {
    pub fn new(kind: DistanceKind, delta: f64, constant_policy: ConstantPolicy) -> Result<Self> {
        check_delta(delta)?;
        Ok(BoundSpec {
            kind,
            delta,
            constant_policy,
        })
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

/// Starting point of a fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Prior,
    /// Normalized exponential draws from a seeded generator.
    Random(u64),
    Given(DiscreteDistribution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointConfig {
    /// Threshold on the sup-norm of `q - T(q)`.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial mixing weight of `T(q)`; halves automatically on divergence.
    pub damping: f64,
    pub init: Init,
    pub positivity_floor: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            tol: 1e-10,
            max_iters: 10_000,
            damping: 1.0,
            init: Init::Prior,
            positivity_floor: DEFAULT_POSITIVITY_FLOOR,
        }
    }
}

impl FixedPointConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.positivity_floor >= 0.0 && self.positivity_floor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "positivity floor must lie in [0, 1), got {}",
                self.positivity_floor
            )));
        }
        Ok(())
    }
}

/// Value of a bound at a given posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub gibbs_emp_risk: f64,
    pub kl_qp: f64,
    /// Natural log of the threshold constant that entered the bound.
    pub log_ik: f64,
    /// The raw bound reached 1 and `value` was clamped below 1.
    pub saturated: bool,
}

/// Output of an optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorResult {
    pub kind: DistanceKind,
    pub posterior: DiscreteDistribution,
    pub bound: BoundValue,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub support_size: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn profile_validation() {
        let ok = RiskProfile::from_risks(&[0.1, 0.2, 0.3], 100).unwrap();
        assert_eq!(ok.len(), 3);
        assert_eq!(
            RiskProfile::from_risks(&[0.1, 1.2], 100).unwrap_err(),
            Error::RiskOutOfRange { index: 1 }
        );
        assert_eq!(RiskProfile::from_risks(&[], 100).unwrap_err(), Error::EmptyProfile);
        assert_eq!(RiskProfile::from_risks(&[0.1], 0).unwrap_err(), Error::BadSampleSize);
        let mut bad_test = ClassifierEntry::new(0, 0.1);
        bad_test.test_err = Some(-0.1);
        assert!(RiskProfile::new(vec![bad_test], 5).is_err());
        let dup = vec![ClassifierEntry::new(4, 0.1), ClassifierEntry::new(4, 0.2)];
        assert_eq!(RiskProfile::new(dup, 5).unwrap_err(), Error::DuplicateId(4));
    }

    #[test]
    fn sorted_order_is_stable_by_id() {
        let entries = vec![
            ClassifierEntry::new(7, 0.2),
            ClassifierEntry::new(3, 0.1),
            ClassifierEntry::new(1, 0.2),
        ];
        let p = RiskProfile::new(entries, 10).unwrap();
        assert_eq!(p.sorted_order(), vec![1, 2, 0]);
    }

    #[test]
    fn make_distribution_examples() {
        let u = make_distribution(&[1.0; 4]).unwrap();
        assert!(u.weights().iter().all(|&w| (w - 0.25).abs() < 1e-15));
        let d = make_distribution(&[2.0, 0.0]).unwrap();
        assert_eq!(d.weights(), vec![1.0, 0.0]);
        assert_eq!(d.log_weights()[1], f64::NEG_INFINITY);
        assert_eq!(d.support_size(DEFAULT_POSITIVITY_FLOOR), 1);
        assert_eq!(
            make_distribution(&[1.0, -1.0]).unwrap_err(),
            Error::NegativeWeight { index: 1 }
        );
        assert_eq!(make_distribution(&[0.0, 0.0]).unwrap_err(), Error::AllZero);
    }

    #[test]
    fn parses_kind_and_policy_names() {
        for kind in DistanceKind::ALL {
            assert_eq!(kind.as_str().parse::<DistanceKind>().unwrap(), kind);
        }
        assert_eq!("two-sqrt-m".parse::<ConstantPolicy>().unwrap(), ConstantPolicy::TwoSqrtM);
        assert!("cubic".parse::<DistanceKind>().is_err());
    }

    #[test]
    fn bound_spec_rejects_bad_delta() {
        for d in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(BoundSpec::new(DistanceKind::Kl, d, ConstantPolicy::ExactLogspace).is_err());
        }
    }

    #[test]
    fn config_validation() {
        assert!(FixedPointConfig::default().validate().is_ok());
        let bad = FixedPointConfig {
            damping: 0.0,
            ..FixedPointConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = FixedPointConfig {
            tol: 0.0,
            ..FixedPointConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn accepted_distributions_are_normalized(w in prop::collection::vec(0.0f64..1e6, 1..50)) {
            prop_assume!(w.iter().any(|&x| x > 0.0));
            let d = DiscreteDistribution::from_weights(&w).unwrap();
            let s: f64 = d.log_weights().iter().map(|l| l.exp()).sum();
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn log_weights_normalize_at_extreme_scale(lw in prop::collection::vec(-1e5f64..1e5, 1..50)) {
            let d = DiscreteDistribution::from_log_weights(lw).unwrap();
            let s: f64 = d.log_weights().iter().map(|l| l.exp()).sum();
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }
    }
}
