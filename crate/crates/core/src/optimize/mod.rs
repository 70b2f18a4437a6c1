//! Bound-minimizing posteriors.
//!
//! The linear bound has a closed-form Boltzmann minimizer. For the other four
//! kinds the first-order conditions on the interior of the simplex reduce to
//! a fixed-point equation of the form
//!
//! ```text
//! q_i  ∝  p_i exp(-c(Q) * lhat_i)
//! ```
//!
//! with a kind-specific scalar `c(Q) >= 0`. Every map is evaluated on
//! log-weights and renormalized with log-sum-exp.

mod oracle;
mod prefix;

pub use oracle::grid_oracle;
pub use prefix::{prefix_search, subset_bound, PrefixSearchResult};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::bounds::{kl_from_logs, rch, rch_derivative, BoundEvaluator};
use crate::error::{Error, Result};
use crate::klinverse::{kl_upper_root, KlRootRequest};
use crate::special::log_sum_exp;
use crate::types::{
    BoundSpec, BoundValue, ConstantPolicy, DiscreteDistribution, DistanceKind, FixedPointConfig,
    Init, PosteriorResult, RiskProfile, DEFAULT_POSITIVITY_FLOOR,
};

/// Floor applied to the Gibbs risk inside the kl map when it would be 0 or 1.
const GIBBS_FLOOR: f64 = 1e-12;
const MIN_DAMPING: f64 = 0.125;

/// Conditions worth surfacing that are not errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diagnostic {
    /// The Gibbs risk hit 0 or 1 inside the kl map and was floored.
    GibbsRiskFloored,
    /// Successive residuals grew, so the mixing weight was lowered.
    DampingReduced(f64),
}

/// One bound-minimization problem: risks, prior log-weights and a resolved
/// bound. The prior may be a sub-vector of a larger normalized prior.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    kind: DistanceKind,
    risks: Vec<f64>,
    log_prior: Vec<f64>,
    eval: BoundEvaluator,
    constant_risk: bool,
}

impl Problem {
    pub(crate) fn new(
        kind: DistanceKind,
        risks: Vec<f64>,
        log_prior: Vec<f64>,
        m: u64,
        delta: f64,
        policy: ConstantPolicy,
    ) -> Result<Self> {
        if risks.len() != log_prior.len() {
            return Err(Error::LengthMismatch {
                expected: risks.len(),
                found: log_prior.len(),
            });
        }
        if risks.is_empty() {
            return Err(Error::EmptyProfile);
        }
        if log_prior.iter().any(|lp| !lp.is_finite()) {
            return Err(Error::PriorNotPositive);
        }
        let spec = BoundSpec::new(kind, delta, policy)?;
        let eval = BoundEvaluator::new(&spec, m)?;
        let constant_risk = risks.iter().all(|&r| r == risks[0]);
        Ok(Problem {
            kind,
            risks,
            log_prior,
            eval,
            constant_risk,
        })
    }

    pub(crate) fn from_profile(
        kind: DistanceKind,
        profile: &RiskProfile,
        prior: &DiscreteDistribution,
        delta: f64,
        policy: ConstantPolicy,
    ) -> Result<Self> {
        if prior.len() != profile.len() {
            return Err(Error::LengthMismatch {
                expected: profile.len(),
                found: prior.len(),
            });
        }
        Problem::new(
            kind,
            profile.risks(),
            prior.log_weights().to_vec(),
            profile.sample_size(),
            delta,
            policy,
        )
    }

    fn len(&self) -> usize {
        self.risks.len()
    }

    fn m(&self) -> f64 {
        self.eval.m as f64
    }

    fn gibbs(&self, lq: &[f64]) -> f64 {
        lq.iter().zip(&self.risks).map(|(a, r)| a.exp() * r).sum()
    }

    fn kl(&self, lq: &[f64]) -> Result<f64> {
        kl_from_logs(lq, &self.log_prior)
    }

    pub(crate) fn bound(&self, lq: &[f64]) -> Result<BoundValue> {
        self.eval.evaluate(self.gibbs(lq), self.kl(lq)?)
    }

    /// Normalized prior, the usual starting point.
    fn prior_start(&self) -> Vec<f64> {
        let norm = log_sum_exp(&self.log_prior);
        self.log_prior.iter().map(|lp| lp - norm).collect()
    }

    /// Scalar `c(Q)` of the fixed-point map; the flag reports a floored Gibbs risk.
    fn coefficient(&self, lq: &[f64]) -> Result<(f64, bool)> {
        if self.constant_risk {
            return Ok((0.0, false));
        }
        let m = self.m();
        let kl = self.kl(lq)?;
        let c = match self.kind {
            DistanceKind::Lin => m,
            DistanceKind::Sq => 2.0 * m.sqrt() * (kl + self.eval.log_threshold()).max(0.0).sqrt(),
            DistanceKind::Pinsker => {
                2.0 * (2.0 * m).sqrt() * (kl + self.eval.log_threshold()).max(0.0).sqrt()
            }
            DistanceKind::Ch => {
                let level = self.eval.ch_level(kl).max(0.0);
                let r = rch(level)?;
                (2.0 * m - 1.0) * 2.0 * r.sqrt() / rch_derivative(level)?
            }
            DistanceKind::Kl => {
                let raw = self.gibbs(lq);
                let gibbs = raw.clamp(GIBBS_FLOOR, 1.0 - GIBBS_FLOOR);
                let floored = gibbs != raw;
                let x = self.eval.kl_level(kl).max(0.0);
                let root = kl_upper_root(&KlRootRequest::new(gibbs, x))?;
                if root.complement <= 0.0 || root.root <= gibbs {
                    return Ok((0.0, floored));
                }
                // -m ln((1 - r) L / (r (1 - L))), positive since r > L.
                let c = m * (root.root.ln() - gibbs.ln() + (-gibbs).ln_1p() - root.complement.ln());
                return Ok((c, floored));
            }
        };
        Ok((c, false))
    }

    /// `T(q)` as normalized log-weights, floored at `log_floor` when finite.
    fn map(&self, lq: &[f64], log_floor: f64) -> Result<(Vec<f64>, bool)> {
        let (c, floored) = self.coefficient(lq)?;
        let mut out: Vec<f64> = self
            .log_prior
            .iter()
            .zip(&self.risks)
            .map(|(lp, r)| lp - c * r)
            .collect();
        normalize_logs(&mut out);
        if log_floor.is_finite() && out.iter().any(|&v| v < log_floor) {
            for v in &mut out {
                *v = v.max(log_floor);
            }
            normalize_logs(&mut out);
        }
        Ok((out, floored))
    }
}

fn normalize_logs(v: &mut [f64]) {
    let norm = log_sum_exp(v);
    for x in v.iter_mut() {
        *x -= norm;
    }
}

/// `max_i |q_i - t_i|` on probabilities.
fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.exp() - y.exp()).abs())
        .fold(0.0, f64::max)
}

fn check_strictly_positive(q: &DiscreteDistribution, err: Error) -> Result<()> {
    if q.log_weights().iter().all(|lw| lw.is_finite()) {
        Ok(())
    } else {
        Err(err)
    }
}

/// Boltzmann posterior `q_i ∝ p_i exp(-m lhat_i)`, the exact minimizer of
/// the linear bound.
pub fn optimal_posterior_linear(
    profile: &RiskProfile,
    prior: &DiscreteDistribution,
    delta: f64,
) -> Result<PosteriorResult> {
    check_strictly_positive(prior, Error::PriorNotPositive)?;
    let problem = Problem::from_profile(
        DistanceKind::Lin,
        profile,
        prior,
        delta,
        ConstantPolicy::ExactLogspace,
    )?;
    let (lq, _) = problem.map(&problem.prior_start(), f64::NEG_INFINITY)?;
    finish(&problem, lq, 0, 0.0, true, DEFAULT_POSITIVITY_FLOOR)
}

fn finish(
    problem: &Problem,
    lq: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
    floor: f64,
) -> Result<PosteriorResult> {
    let bound = problem.bound(&lq)?;
    let posterior = DiscreteDistribution::from_log_weights(lq)?;
    Ok(PosteriorResult {
        kind: problem.kind,
        support_size: posterior.support_size(floor),
        posterior,
        bound,
        iterations,
        residual,
        converged,
    })
}

/// One application of the fixed-point map of `kind`.
pub fn fp_step(
    kind: DistanceKind,
    q: &DiscreteDistribution,
    profile: &RiskProfile,
    prior: &DiscreteDistribution,
    delta: f64,
    policy: ConstantPolicy,
) -> Result<DiscreteDistribution> {
    check_strictly_positive(q, Error::NotStrictlyPositive)?;
    check_strictly_positive(prior, Error::PriorNotPositive)?;
    if q.len() != profile.len() {
        return Err(Error::LengthMismatch {
            expected: profile.len(),
            found: q.len(),
        });
    }
    let problem = Problem::from_profile(kind, profile, prior, delta, policy)?;
    let (t, _) = problem.map(q.log_weights(), DEFAULT_POSITIVITY_FLOOR.ln())?;
    DiscreteDistribution::from_log_weights(t)
}

/// `||q - T(q)||_inf`; zero exactly at a stationary point of the bound.
pub fn stationarity_residual(
    kind: DistanceKind,
    q: &DiscreteDistribution,
    profile: &RiskProfile,
    prior: &DiscreteDistribution,
    delta: f64,
    policy: ConstantPolicy,
) -> Result<f64> {
    let t = fp_step(kind, q, profile, prior, delta, policy)?;
    Ok(sup_distance(q.log_weights(), t.log_weights()))
}

/// Fixed-point iteration result with solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointOutcome {
    pub result: PosteriorResult,
    pub diagnostics: Vec<Diagnostic>,
}

/// Iterates `q <- (1 - a) q + a T(q)` until `||q - T(q)||_inf <= tol`.
///
/// Non-convergence is reported through `converged = false`, never as an error.
pub fn fp_solve(
    kind: DistanceKind,
    profile: &RiskProfile,
    prior: &DiscreteDistribution,
    delta: f64,
    config: &FixedPointConfig,
    policy: ConstantPolicy,
) -> Result<PosteriorResult> {
    fp_solve_detailed(kind, profile, prior, delta, config, policy).map(|o| o.result)
}

/// [`fp_solve`] plus the diagnostics gathered along the way.
pub fn fp_solve_detailed(
    kind: DistanceKind,
    profile: &RiskProfile,
    prior: &DiscreteDistribution,
    delta: f64,
    config: &FixedPointConfig,
    policy: ConstantPolicy,
) -> Result<FixedPointOutcome> {
    if kind == DistanceKind::Lin {
        return Err(Error::UnsupportedKind(kind));
    }
    check_strictly_positive(prior, Error::PriorNotPositive)?;
    let problem = Problem::from_profile(kind, profile, prior, delta, policy)?;
    solve_problem(&problem, config)
}

pub(crate) fn solve_problem(problem: &Problem, config: &FixedPointConfig) -> Result<FixedPointOutcome> {
    config.validate()?;
    let log_floor = if config.positivity_floor > 0.0 {
        config.positivity_floor.ln()
    } else {
        f64::NEG_INFINITY
    };
    let mut lq = initial_point(problem, &config.init)?;
    let mut diagnostics = Vec::new();
    let mut damping = config.damping;
    let min_damping = MIN_DAMPING.min(config.damping);
    let mut prev_residual = f64::INFINITY;
    let mut rising = 0;
    let mut floored_seen = false;

    for it in 1..=config.max_iters {
        let (t, floored) = problem.map(&lq, log_floor)?;
        floored_seen |= floored;
        let residual = sup_distance(&lq, &t);
        if residual <= config.tol {
            push_floored(&mut diagnostics, floored_seen);
            let result = finish(problem, lq, it, residual, true, config.positivity_floor)?;
            return Ok(FixedPointOutcome { result, diagnostics });
        }
        if residual > prev_residual {
            rising += 1;
            if rising >= 3 && damping > min_damping {
                damping = (damping * 0.5).max(min_damping);
                diagnostics.push(Diagnostic::DampingReduced(damping));
                rising = 0;
            }
        } else {
            rising = 0;
        }
        prev_residual = residual;
        lq = if damping >= 1.0 { t } else { mix(&lq, &t, damping) };
    }

    let (t, floored) = problem.map(&lq, log_floor)?;
    push_floored(&mut diagnostics, floored_seen || floored);
    let residual = sup_distance(&lq, &t);
    let converged = residual <= config.tol;
    let result = finish(problem, lq, config.max_iters, residual, converged, config.positivity_floor)?;
    Ok(FixedPointOutcome { result, diagnostics })
}

fn push_floored(diagnostics: &mut Vec<Diagnostic>, floored: bool) {
    if floored {
        diagnostics.push(Diagnostic::GibbsRiskFloored);
    }
}

/// `ln((1 - a) e^x + a e^y)` elementwise.
fn mix(lq: &[f64], t: &[f64], a: f64) -> Vec<f64> {
    let (la, lb) = ((1.0 - a).ln(), a.ln());
    lq.iter()
        .zip(t)
        .map(|(x, y)| log_sum_exp(&[la + x, lb + y]))
        .collect()
}

fn initial_point(problem: &Problem, init: &Init) -> Result<Vec<f64>> {
    match init {
        Init::Prior => Ok(problem.prior_start()),
        Init::Random(seed) => Ok(random_start(problem.len(), *seed)),
        Init::Given(q) => {
            if q.len() != problem.len() {
                return Err(Error::LengthMismatch {
                    expected: problem.len(),
                    found: q.len(),
                });
            }
            check_strictly_positive(q, Error::NotStrictlyPositive)?;
            Ok(q.log_weights().to_vec())
        }
    }
}

/// Normalized `Exp(1)` draws from a ChaCha8 stream.
pub(crate) fn random_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(&mut rng);
            e.max(f64::MIN_POSITIVE)
        })
        .collect();
    let mut logs: Vec<f64> = draws.iter().map(|d| d.ln()).collect();
    normalize_logs(&mut logs);
    logs
}

/// Random point of the simplex, drawn the same way as `Init::Random`.
pub fn random_distribution(n: usize, seed: u64) -> Result<DiscreteDistribution> {
    if n == 0 {
        return Err(Error::EmptyWeights);
    }
    DiscreteDistribution::from_log_weights(random_start(n, seed))
}
