//! Support search over prefixes of the risk-sorted classifier list.
//!
//! Under a uniform prior the best posterior supported on `H'` classifiers puts
//! its mass on the `H'` smallest empirical risks, so only `H` candidate
//! supports need to be optimized.

use rayon::prelude::*;

use super::{solve_problem, Problem};
use crate::bounds::{evaluate_bound, linear_complexity_free_objective};
use crate::error::{Error, Result};
use crate::types::{
    BoundSpec, ConstantPolicy, DiscreteDistribution, DistanceKind, FixedPointConfig, Init,
    PosteriorResult, RiskProfile,
};

const UNIFORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSearchResult {
    /// Optimum over the winning prefix, mapped back to the original indices.
    pub result: PosteriorResult,
    /// Size `H'` of the winning prefix.
    pub best_prefix: usize,
    /// Optimized bound for each prefix size `1..=H`.
    pub prefix_bounds: Vec<f64>,
    /// Linear kind only: whether the full support won, as predicted for the
    /// Boltzmann posterior.
    pub full_support_optimal: Option<bool>,
}

/// Optimizes the bound over every prefix of the sorted profile and returns
/// the best one. Ties go to the longer prefix.
pub fn prefix_search(
    kind: DistanceKind,
    profile: &RiskProfile,
    prior: &DiscreteDistribution,
    delta: f64,
    config: &FixedPointConfig,
    policy: ConstantPolicy,
) -> Result<PrefixSearchResult> {
    if prior.len() != profile.len() {
        return Err(Error::LengthMismatch {
            expected: profile.len(),
            found: prior.len(),
        });
    }
    if !prior.is_uniform(UNIFORM_TOL) {
        return Err(Error::NonUniformPrior);
    }
    config.validate()?;
    let h = profile.len();
    let order = profile.sorted_order();
    let all_risks = profile.risks();
    let sorted: Vec<f64> = order.iter().map(|&i| all_risks[i]).collect();
    let log_p = -(h as f64).ln();
    let m = profile.sample_size();

    // A caller-supplied start only makes sense on the full support.
    let sub_config = match config.init {
        Init::Given(_) => FixedPointConfig {
            init: Init::Prior,
            ..config.clone()
        },
        _ => config.clone(),
    };

    let solve = |len: usize| -> Result<PosteriorResult> {
        let problem = Problem::new(kind, sorted[..len].to_vec(), vec![log_p; len], m, delta, policy)?;
        if kind == DistanceKind::Lin {
            let (lq, _) = problem.map(&problem.prior_start(), f64::NEG_INFINITY)?;
            super::finish(&problem, lq, 0, 0.0, true, config.positivity_floor)
        } else {
            Ok(solve_problem(&problem, &sub_config)?.result)
        }
    };
    let results: Vec<PosteriorResult> = (1..=h).into_par_iter().map(solve).collect::<Result<_>>()?;
    let prefix_bounds: Vec<f64> = results.iter().map(|r| r.bound.value).collect();

    let (best_prefix, full_support_optimal) = if kind == DistanceKind::Lin {
        // The closed-form objective is monotone in the prefix length even in
        // floating point, which the bound values are not once they saturate.
        let objectives: Vec<f64> = (1..=h)
            .map(|len| linear_complexity_free_objective(&sorted[..len], h, m))
            .collect();
        let best = argmin_last(&objectives);
        (best, Some(best == h))
    } else {
        (argmin_last(&prefix_bounds), None)
    };

    let sub = &results[best_prefix - 1];
    let mut log_weights = vec![f64::NEG_INFINITY; h];
    for (pos, &orig) in order[..best_prefix].iter().enumerate() {
        log_weights[orig] = sub.posterior.log_weights()[pos];
    }
    let posterior = DiscreteDistribution::from_log_weights(log_weights)?;
    let result = PosteriorResult {
        kind,
        posterior,
        bound: sub.bound,
        iterations: sub.iterations,
        residual: sub.residual,
        converged: sub.converged,
        support_size: best_prefix,
    };
    Ok(PrefixSearchResult {
        result,
        best_prefix,
        prefix_bounds,
        full_support_optimal,
    })
}

/// 1-based position of the minimum, preferring the last among equals.
fn argmin_last(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v <= values[best] {
            best = i;
        }
    }
    best + 1
}

/// Bound of the posterior that places `weights` on `subset` under a uniform
/// prior over the whole profile. `weights` are matched to the subset members
/// in order of increasing empirical risk, so a non-increasing weight vector
/// puts the most mass on the lowest risk.
pub fn subset_bound(
    kind: DistanceKind,
    profile: &RiskProfile,
    subset: &[usize],
    weights: &[f64],
    delta: f64,
    policy: ConstantPolicy,
) -> Result<f64> {
    if subset.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: subset.len(),
            found: weights.len(),
        });
    }
    let h = profile.len();
    if let Some(&bad) = subset.iter().find(|&&i| i >= h) {
        return Err(Error::LengthMismatch {
            expected: h,
            found: bad + 1,
        });
    }
    let rank: Vec<usize> = {
        let order = profile.sorted_order();
        let mut rank = vec![0; h];
        for (pos, &i) in order.iter().enumerate() {
            rank[i] = pos;
        }
        rank
    };
    let mut members = subset.to_vec();
    members.sort_by_key(|&i| rank[i]);
    let mut full = vec![0.0; h];
    for (&i, &w) in members.iter().zip(weights) {
        full[i] = w;
    }
    let q = DiscreteDistribution::from_weights(&full)?;
    let prior = DiscreteDistribution::uniform(h)?;
    let spec = BoundSpec::new(kind, delta, policy)?;
    Ok(evaluate_bound(&spec, &q, &prior, profile)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform(n: usize) -> DiscreteDistribution {
        DiscreteDistribution::uniform(n).unwrap()
    }

    fn run(kind: DistanceKind, profile: &RiskProfile) -> PrefixSearchResult {
        prefix_search(
            kind,
            profile,
            &uniform(profile.len()),
            0.05,
            &FixedPointConfig::default(),
            ConstantPolicy::ExactLogspace,
        )
        .unwrap()
    }

    #[test]
    fn linear_full_support_wins() {
        let profile = RiskProfile::from_risks(&[0.3, 0.05, 0.2, 0.1, 0.45], 40).unwrap();
        let out = run(DistanceKind::Lin, &profile);
        assert_eq!(out.best_prefix, 5);
        assert_eq!(out.full_support_optimal, Some(true));
        assert_eq!(out.result.support_size, 5);
        let direct = super::super::optimal_posterior_linear(&profile, &uniform(5), 0.05).unwrap();
        assert_relative_eq!(out.result.bound.value, direct.bound.value, epsilon = 1e-14);
        let obj = linear_complexity_free_objective(&profile.risks(), 5, 40);
        let log_c = out.result.bound.log_ik - 0.05f64.ln();
        assert_relative_eq!(out.result.bound.value, obj + log_c / 40.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_risks_select_full_uniform() {
        let profile = RiskProfile::from_risks(&[0.2; 5], 100).unwrap();
        for kind in DistanceKind::ALL {
            let out = run(kind, &profile);
            assert_eq!(out.best_prefix, 5, "{kind}");
            assert!(out.result.posterior.is_uniform(1e-12), "{kind}");
        }
    }

    #[test]
    fn rejects_non_uniform_prior() {
        let profile = RiskProfile::from_risks(&[0.1, 0.2], 10).unwrap();
        let prior = DiscreteDistribution::from_weights(&[0.3, 0.7]).unwrap();
        let err = prefix_search(
            DistanceKind::Sq,
            &profile,
            &prior,
            0.05,
            &FixedPointConfig::default(),
            ConstantPolicy::ExactLogspace,
        )
        .unwrap_err();
        assert_eq!(err, Error::NonUniformPrior);
    }

    #[test]
    fn posterior_maps_back_to_original_indices() {
        let profile = RiskProfile::from_risks(&[0.6, 0.0, 0.6, 0.01], 300).unwrap();
        let out = run(DistanceKind::Sq, &profile);
        let w = out.result.posterior.weights();
        assert!(w[1] >= w[3]);
        assert!(w[3] >= w[0]);
        for (wi, ri) in w.iter().zip(profile.risks()) {
            if *wi > 0.0 {
                assert!(ri <= 0.01);
            }
        }
    }

    #[test]
    fn prefix_beats_other_subsets_with_same_weights() {
        let risks = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
        let profile = RiskProfile::from_risks(&risks, 100).unwrap();
        let out = run(DistanceKind::Sq, &profile);
        let k = 3;
        let sub = prefix_search(
            DistanceKind::Sq,
            &RiskProfile::from_risks(&risks, 100).unwrap(),
            &uniform(6),
            0.05,
            &FixedPointConfig::default(),
            ConstantPolicy::ExactLogspace,
        )
        .unwrap();
        assert!(sub.prefix_bounds[k - 1] >= out.result.bound.value - 1e-15);
        let mut w: Vec<f64> = (0..k).map(|i| 1.0 / (i + 1) as f64).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let prefix = subset_bound(DistanceKind::Sq, &profile, &[0, 1, 2], &w, 0.05, ConstantPolicy::ExactLogspace)
            .unwrap();
        let mut count = 0;
        for a in 0..6 {
            for b in (a + 1)..6 {
                for c in (b + 1)..6 {
                    let v = subset_bound(DistanceKind::Sq, &profile, &[a, b, c], &w, 0.05, ConstantPolicy::ExactLogspace)
                        .unwrap();
                    assert!(prefix <= v);
                    count += 1;
                }
            }
        }
        assert_eq!(count, 20);
    }
}
