//! Brute-force minimization over a simplex lattice, used as a reference.

use rayon::prelude::*;

use crate::bounds::BoundEvaluator;
use crate::error::{Error, Result};
use crate::types::{
    BoundSpec, BoundValue, ConstantPolicy, DiscreteDistribution, DistanceKind, PosteriorResult,
    RiskProfile, DEFAULT_POSITIVITY_FLOOR,
};

const MAX_CLASSIFIERS: usize = 4;

/// Minimizes the bound over all weight vectors with entries in
/// `{step, 2 step, ..., 1}` summing to one. Every entry is at least `step`.
pub fn grid_oracle(
    kind: DistanceKind,
    profile: &RiskProfile,
    prior: &DiscreteDistribution,
    delta: f64,
    step: f64,
    policy: ConstantPolicy,
) -> Result<PosteriorResult> {
    let h = profile.len();
    if h > MAX_CLASSIFIERS {
        return Err(Error::TooManyClassifiers(h));
    }
    if prior.len() != h {
        return Err(Error::LengthMismatch {
            expected: h,
            found: prior.len(),
        });
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidStep(step));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 || (n as usize) < h {
        return Err(Error::InvalidStep(step));
    }
    let n = n as usize;
    let eval = BoundEvaluator::new(&BoundSpec::new(kind, delta, policy)?, profile.sample_size())?;
    let risks = profile.risks();
    let log_prior = prior.log_weights().to_vec();
    let nf = n as f64;

    let score = |counts: &[usize]| -> Result<BoundValue> {
        let mut gibbs = 0.0;
        let mut kl = 0.0;
        for i in 0..h {
            let w = counts[i] as f64 / nf;
            gibbs += w * risks[i];
            kl += w * (w.ln() - log_prior[i]);
        }
        eval.evaluate(gibbs, kl.max(0.0))
    };

    // Split on the first coordinate and scan the rest sequentially.
    let best = (1..=n + 1 - h)
        .into_par_iter()
        .map(|first| -> Result<Option<(f64, Vec<usize>, BoundValue)>> {
            let mut counts = vec![0; h];
            counts[0] = first;
            let mut best: Option<(f64, Vec<usize>, BoundValue)> = None;
            scan(&mut counts, 1, n - first, &mut |c| {
                let b = score(c)?;
                if best.as_ref().is_none_or(|(v, _, _)| b.value < *v) {
                    best = Some((b.value, c.to_vec(), b));
                }
                Ok(())
            })?;
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, Vec<usize>, BoundValue)>, cand| match acc {
            Some(a) if a.0 <= cand.0 => Some(a),
            _ => Some(cand),
        });

    let (_, counts, bound) = best.ok_or(Error::InvalidStep(step))?;
    let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let posterior = DiscreteDistribution::from_weights(&weights)?;
    Ok(PosteriorResult {
        kind,
        support_size: posterior.support_size(DEFAULT_POSITIVITY_FLOOR),
        posterior,
        bound,
        iterations: 0,
        residual: 0.0,
        converged: true,
    })
}

/// Visits every assignment of `remaining` units to `counts[pos..]` with each
/// entry at least one.
fn scan(
    counts: &mut [usize],
    pos: usize,
    remaining: usize,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let h = counts.len();
    if pos == h {
        return if remaining == 0 { visit(counts) } else { Ok(()) };
    }
    if pos == h - 1 {
        if remaining >= 1 {
            counts[pos] = remaining;
            visit(counts)?;
        }
        return Ok(());
    }
    let slots_after = h - pos - 1;
    if remaining < slots_after + 1 {
        return Ok(());
    }
    for c in 1..=(remaining - slots_after) {
        counts[pos] = c;
        scan(counts, pos + 1, remaining - c, visit)?;
    }
    Ok(())
}
