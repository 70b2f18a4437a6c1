//! Bound values `B_phi(Q)` at a given posterior.

use crate::error::{Error, Result};
use crate::klinverse::{kl_upper_root, KlRootRequest};
use crate::special::{ik_constant, log_sum_exp, log_two_sqrt_m};
use crate::types::{
    check_delta, BoundSpec, BoundValue, ConstantPolicy, DiscreteDistribution, DistanceKind,
    RiskProfile,
};

/// Bounds at or above this value are clamped to it and flagged.
pub const SATURATION_CAP: f64 = 1.0 - 1e-12;

/// `K_CH / m` for the sixth-degree distance.
pub const CH_CONSTANT_FACTOR: f64 = 0.9334;

/// `KL[Q || P]` with `0 ln(0/p) = 0`.
pub fn kl_divergence(q: &DiscreteDistribution, p: &DiscreteDistribution) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    kl_from_logs(q.log_weights(), p.log_weights())
}

/// Same as [`kl_divergence`] on raw log-weights. The prior may be
/// unnormalized (sub-priors of a larger set).
pub(crate) fn kl_from_logs(lq: &[f64], lp: &[f64]) -> Result<f64> {
    let mut kl = 0.0;
    for (index, (&a, &b)) in lq.iter().zip(lp).enumerate() {
        if a == f64::NEG_INFINITY {
            continue;
        }
        if b == f64::NEG_INFINITY {
            return Err(Error::NotAbsContinuous { index });
        }
        kl += a.exp() * (a - b);
    }
    Ok(kl.max(0.0))
}

// Cardano's formula for x^3 + (15/8) x^2 + (135/16) x - 135 R / 16 = 0,
// where x = Delta^2 solves phi_CH(Delta) = R.
const CH_A0: f64 = 1225.0 / 512.0;
const CH_A1: f64 = 135.0 / 32.0;
const CH_B: f64 = 5.0 / 32.0;
/// `p^3 / 27` of the depressed cubic; `(A + B)(A - B) = -CH_P`.
const CH_P: f64 = 100_544_625.0 / 7_077_888.0;

fn ch_radicand(r: f64) -> f64 {
    729.0 * r * r + 6615.0 / 8.0 * r + 208_980.0 / 256.0
}

/// Returns `(A + B, A - B)`. The second factor comes from the product
/// identity, which avoids cancellation when `R` is large.
fn ch_cardano_terms(r: f64) -> (f64, f64) {
    let a = CH_A0 + CH_A1 * r;
    let b = CH_B * ch_radicand(r).sqrt();
    let plus = a + b;
    (plus, -CH_P / plus)
}

/// The unique non-negative `r` with `phi_CH(sqrt(r)) = R`.
pub fn rch(big_r: f64) -> Result<f64> {
    if big_r.is_nan() || big_r < 0.0 {
        return Err(Error::NegativeR(big_r));
    }
    let (plus, minus) = ch_cardano_terms(big_r);
    Ok((-5.0 / 8.0 + plus.cbrt() + minus.cbrt()).max(0.0))
}

/// `d r_CH / d R`, differentiating the two real cube roots term by term.
pub fn rch_derivative(big_r: f64) -> Result<f64> {
    if big_r.is_nan() || big_r < 0.0 {
        return Err(Error::NegativeR(big_r));
    }
    let (plus, minus) = ch_cardano_terms(big_r);
    let s = ch_radicand(big_r);
    let d_plus = CH_A1 + CH_B * (1458.0 * big_r + 6615.0 / 8.0) / (2.0 * s.sqrt());
    // d/dR of -P / (A + B).
    let d_minus = CH_P * d_plus / (plus * plus);
    let cbrt_slope = |u: f64| u.abs().powf(-2.0 / 3.0) / 3.0;
    Ok(cbrt_slope(plus) * d_plus + cbrt_slope(minus) * d_minus)
}

/// Natural log of the constant inside the bound's logarithm.
///
/// LIN always uses the exact supremum (`2 sqrt(m)` does not bound it), SQ
/// follows the policy, PINSKER and KL use `2 sqrt(m)`, and CH uses
/// `0.9334 m`.
pub fn bound_log_constant(kind: DistanceKind, m: u64, policy: ConstantPolicy) -> Result<f64> {
    if m == 0 {
        return Err(Error::BadSampleSize);
    }
    Ok(match kind {
        DistanceKind::Lin => ik_constant(kind, m, ConstantPolicy::ExactLogspace)?.log_value,
        DistanceKind::Sq => ik_constant(kind, m, policy)?.log_value,
        DistanceKind::Pinsker | DistanceKind::Kl => log_two_sqrt_m(m),
        DistanceKind::Ch => (CH_CONSTANT_FACTOR * m as f64).ln(),
    })
}

/// A bound kind with its constant resolved for a fixed sample size, so that
/// repeated evaluations skip the constant computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEvaluator {
    pub kind: DistanceKind,
    pub delta: f64,
    pub m: u64,
    pub log_constant: f64,
}

impl BoundEvaluator {
    pub fn new(spec: &BoundSpec, m: u64) -> Result<Self> {
        check_delta(spec.delta)?;
        Ok(BoundEvaluator {
            kind: spec.kind,
            delta: spec.delta,
            m,
            log_constant: bound_log_constant(spec.kind, m, spec.constant_policy)?,
        })
    }

    /// `ln(I / delta)`.
    pub fn log_threshold(&self) -> f64 {
        self.log_constant - self.delta.ln()
    }

    /// `R(Q)` of the CH bound.
    pub fn ch_level(&self, kl_qp: f64) -> f64 {
        (kl_qp + self.log_threshold()) / (2.0 * self.m as f64 - 1.0)
    }

    /// `(KL + ln(I/delta)) / m`, the KL-kind divergence level.
    pub fn kl_level(&self, kl_qp: f64) -> f64 {
        (kl_qp + self.log_threshold()) / self.m as f64
    }

    /// Bound from the Gibbs empirical risk and `KL[Q || P]`.
    pub fn evaluate(&self, gibbs: f64, kl_qp: f64) -> Result<BoundValue> {
        let m = self.m as f64;
        let level = kl_qp + self.log_threshold();
        let raw = match self.kind {
            DistanceKind::Lin => gibbs + level / m,
            DistanceKind::Sq => gibbs + (level / m).max(0.0).sqrt(),
            DistanceKind::Pinsker => gibbs + (level / (2.0 * m)).max(0.0).sqrt(),
            DistanceKind::Ch => gibbs + rch(self.ch_level(kl_qp).max(0.0))?.sqrt(),
            DistanceKind::Kl => {
                let phat = gibbs.clamp(0.0, 1.0);
                let x = self.kl_level(kl_qp).max(0.0);
                let root = kl_upper_root(&KlRootRequest::new(phat, x))?;
                if root.saturated {
                    f64::INFINITY
                } else {
                    root.root
                }
            }
        };
        let saturated = raw >= SATURATION_CAP;
        let value = if saturated { SATURATION_CAP.max(gibbs) } else { raw };
        Ok(BoundValue {
            value,
            gibbs_emp_risk: gibbs,
            kl_qp,
            log_ik: self.log_constant,
            saturated,
        })
    }
}

/// `B_phi(Q)` for posterior `q`, prior `prior` and the profile's risks and
/// sample size.
pub fn evaluate_bound(
    spec: &BoundSpec,
    q: &DiscreteDistribution,
    prior: &DiscreteDistribution,
    profile: &RiskProfile,
) -> Result<BoundValue> {
    if q.len() != profile.len() {
        return Err(Error::LengthMismatch {
            expected: profile.len(),
            found: q.len(),
        });
    }
    let eval = BoundEvaluator::new(spec, profile.sample_size())?;
    let kl = kl_divergence(q, prior)?;
    let gibbs = q.expectation(&profile.risks());
    eval.evaluate(gibbs, kl)
}

/// Minimal linear-bound objective for a uniform prior over `h_total`
/// classifiers when the posterior is the Boltzmann distribution on `risks`:
/// `(ln H - ln sum_i e^{-m l_i}) / m`. The `ln(I/delta)/m` term is excluded.
pub fn linear_complexity_free_objective(risks: &[f64], h_total: usize, m: u64) -> f64 {
    let mf = m as f64;
    let terms: Vec<f64> = risks.iter().map(|l| -mf * l).collect();
    ((h_total as f64).ln() - log_sum_exp(&terms)) / mf
}
