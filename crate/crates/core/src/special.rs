//! Log-space primitives and the binomial moment constants `I^K_phi(m)`.
//!
//! `I^K_phi(m) = sup_l sum_k C(m,k) l^k (1-l)^(m-k) exp(m phi(k/m, l))` grows
//! exponentially in `m` for the linear distance, so every quantity here is
//! carried as a logarithm.

use crate::error::{Error, Result};
use crate::types::{ConstantPolicy, DistanceKind};

/// `ln sum_i exp(v_i)`, shifted by the maximum. Returns `-inf` when every
/// input is `-inf` (or the slice is empty).
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln n!` for small `n`, from the exact product (exact in f64 up to 18!).
fn ln_factorial_small(n: u64) -> f64 {
    debug_assert!(n <= 18);
    let mut p = 1.0f64;
    for i in 2..=n {
        p *= i as f64;
    }
    p.ln()
}

/// Stirling remainder `ln n! - (n ln n - n + ln(2 pi n)/2)` (Loader's series).
fn stirling_remainder(n: u64) -> f64 {
    if n <= 15 {
        let nf = n as f64;
        return ln_factorial_small(n) - (nf * nf.ln() - nf + 0.5 * (LN_2PI + nf.ln()));
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// `ln C(m, k)`.
///
/// Written as `k ln(m/k) + (m-k) ln(m/(m-k))` plus Stirling corrections, so
/// the dominant terms are all positive and no large log-factorials cancel.
pub fn log_binom(m: u64, k: u64) -> Result<f64> {
    if k > m {
        return Err(Error::KOutOfRange { m, k });
    }
    if k == 0 || k == m {
        return Ok(0.0);
    }
    if m <= 18 {
        return Ok(ln_factorial_small(m) - ln_factorial_small(k) - ln_factorial_small(m - k));
    }
    let (mf, kf) = (m as f64, k as f64);
    let rest = mf - kf;
    let main = kf * (mf / kf).ln() - rest * (-kf / mf).ln_1p();
    let corr = stirling_remainder(m) - stirling_remainder(k) - stirling_remainder(m - k);
    let gauss = 0.5 * ((mf / (kf * rest)).ln() - LN_2PI);
    Ok(main + gauss + corr)
}

/// Result of [`ik_constant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkResult {
    /// `ln I^K_phi(m)`.
    pub log_value: f64,
    /// Maximizing true risk `l*`, when the constant is a supremum.
    pub argmax_l: Option<f64>,
}

impl IkResult {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Evaluates `ln sum_k C(m,k) l^k (1-l)^(m-k) e^{m phi(k/m, l)}` for many `l`
/// at a fixed `m`, caching the log-binomial coefficients.
#[derive(Debug, Clone)]
pub struct BinomialMoment {
    m: u64,
    log_binoms: Vec<f64>,
}

impl BinomialMoment {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadSampleSize);
        }
        let log_binoms = (0..=m).map(|k| log_binom(m, k)).collect::<Result<_>>()?;
        Ok(BinomialMoment { m, log_binoms })
    }

    pub fn sample_size(&self) -> u64 {
        self.m
    }

    /// `m phi(k/m, l)` for the sup-based kinds.
    fn exponent(&self, kind: DistanceKind, k: f64, l: f64) -> f64 {
        let m = self.m as f64;
        match kind {
            DistanceKind::Lin => m * l - k,
            DistanceKind::Sq => (k - m * l).powi(2) / m,
            DistanceKind::Pinsker => 2.0 * (k - m * l).powi(2) / m,
            DistanceKind::Ch | DistanceKind::Kl => unreachable!("checked by caller"),
        }
    }

    pub fn log_at(&self, kind: DistanceKind, l: f64) -> Result<f64> {
        if !matches!(kind, DistanceKind::Lin | DistanceKind::Sq | DistanceKind::Pinsker) {
            return Err(Error::UnsupportedKind(kind));
        }
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::OutOfDomain(format!("true risk l = {l} outside [0, 1]")));
        }
        let m = self.m;
        // Zero-probability terms are dropped at the endpoints.
        if l == 0.0 {
            return Ok(self.exponent(kind, 0.0, 0.0));
        }
        if l == 1.0 {
            return Ok(self.exponent(kind, m as f64, 1.0));
        }
        let ln_l = l.ln();
        let ln_1ml = (-l).ln_1p();
        let terms: Vec<f64> = (0..=m)
            .map(|k| {
                let kf = k as f64;
                self.log_binoms[k as usize]
                    + kf * ln_l
                    + (m - k) as f64 * ln_1ml
                    + self.exponent(kind, kf, l)
            })
            .collect();
        Ok(log_sum_exp(&terms))
    }

    /// Supremum over `l in [0,1]`: a 0.001 grid followed by golden-section
    /// refinement around the best grid point.
    pub fn log_sup(&self, kind: DistanceKind) -> Result<IkResult> {
        const GRID: usize = 1000;
        let mut best = (0.0, f64::NEG_INFINITY);
        let mut best_idx = 0;
        for i in 0..=GRID {
            let l = i as f64 / GRID as f64;
            let v = self.log_at(kind, l)?;
            if v > best.1 {
                best = (l, v);
                best_idx = i;
            }
        }
        let lo = best_idx.saturating_sub(1) as f64 / GRID as f64;
        let hi = (best_idx + 1).min(GRID) as f64 / GRID as f64;
        let (l_star, v_star) = golden_section_max(|l| self.log_at(kind, l), lo, hi, 1e-6)?;
        if v_star > best.1 {
            best = (l_star, v_star);
        }
        Ok(IkResult {
            log_value: best.1,
            argmax_l: Some(best.0),
        })
    }
}

/// Maximizes a unimodal function on `[lo, hi]` until the bracket is narrower
/// than `width`.
fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, width: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > width {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `ln sum_k C(m,k) l^k (1-l)^(m-k) e^{m phi(k/m, l)}` for LIN, SQ or PINSKER.
pub fn log_ik_at(kind: DistanceKind, m: u64, l: f64) -> Result<f64> {
    BinomialMoment::new(m)?.log_at(kind, l)
}

/// The threshold constant `I^K_phi(m)` under a policy.
///
/// The squared distance peaks at `l = 0.5`; LIN and PINSKER are maximized
/// numerically. `TwoSqrtM` is the distribution-free `2 sqrt(m)`, which does not
/// dominate the linear moment and is therefore rejected for LIN.
pub fn ik_constant(kind: DistanceKind, m: u64, policy: ConstantPolicy) -> Result<IkResult> {
    if m == 0 {
        return Err(Error::BadSampleSize);
    }
    let bad = || Error::BadPolicyForKind { kind, policy };
    match policy {
        ConstantPolicy::TwoSqrtM => match kind {
            DistanceKind::Sq | DistanceKind::Pinsker | DistanceKind::Kl => Ok(IkResult {
                log_value: log_two_sqrt_m(m),
                argmax_l: None,
            }),
            DistanceKind::Lin | DistanceKind::Ch => Err(bad()),
        },
        ConstantPolicy::ExactLogspace | ConstantPolicy::BeginExact => match kind {
            DistanceKind::Sq => Ok(IkResult {
                log_value: log_ik_at(DistanceKind::Sq, m, 0.5)?,
                argmax_l: Some(0.5),
            }),
            DistanceKind::Lin | DistanceKind::Pinsker => BinomialMoment::new(m)?.log_sup(kind),
            DistanceKind::Kl | DistanceKind::Ch => Err(bad()),
        },
    }
}

pub(crate) fn log_two_sqrt_m(m: u64) -> f64 {
    std::f64::consts::LN_2 + 0.5 * (m as f64).ln()
}
