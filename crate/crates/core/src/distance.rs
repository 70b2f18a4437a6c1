//! The five distance functions `phi(lhat, l)`.

use crate::error::{Error, Result};
use crate::types::DistanceKind;

/// Sixth-degree polynomial in `delta = l - lhat`.
pub fn phi_ch_of_gap(delta: f64) -> f64 {
    let d2 = delta * delta;
    d2 + (2.0 / 9.0) * d2 * d2 + (16.0 / 135.0) * d2 * d2 * d2
}

/// Binary relative entropy `kl(p, q)` with the continuous limits at the
/// boundary: `kl(0, q) = -ln(1-q)`, `kl(1, q) = -ln q`, `kl(p, p) = 0`.
pub fn binary_kl(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfDomain(format!("kl({p}, {q}) outside the unit square")));
    }
    if p == q {
        return Ok(0.0);
    }
    if p == 0.0 {
        return if q == 1.0 {
            Err(Error::KlUndefined { lhat: p, l: q })
        } else {
            Ok(-(-q).ln_1p())
        };
    }
    if p == 1.0 {
        return if q == 0.0 {
            Err(Error::KlUndefined { lhat: p, l: q })
        } else {
            Ok(-q.ln())
        };
    }
    if q == 0.0 || q == 1.0 {
        return Err(Error::KlUndefined { lhat: p, l: q });
    }
    Ok(p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln())
}

/// `phi(lhat, l)` for the given kind.
pub fn phi_eval(kind: DistanceKind, lhat: f64, l: f64) -> Result<f64> {
    let delta = l - lhat;
    Ok(match kind {
        DistanceKind::Lin => delta,
        DistanceKind::Sq => delta * delta,
        DistanceKind::Pinsker => 2.0 * delta * delta,
        DistanceKind::Ch => phi_ch_of_gap(delta),
        DistanceKind::Kl => binary_kl(lhat, l)?,
    })
}
