//! Inversion of the binary kl divergence in its second argument.
//!
//! For fixed `phat`, `q -> kl(phat, q)` decreases on `(0, phat]` and increases
//! on `[phat, 1)`, so the level set `kl(phat, q) = x` has a lower and an upper
//! root. Both are found by bisection between `phat` and the boundary offset by
//! `eps`.
//!
//! Bisection runs on the distance `u` to the nearest boundary (`u = q` for the
//! lower root, `u = 1 - q` for the upper one), so roots that crowd against 1
//! keep full relative precision in `u`. The returned [`KlRoot`] carries both
//! `q` and `1 - q`.

use crate::error::{Error, Result};

const MAX_HALVINGS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlRootRequest {
    /// Fixed first argument of `kl`.
    pub phat: f64,
    /// Target divergence level.
    pub x: f64,
    /// Stop once `|kl(phat, q) - x| <= tol`.
    pub tol: f64,
    /// Bracketing offset from 0 and 1.
    pub eps: f64,
}

impl KlRootRequest {
    pub fn new(phat: f64, x: f64) -> Self {
        KlRootRequest {
            phat,
            x,
            tol: 1e-12,
            eps: 1e-12,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.phat) {
            return Err(Error::InvalidRootRequest(format!("phat = {} outside [0, 1]", self.phat)));
        }
        if self.x.is_nan() || self.x < 0.0 || !self.x.is_finite() {
            return Err(Error::InvalidRootRequest(format!("level x = {} must be finite and >= 0", self.x)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidRootRequest(format!("tol = {} must be > 0", self.tol)));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::InvalidRootRequest(format!("eps = {} must lie in (0, 0.5)", self.eps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlRoot {
    pub root: f64,
    /// `1 - root`, computed without cancellation.
    pub complement: f64,
    /// The level exceeds what the bracket can reach; `root` is the clamp at
    /// `eps` from the boundary.
    pub saturated: bool,
}

impl KlRoot {
    fn from_root(root: f64) -> Self {
        KlRoot {
            root,
            complement: 1.0 - root,
            saturated: false,
        }
    }

    fn from_complement(complement: f64, saturated: bool) -> Self {
        KlRoot {
            root: 1.0 - complement,
            complement,
            saturated,
        }
    }
}

/// `kl(p, q)` where `q` is described by its distance `u` to the boundary on
/// the side being searched. Decreasing in `u`.
#[derive(Clone, Copy)]
struct BoundaryKl {
    p: f64,
    pc: f64,
    /// `true`: `u = 1 - q`; `false`: `u = q`.
    upper: bool,
}

impl BoundaryKl {
    fn eval(&self, u: f64) -> f64 {
        let (near, far) = if self.upper { (self.pc, self.p) } else { (self.p, self.pc) };
        let mut z = 0.0;
        if near > 0.0 {
            z += near * (near.ln() - u.ln());
        }
        if far > 0.0 {
            z += far * (far.ln() - (-u).ln_1p());
        }
        z
    }

    /// Largest admissible `u`, where the divergence is zero.
    fn u_max(&self) -> f64 {
        if self.upper {
            self.pc
        } else {
            self.p
        }
    }
}

/// Returns `u` with `z(u) = x`, or the saturated clamp at `eps`.
fn bisect(f: BoundaryKl, req: &KlRootRequest) -> (f64, bool) {
    let u_max = f.u_max();
    if u_max <= req.eps {
        return (u_max.min(req.eps), true);
    }
    if req.x >= f.eval(req.eps) {
        return (req.eps, true);
    }
    // z(lo) > x >= z(hi) throughout.
    let (mut lo, mut hi) = (req.eps, u_max);
    let mut mid = 0.5 * (lo + hi);
    let mut z = f.eval(mid);
    for _ in 0..MAX_HALVINGS {
        if (z - req.x).abs() <= req.tol {
            break;
        }
        if z > req.x {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        // Secondary stop once the bracket collapses relative to its size.
        if (next - lo).abs() < req.eps * next || next == lo || next == hi {
            mid = next;
            break;
        }
        mid = next;
        z = f.eval(mid);
    }
    (mid, false)
}

/// Larger root `q >= phat` of `kl(phat, q) = x`.
pub fn kl_upper_root(req: &KlRootRequest) -> Result<KlRoot> {
    req.validate()?;
    let KlRootRequest { phat, x, .. } = *req;
    if x == 0.0 {
        return Ok(KlRoot::from_root(phat));
    }
    if phat == 0.0 {
        return Ok(KlRoot::from_complement((-x).exp(), false));
    }
    if phat == 1.0 {
        return Ok(KlRoot::from_root(1.0));
    }
    let f = BoundaryKl {
        p: phat,
        pc: 1.0 - phat,
        upper: true,
    };
    let (u, saturated) = bisect(f, req);
    let mut root = KlRoot::from_complement(u, saturated);
    root.root = root.root.max(phat);
    Ok(root)
}

/// Smaller root `q <= phat` of `kl(phat, q) = x`.
pub fn kl_lower_root(req: &KlRootRequest) -> Result<KlRoot> {
    req.validate()?;
    let KlRootRequest { phat, x, .. } = *req;
    if x == 0.0 {
        return Ok(KlRoot::from_root(phat));
    }
    if phat == 1.0 {
        return Ok(KlRoot::from_root((-x).exp()));
    }
    if phat == 0.0 {
        return Ok(KlRoot::from_root(0.0));
    }
    let f = BoundaryKl {
        p: phat,
        pc: 1.0 - phat,
        upper: false,
    };
    let (u, saturated) = bisect(f, req);
    Ok(KlRoot {
        root: u.min(phat),
        complement: 1.0 - u,
        saturated,
    })
}
