//! C ABI over the `pacbayes` library.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`PbStatus`]; on failure [`pb_last_error_message`] describes the error for
//! the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pacbayes::{
    evaluate_bound, fp_solve, ik_constant, kl_lower_root, kl_upper_root, optimal_posterior_linear,
    prefix_search, BoundSpec, BoundValue, ConstantPolicy, DiscreteDistribution, DistanceKind,
    Error, FixedPointConfig, Init, KlRootRequest, PosteriorResult, RiskProfile,
};

pub const PB_KIND_LIN: i32 = 0;
pub const PB_KIND_SQ: i32 = 1;
pub const PB_KIND_PINSKER: i32 = 2;
pub const PB_KIND_CH: i32 = 3;
pub const PB_KIND_KL: i32 = 4;

pub const PB_POLICY_EXACT: i32 = 0;
pub const PB_POLICY_TWO_SQRT_M: i32 = 1;

/// Result of every fallible call. Values 10 and above match the library's
/// error codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Panic = 3,
    EmptyProfile = 10,
    RiskOutOfRange = 11,
    BadSampleSize = 12,
    DuplicateId = 13,
    EmptyWeights = 20,
    NegativeWeight = 21,
    NonFiniteWeight = 22,
    AllZero = 23,
    LengthMismatch = 24,
    KOutOfRange = 30,
    UnsupportedKind = 31,
    BadPolicyForKind = 32,
    KlUndefined = 40,
    InvalidRootRequest = 41,
    OutOfDomain = 42,
    NotAbsContinuous = 50,
    NegativeR = 51,
    InvalidDelta = 52,
    PriorNotPositive = 60,
    NotStrictlyPositive = 61,
    KlDegenerate = 62,
    NonUniformPrior = 63,
    TooManyClassifiers = 64,
    InvalidStep = 65,
    InvalidConfig = 66,
    MissingTestErrors = 70,
    InvalidGenerator = 71,
}

impl PbStatus {
    fn from_code(code: i32) -> PbStatus {
        use PbStatus::*;
        match code {
            10 => EmptyProfile,
            11 => RiskOutOfRange,
            12 => BadSampleSize,
            13 => DuplicateId,
            20 => EmptyWeights,
            21 => NegativeWeight,
            22 => NonFiniteWeight,
            23 => AllZero,
            24 => LengthMismatch,
            30 => KOutOfRange,
            31 => UnsupportedKind,
            32 => BadPolicyForKind,
            40 => KlUndefined,
            41 => InvalidRootRequest,
            42 => OutOfDomain,
            50 => NotAbsContinuous,
            51 => NegativeR,
            52 => InvalidDelta,
            60 => PriorNotPositive,
            61 => NotStrictlyPositive,
            62 => KlDegenerate,
            63 => NonUniformPrior,
            64 => TooManyClassifiers,
            65 => InvalidStep,
            66 => InvalidConfig,
            70 => MissingTestErrors,
            71 => InvalidGenerator,
            _ => InvalidArgument,
        }
    }
}

impl From<&Error> for PbStatus {
    fn from(e: &Error) -> Self {
        PbStatus::from_code(e.code())
    }
}

/// Opaque risk profile.
pub struct PbProfile(RiskProfile);
/// Opaque distribution over classifiers.
pub struct PbDistribution(DiscreteDistribution);
/// Opaque optimizer output.
pub struct PbPosterior(PosteriorResult);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbBoundValue {
    pub value: f64,
    pub gibbs_emp_risk: f64,
    pub kl_qp: f64,
    pub log_ik: f64,
    pub saturated: bool,
}

impl From<BoundValue> for PbBoundValue {
    fn from(b: BoundValue) -> Self {
        PbBoundValue {
            value: b.value,
            gibbs_emp_risk: b.gibbs_emp_risk,
            kl_qp: b.kl_qp,
            log_ik: b.log_ik,
            saturated: b.saturated,
        }
    }
}

/// Fixed-point solver settings. Obtain defaults from
/// [`pb_solver_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbSolverConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub damping: f64,
    pub positivity_floor: f64,
    /// Start from a random point drawn with `seed` instead of the prior.
    pub use_seed: bool,
    pub seed: u64,
}

impl From<&PbSolverConfig> for FixedPointConfig {
    fn from(c: &PbSolverConfig) -> Self {
        FixedPointConfig {
            tol: c.tol,
            max_iters: c.max_iters,
            damping: c.damping,
            init: if c.use_seed { Init::Random(c.seed) } else { Init::Prior },
            positivity_floor: c.positivity_floor,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbPosteriorSummary {
    pub bound: PbBoundValue,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub support_size: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Arg(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard<F>(f: F) -> PbStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PbStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            PbStatus::from(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            PbStatus::NullPointer
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_last_error(msg);
            PbStatus::InvalidArgument
        }
        Err(_) => {
            set_last_error("internal panic".into());
            PbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn kind_from(code: i32) -> Result<DistanceKind, Failure> {
    match code {
        PB_KIND_LIN => Ok(DistanceKind::Lin),
        PB_KIND_SQ => Ok(DistanceKind::Sq),
        PB_KIND_PINSKER => Ok(DistanceKind::Pinsker),
        PB_KIND_CH => Ok(DistanceKind::Ch),
        PB_KIND_KL => Ok(DistanceKind::Kl),
        other => Err(Failure::Arg(format!("unknown distance kind {other}"))),
    }
}

fn policy_from(code: i32) -> Result<ConstantPolicy, Failure> {
    match code {
        PB_POLICY_EXACT => Ok(ConstantPolicy::ExactLogspace),
        PB_POLICY_TWO_SQRT_M => Ok(ConstantPolicy::TwoSqrtM),
        other => Err(Failure::Arg(format!("unknown constant policy {other}"))),
    }
}

/// Builds a profile from `n` empirical risks measured on `m` examples.
#[no_mangle]
pub unsafe extern "C" fn pb_profile_new(
    risks: *const f64,
    n: usize,
    m: u64,
    out: *mut *mut PbProfile,
) -> PbStatus {
    guard(|| {
        let risks = slice(risks, n, "risks")?;
        let profile = RiskProfile::from_risks(risks, m)?;
        write(out, Box::into_raw(Box::new(PbProfile(profile))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn pb_profile_len(profile: *const PbProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn pb_profile_free(profile: *mut PbProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

#[no_mangle]
pub unsafe extern "C" fn pb_distribution_uniform(n: usize, out: *mut *mut PbDistribution) -> PbStatus {
    guard(|| {
        let d = DiscreteDistribution::uniform(n)?;
        write(out, Box::into_raw(Box::new(PbDistribution(d))), "out")
    })
}

/// Normalizes `n` non-negative weights into a distribution.
#[no_mangle]
pub unsafe extern "C" fn pb_distribution_from_weights(
    weights: *const f64,
    n: usize,
    out: *mut *mut PbDistribution,
) -> PbStatus {
    guard(|| {
        let w = slice(weights, n, "weights")?;
        let d = DiscreteDistribution::from_weights(w)?;
        write(out, Box::into_raw(Box::new(PbDistribution(d))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn pb_distribution_len(dist: *const PbDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.0.len())
}

/// Copies the probabilities into `buf`, which must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn pb_distribution_weights(
    dist: *const PbDistribution,
    buf: *mut f64,
    len: usize,
) -> PbStatus {
    guard(|| copy_weights(&deref(dist, "dist")?.0, buf, len))
}

#[no_mangle]
pub unsafe extern "C" fn pb_distribution_free(dist: *mut PbDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

unsafe fn copy_weights(d: &DiscreteDistribution, buf: *mut f64, len: usize) -> Result<(), Failure> {
    if len != d.len() {
        return Err(Failure::Lib(Error::LengthMismatch {
            expected: d.len(),
            found: len,
        }));
    }
    if buf.is_null() {
        return Err(Failure::Null("buf"));
    }
    let out = std::slice::from_raw_parts_mut(buf, len);
    out.copy_from_slice(&d.weights());
    Ok(())
}

/// Natural log of the threshold constant `I(m)`.
#[no_mangle]
pub unsafe extern "C" fn pb_ik_constant(kind: i32, m: u64, policy: i32, out_log_value: *mut f64) -> PbStatus {
    guard(|| {
        let ik = ik_constant(kind_from(kind)?, m, policy_from(policy)?)?;
        write(out_log_value, ik.log_value, "out_log_value")
    })
}

unsafe fn kl_root(
    upper: bool,
    phat: f64,
    x: f64,
    out_root: *mut f64,
    out_saturated: *mut bool,
) -> PbStatus {
    guard(|| {
        let req = KlRootRequest::new(phat, x);
        let r = if upper { kl_upper_root(&req)? } else { kl_lower_root(&req)? };
        write(out_root, r.root, "out_root")?;
        if !out_saturated.is_null() {
            out_saturated.write(r.saturated);
        }
        Ok(())
    })
}

/// Larger root of `kl(phat, q) = x`. `out_saturated` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn pb_kl_upper_root(phat: f64, x: f64, out_root: *mut f64, out_saturated: *mut bool) -> PbStatus {
    kl_root(true, phat, x, out_root, out_saturated)
}

/// Smaller root of `kl(phat, q) = x`. `out_saturated` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn pb_kl_lower_root(phat: f64, x: f64, out_root: *mut f64, out_saturated: *mut bool) -> PbStatus {
    kl_root(false, phat, x, out_root, out_saturated)
}

/// Bound of `kind` at posterior `q` against `prior`.
#[no_mangle]
pub unsafe extern "C" fn pb_evaluate_bound(
    kind: i32,
    delta: f64,
    policy: i32,
    q: *const PbDistribution,
    prior: *const PbDistribution,
    profile: *const PbProfile,
    out: *mut PbBoundValue,
) -> PbStatus {
    guard(|| {
        let spec = BoundSpec::new(kind_from(kind)?, delta, policy_from(policy)?)?;
        let b = evaluate_bound(
            &spec,
            &deref(q, "q")?.0,
            &deref(prior, "prior")?.0,
            &deref(profile, "profile")?.0,
        )?;
        write(out, b.into(), "out")
    })
}

#[no_mangle]
pub extern "C" fn pb_solver_config_default() -> PbSolverConfig {
    let d = FixedPointConfig::default();
    PbSolverConfig {
        tol: d.tol,
        max_iters: d.max_iters,
        damping: d.damping,
        positivity_floor: d.positivity_floor,
        use_seed: false,
        seed: 0,
    }
}

unsafe fn config_from(config: *const PbSolverConfig) -> FixedPointConfig {
    config.as_ref().map_or_else(FixedPointConfig::default, FixedPointConfig::from)
}

/// Bound-minimizing posterior: closed form for LIN, fixed-point iteration
/// otherwise. `config` may be NULL for defaults. Non-convergence is not an
/// error; check the summary's `converged` flag.
#[no_mangle]
pub unsafe extern "C" fn pb_optimize(
    kind: i32,
    profile: *const PbProfile,
    prior: *const PbDistribution,
    delta: f64,
    policy: i32,
    config: *const PbSolverConfig,
    out: *mut *mut PbPosterior,
) -> PbStatus {
    guard(|| {
        let kind = kind_from(kind)?;
        let policy = policy_from(policy)?;
        let profile = &deref(profile, "profile")?.0;
        let prior = &deref(prior, "prior")?.0;
        let res = if kind == DistanceKind::Lin {
            optimal_posterior_linear(profile, prior, delta)?
        } else {
            fp_solve(kind, profile, prior, delta, &config_from(config), policy)?
        };
        write(out, Box::into_raw(Box::new(PbPosterior(res))), "out")
    })
}

/// Best posterior over prefixes of the risk-sorted profile; the prior must
/// be uniform. `out_prefix` (may be NULL) receives the winning prefix size.
#[no_mangle]
pub unsafe extern "C" fn pb_prefix_search(
    kind: i32,
    profile: *const PbProfile,
    prior: *const PbDistribution,
    delta: f64,
    policy: i32,
    config: *const PbSolverConfig,
    out: *mut *mut PbPosterior,
    out_prefix: *mut usize,
) -> PbStatus {
    guard(|| {
        let res = prefix_search(
            kind_from(kind)?,
            &deref(profile, "profile")?.0,
            &deref(prior, "prior")?.0,
            delta,
            &config_from(config),
            policy_from(policy)?,
        )?;
        if !out_prefix.is_null() {
            out_prefix.write(res.best_prefix);
        }
        write(out, Box::into_raw(Box::new(PbPosterior(res.result))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn pb_posterior_len(post: *const PbPosterior) -> usize {
    post.as_ref().map_or(0, |p| p.0.posterior.len())
}

/// Copies the posterior probabilities into `buf`, which must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn pb_posterior_weights(post: *const PbPosterior, buf: *mut f64, len: usize) -> PbStatus {
    guard(|| copy_weights(&deref(post, "post")?.0.posterior, buf, len))
}

#[no_mangle]
pub unsafe extern "C" fn pb_posterior_summary(post: *const PbPosterior, out: *mut PbPosteriorSummary) -> PbStatus {
    guard(|| {
        let r = &deref(post, "post")?.0;
        let summary = PbPosteriorSummary {
            bound: r.bound.into(),
            iterations: r.iterations,
            residual: r.residual,
            converged: r.converged,
            support_size: r.support_size,
        };
        write(out, summary, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn pb_posterior_free(post: *mut PbPosterior) {
    if !post.is_null() {
        drop(Box::from_raw(post));
    }
}
