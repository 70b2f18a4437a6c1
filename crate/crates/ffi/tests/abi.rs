use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use pacbayes_ffi::*;

fn profile(risks: &[f64], m: u64) -> *mut PbProfile {
    let mut out = ptr::null_mut();
    let s = unsafe { pb_profile_new(risks.as_ptr(), risks.len(), m, &mut out) };
    assert_eq!(s, PbStatus::Ok);
    out
}

fn uniform(n: usize) -> *mut PbDistribution {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pb_distribution_uniform(n, &mut out) }, PbStatus::Ok);
    out
}

#[test]
fn linear_posterior_through_the_abi() {
    let p = profile(&[0.1, 0.2], 10);
    let prior = uniform(2);
    let mut post = ptr::null_mut();
    let s = unsafe { pb_optimize(PB_KIND_LIN, p, prior, 0.05, PB_POLICY_EXACT, ptr::null(), &mut post) };
    assert_eq!(s, PbStatus::Ok);
    let mut w = [0.0; 2];
    assert_eq!(unsafe { pb_posterior_weights(post, w.as_mut_ptr(), 2) }, PbStatus::Ok);
    let e = (-1.0f64).exp();
    assert!((w[0] - 1.0 / (1.0 + e)).abs() < 1e-14);
    let mut summary = std::mem::MaybeUninit::<PbPosteriorSummary>::uninit();
    assert_eq!(unsafe { pb_posterior_summary(post, summary.as_mut_ptr()) }, PbStatus::Ok);
    let summary = unsafe { summary.assume_init() };
    assert!(summary.converged);
    assert_eq!(summary.iterations, 0);
    unsafe {
        pb_posterior_free(post);
        pb_distribution_free(prior);
        pb_profile_free(p);
    }
}

#[test]
fn fixed_point_and_prefix_search() {
    let p = profile(&[0.3, 0.05, 0.12, 0.4], 200);
    let prior = uniform(4);
    let mut cfg = pb_solver_config_default();
    cfg.tol = 1e-11;
    let mut post = ptr::null_mut();
    let s = unsafe { pb_optimize(PB_KIND_KL, p, prior, 0.05, PB_POLICY_EXACT, &cfg, &mut post) };
    assert_eq!(s, PbStatus::Ok);
    assert_eq!(unsafe { pb_posterior_len(post) }, 4);

    let mut best = ptr::null_mut();
    let mut prefix = 0usize;
    let s = unsafe { pb_prefix_search(PB_KIND_SQ, p, prior, 0.05, PB_POLICY_EXACT, &cfg, &mut best, &mut prefix) };
    assert_eq!(s, PbStatus::Ok);
    assert!((1..=4).contains(&prefix));
    unsafe {
        pb_posterior_free(best);
        pb_posterior_free(post);
        pb_distribution_free(prior);
        pb_profile_free(p);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut out = ptr::null_mut();
    let bad = [0.5, -0.1];
    let s = unsafe { pb_profile_new(bad.as_ptr(), 2, 10, &mut out) };
    assert_eq!(s, PbStatus::RiskOutOfRange);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(pb_last_error_message()) };
    assert!(!msg.to_bytes().is_empty());

    let p = profile(&[0.1, 0.2], 10);
    let prior = uniform(2);
    let mut post = ptr::null_mut();
    let s = unsafe { pb_optimize(PB_KIND_SQ, p, ptr::null(), 0.05, PB_POLICY_EXACT, ptr::null(), &mut post) };
    assert_eq!(s, PbStatus::NullPointer);
    let skewed = [0.3, 0.7];
    let mut nonuni = ptr::null_mut();
    assert_eq!(unsafe { pb_distribution_from_weights(skewed.as_ptr(), 2, &mut nonuni) }, PbStatus::Ok);
    let s = unsafe { pb_prefix_search(PB_KIND_SQ, p, nonuni, 0.05, PB_POLICY_EXACT, ptr::null(), &mut post, ptr::null_mut()) };
    assert_eq!(s, PbStatus::NonUniformPrior);
    let mut log_ik = 0.0;
    let s = unsafe { pb_ik_constant(PB_KIND_LIN, 10, PB_POLICY_TWO_SQRT_M, &mut log_ik) };
    assert_eq!(s, PbStatus::BadPolicyForKind);
    let s = unsafe { pb_ik_constant(PB_KIND_LIN, 10, PB_POLICY_EXACT, &mut log_ik) };
    assert_eq!(s, PbStatus::Ok);
    assert!((log_ik.exp() - 3.4316).abs() < 1e-3);
    assert!(pb_last_error_message().is_null());
    unsafe {
        pb_distribution_free(nonuni);
        pb_distribution_free(prior);
        pb_profile_free(p);
    }
}

#[test]
fn bound_and_kl_roots() {
    let p = profile(&[0.5, 0.5], 100);
    let u = uniform(2);
    let mut b = std::mem::MaybeUninit::<PbBoundValue>::uninit();
    let s = unsafe { pb_evaluate_bound(PB_KIND_KL, 0.05, PB_POLICY_EXACT, u, u, p, b.as_mut_ptr()) };
    assert_eq!(s, PbStatus::Ok);
    let b = unsafe { b.assume_init() };
    let mut root = 0.0;
    let mut sat = true;
    let x = (2.0 * 10.0f64 / 0.05).ln() / 100.0;
    assert_eq!(unsafe { pb_kl_upper_root(0.5, x, &mut root, &mut sat) }, PbStatus::Ok);
    assert!(!sat);
    assert_eq!(b.value, root);
    assert_eq!(unsafe { pb_kl_lower_root(1.0, 4f64.ln(), &mut root, ptr::null_mut()) }, PbStatus::Ok);
    assert!((root - 0.25).abs() < 1e-15);
    unsafe {
        pb_distribution_free(u);
        pb_profile_free(p);
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        pb_profile_free(ptr::null_mut());
        pb_distribution_free(ptr::null_mut());
        pb_posterior_free(ptr::null_mut());
        assert_eq!(pb_posterior_len(ptr::null()), 0);
    }
}

/// Compiles the C smoke test against the generated header and the static
/// library, when a C compiler and the archive are available.
#[test]
fn c_smoke_test() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let archive = profile_dir.join("libpacbayes_ffi.a");
    if !archive.exists() {
        eprintln!("skipping: {} not built", archive.display());
        return;
    }
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("pacbayes_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status();
    let Ok(status) = status else {
        eprintln!("skipping: no C compiler");
        return;
    };
    assert!(status.success(), "C smoke test failed to compile");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.731059"));
}
