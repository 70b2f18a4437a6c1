use pacbayes::bounds::{evaluate_bound, BoundEvaluator};
use pacbayes::distance::{binary_kl, phi_ch_of_gap};
use pacbayes::harness::{compare_all, hhi};
use pacbayes::optimize::{fp_step, random_distribution};
use pacbayes::{
    fp_solve, grid_oracle, kl_lower_root, kl_upper_root, optimal_posterior_linear,
    stationarity_residual, BoundSpec, ConstantPolicy, DiscreteDistribution, DistanceKind,
    FixedPointConfig, KlRootRequest, RiskProfile,
};
use proptest::prelude::*;

const FP_KINDS: [DistanceKind; 4] = [DistanceKind::Sq, DistanceKind::Pinsker, DistanceKind::Ch, DistanceKind::Kl];

fn profile_strategy(max_h: usize, max_m: u64) -> impl Strategy<Value = RiskProfile> {
    (prop::collection::vec(0.0f64..=1.0, 1..=max_h), 1..=max_m)
        .prop_map(|(risks, m)| RiskProfile::from_risks(&risks, m).unwrap())
}

fn spread_profile(max_h: usize, max_m: u64) -> impl Strategy<Value = RiskProfile> {
    (prop::collection::vec(0.0f64..0.6, 2..=max_h), 10..=max_m)
        .prop_map(|(risks, m)| RiskProfile::from_risks(&risks, m).unwrap())
}

fn solve(kind: DistanceKind, profile: &RiskProfile, prior: &DiscreteDistribution) -> pacbayes::PosteriorResult {
    if kind == DistanceKind::Lin {
        optimal_posterior_linear(profile, prior, 0.05).unwrap()
    } else {
        fp_solve(kind, profile, prior, 0.05, &FixedPointConfig::default(), ConstantPolicy::ExactLogspace).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bound_never_below_gibbs_risk(profile in profile_strategy(20, 3000), seed in any::<u64>(), delta in 0.001f64..0.5) {
        let q = random_distribution(profile.len(), seed).unwrap();
        let prior = DiscreteDistribution::uniform(profile.len()).unwrap();
        for kind in DistanceKind::ALL {
            for policy in [ConstantPolicy::ExactLogspace, ConstantPolicy::TwoSqrtM] {
                if kind == DistanceKind::Lin && policy == ConstantPolicy::TwoSqrtM {
                    continue;
                }
                let b = evaluate_bound(&BoundSpec::new(kind, delta, policy).unwrap(), &q, &prior, &profile).unwrap();
                prop_assert!(b.value >= b.gibbs_emp_risk - 1e-15);
                prop_assert!(b.value.is_finite());
                prop_assert!(b.kl_qp >= 0.0);
            }
        }
    }

    #[test]
    fn kl_bound_solves_its_level_equation(profile in profile_strategy(20, 3000), seed in any::<u64>(), delta in 0.001f64..0.5) {
        let q = random_distribution(profile.len(), seed).unwrap();
        let prior = DiscreteDistribution::uniform(profile.len()).unwrap();
        let spec = BoundSpec::new(DistanceKind::Kl, delta, ConstantPolicy::TwoSqrtM).unwrap();
        let b = evaluate_bound(&spec, &q, &prior, &profile).unwrap();
        prop_assume!(!b.saturated);
        let m = profile.sample_size() as f64;
        let level = (b.kl_qp + (2.0 * m.sqrt() / delta).ln()) / m;
        // Evaluate on the mirrored side, where 1 - value keeps its precision.
        let z = binary_kl(1.0 - b.gibbs_emp_risk, 1.0 - b.value).unwrap();
        prop_assert!((z - level).abs() <= 1e-8, "z={z} level={level}");
    }

    #[test]
    fn ch_bound_round_trips(profile in profile_strategy(20, 3000), seed in any::<u64>(), delta in 0.001f64..0.5) {
        let q = random_distribution(profile.len(), seed).unwrap();
        let prior = DiscreteDistribution::uniform(profile.len()).unwrap();
        let spec = BoundSpec::new(DistanceKind::Ch, delta, ConstantPolicy::ExactLogspace).unwrap();
        let b = evaluate_bound(&spec, &q, &prior, &profile).unwrap();
        prop_assume!(!b.saturated);
        let m = profile.sample_size() as f64;
        let r = (b.kl_qp + (0.9334 * m / delta).ln()) / (2.0 * m - 1.0);
        prop_assert!((phi_ch_of_gap(b.value - b.gibbs_emp_risk) - r).abs() <= 1e-8);
    }

    #[test]
    fn permutation_leaves_bounds_unchanged(profile in profile_strategy(12, 1000), seed in any::<u64>(), rot in 0usize..12) {
        let h = profile.len();
        let q = random_distribution(h, seed).unwrap();
        let prior = DiscreteDistribution::uniform(h).unwrap();
        let perm: Vec<usize> = (0..h).map(|i| (i + rot) % h).collect();
        let risks = profile.risks();
        let permuted = RiskProfile::from_risks(&perm.iter().map(|&i| risks[i]).collect::<Vec<_>>(), profile.sample_size()).unwrap();
        let qw = q.weights();
        let qp = DiscreteDistribution::from_weights(&perm.iter().map(|&i| qw[i]).collect::<Vec<_>>()).unwrap();
        for kind in DistanceKind::ALL {
            let spec = BoundSpec::new(kind, 0.05, ConstantPolicy::ExactLogspace).unwrap();
            let a = evaluate_bound(&spec, &q, &prior, &profile).unwrap().value;
            let b = evaluate_bound(&spec, &qp, &prior, &permuted).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{kind}: {a} vs {b}");
        }
    }

    #[test]
    fn kl_roots_bracket_phat(p in 0.0f64..=1.0, x in 0.0f64..=3.0) {
        let req = KlRootRequest::new(p, x);
        let lo = kl_lower_root(&req).unwrap();
        let up = kl_upper_root(&req).unwrap();
        prop_assert!(lo.root <= p && p <= up.root);
    }

    #[test]
    fn fp_step_stays_on_simplex(profile in spread_profile(40, 2000), seed in any::<u64>()) {
        let prior = DiscreteDistribution::uniform(profile.len()).unwrap();
        let q = random_distribution(profile.len(), seed).unwrap();
        for kind in FP_KINDS {
            let t = fp_step(kind, &q, &profile, &prior, 0.05, ConstantPolicy::ExactLogspace).unwrap();
            let w = t.weights();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(w.iter().all(|&x| x > 0.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn optimal_weights_follow_risk_order(profile in spread_profile(60, 2000)) {
        let prior = DiscreteDistribution::uniform(profile.len()).unwrap();
        let risks = profile.risks();
        for kind in DistanceKind::ALL {
            let res = solve(kind, &profile, &prior);
            let w = res.posterior.weights();
            for i in 0..w.len() {
                for j in 0..w.len() {
                    if risks[i] <= risks[j] {
                        prop_assert!(w[i] >= w[j], "{kind}: q[{i}]={} < q[{j}]={}", w[i], w[j]);
                    }
                }
            }
            let c = hhi(&res.posterior);
            prop_assert!(c >= 1.0 / w.len() as f64 - 1e-12 && c <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn converged_means_certified(profile in spread_profile(60, 2000)) {
        let prior = DiscreteDistribution::uniform(profile.len()).unwrap();
        for kind in FP_KINDS {
            let cfg = FixedPointConfig::default();
            let res = fp_solve(kind, &profile, &prior, 0.05, &cfg, ConstantPolicy::ExactLogspace).unwrap();
            if res.converged {
                prop_assert!(res.residual <= cfg.tol);
                let r = stationarity_residual(kind, &res.posterior, &profile, &prior, 0.05, ConstantPolicy::ExactLogspace).unwrap();
                // The returned iterate is the certified one, up to re-evaluation rounding.
                prop_assert!(r <= cfg.tol + 1e-14, "{kind}: {r}");
            }
        }
    }

    #[test]
    fn bounds_grow_as_q_leaves_the_prior(r in 0.0f64..0.9, m in 5u64..2000, h in 2usize..10) {
        let profile = RiskProfile::from_risks(&vec![r; h], m).unwrap();
        let prior = DiscreteDistribution::uniform(h).unwrap();
        let far = DiscreteDistribution::point_mass(h, 0).unwrap().weights();
        let pw = prior.weights();
        for kind in DistanceKind::ALL {
            let spec = BoundSpec::new(kind, 0.05, ConstantPolicy::ExactLogspace).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for s in 0..=20 {
                let t = s as f64 / 20.0;
                let w: Vec<f64> = pw.iter().zip(&far).map(|(a, b)| (1.0 - t) * a + t * b).collect();
                let q = DiscreteDistribution::from_weights(&w).unwrap();
                let v = evaluate_bound(&spec, &q, &prior, &profile).unwrap().value;
                prop_assert!(v >= prev - 1e-12, "{kind} t={t}");
                prev = v;
            }
        }
    }

    #[test]
    fn report_rows_are_complete(profile in profile_strategy(30, 2000)) {
        let report = compare_all(&profile, 0.05, &FixedPointConfig::default(), ConstantPolicy::ExactLogspace).unwrap();
        prop_assert_eq!(report.rows.len(), 5);
        for (row, kind) in report.rows.iter().zip(DistanceKind::ALL) {
            prop_assert_eq!(row.kind, kind);
            match row.bound {
                Some(b) => prop_assert!(b.is_finite()),
                None => prop_assert!(row.error.is_some()),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn fixed_points_agree_with_lattice_search(
        risks in prop::collection::vec(0.0f64..0.5, 2..=3),
        m in 20u64..500,
    ) {
        let profile = RiskProfile::from_risks(&risks, m).unwrap();
        let prior = DiscreteDistribution::uniform(risks.len()).unwrap();
        for kind in [DistanceKind::Sq, DistanceKind::Pinsker, DistanceKind::Kl] {
            let fp = fp_solve(kind, &profile, &prior, 0.05, &FixedPointConfig::default(), ConstantPolicy::ExactLogspace).unwrap();
            let grid = grid_oracle(kind, &profile, &prior, 0.05, 0.001, ConstantPolicy::ExactLogspace).unwrap();
            if kind == DistanceKind::Kl {
                prop_assert!(fp.bound.value <= grid.bound.value + 1e-3);
            } else {
                prop_assert!((fp.bound.value - grid.bound.value).abs() <= 1e-3);
            }
        }
    }
}

#[test]
fn squared_fixed_point_beats_coarse_lattice() {
    let profile = RiskProfile::from_risks(&[0.05, 0.10, 0.30], 200).unwrap();
    let prior = DiscreteDistribution::uniform(3).unwrap();
    let fp = fp_solve(DistanceKind::Sq, &profile, &prior, 0.05, &FixedPointConfig::default(), ConstantPolicy::ExactLogspace).unwrap();
    let grid = grid_oracle(DistanceKind::Sq, &profile, &prior, 0.05, 0.01, ConstantPolicy::ExactLogspace).unwrap();
    assert!(fp.converged);
    assert!(fp.bound.value <= grid.bound.value + 1e-6);
}

#[test]
fn evaluator_matches_closed_form_lin() {
    let spec = BoundSpec::new(DistanceKind::Lin, 0.1, ConstantPolicy::ExactLogspace).unwrap();
    let eval = BoundEvaluator::new(&spec, 10).unwrap();
    let b = eval.evaluate(0.0, 0.0).unwrap();
    assert!((b.value - (3.4316f64 / 0.1).ln() / 10.0).abs() < 1e-4);
}
