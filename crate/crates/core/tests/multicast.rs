use approx::assert_abs_diff_eq;
use mimo_cc_lab::channel::{sample_channels, CMatrix, ChannelSet};
use mimo_cc_lab::multicast::{
    build_sca_subproblem, exact_symmetric_rate, remark1_solve, sca_solve, solve_subproblem, solve_subproblem_with,
    waterfilling_capacity, BarrierOptions, CovarianceSet, MulticastProblem, ScaConfig,
};
use mimo_cc_lab::Error;
use num_complex::Complex64;
use proptest::prelude::*;

mod common;
use common::{lex_subsets, oracle_rhs};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn problem(g: usize, l: usize, t: usize, omega: usize, power: f64, seed: u64) -> MulticastProblem {
    let users: Vec<usize> = (0..omega).collect();
    MulticastProblem::new(sample_channels(g, l, &users, seed), t, 1.0, power).unwrap()
}

fn oracle_rate(p: &MulticastProblem, covs: &CovarianceSet, omega: usize, t: usize) -> f64 {
    let groups = lex_subsets(omega, t + 1);
    let mut best = f64::INFINITY;
    for k in 0..omega {
        let mine: Vec<usize> = (0..groups.len()).filter(|&i| groups[i].contains(&k)).collect();
        for mask in 1u32..1 << mine.len() {
            let b: Vec<usize> = (0..mine.len()).filter(|j| mask >> j & 1 == 1).map(|j| mine[j]).collect();
            best = best.min(oracle_rhs(p.channel(k), covs, &groups, k, &b, p.n0()).max(0.0));
        }
    }
    best
}

#[test]
fn exact_rate_matches_independent_evaluation() {
    for (g, l, t, omega) in [(2, 2, 1, 3), (1, 2, 1, 3), (3, 2, 0, 3), (2, 3, 1, 4), (2, 2, 2, 4)] {
        let p = problem(g, l, t, omega, 10.0, 7);
        assert_eq!(p.groups(), &lex_subsets(omega, t + 1)[..]);
        let covs = CovarianceSet::random(p.groups().len(), l, 10.0, 7);
        let got = exact_symmetric_rate(&p, &covs).unwrap().rate;
        let want = oracle_rate(&p, &covs, omega, t);
        assert_abs_diff_eq!(got, want, epsilon = 1e-12);
    }
}

#[test]
fn exact_rate_scalar_and_zero_cases() {
    let p = MulticastProblem::new(ChannelSet::from_matrices(vec![CMatrix::from_element(1, 1, c(1.0))]), 0, 1.0, 5.0)
        .unwrap();
    let full = CovarianceSet { mats: vec![CMatrix::from_element(1, 1, c(5.0))] };
    assert_abs_diff_eq!(exact_symmetric_rate(&p, &full).unwrap().rate, 6f64.log2(), epsilon = 1e-12);

    let q = problem(2, 2, 1, 3, 10.0, 3);
    let r = exact_symmetric_rate(&q, &CovarianceSet::zeros(3, 2)).unwrap();
    assert_eq!(r.rate, 0.0);
}

#[test]
fn per_user_binding_reports_the_minimum() {
    let p = problem(2, 2, 1, 3, 10.0, 11);
    let covs = CovarianceSet::random(3, 2, 10.0, 11);
    let r = exact_symmetric_rate(&p, &covs).unwrap();
    assert_eq!(r.per_user.len(), 3);
    for b in &r.per_user {
        let direct = oracle_rhs(p.channel(b.user), &covs, p.groups(), b.user, &b.subset, 1.0);
        assert_abs_diff_eq!(b.value, direct, epsilon = 1e-12);
    }
    let min = r.per_user.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
    assert_eq!(r.rate, min);
}

#[test]
fn scaling_channels_and_noise_together_leaves_rate_unchanged() {
    let base = sample_channels(2, 2, &[0, 1, 2], 21);
    let covs = CovarianceSet::random(3, 2, 4.0, 22);
    let r0 = exact_symmetric_rate(&MulticastProblem::new(base.clone(), 1, 1.0, 4.0).unwrap(), &covs).unwrap().rate;
    for scale in [Complex64::new(0.1, 0.0), Complex64::new(3.0, -4.0), Complex64::new(0.0, 7.5)] {
        let scaled = ChannelSet::from_matrices(base.matrices.iter().map(|h| h * scale).collect());
        let p = MulticastProblem::new(scaled, 1, scale.norm_sqr(), 4.0).unwrap();
        let r = exact_symmetric_rate(&p, &covs).unwrap().rate;
        assert_abs_diff_eq!(r, r0, epsilon = 1e-9);
    }
}

#[test]
fn subproblem_constraint_count() {
    for (t, omega) in [(0, 1), (1, 2), (1, 3), (0, 3), (1, 4), (2, 4), (2, 5)] {
        let p = problem(2, 2, t, omega, 1.0, 5);
        let sub = build_sca_subproblem(&p, &CovarianceSet::uniform(p.groups().len(), 2, 1.0)).unwrap();
        let m = lex_subsets(omega - 1, t).len() as u32;
        assert_eq!(sub.constraint_count(), omega * ((1usize << m) - 1) + 1);
    }
}

#[test]
fn single_group_subproblem_has_no_linear_terms() {
    let p = problem(2, 3, 2, 3, 8.0, 9);
    let sub = build_sca_subproblem(&p, &CovarianceSet::uniform(1, 3, 8.0)).unwrap();
    assert!(sub.is_interference_free());
    let covs = CovarianceSet::random(1, 3, 8.0, 10);
    for cons in &sub.constraints {
        assert!(cons.linear_groups.is_empty());
        let h = p.channel(cons.user);
        let direct = (CMatrix::identity(2, 2) + h * &covs.mats[0] * h.adjoint()).determinant().re.log2();
        assert_abs_diff_eq!(cons.value(&p, &covs).unwrap(), direct, epsilon = 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn linearization_is_tight_and_a_lower_bound(seed in any::<u64>(), snr_db in -5.0f64..35.0, t in 0usize..2) {
        let power = 10f64.powf(snr_db / 10.0);
        let p = problem(2, 2, t, 3, power, seed);
        let n = p.groups().len();
        let at = CovarianceSet::random(n, 2, power, seed ^ 1);
        let elsewhere = CovarianceSet::random(n, 2, power * 0.7, seed ^ 2);
        let sub = build_sca_subproblem(&p, &at).unwrap();
        for cons in &sub.constraints {
            let exact_at = oracle_rhs(p.channel(cons.user), &at, p.groups(), cons.user, &cons.subset, 1.0);
            prop_assert!((cons.value(&p, &at).unwrap() - exact_at).abs() <= 1e-10);
            let exact_else = oracle_rhs(p.channel(cons.user), &elsewhere, p.groups(), cons.user, &cons.subset, 1.0);
            prop_assert!(cons.value(&p, &elsewhere).unwrap() <= exact_else + 1e-9);
        }
    }
}

#[test]
fn scalar_subproblem_spends_all_power() {
    let p = MulticastProblem::new(ChannelSet::from_matrices(vec![CMatrix::from_element(1, 1, c(1.0))]), 0, 1.0, 3.0)
        .unwrap();
    let sub = build_sca_subproblem(&p, &CovarianceSet::uniform(1, 1, 3.0)).unwrap();
    let (covs, r) = solve_subproblem(&sub, 1e-5).unwrap();
    assert_abs_diff_eq!(r, 4f64.log2(), epsilon = 1e-5);
    assert_abs_diff_eq!(covs.mats[0][(0, 0)].re, 3.0, epsilon = 1e-4);
}

#[test]
fn identity_channel_gives_uniform_allocation() {
    for l in 1..=4 {
        let power = 6.0;
        let p = MulticastProblem::new(ChannelSet::from_matrices(vec![CMatrix::identity(l, l)]), 0, 1.0, power).unwrap();
        // deliberately lopsided expansion point
        let mut start = CovarianceSet::zeros(1, l);
        start.mats[0][(0, 0)] = c(power);
        let sub = build_sca_subproblem(&p, &start).unwrap();
        let (covs, r) = solve_subproblem(&sub, 1e-6).unwrap();
        assert_abs_diff_eq!(r, l as f64 * (1.0 + power / l as f64).log2(), epsilon = 1e-4);
        covs.check_feasible(1, l, power).unwrap();
    }
}

#[test]
fn subproblem_never_loses_the_expansion_rate() {
    for seed in 0..6 {
        let p = problem(2, 2, 1, 3, 30.0, 100 + seed);
        let prev = CovarianceSet::random(3, 2, 30.0, 200 + seed);
        let exact_prev = exact_symmetric_rate(&p, &prev).unwrap().rate;
        let sub = build_sca_subproblem(&p, &prev).unwrap();
        let (covs, r) = solve_subproblem(&sub, 1e-5).unwrap();
        assert!(r >= exact_prev - 1e-6, "seed {seed}: {r} < {exact_prev}");
        covs.check_feasible(3, 2, 30.0).unwrap();
        // the surrogate is a lower bound, so the true rate is at least as good
        assert!(exact_symmetric_rate(&p, &covs).unwrap().rate >= r - 1e-9);
    }
}

#[test]
fn newton_budget_exhaustion_returns_expansion_point() {
    let p = problem(2, 2, 1, 3, 10.0, 4);
    let prev = CovarianceSet::uniform(3, 2, 10.0);
    let sub = build_sca_subproblem(&p, &prev).unwrap();
    let err = solve_subproblem_with(&sub, &BarrierOptions { max_newton: 1, ..BarrierOptions::default() }).unwrap_err();
    match err {
        Error::SolverFailure { best: Some(best), .. } => assert_eq!(*best, prev),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn sca_on_single_group_matches_direct_solve() {
    for seed in 0..5 {
        let p = problem(2, 2, 1, 2, 10.0, 300 + seed);
        let a = sca_solve(&p, &ScaConfig::default()).unwrap();
        let b = remark1_solve(&p, 1e-6).unwrap();
        assert_abs_diff_eq!(a.result.rate, b.result.rate, epsilon = 1e-4);
    }
}

#[test]
fn remark1_single_user_is_waterfilling() {
    for seed in 0..5 {
        let ch = sample_channels(3, 2, &[0], 400 + seed);
        let cap = waterfilling_capacity(&ch.matrices[0], 5.0, 1.0);
        let p = MulticastProblem::new(ch, 0, 1.0, 5.0).unwrap();
        assert_abs_diff_eq!(remark1_solve(&p, 1e-6).unwrap().result.rate, cap, epsilon = 1e-4);
    }
}

#[test]
fn remark1_identical_users_equal_one_user() {
    let h = sample_channels(2, 2, &[0], 77).matrices[0].clone();
    let single = MulticastProblem::new(ChannelSet::from_matrices(vec![h.clone()]), 0, 1.0, 10.0).unwrap();
    let double = MulticastProblem::new(ChannelSet::from_matrices(vec![h.clone(), h]), 1, 1.0, 10.0).unwrap();
    let a = remark1_solve(&single, 1e-6).unwrap().result.rate;
    let b = remark1_solve(&double, 1e-6).unwrap().result.rate;
    assert_abs_diff_eq!(a, b, epsilon = 1e-4);
}

#[test]
fn remark1_zero_channel_pins_rate_to_zero() {
    let h = sample_channels(2, 2, &[0], 78).matrices[0].clone();
    let p = MulticastProblem::new(ChannelSet::from_matrices(vec![h, CMatrix::zeros(2, 2)]), 1, 1.0, 10.0).unwrap();
    let out = remark1_solve(&p, 1e-6).unwrap();
    assert_abs_diff_eq!(out.result.rate, 0.0, epsilon = 1e-12);
}

#[test]
fn remark1_rejects_interfering_groups() {
    let p = problem(2, 2, 1, 3, 1.0, 1);
    assert!(matches!(remark1_solve(&p, 1e-5), Err(Error::InvalidArgument(_))));
}

#[test]
fn sca_is_monotone_and_feasible_without_extrapolation() {
    let cfg = ScaConfig { extrapolate: false, max_iter: 60, ..ScaConfig::default() };
    for seed in 0..3 {
        let p = problem(2, 2, 1, 3, 10.0, 500 + seed);
        let out = sca_solve(&p, &cfg).unwrap();
        let trace = &out.result.objective_trace;
        assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{trace:?}");
        assert!(out.result.rate >= out.initial_rate - 1e-6);
        out.covariances.check_feasible(3, 2, 10.0).unwrap();
    }
}

#[test]
fn restarts_keep_the_best_and_are_reproducible() {
    let p = problem(2, 2, 1, 3, 100.0, 600);
    let one = sca_solve(&p, &ScaConfig::default()).unwrap();
    let cfg = ScaConfig { restarts: 3, base_seed: 9, ..ScaConfig::default() };
    let three = sca_solve(&p, &cfg).unwrap();
    assert!(three.result.rate >= one.result.rate);
    let again = sca_solve(&p, &cfg).unwrap();
    assert_eq!(three.result.rate.to_bits(), again.result.rate.to_bits());
    assert_eq!(three.covariances, again.covariances);
}

#[test]
fn reported_rate_is_the_exact_evaluation() {
    let p = problem(2, 2, 1, 3, 20.0, 700);
    let out = sca_solve(&p, &ScaConfig::default()).unwrap();
    let exact = exact_symmetric_rate(&p, &out.covariances).unwrap();
    assert_eq!(out.result.rate, exact.rate);
    assert!(out.result.rate >= *out.result.objective_trace.last().unwrap() - 1e-9);
}
