//! Cross-checks of the numeric kernels against independent reference
//! routes, plus the procedure-level behavioral properties, mostly as
//! property tests over randomized batteries.

mod common;

use common::*;
use dirseq::procedures::{Decision, ProcedureKind, Sign, TestBattery, TruthVector};
use dirseq::sim::gen_worst_case_chain;
use dirseq::DistributionFamily;
use proptest::prelude::*;
use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALL_KINDS: [ProcedureKind; 8] = [
    ProcedureKind::FixedSeqHalving,
    ProcedureKind::FixedSeqFlat,
    ProcedureKind::FixedSeqLinear,
    ProcedureKind::FixedSeqTwoThirds,
    ProcedureKind::FixedSeqHalf,
    ProcedureKind::BonferroniDir,
    ProcedureKind::HolmDir,
    ProcedureKind::HochbergDir,
];

const FIXED_SEQ_KINDS: [ProcedureKind; 5] = [
    ProcedureKind::FixedSeqHalving,
    ProcedureKind::FixedSeqFlat,
    ProcedureKind::FixedSeqLinear,
    ProcedureKind::FixedSeqTwoThirds,
    ProcedureKind::FixedSeqHalf,
];

// ---------------------------------------------------------------------
// Kernel cross-checks against the independent series/bisection oracles.
// ---------------------------------------------------------------------

#[test]
fn normal_cdf_tracks_the_series_oracle() {
    let normal = DistributionFamily::Normal;
    let mut worst_abs = 0.0f64;
    for i in -800..=800 {
        let x = i as f64 / 100.0;
        let diff = (normal.cdf(0.0, x) - normal_cdf_oracle(x)).abs();
        worst_abs = worst_abs.max(diff);
    }
    assert!(worst_abs <= 1e-15, "worst |x| <= 8 abs error {worst_abs:e}");
    for i in 81..=260 {
        let x = i as f64 / 10.0;
        let want = normal_cdf_oracle(-x);
        let got = normal.cdf(0.0, -x);
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "deep tail at -{x}: {got:e} vs {want:e}"
        );
    }
    assert_eq!(normal.cdf(0.0, -39.0), 0.0);
    assert_eq!(normal.cdf(0.0, 39.0), 1.0);
}

#[test]
fn normal_quantile_tracks_the_bisection_oracle() {
    let normal = DistributionFamily::Normal;
    for i in 1..=999 {
        let u = i as f64 / 1000.0;
        let want = bisect_quantile(normal_cdf_oracle, u, -40.0, 40.0);
        let got: f64 = normal.quantile(u).unwrap();
        assert!(
            (got - want).abs() <= 1e-12 * want.abs().max(1.0),
            "u = {u}: {got} vs {want}"
        );
    }
    let q: f64 = normal.quantile(0.975).unwrap();
    assert!((q - 1.959964).abs() < 1e-6);
}

#[test]
fn cauchy_cdf_and_quantile_track_the_series_oracle() {
    let cauchy = DistributionFamily::Cauchy;
    for &x in &[
        -1e6, -1e4, -112.7, -87.3, -12.7062, -5.0, -2.0, -0.5, 0.0, 0.7, 3.0, 12.7062, 112.7, 1e4,
        1e6,
    ] {
        let want = cauchy_cdf_oracle(x);
        let got: f64 = cauchy.cdf(0.0, x);
        let tol = 1e-12 * want.abs().max(1e-300);
        assert!(
            (got - want).abs() <= tol.max(1e-18),
            "x = {x}: {got:e} vs {want:e}"
        );
    }
    let c: f64 = cauchy.quantile(0.975).unwrap();
    assert!((c - 12.706204736174705).abs() < 1e-9);
    let want = bisect_quantile(cauchy_cdf_oracle, 0.999, 0.0, 1e5);
    let got: f64 = cauchy.quantile(0.999).unwrap();
    assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn null_pvalues_are_uniform_by_ks() {
    for family in [DistributionFamily::Normal, DistributionFamily::Cauchy] {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut pvals: Vec<f64> = (0..1_000_000)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                family.two_sided_pvalue(family.quantile(u).unwrap())
            })
            .collect();
        pvals.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let d = ks_distance_uniform(&pvals);
        assert!(d < 0.002, "{family:?}: KS distance {d}");
    }
}

#[test]
fn mlr_grid_passes_for_normal_and_fails_for_cauchy() {
    let deltas = [0.0, 1.0, 3.0];
    let xs: Vec<f64> = (-20..=20).map(|i| i as f64 / 5.0).collect();
    let report = dirseq::mlr_grid_check(DistributionFamily::Normal, &deltas, &xs).unwrap();
    assert!(report.is_consistent(), "{:?}", report.violations);

    let report =
        dirseq::mlr_grid_check(DistributionFamily::Cauchy, &[0.0f64, 100.0], &[-112.7, -87.3])
            .unwrap();
    assert!(!report.is_consistent());
    let v = &report.violations[0];
    assert!((v.ratio1 - 1.291).abs() < 2e-3, "lower-tail ratio {}", v.ratio1);
    assert!((v.ratio2 - 1.136).abs() < 2e-3, "lower-tail ratio {}", v.ratio2);
}

// ---------------------------------------------------------------------
// Sampler diagnostics.
// ---------------------------------------------------------------------

#[test]
fn chain_event_equivalence_holds_pathwise() {
    let k = 5;
    let alpha = 0.05;
    let truth = TruthVector::new(vec![0.0f64; k]).unwrap();
    let ladder = dirseq::sharpness_chain_quantiles(k, alpha).unwrap().quantiles;
    let mut rng = ChaCha8Rng::seed_from_u64(0xc4a1);
    for path in 0..100_000 {
        let z = gen_worst_case_chain(&truth, &mut rng).unwrap();
        for i in 0..k - 1 {
            let lhs = z[i] >= ladder[i];
            let rhs = !(-ladder[i + 1] < z[i + 1] && z[i + 1] < ladder[i + 1]);
            assert_eq!(
                lhs, rhs,
                "path {path}, step {i}: z_i = {}, z_next = {}",
                z[i],
                z[i + 1]
            );
        }
    }
}

#[test]
fn chain_marginals_are_standard_normal_by_ks() {
    let k = 4;
    let truth = TruthVector::new(vec![0.0f64; k]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11);
    let n = 1_000_000;
    let mut coords: Vec<Vec<f64>> = (0..k).map(|_| Vec::with_capacity(n)).collect();
    for _ in 0..n {
        let z = gen_worst_case_chain(&truth, &mut rng).unwrap();
        for (store, value) in coords.iter_mut().zip(z) {
            store.push(value);
        }
    }
    for (i, store) in coords.iter_mut().enumerate() {
        store.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let d = ks_distance(store, normal_cdf_oracle);
        assert!(d < 0.002, "coordinate {i}: KS distance {d}");
    }
}

#[test]
fn equicorrelated_sample_moments_match() {
    let truth = TruthVector::new(vec![1.0f64, -2.0, 0.5]).unwrap();
    for &rho in &[0.0, 0.5] {
        let mut rng = ChaCha8Rng::seed_from_u64(0xabcd);
        let n = 1_000_000usize;
        let mut mean = [0.0f64; 3];
        let mut cross = [0.0f64; 3];
        let mut sq = [0.0f64; 3];
        for _ in 0..n {
            let t = dirseq::gen_equicorrelated_normal(&truth, rho, &mut rng).unwrap();
            let centered: Vec<f64> = t.iter().zip(truth.thetas()).map(|(v, th)| v - th).collect();
            for i in 0..3 {
                mean[i] += t[i];
                sq[i] += centered[i] * centered[i];
            }
            cross[0] += centered[0] * centered[1];
            cross[1] += centered[0] * centered[2];
            cross[2] += centered[1] * centered[2];
        }
        for i in 0..3 {
            let m = mean[i] / n as f64;
            assert!(
                (m - truth.thetas()[i]).abs() < 0.004,
                "rho {rho} coordinate {i}: mean {m}"
            );
            let v = sq[i] / n as f64;
            assert!((v - 1.0).abs() < 0.01, "rho {rho} coordinate {i}: var {v}");
        }
        for (pair, &c) in cross.iter().enumerate() {
            let r = c / n as f64;
            assert!(
                (r - rho).abs() < 0.004,
                "rho {rho} pair {pair}: correlation {r}"
            );
        }
    }
}

// ---------------------------------------------------------------------
// Procedure-level properties over randomized batteries.
// ---------------------------------------------------------------------

fn rejected_indices(decisions: &[Decision]) -> Vec<usize> {
    decisions
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_rejection())
        .map(|(i, _)| i)
        .collect()
}

/// Every hypothesis rejected in `smaller` is rejected with the same
/// direction in `larger`.
fn extends(larger: &[Decision], smaller: &[Decision]) -> bool {
    smaller
        .iter()
        .zip(larger)
        .all(|(s, l)| *s == Decision::Accept || l == s)
}

fn battery_strategy() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (
        prop::collection::vec(-6.0f64..6.0, 1..12),
        0.005f64..0.25,
    )
}

fn pvalue_battery_strategy() -> impl Strategy<Value = (Vec<(f64, bool)>, f64)> {
    (
        prop::collection::vec(((1e-6f64..1.0), any::<bool>()), 1..12),
        0.005f64..0.25,
    )
}

fn to_entries(raw: &[(f64, bool)]) -> Vec<(f64, Sign)> {
    raw.iter()
        .map(|&(p, pos)| (p, if pos { Sign::Positive } else { Sign::Negative }))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    // |t| stays below 37 so the normal p-value is representable; past
    // ~38.5 it underflows to an exact 0 (pinned in the cdf test above).
    fn pvalues_are_symmetric_and_shrink_with_magnitude(t in -37.0f64..37.0, bump in 0.01f64..4.0) {
        for family in [DistributionFamily::Normal, DistributionFamily::Cauchy] {
            let p = family.two_sided_pvalue(t);
            prop_assert!(p > 0.0 && p <= 1.0);
            // Bit-identical symmetry.
            prop_assert_eq!(p, family.two_sided_pvalue(-t));
            let further = if t >= 0.0 { t + bump } else { t - bump };
            prop_assert!(family.two_sided_pvalue(further) < p);
        }
        prop_assert_eq!(DistributionFamily::Normal.two_sided_pvalue(0.0f64), 1.0);
    }

    #[test]
    fn cdf_quantile_round_trips(u in 0.001f64..0.999) {
        for family in [DistributionFamily::Normal, DistributionFamily::Cauchy] {
            let q: f64 = family.quantile(u).unwrap();
            prop_assert!((family.cdf(0.0, q) - u).abs() <= 1e-8, "{:?} at {}", family, u);
        }
    }

    #[test]
    fn cdf_is_stochastically_ordered_in_theta(
        theta1 in -5.0f64..5.0,
        gap in 0.001f64..5.0,
        x in -20.0f64..20.0,
    ) {
        for family in [DistributionFamily::Normal, DistributionFamily::Cauchy] {
            let lo = family.cdf(theta1 + gap, x);
            let hi = family.cdf(theta1, x);
            prop_assert!(lo <= hi + 1e-15);
        }
    }

    #[test]
    fn fixed_sequence_decisions_have_the_prefix_shape((stats, alpha) in battery_strategy()) {
        let battery = TestBattery::from_statistics(DistributionFamily::Normal, stats).unwrap();
        for kind in FIXED_SEQ_KINDS {
            let decisions = kind.apply(&battery, alpha).unwrap();
            let first_accept = decisions.iter().position(|d| !d.is_rejection());
            if let Some(stop) = first_accept {
                prop_assert!(
                    decisions[stop..].iter().all(|d| *d == Decision::Accept),
                    "{kind:?}: rejection after acceptance in {decisions:?}"
                );
            }
        }
    }

    #[test]
    fn lowering_a_pvalue_never_shrinks_the_rejection_set(
        (raw, alpha) in pvalue_battery_strategy(),
        index in any::<prop::sample::Index>(),
        shrink in 0.01f64..1.0,
    ) {
        let entries = to_entries(&raw);
        let battery = TestBattery::from_pvalues(DistributionFamily::Normal, &entries).unwrap();
        let mut lowered = entries.clone();
        let i = index.index(lowered.len());
        lowered[i].0 *= shrink;
        let lowered_battery =
            TestBattery::from_pvalues(DistributionFamily::Normal, &lowered).unwrap();
        for kind in ALL_KINDS {
            let before = kind.apply(&battery, alpha).unwrap();
            let after = kind.apply(&lowered_battery, alpha).unwrap();
            prop_assert!(
                extends(&after, &before),
                "{kind:?}: before {before:?} after {after:?} (lowered index {i})"
            );
        }
    }

    #[test]
    fn procedure_dominance_chains_hold((stats, alpha) in battery_strategy()) {
        let battery = TestBattery::from_statistics(DistributionFamily::Normal, stats).unwrap();
        let apply = |kind: ProcedureKind| kind.apply(&battery, alpha).unwrap();
        let flat = apply(ProcedureKind::FixedSeqFlat);
        let two_thirds = apply(ProcedureKind::FixedSeqTwoThirds);
        let half = apply(ProcedureKind::FixedSeqHalf);
        let halving = apply(ProcedureKind::FixedSeqHalving);
        prop_assert!(extends(&flat, &two_thirds));
        prop_assert!(extends(&two_thirds, &half));
        // The halving walk starts at alpha, the half walk at alpha/2, so
        // containment of the halving chain needs the first step to clear
        // the stricter constant; from step 2 on the half constants
        // dominate (alpha/2 >= alpha/2^{i-1}).
        if battery.pvalues()[0] <= alpha / 2.0 {
            prop_assert!(extends(&half, &halving));
        }
        let hochberg = apply(ProcedureKind::HochbergDir);
        let holm = apply(ProcedureKind::HolmDir);
        let bonferroni = apply(ProcedureKind::BonferroniDir);
        prop_assert!(extends(&hochberg, &holm));
        prop_assert!(extends(&holm, &bonferroni));
    }

    #[test]
    fn decisions_are_invariant_under_odd_increasing_transforms(
        (stats, alpha) in battery_strategy(),
    ) {
        let normal = DistributionFamily::Normal;
        let cauchy = DistributionFamily::Cauchy;
        let battery = TestBattery::from_statistics(normal, stats.clone()).unwrap();
        // T' = F_C^{-1}(F_N(T)) is strictly increasing and odd, so the
        // (p-value, sign) pairs are preserved up to roundoff.
        let transformed: Vec<f64> = stats
            .iter()
            .map(|&t| cauchy.quantile(normal.cdf(0.0, t)).unwrap())
            .collect();
        let transformed_battery = TestBattery::from_statistics(cauchy, transformed).unwrap();
        // Skip draws where roundoff could flip a comparison against any
        // procedure constant.
        let n = battery.len();
        let mut constants = vec![alpha, 2.0 * alpha / 3.0, alpha / 2.0, 2.0 * alpha / (n as f64 + 1.0)];
        for i in 0..n {
            constants.push(alpha / 2f64.powi(i as i32));
            constants.push(alpha / (n - i) as f64);
        }
        for &p in battery.pvalues() {
            for &c in &constants {
                prop_assume!((p - c).abs() > 1e-9);
            }
        }
        for kind in ALL_KINDS {
            let a = kind.apply(&battery, alpha).unwrap();
            let b = kind.apply(&transformed_battery, alpha).unwrap();
            prop_assert_eq!(&a, &b, "{:?}", kind);
        }
    }

    #[test]
    fn single_hypothesis_reduces_to_the_marginal_test(
        t in -8.0f64..8.0,
        alpha in 0.005f64..0.3,
    ) {
        prop_assume!(t != 0.0);
        let battery = TestBattery::from_statistics(DistributionFamily::Normal, vec![t]).unwrap();
        let p = battery.pvalues()[0];
        prop_assume!((p - alpha).abs() > 1e-12);
        let expected = if p <= alpha {
            if t > 0.0 {
                Decision::RejectPositive
            } else {
                Decision::RejectNegative
            }
        } else {
            Decision::Accept
        };
        // The two remark variants keep their own constants (2a/3 and a/2)
        // even at n = 1, so the reduction covers the other six kinds.
        for kind in [
            ProcedureKind::FixedSeqHalving,
            ProcedureKind::FixedSeqFlat,
            ProcedureKind::FixedSeqLinear,
            ProcedureKind::BonferroniDir,
            ProcedureKind::HolmDir,
            ProcedureKind::HochbergDir,
        ] {
            let decisions = kind.apply(&battery, alpha).unwrap();
            prop_assert_eq!(decisions[0], expected, "{:?}", kind);
        }
    }

    #[test]
    fn rejections_follow_the_statistic_sign((stats, alpha) in battery_strategy()) {
        let battery = TestBattery::from_statistics(DistributionFamily::Normal, stats).unwrap();
        for kind in ALL_KINDS {
            let decisions = kind.apply(&battery, alpha).unwrap();
            for (i, d) in decisions.iter().enumerate() {
                match d {
                    Decision::RejectPositive => prop_assert!(battery.statistics()[i] > 0.0),
                    Decision::RejectNegative => prop_assert!(battery.statistics()[i] < 0.0),
                    Decision::Accept => {}
                }
            }
            // Rejection sets coincide with the p-value threshold picture
            // for Bonferroni: exactly the p <= alpha/n set.
            if kind == ProcedureKind::BonferroniDir {
                let n = battery.len() as f64;
                let want: Vec<usize> = battery
                    .pvalues()
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p <= alpha / n)
                    .map(|(i, _)| i)
                    .collect();
                prop_assert_eq!(rejected_indices(&decisions), want);
            }
        }
    }
}
