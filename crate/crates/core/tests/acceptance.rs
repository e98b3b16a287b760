//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p snaplab-core --test acceptance -- --nocapture`
//! to see the per-criterion lines.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::quasi_witness_tick_scan;
use snaplab_core::acquisition::{acquire_cow, acquire_frozen, acquire_sequential};
use snaplab_core::causality::{
    build_causal_order, enumerate_consistent_cuts, happened_before, is_consistent_cut,
};
use snaplab_core::evaluator::campaign::{
    case_seed, verify_implications, CampaignConfig, CampaignReport, CaseShape, StrategyKind,
    QUASI_IMPLIES_CAUSAL_UNIQUELY_MODIFYING, RESTRICTIVE_IMPLIES_CAUSAL_NO_READS,
    RT_CONSISTENT_IMPLIES_QUASI, WITNESS_CAUSAL_NOT_QUASI, WITNESS_QUASI_NOT_CAUSAL,
    WITNESS_QUASI_NOT_PERMISSIVE,
};
use snaplab_core::evaluator::{
    check_permissive_integrity, check_quasi_instantaneous, classify, WitnessWindow,
};
use snaplab_core::fixtures;
use snaplab_core::model::{induced_cut, replay, Cut, EventId, RegionId, Snapshot, Time};
use snaplab_core::vclock::{clock_snapshot, vc_consistent, vc_less, ClockedTrace};
use snaplab_core::workload::{generate, KindRegime, WorkloadConfig, WorkloadShape};

/// The full default campaign, shared by the criteria that inspect it.
fn default_report() -> &'static CampaignReport {
    static REPORT: OnceLock<CampaignReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        verify_implications(&CampaignConfig::default()).expect("campaign must be clean")
    })
}

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion}: PASS — {detail}");
}

/// Small spread of workload configs used by the per-strategy criteria.
fn varied_config(seed: u64) -> WorkloadConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed(0xACCE97, seed));
    let shape_is_list = rng.gen_bool(0.3);
    let region_count = if shape_is_list {
        rng.gen_range(2..=6)
    } else {
        rng.gen_range(1..=5)
    };
    WorkloadConfig {
        region_count,
        process_count: rng.gen_range(1..=3),
        event_count: rng.gen_range(0..=40),
        kind_regime: match rng.gen_range(0..3u8) {
            0 => KindRegime::AllUniquelyModifying,
            1 => KindRegime::AllModifying,
            _ => KindRegime::MixedWithReads { read_fraction: 0.3 },
        },
        seed: rng.gen(),
        workload: if shape_is_list {
            WorkloadShape::LinkedList {
                node_count: region_count,
            }
        } else {
            WorkloadShape::Random
        },
    }
}

#[test]
fn criterion_1_implication_campaign_has_zero_violations() {
    let started = Instant::now();
    let report = default_report();
    assert_eq!(report.cases, 10_000);
    for imp in &report.implications {
        assert_eq!(imp.violations, 0, "{} violated", imp.name);
        assert!(imp.antecedent_cases > 0, "{} was never exercised", imp.name);
    }
    // The gray and white arrows must have been checked under their regimes.
    for name in [
        RESTRICTIVE_IMPLIES_CAUSAL_NO_READS,
        QUASI_IMPLIES_CAUSAL_UNIQUELY_MODIFYING,
    ] {
        assert!(report.implication(name).unwrap().antecedent_cases > 100);
    }
    pass(
        1,
        &format!(
            "10000 cases across all strategies and regimes, 0 violations of {} implications ({:?})",
            report.implications.len(),
            started.elapsed()
        ),
    );
}

#[test]
fn criterion_2_non_implication_witnesses_exist() {
    let report = default_report();
    for name in [
        WITNESS_CAUSAL_NOT_QUASI,
        WITNESS_QUASI_NOT_PERMISSIVE,
        WITNESS_QUASI_NOT_CAUSAL,
    ] {
        let w = report
            .witness(name)
            .unwrap_or_else(|| panic!("no witness for {name}"));
        let v = &w.verdict;
        match name {
            WITNESS_CAUSAL_NOT_QUASI => assert!(v.causal && !v.quasi_instantaneous),
            WITNESS_QUASI_NOT_PERMISSIVE => {
                assert!(v.quasi_instantaneous && !v.permissive_integrity)
            }
            WITNESS_QUASI_NOT_CAUSAL => assert!(v.quasi_instantaneous && !v.causal),
            _ => unreachable!(),
        }
    }
    pass(2, "witnesses found for all three non-implications");
}

#[test]
fn criterion_3_cow_guarantee_over_1000_cases() {
    let mut checked = 0;
    for seed in 0..1000u64 {
        let config = varied_config(seed);
        let comp = generate(&config).unwrap();
        let gt = replay(&comp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_7A11);
        let tau = Time(rng.gen_range(0..=comp.horizon().tick() + 2));
        let delay = rng.gen_range(1..=3);
        let mut order: Vec<RegionId> = comp.regions().collect();
        order.shuffle(&mut rng);

        let s = acquire_cow(&comp, &gt, tau, &order, delay);
        assert!(
            check_quasi_instantaneous(&s, &gt).is_some(),
            "seed {seed}: cow snapshot not quasi-instantaneous"
        );
        assert!(
            check_permissive_integrity(&s, &gt, tau),
            "seed {seed}: cow snapshot violates permissive integrity"
        );
        let frozen = acquire_frozen(&gt, tau);
        for r in comp.regions() {
            assert_eq!(
                s.value(r),
                frozen.value(r),
                "seed {seed}: cow value for {r} differs from the frozen value at tau"
            );
        }
        checked += 1;
    }
    pass(
        3,
        &format!("{checked} copy-on-write snapshots quasi-instantaneous, permissive, value-equal to frozen"),
    );
}

#[test]
fn criterion_4_frozen_guarantee() {
    let mut checked = 0;
    for seed in 0..300u64 {
        let config = varied_config(seed.wrapping_add(77_000));
        let comp = generate(&config).unwrap();
        let gt = replay(&comp).unwrap();
        let order = build_causal_order(&comp);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF0_7E11);
        let t = Time(rng.gen_range(0..=comp.horizon().tick() + 2));
        let s = acquire_frozen(&gt, t);
        let v = classify(&comp, &gt, &order, &s, t, WitnessWindow::FullTimeline).unwrap();
        assert!(
            v.correct
                && v.instantaneous
                && v.quasi_instantaneous
                && v.causal
                && v.restrictive_integrity
                && v.permissive_integrity,
            "seed {seed}: frozen snapshot failed a check: {v:?}"
        );
        checked += 1;
    }
    pass(
        4,
        &format!("{checked} frozen snapshots pass all six checks"),
    );
}

#[test]
fn criterion_5_oracle_agreement_on_small_computations() {
    let mut pair_checks = 0u64;
    let mut snapshot_checks = 0u64;
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case_seed(0x05AC1E, seed));
        let config = WorkloadConfig {
            region_count: rng.gen_range(1..=4),
            process_count: rng.gen_range(1..=3),
            event_count: rng.gen_range(0..=12),
            kind_regime: match rng.gen_range(0..3u8) {
                0 => KindRegime::AllUniquelyModifying,
                1 => KindRegime::AllModifying,
                _ => KindRegime::MixedWithReads { read_fraction: 0.4 },
            },
            seed: rng.gen(),
            workload: WorkloadShape::Random,
        };
        let comp = generate(&config).unwrap();
        let gt = replay(&comp).unwrap();
        let order = build_causal_order(&comp);

        // (a) clock comparison vs the materialized transitive closure.
        let trace = ClockedTrace::build(&comp);
        let clocks = trace.event_clocks();
        for (i, e) in comp.events().iter().enumerate() {
            for (j, f) in comp.events().iter().enumerate() {
                if i == j {
                    continue;
                }
                assert_eq!(
                    vc_less(&clocks[i], &clocks[j]).unwrap(),
                    happened_before(&order, e.id, f.id),
                    "seed {seed}: clock order disagrees on ({}, {})",
                    e.id,
                    f.id
                );
                pair_checks += 1;
            }
        }

        // A small plan grid per computation.
        let h = comp.horizon().tick();
        let index_order: Vec<RegionId> = comp.regions().collect();
        let reversed: Vec<RegionId> = comp.regions().rev().collect();
        let mut snapshots = vec![
            acquire_frozen(&gt, Time(0)),
            acquire_frozen(&gt, Time(h / 2)),
            acquire_frozen(&gt, Time(h)),
            acquire_sequential(&gt, Time(0), &index_order, 1),
            acquire_sequential(&gt, Time(h / 2), &reversed, 2),
            acquire_cow(&comp, &gt, Time(0), &index_order, 1),
            acquire_cow(&comp, &gt, Time(h / 2), &reversed, 2),
        ];
        // Value-perturbed variants exercise the "no witness" side of (c).
        let busted = Snapshot::new(
            snapshots[3]
                .entries()
                .iter()
                .map(|e| (snaplab_core::model::Value(e.v.0 + 1), e.t))
                .collect(),
        );
        snapshots.push(busted);

        for s in &snapshots {
            // (b) clock consistency vs cut consistency.
            assert_eq!(
                vc_consistent(&clock_snapshot(&comp, s)).unwrap(),
                is_consistent_cut(&comp, &order, &induced_cut(&comp, s)),
                "seed {seed}: vc consistency disagrees with cut consistency"
            );
            // (c) witness search vs the every-tick oracle.
            assert_eq!(
                check_quasi_instantaneous(s, &gt),
                quasi_witness_tick_scan(s, &gt),
                "seed {seed}: quasi witness disagrees with the tick scan"
            );
            snapshot_checks += 1;
        }
    }
    pass(
        5,
        &format!(
            "500 computations: {pair_checks} clock/causality pairs and {snapshot_checks} snapshots agree with the oracles"
        ),
    );
}

#[test]
fn criterion_6_lattice_fixture() {
    let comp = fixtures::canonical();
    let cuts = enumerate_consistent_cuts(&comp).unwrap();
    let expected: Vec<Cut> = vec![
        Cut::empty(),
        [EventId(1)].into_iter().collect(),
        [EventId(2)].into_iter().collect(),
        [EventId(1), EventId(2)].into_iter().collect(),
        [EventId(1), EventId(2), EventId(3)].into_iter().collect(),
    ];
    assert_eq!(cuts, expected);

    let order = build_causal_order(&comp);
    let skipped: Cut = [EventId(2), EventId(3)].into_iter().collect();
    assert!(!is_consistent_cut(&comp, &order, &skipped));
    pass(
        6,
        "canonical lattice has exactly the 5 consistent cuts; {e2,e3} is inconsistent",
    );
}

fn sequential_violation_config() -> CampaignConfig {
    CampaignConfig {
        cases: 100,
        seed: 20,
        regimes: vec![KindRegime::AllUniquelyModifying],
        strategies: vec![StrategyKind::Sequential],
        shapes: vec![CaseShape::Random],
        min_events: 10,
        max_events: 40,
        min_delay: 1,
        max_delay: 1,
        synthesize_fixture_witnesses: false,
        ..CampaignConfig::default()
    }
}

#[test]
fn criterion_7_sequential_scans_do_violate() {
    let config = sequential_violation_config();
    let first = verify_implications(&config).unwrap();
    let quasi = first.rate("quasi_instantaneous").unwrap();
    let causal = first.rate("causal").unwrap();
    assert!(
        quasi.violations >= 1,
        "expected at least one non-quasi-instantaneous verdict"
    );
    assert!(
        causal.violations >= 1,
        "expected at least one non-causal verdict"
    );

    let second = verify_implications(&config).unwrap();
    assert_eq!(
        serde_json::to_string(&first).unwrap(),
        serde_json::to_string(&second).unwrap(),
        "violation rates must be reproducible bit for bit"
    );
    pass(
        7,
        &format!(
            "100-seed sequential campaign: {}/{} non-quasi, {}/{} non-causal, report bit-identical on rerun",
            quasi.violations, quasi.cases, causal.violations, causal.cases
        ),
    );
}

#[test]
fn criterion_8_rt_consistency_is_sufficient_but_not_necessary() {
    let report = default_report();
    let stats = &report.rt_stats;
    assert!(stats.consistent_cases > 0, "no rt-consistent cases at all");
    assert_eq!(
        stats.consistent_and_quasi, stats.consistent_cases,
        "an rt-consistent case was not quasi-instantaneous"
    );
    let imp = report.implication(RT_CONSISTENT_IMPLIES_QUASI).unwrap();
    assert_eq!(imp.violations, 0);

    let witness = stats
        .non_necessity_witness
        .as_ref()
        .expect("no rt-inconsistent yet quasi-instantaneous case found");
    assert!(!witness.rt_consistent && witness.verdict.quasi_instantaneous);
    assert!(
        witness.case_index.is_some(),
        "non-necessity witness should come from the campaign itself"
    );
    pass(
        8,
        &format!(
            "{}/{} rt-consistent cases quasi-instantaneous; non-necessity witness at case {:?}",
            stats.consistent_and_quasi, stats.consistent_cases, witness.case_index
        ),
    );
}
