//! The snapshot quality checkers: correctness, instantaneous and
//! quasi-instantaneous consistency, causal consistency, and the two
//! integrity notions, bundled into a [`Verdict`] whose internal implication
//! structure is asserted on every classification.

pub mod campaign;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::causality::{is_consistent_cut, CausalOrder};
use crate::model::{induced_cut, Computation, GroundTruth, RegionId, Snapshot, Time};
use crate::vclock::{clock_snapshot, global_time, rt_consistent, TimestampVector, VectorClock};

#[derive(Debug, Error)]
pub enum EvaluatorError {
    /// A verdict violated the implication structure the checkers guarantee
    /// for snapshots produced by the acquisition strategies. Signals a
    /// checker bug, or inputs from outside the acquisition model (a crafted
    /// snapshot, or a tau later than some copy time).
    #[error("internal implication violation: {0}")]
    ImplicationViolation(String),
}

/// Where to search for a quasi-instantaneous witness time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessWindow {
    /// The whole timeline, following the formal definition.
    #[default]
    FullTimeline,
    /// Only `[tau, last copy time]`, the acquisition window.
    Acquisition,
}

/// The six-way classification of one snapshot, judged against the reference
/// time `tau` for the integrity checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub correct: bool,
    pub instantaneous: bool,
    pub quasi_instantaneous: bool,
    /// Smallest time at which the snapshot values coexisted in memory, when
    /// one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Time>,
    pub causal: bool,
    pub restrictive_integrity: bool,
    pub permissive_integrity: bool,
    pub tau: Time,
}

/// True iff every copied value equals the region's true value at its copy
/// time.
pub fn check_correctness(s: &Snapshot, gt: &GroundTruth) -> bool {
    s.entries().iter().all(|e| e.v == gt.value_at(e.r, e.t))
}

/// True iff all regions were copied at the same instant.
pub fn check_instantaneous(s: &Snapshot) -> bool {
    let mut times = s.entries().iter().map(|e| e.t);
    match times.next() {
        Some(first) => times.all(|t| t == first),
        None => true,
    }
}

/// Searches for the smallest time at which an instantaneous snapshot would
/// have produced the same values, scanning time 0 and every change point
/// (the ground truth is piecewise constant, so that is exhaustive).
pub fn check_quasi_instantaneous(s: &Snapshot, gt: &GroundTruth) -> Option<Time> {
    witness_among(s, gt, candidate_times(gt, None))
}

/// Like [`check_quasi_instantaneous`], but only accepts witnesses inside
/// `[from, to]`.
pub fn check_quasi_instantaneous_within(
    s: &Snapshot,
    gt: &GroundTruth,
    from: Time,
    to: Time,
) -> Option<Time> {
    if from > to {
        return None;
    }
    witness_among(s, gt, candidate_times(gt, Some((from, to))))
}

fn candidate_times(gt: &GroundTruth, window: Option<(Time, Time)>) -> Vec<Time> {
    let mut times: Vec<Time> = match window {
        None => vec![Time(0)],
        Some((from, _)) => vec![from],
    };
    for r in 0..gt.region_count() {
        for &(t, _) in gt.change_points(RegionId(r as u32)) {
            match window {
                None => times.push(t),
                Some((from, to)) if t > from && t <= to => times.push(t),
                Some(_) => {}
            }
        }
    }
    times.sort();
    times.dedup();
    times
}

fn witness_among(s: &Snapshot, gt: &GroundTruth, candidates: Vec<Time>) -> Option<Time> {
    candidates
        .into_iter()
        .find(|&t| s.entries().iter().all(|e| gt.value_at(e.r, t) == e.v))
}

/// True iff the snapshot's induced cut is consistent.
pub fn check_causal(comp: &Computation, order: &CausalOrder, s: &Snapshot) -> bool {
    is_consistent_cut(comp, order, &induced_cut(comp, s))
}

/// True iff no region value changed between `tau` and that region's copy
/// time. Regions copied before `tau` satisfy the check vacuously.
pub fn check_restrictive_integrity(s: &Snapshot, gt: &GroundTruth, tau: Time) -> bool {
    s.entries().iter().all(|e| {
        if e.t < tau {
            return true;
        }
        if gt.value_at(e.r, tau) != e.v || gt.value_at(e.r, e.t) != e.v {
            return false;
        }
        gt.change_points(e.r)
            .iter()
            .filter(|&&(t, _)| tau <= t && t <= e.t)
            .all(|&(_, v)| v == e.v)
    })
}

/// True iff every region copied at or after `tau` holds the value the region
/// had at `tau`; intermediate changes that were reverted are allowed.
pub fn check_permissive_integrity(s: &Snapshot, gt: &GroundTruth, tau: Time) -> bool {
    s.entries()
        .iter()
        .all(|e| e.t < tau || e.v == gt.value_at(e.r, tau))
}

/// Runs the six checks without asserting anything about the result.
pub(crate) fn raw_verdict(
    comp: &Computation,
    gt: &GroundTruth,
    order: &CausalOrder,
    s: &Snapshot,
    tau: Time,
    window: WitnessWindow,
) -> Verdict {
    let witness = match window {
        WitnessWindow::FullTimeline => check_quasi_instantaneous(s, gt),
        WitnessWindow::Acquisition => {
            check_quasi_instantaneous_within(s, gt, tau, s.last_copy_time())
        }
    };
    Verdict {
        correct: check_correctness(s, gt),
        instantaneous: check_instantaneous(s),
        quasi_instantaneous: witness.is_some(),
        witness,
        causal: check_causal(comp, order, s),
        restrictive_integrity: check_restrictive_integrity(s, gt, tau),
        permissive_integrity: check_permissive_integrity(s, gt, tau),
        tau,
    }
}

/// Runs all six checks and asserts the verdict's implication structure.
pub fn classify(
    comp: &Computation,
    gt: &GroundTruth,
    order: &CausalOrder,
    s: &Snapshot,
    tau: Time,
    window: WitnessWindow,
) -> Result<Verdict, EvaluatorError> {
    let verdict = raw_verdict(comp, gt, order, s, tau, window);
    let violations: Vec<&str> = [
        (
            verdict.instantaneous && !verdict.quasi_instantaneous,
            "instantaneous but not quasi-instantaneous",
        ),
        (
            verdict.restrictive_integrity && !verdict.permissive_integrity,
            "restrictive integrity without permissive integrity",
        ),
        (
            verdict.permissive_integrity && !verdict.quasi_instantaneous,
            "permissive integrity but not quasi-instantaneous",
        ),
        (
            (verdict.restrictive_integrity || verdict.permissive_integrity) && !verdict.correct,
            "integrity without correctness",
        ),
    ]
    .into_iter()
    .filter_map(|(violated, msg)| violated.then_some(msg))
    .collect();
    if !violations.is_empty() {
        return Err(EvaluatorError::ImplicationViolation(violations.join("; ")));
    }
    Ok(verdict)
}

/// A verdict together with the clock evidence it was derived from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub verdict: Verdict,
    /// Per-region vector clocks as captured by the snapshot.
    pub region_clocks: Vec<VectorClock>,
    pub global_time: VectorClock,
    /// Each region's own counter, compared against the global time.
    pub diagonal: Vec<u64>,
    pub vc_consistent: bool,
    /// Per-region realtime stamps tracked at copy time.
    pub snapshot_stamps: TimestampVector,
    /// Per-region realtime stamps at the end of the acquisition.
    pub current_stamps: TimestampVector,
    pub rt_consistent: bool,
}

/// Classifies a snapshot and bundles the vector clock and realtime evidence
/// alongside the verdict.
pub fn evaluate_snapshot(
    comp: &Computation,
    gt: &GroundTruth,
    order: &CausalOrder,
    s: &Snapshot,
    tau: Time,
    window: WitnessWindow,
) -> Result<EvaluationReport, EvaluatorError> {
    let verdict = classify(comp, gt, order, s, tau, window)?;
    let region_clocks = clock_snapshot(comp, s);
    let global = global_time(&region_clocks).expect("one clock per region");
    let diagonal: Vec<u64> = region_clocks
        .iter()
        .enumerate()
        .map(|(i, c)| c.get(RegionId(i as u32)))
        .collect();
    let vc_ok = diagonal
        .iter()
        .zip(global.counters())
        .all(|(&d, &g)| d == g);
    let snapshot_stamps = TimestampVector::at_copy_times(comp, s);
    let current_stamps = TimestampVector::current_at(comp, s.last_copy_time());
    let rt_ok = rt_consistent(&current_stamps, &snapshot_stamps).expect("stamps cover all regions");
    Ok(EvaluationReport {
        verdict,
        region_clocks,
        global_time: global,
        diagonal,
        vc_consistent: vc_ok,
        snapshot_stamps,
        current_stamps,
        rt_consistent: rt_ok,
    })
}
