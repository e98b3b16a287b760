//! Snapshot acquisition strategies over a recorded ground truth: a frozen
//! (instantaneous) copy, a sequential scan, a copy-on-write acquisition, and
//! a priority-ordered scan.
//!
//! The acquirer is an outside observer: taking a snapshot never adds events
//! to the computation. Copies at tick `t` read `m(r, t)`, i.e. the value
//! after any event at exactly `t` has applied.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Computation, GroundTruth, RegionId, Snapshot, Time};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AcquisitionError {
    #[error("invalid acquisition plan: {0}")]
    InvalidPlan(String),
}

/// A fully specified acquisition run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum AcquisitionPlan {
    /// Copy every region at the same instant.
    Frozen { at: Time },
    /// Copy regions one after another in the given order, one region every
    /// `delay` ticks starting at `start + delay`.
    Sequential {
        start: Time,
        order: Vec<RegionId>,
        delay: u64,
    },
    /// Background scan in the given order, with writes to not-yet-copied
    /// regions intercepted so every region keeps its value from `start`.
    CopyOnWrite {
        start: Time,
        background_order: Vec<RegionId>,
        delay: u64,
    },
    /// Sequential scan that visits the priority regions first, then the
    /// remaining regions in index order.
    PriorityScan {
        start: Time,
        priority_regions: Vec<RegionId>,
        delay: u64,
    },
}

impl AcquisitionPlan {
    /// The acquisition start: the reference time integrity is judged
    /// against by default.
    pub fn start(&self) -> Time {
        match self {
            AcquisitionPlan::Frozen { at } => *at,
            AcquisitionPlan::Sequential { start, .. }
            | AcquisitionPlan::CopyOnWrite { start, .. }
            | AcquisitionPlan::PriorityScan { start, .. } => *start,
        }
    }

    fn validate(&self, region_count: usize) -> Result<(), AcquisitionError> {
        match self {
            AcquisitionPlan::Frozen { .. } => Ok(()),
            AcquisitionPlan::Sequential { order, delay, .. }
            | AcquisitionPlan::CopyOnWrite {
                background_order: order,
                delay,
                ..
            } => {
                check_delay(*delay)?;
                check_permutation(order, region_count)
            }
            AcquisitionPlan::PriorityScan {
                priority_regions,
                delay,
                ..
            } => {
                check_delay(*delay)?;
                check_distinct(priority_regions, region_count)
            }
        }
    }
}

fn check_delay(delay: u64) -> Result<(), AcquisitionError> {
    if delay == 0 {
        return Err(AcquisitionError::InvalidPlan(
            "per-region delay must be at least 1 tick".into(),
        ));
    }
    Ok(())
}

fn check_distinct(regions: &[RegionId], region_count: usize) -> Result<(), AcquisitionError> {
    let mut seen = vec![false; region_count];
    for &r in regions {
        if r.index() >= region_count {
            return Err(AcquisitionError::InvalidPlan(format!(
                "{r} is not a region of this computation"
            )));
        }
        if seen[r.index()] {
            return Err(AcquisitionError::InvalidPlan(format!("{r} listed twice")));
        }
        seen[r.index()] = true;
    }
    Ok(())
}

fn check_permutation(order: &[RegionId], region_count: usize) -> Result<(), AcquisitionError> {
    check_distinct(order, region_count)?;
    if order.len() != region_count {
        return Err(AcquisitionError::InvalidPlan(format!(
            "order lists {} regions, computation has {}",
            order.len(),
            region_count
        )));
    }
    Ok(())
}

/// Validates the plan and runs the matching strategy.
pub fn acquire(
    comp: &Computation,
    gt: &GroundTruth,
    plan: &AcquisitionPlan,
) -> Result<Snapshot, AcquisitionError> {
    plan.validate(comp.region_count())?;
    Ok(match plan {
        AcquisitionPlan::Frozen { at } => acquire_frozen(gt, *at),
        AcquisitionPlan::Sequential {
            start,
            order,
            delay,
        } => acquire_sequential(gt, *start, order, *delay),
        AcquisitionPlan::CopyOnWrite {
            start,
            background_order,
            delay,
        } => acquire_cow(comp, gt, *start, background_order, *delay),
        AcquisitionPlan::PriorityScan {
            start,
            priority_regions,
            delay,
        } => acquire_priority(gt, *start, priority_regions, *delay),
    })
}

/// Copies all regions at time `t`, as if the system were paused.
pub fn acquire_frozen(gt: &GroundTruth, t: Time) -> Snapshot {
    Snapshot::new(
        (0..gt.region_count())
            .map(|i| (gt.value_at(RegionId(i as u32), t), t))
            .collect(),
    )
}

/// Copies the regions one by one: the i-th region of `order` is read at
/// `start + (i+1) * delay`.
pub fn acquire_sequential(
    gt: &GroundTruth,
    start: Time,
    order: &[RegionId],
    delay: u64,
) -> Snapshot {
    debug_assert_eq!(order.len(), gt.region_count());
    let mut pairs = vec![None; gt.region_count()];
    for (i, &r) in order.iter().enumerate() {
        let t = Time(start.tick() + (i as u64 + 1) * delay);
        pairs[r.index()] = Some((gt.value_at(r, t), t));
    }
    Snapshot::new(
        pairs
            .into_iter()
            .map(|p| p.expect("order is a permutation"))
            .collect(),
    )
}

/// Copy-on-write acquisition starting at `start`: a background scan copies
/// regions on the schedule of [`acquire_sequential`], but the first write to
/// a not-yet-copied region is intercepted and the region copied before the
/// write lands. Every region therefore holds its value from `start`.
///
/// An intercepted region records the tick just before the intercepting write
/// applies as its copy time; a write landing exactly on the background slot
/// still intercepts, since the copy must come first.
pub fn acquire_cow(
    comp: &Computation,
    gt: &GroundTruth,
    start: Time,
    background_order: &[RegionId],
    delay: u64,
) -> Snapshot {
    debug_assert_eq!(background_order.len(), gt.region_count());
    let mut pairs = vec![None; gt.region_count()];
    for (i, &r) in background_order.iter().enumerate() {
        let slot = Time(start.tick() + (i as u64 + 1) * delay);
        let value = gt.value_at(r, start);
        let intercept = comp
            .events_on_region(r)
            .find(|e| e.kind.is_write() && e.rt > start && e.rt <= slot)
            .map(|e| Time(e.rt.tick() - 1));
        pairs[r.index()] = Some((value, intercept.unwrap_or(slot)));
    }
    Snapshot::new(
        pairs
            .into_iter()
            .map(|p| p.expect("order is a permutation"))
            .collect(),
    )
}

/// Sequential scan visiting `priority_regions` first and the remaining
/// regions in index order.
pub fn acquire_priority(
    gt: &GroundTruth,
    start: Time,
    priority_regions: &[RegionId],
    delay: u64,
) -> Snapshot {
    let mut order: Vec<RegionId> = priority_regions.to_vec();
    for i in 0..gt.region_count() {
        let r = RegionId(i as u32);
        if !priority_regions.contains(&r) {
            order.push(r);
        }
    }
    acquire_sequential(gt, start, &order, delay)
}
