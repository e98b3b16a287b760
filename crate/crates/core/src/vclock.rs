//! Vector clocks attached to memory regions, the snapshot consistency check
//! built on them, and the cheaper realtime-timestamp variant.
//!
//! Every region carries a clock of one counter per region; its own counter
//! sits at its region index. A process remembers the clock it saw at its
//! last access. On every access (reads included) the region clock and the
//! process's remembered clock are merged componentwise and the region's own
//! counter is incremented.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Computation, RegionId, Snapshot, Time};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClockError {
    #[error("vector clock length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no clocks given")]
    Empty,
}

/// A vector of counters, one per memory region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorClock {
    counters: Vec<u64>,
}

impl VectorClock {
    pub fn zero(region_count: usize) -> VectorClock {
        VectorClock {
            counters: vec![0; region_count],
        }
    }

    pub fn from_counters(counters: Vec<u64>) -> VectorClock {
        VectorClock { counters }
    }

    pub fn len(&self) -> usize {
        self.counters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counters.is_empty()
    }

    pub fn counters(&self) -> &[u64] {
        &self.counters
    }

    pub fn get(&self, r: RegionId) -> u64 {
        self.counters[r.index()]
    }
}

fn check_len(a: &VectorClock, b: &VectorClock) -> Result<(), ClockError> {
    if a.len() != b.len() {
        return Err(ClockError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// The clock a region holds after an access: componentwise maximum of the
/// region's clock and the accessing process's last-seen clock, then the
/// counter at the region's own index incremented by one.
pub fn vc_update(
    region_clock: &VectorClock,
    process_last_seen: &VectorClock,
    owner: RegionId,
) -> Result<VectorClock, ClockError> {
    check_len(region_clock, process_last_seen)?;
    let mut counters: Vec<u64> = region_clock
        .counters
        .iter()
        .zip(&process_last_seen.counters)
        .map(|(&a, &b)| a.max(b))
        .collect();
    counters[owner.index()] += 1;
    Ok(VectorClock { counters })
}

/// The strict happened-before order on clocks: every component less or
/// equal, at least one strictly less.
pub fn vc_less(a: &VectorClock, b: &VectorClock) -> Result<bool, ClockError> {
    check_len(a, b)?;
    let mut some_less = false;
    for (&x, &y) in a.counters.iter().zip(&b.counters) {
        if x > y {
            return Ok(false);
        }
        if x < y {
            some_less = true;
        }
    }
    Ok(some_less)
}

/// The componentwise supremum over one clock per region.
pub fn global_time(clocks: &[VectorClock]) -> Result<VectorClock, ClockError> {
    let first = clocks.first().ok_or(ClockError::Empty)?;
    let mut sup = first.clone();
    for c in &clocks[1..] {
        check_len(first, c)?;
        for (s, &x) in sup.counters.iter_mut().zip(&c.counters) {
            *s = (*s).max(x);
        }
    }
    Ok(sup)
}

/// The vector clock consistency check: the snapshot is consistent iff the
/// global time equals the diagonal, i.e. for every region its own counter
/// already accounts for every access any other region's clock knows about.
pub fn vc_consistent(clocks: &[VectorClock]) -> Result<bool, ClockError> {
    let sup = global_time(clocks)?;
    if sup.len() != clocks.len() {
        return Err(ClockError::LengthMismatch {
            left: sup.len(),
            right: clocks.len(),
        });
    }
    Ok(clocks
        .iter()
        .enumerate()
        .all(|(i, c)| c.counters[i] == sup.counters[i]))
}

/// Region clocks replayed over a whole computation: the clock value after
/// each event, plus the final per-region clocks.
#[derive(Debug, Clone)]
pub struct ClockedTrace {
    /// Clock after each event, indexed by event position in rt order.
    event_clocks: Vec<VectorClock>,
    region_clocks: Vec<VectorClock>,
}

impl ClockedTrace {
    /// Deterministic replay of the update rule over the event list. A
    /// process's first access merges with the zero vector.
    pub fn build(comp: &Computation) -> ClockedTrace {
        let n = comp.region_count();
        let mut region_clocks = vec![VectorClock::zero(n); n];
        let mut process_last = vec![VectorClock::zero(n); comp.process_count()];
        let mut event_clocks = Vec::with_capacity(comp.events().len());
        for e in comp.events() {
            let updated = vc_update(&region_clocks[e.r.index()], &process_last[e.p.index()], e.r)
                .expect("replayed clocks share one length");
            region_clocks[e.r.index()] = updated.clone();
            process_last[e.p.index()] = updated.clone();
            event_clocks.push(updated);
        }
        ClockedTrace {
            event_clocks,
            region_clocks,
        }
    }

    /// The clock of the event at position `idx` in rt order.
    pub fn clock_after_index(&self, idx: usize) -> &VectorClock {
        &self.event_clocks[idx]
    }

    pub fn event_clocks(&self) -> &[VectorClock] {
        &self.event_clocks
    }

    /// Final clock of each region after the full computation.
    pub fn final_region_clocks(&self) -> &[VectorClock] {
        &self.region_clocks
    }
}

/// The per-region clocks a snapshot captured: for each region, the clock
/// value after the most recent event at the region's copy time, or the zero
/// clock if nothing had happened on it yet.
pub fn clock_snapshot(comp: &Computation, s: &Snapshot) -> Vec<VectorClock> {
    let trace = ClockedTrace::build(comp);
    let index = crate::model::event_index(comp);
    comp.regions()
        .map(|r| match comp.most_recent_event(r, s.time(r)) {
            Some(e) => trace.event_clocks[index[&e.id]].clone(),
            None => VectorClock::zero(comp.region_count()),
        })
        .collect()
}

/// Per-region realtime stamps of the most recent event; `None` where no
/// event has happened yet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimestampVector(Vec<Option<Time>>);

impl TimestampVector {
    /// The current time at instant `t`: per region, the rt of the most
    /// recent event at or before `t`.
    pub fn current_at(comp: &Computation, t: Time) -> TimestampVector {
        TimestampVector(
            comp.regions()
                .map(|r| comp.most_recent_event(r, t).map(|e| e.rt))
                .collect(),
        )
    }

    /// The stamps an acquirer tracked: per region, the rt of the most recent
    /// event at that region's copy time.
    pub fn at_copy_times(comp: &Computation, s: &Snapshot) -> TimestampVector {
        TimestampVector(
            comp.regions()
                .map(|r| comp.most_recent_event(r, s.time(r)).map(|e| e.rt))
                .collect(),
        )
    }

    pub fn stamps(&self) -> &[Option<Time>] {
        &self.0
    }
}

/// The realtime consistency check: the current time at evaluation equals the
/// per-region stamps tracked at copy time. A sufficient condition for
/// quasi-instantaneous consistency, not a necessary one.
pub fn rt_consistent(
    current: &TimestampVector,
    snapshot_ts: &TimestampVector,
) -> Result<bool, ClockError> {
    if current.0.len() != snapshot_ts.0.len() {
        return Err(ClockError::LengthMismatch {
            left: current.0.len(),
            right: snapshot_ts.0.len(),
        });
    }
    Ok(current.0 == snapshot_ts.0)
}
