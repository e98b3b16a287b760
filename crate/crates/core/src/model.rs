//! Domain types for computations over memory regions: events, ground truth,
//! snapshots, and the primitive lookups everything else builds on.
//!
//! A computation is a finite set of events, each attributed to a process and
//! a memory region and stamped with a globally unique realtime tick. Replaying
//! the events yields the ground truth `m(r, t)`: the value each region held at
//! every point in time. A snapshot records, per region, a copied value and the
//! time it was copied.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a memory region, `0..region_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(pub u32);

/// Index of a process (or thread), `0..process_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcessId(pub u32);

/// Identifier of an event, unique within one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u32);

/// Opaque payload stored in a memory region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Value(pub u64);

/// A point in discrete time. The time domain is the naturals.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Time(pub u64);

impl RegionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ProcessId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl Time {
    pub fn tick(self) -> u64 {
        self.0
    }
}

/// How an event affects the value of its region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// An access that leaves the region value unchanged (a read).
    NonModifying,
    /// A write that changes the region value.
    Modifying,
    /// A write that stores a value never before held by the region.
    UniquelyModifying,
}

impl EventKind {
    pub fn is_write(self) -> bool {
        !matches!(self, EventKind::NonModifying)
    }
}

/// One operation by a process on a memory region.
///
/// `rt` is the realtime clock reading of the event; it is injective across
/// the whole computation, so events are totally orderable by time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub id: EventId,
    pub p: ProcessId,
    pub r: RegionId,
    pub rt: Time,
    pub kind: EventKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub written: Option<Value>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid computation: {0}")]
    InvalidComputation(String),
}

/// A finite computation: the event set with process/region attribution plus
/// the per-region initial values. The causal order is derived, not stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawComputation", into = "RawComputation")]
pub struct Computation {
    region_count: usize,
    process_count: usize,
    initial_values: Vec<Value>,
    events: Vec<Event>,
    /// Indices into `events`, grouped per region, ascending by rt.
    #[serde(skip)]
    region_events: Vec<Vec<usize>>,
    #[serde(skip)]
    process_events: Vec<Vec<usize>>,
}

/// Serde-facing shape of [`Computation`] without the derived indices.
#[derive(Serialize, Deserialize)]
struct RawComputation {
    region_count: usize,
    process_count: usize,
    initial_values: Vec<Value>,
    events: Vec<Event>,
}

impl TryFrom<RawComputation> for Computation {
    type Error = ModelError;

    fn try_from(raw: RawComputation) -> Result<Self, ModelError> {
        Computation::new(
            raw.region_count,
            raw.process_count,
            raw.initial_values,
            raw.events,
        )
    }
}

impl From<Computation> for RawComputation {
    fn from(comp: Computation) -> Self {
        RawComputation {
            region_count: comp.region_count,
            process_count: comp.process_count,
            initial_values: comp.initial_values,
            events: comp.events,
        }
    }
}

impl Computation {
    /// Builds a computation, checking the structural invariants: events sorted
    /// strictly ascending by rt, ids valid and unique, and the written value
    /// present exactly for write kinds. Value-level invariants (modifying
    /// events actually change the value, uniquely modifying values are fresh)
    /// are checked by [`replay`].
    pub fn new(
        region_count: usize,
        process_count: usize,
        initial_values: Vec<Value>,
        events: Vec<Event>,
    ) -> Result<Self, ModelError> {
        if region_count == 0 {
            return Err(ModelError::InvalidComputation(
                "at least one region required".into(),
            ));
        }
        if initial_values.len() != region_count {
            return Err(ModelError::InvalidComputation(format!(
                "{} initial values for {} regions",
                initial_values.len(),
                region_count
            )));
        }
        let mut seen_ids = HashSet::new();
        let mut last_rt: Option<Time> = None;
        for e in &events {
            if e.r.index() >= region_count {
                return Err(ModelError::InvalidComputation(format!(
                    "{} references region {} out of {region_count}",
                    e.id, e.r
                )));
            }
            if e.p.index() >= process_count {
                return Err(ModelError::InvalidComputation(format!(
                    "{} references process {} out of {process_count}",
                    e.id, e.p
                )));
            }
            if !seen_ids.insert(e.id) {
                return Err(ModelError::InvalidComputation(format!(
                    "duplicate event id {}",
                    e.id
                )));
            }
            if let Some(prev) = last_rt {
                if e.rt <= prev {
                    return Err(ModelError::InvalidComputation(format!(
                        "event timestamps must be strictly ascending ({} at tick {} after tick {})",
                        e.id,
                        e.rt.tick(),
                        prev.tick()
                    )));
                }
            }
            last_rt = Some(e.rt);
            match (e.kind, e.written) {
                (EventKind::NonModifying, Some(_)) => {
                    return Err(ModelError::InvalidComputation(format!(
                        "non-modifying {} carries a written value",
                        e.id
                    )));
                }
                (EventKind::Modifying | EventKind::UniquelyModifying, None) => {
                    return Err(ModelError::InvalidComputation(format!(
                        "{} of kind {:?} has no written value",
                        e.id, e.kind
                    )));
                }
                _ => {}
            }
        }
        let mut region_events = vec![Vec::new(); region_count];
        let mut process_events = vec![Vec::new(); process_count];
        for (idx, e) in events.iter().enumerate() {
            region_events[e.r.index()].push(idx);
            process_events[e.p.index()].push(idx);
        }
        Ok(Computation {
            region_count,
            process_count,
            initial_values,
            events,
            region_events,
            process_events,
        })
    }

    pub fn region_count(&self) -> usize {
        self.region_count
    }

    pub fn process_count(&self) -> usize {
        self.process_count
    }

    pub fn initial_values(&self) -> &[Value] {
        &self.initial_values
    }

    pub fn initial_value(&self, r: RegionId) -> Value {
        self.initial_values[r.index()]
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn regions(&self) -> impl DoubleEndedIterator<Item = RegionId> {
        (0..self.region_count as u32).map(RegionId)
    }

    /// Events on one region, ascending by rt.
    pub fn events_on_region(&self, r: RegionId) -> impl Iterator<Item = &Event> {
        self.region_events[r.index()]
            .iter()
            .map(|&i| &self.events[i])
    }

    /// Events of one process, ascending by rt.
    pub fn events_of_process(&self, p: ProcessId) -> impl Iterator<Item = &Event> {
        self.process_events[p.index()]
            .iter()
            .map(|&i| &self.events[i])
    }

    pub fn event(&self, id: EventId) -> Option<&Event> {
        self.events.iter().find(|e| e.id == id)
    }

    /// The realtime of the last event, or 0 for an empty computation.
    pub fn horizon(&self) -> Time {
        self.events.last().map(|e| e.rt).unwrap_or(Time(0))
    }

    /// The most recent event on `r` at a time before or equal to `t`.
    pub fn most_recent_event(&self, r: RegionId, t: Time) -> Option<&Event> {
        let idxs = &self.region_events[r.index()];
        let pos = idxs.partition_point(|&i| self.events[i].rt <= t);
        if pos == 0 {
            None
        } else {
            Some(&self.events[idxs[pos - 1]])
        }
    }
}

/// The recorded contents of memory over time: per region, the ascending list
/// of `(time, value)` change points, starting at `(0, initial value)`.
///
/// `m(r, t)` is piecewise constant, so change points fully describe it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    changes: Vec<Vec<(Time, Value)>>,
}

impl GroundTruth {
    pub fn region_count(&self) -> usize {
        self.changes.len()
    }

    pub fn change_points(&self, r: RegionId) -> &[(Time, Value)] {
        &self.changes[r.index()]
    }

    /// The value of region `r` at time `t`. An event at exactly tick `t` has
    /// already applied; times past the last change point return the last value.
    pub fn value_at(&self, r: RegionId, t: Time) -> Value {
        let points = &self.changes[r.index()];
        let pos = points.partition_point(|&(ct, _)| ct <= t);
        // pos >= 1 because every region starts with a change point at time 0.
        points[pos - 1].1
    }

    /// The largest change-point time across all regions.
    pub fn max_change_time(&self) -> Time {
        self.changes
            .iter()
            .filter_map(|pts| pts.last())
            .map(|&(t, _)| t)
            .max()
            .unwrap_or(Time(0))
    }
}

/// Materializes the ground truth `m` by replaying the event list.
///
/// Fails with [`ModelError::InvalidComputation`] if a modifying event writes
/// the value the region already holds, or a uniquely modifying event repeats
/// a value previously stored in its region.
pub fn replay(comp: &Computation) -> Result<GroundTruth, ModelError> {
    let mut changes: Vec<Vec<(Time, Value)>> = comp
        .initial_values()
        .iter()
        .map(|&v| vec![(Time(0), v)])
        .collect();
    let mut current: Vec<Value> = comp.initial_values().to_vec();
    let mut seen: Vec<HashSet<Value>> = comp
        .initial_values()
        .iter()
        .map(|&v| HashSet::from([v]))
        .collect();
    for e in comp.events() {
        let r = e.r.index();
        match e.kind {
            EventKind::NonModifying => continue,
            EventKind::Modifying => {
                let written = e.written.expect("validated at construction");
                if written == current[r] {
                    return Err(ModelError::InvalidComputation(format!(
                        "modifying {} writes the value {} already holds ({})",
                        e.id, e.r, written.0
                    )));
                }
                apply(&mut changes[r], e.rt, written);
                current[r] = written;
                seen[r].insert(written);
            }
            EventKind::UniquelyModifying => {
                let written = e.written.expect("validated at construction");
                if !seen[r].insert(written) {
                    return Err(ModelError::InvalidComputation(format!(
                        "uniquely modifying {} repeats value {} on {}",
                        e.id, written.0, e.r
                    )));
                }
                apply(&mut changes[r], e.rt, written);
                current[r] = written;
            }
        }
    }
    Ok(GroundTruth { changes })
}

/// Pushes a change point, overwriting the initial value if a write lands at
/// tick 0 (the post-event convention makes the pre-write value unobservable).
fn apply(points: &mut Vec<(Time, Value)>, t: Time, v: Value) {
    if points.last().map(|&(ct, _)| ct) == Some(t) {
        points.last_mut().expect("nonempty").1 = v;
    } else {
        points.push((t, v));
    }
}

/// A snapshot: per region, the copied value and the time it was copied.
/// Entries cover every region of the computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Snapshot {
    entries: Vec<SnapshotEntry>,
}

/// One region's slot in a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub r: RegionId,
    pub v: Value,
    pub t: Time,
}

impl Snapshot {
    /// Builds a snapshot from per-region `(value, copy time)` pairs, region
    /// index implied by position.
    pub fn new(pairs: Vec<(Value, Time)>) -> Snapshot {
        let entries = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (v, t))| SnapshotEntry {
                r: RegionId(i as u32),
                v,
                t,
            })
            .collect();
        Snapshot { entries }
    }

    pub fn from_entries(entries: Vec<SnapshotEntry>) -> Result<Snapshot, ModelError> {
        for (i, e) in entries.iter().enumerate() {
            if e.r.index() != i {
                return Err(ModelError::InvalidComputation(format!(
                    "snapshot entry {i} labeled {}; regions must appear once each, in order",
                    e.r
                )));
            }
        }
        Ok(Snapshot { entries })
    }

    pub fn region_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[SnapshotEntry] {
        &self.entries
    }

    /// `s(r).v`
    pub fn value(&self, r: RegionId) -> Value {
        self.entries[r.index()].v
    }

    /// `s(r).t`
    pub fn time(&self, r: RegionId) -> Time {
        self.entries[r.index()].t
    }

    /// The latest per-region copy time: the end of the acquisition.
    pub fn last_copy_time(&self) -> Time {
        self.entries.iter().map(|e| e.t).max().unwrap_or(Time(0))
    }
}

/// A cut: a subset of the computation's events, kept sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cut(BTreeSet<EventId>);

impl Cut {
    pub fn empty() -> Cut {
        Cut(BTreeSet::new())
    }

    pub fn contains(&self, id: EventId) -> bool {
        self.0.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EventId> + '_ {
        self.0.iter().copied()
    }

    pub fn insert(&mut self, id: EventId) {
        self.0.insert(id);
    }
}

impl FromIterator<EventId> for Cut {
    fn from_iter<I: IntoIterator<Item = EventId>>(iter: I) -> Cut {
        Cut(iter.into_iter().collect())
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// The cut a snapshot corresponds to: per region, every event with
/// `rt <= s(r).t`.
pub fn induced_cut(comp: &Computation, s: &Snapshot) -> Cut {
    let mut cut = Cut::empty();
    for r in comp.regions() {
        let limit = s.time(r);
        for e in comp.events_on_region(r) {
            if e.rt <= limit {
                cut.insert(e.id);
            } else {
                break;
            }
        }
    }
    cut
}

/// Convenience map from event id to its index in rt order.
pub(crate) fn event_index(comp: &Computation) -> HashMap<EventId, usize> {
    comp.events()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id, i))
        .collect()
}
