//! Small hand-built computations and snapshots that exhibit the boundary
//! cases between the consistency and integrity criteria. Used as golden
//! inputs by tests and as synthesized witnesses by the verification campaign.

use crate::model::{
    Computation, Event, EventId, EventKind, ProcessId, RegionId, Snapshot, Time, Value,
};

/// A named computation/snapshot pair together with the integrity reference
/// time `tau` it should be judged against.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub computation: Computation,
    pub snapshot: Snapshot,
    pub tau: Time,
}

fn ev(id: u32, p: u32, r: u32, rt: u64, kind: EventKind, written: Option<u64>) -> Event {
    Event {
        id: EventId(id),
        p: ProcessId(p),
        r: RegionId(r),
        rt: Time(rt),
        kind,
        written: written.map(Value),
    }
}

/// The running example used throughout the test suite: two regions, two
/// processes, three uniquely modifying writes.
///
/// Process p0 writes 1 to r0 at tick 1 (e1) and 2 to r1 at tick 3 (e3);
/// process p1 writes 1 to r1 at tick 2 (e2). All initial values are 0.
/// e1 happens before e3 (process order), e2 happens before e3 (region
/// order), and e1 and e2 are concurrent.
pub fn canonical() -> Computation {
    Computation::new(
        2,
        2,
        vec![Value(0), Value(0)],
        vec![
            ev(1, 0, 0, 1, EventKind::UniquelyModifying, Some(1)),
            ev(2, 1, 1, 2, EventKind::UniquelyModifying, Some(1)),
            ev(3, 0, 1, 3, EventKind::UniquelyModifying, Some(2)),
        ],
    )
    .expect("canonical computation is valid")
}

/// A snapshot of the canonical computation that contains the effect e3 but
/// not its cause e1: r0 copied before anything happened, r1 copied last.
/// Causally inconsistent.
pub fn causally_inconsistent() -> Fixture {
    Fixture {
        name: "causally_inconsistent",
        computation: canonical(),
        snapshot: Snapshot::new(vec![(Value(0), Time(0)), (Value(2), Time(3))]),
        tau: Time(0),
    }
}

/// Two concurrent modifying writes split by the scan: r0 copied before its
/// write, r1 copied after its write. The induced cut is consistent, but the
/// copied values never coexisted in memory.
pub fn causal_not_quasi() -> Fixture {
    let computation = Computation::new(
        2,
        2,
        vec![Value(0), Value(0)],
        vec![
            ev(1, 0, 0, 1, EventKind::Modifying, Some(1)),
            ev(2, 1, 1, 2, EventKind::Modifying, Some(1)),
        ],
    )
    .expect("valid");
    Fixture {
        name: "causal_not_quasi",
        computation,
        snapshot: Snapshot::new(vec![(Value(0), Time(0)), (Value(1), Time(2))]),
        tau: Time(0),
    }
}

/// One region changes after the acquisition started but before it was copied;
/// the other region is untouched. The copied values coexisted from tick 1 on,
/// but the copy of r0 no longer matches its value at tau = 0.
pub fn quasi_not_permissive() -> Fixture {
    let computation = Computation::new(
        2,
        1,
        vec![Value(0), Value(0)],
        vec![ev(1, 0, 0, 1, EventKind::Modifying, Some(1))],
    )
    .expect("valid");
    Fixture {
        name: "quasi_not_permissive",
        computation,
        snapshot: Snapshot::new(vec![(Value(1), Time(2)), (Value(0), Time(3))]),
        tau: Time(0),
    }
}

/// A read creates a causal dependency that leaves no trace in the values:
/// p0 reads r0, then writes r1. The snapshot contains the write but predates
/// the read, so it is quasi-instantaneous yet causally inconsistent.
pub fn quasi_not_causal() -> Fixture {
    let computation = Computation::new(
        2,
        1,
        vec![Value(0), Value(0)],
        vec![
            ev(1, 0, 0, 1, EventKind::NonModifying, None),
            ev(2, 0, 1, 2, EventKind::UniquelyModifying, Some(1)),
        ],
    )
    .expect("valid");
    Fixture {
        name: "quasi_not_causal",
        computation,
        snapshot: Snapshot::new(vec![(Value(0), Time(0)), (Value(1), Time(2))]),
        tau: Time(0),
    }
}

/// A value changes after tau and is restored before the region is copied.
/// Restrictive integrity rejects the intermediate change; permissive
/// integrity accepts the restored value.
pub fn restored_value() -> Fixture {
    let computation = Computation::new(
        1,
        1,
        vec![Value(0)],
        vec![
            ev(1, 0, 0, 1, EventKind::Modifying, Some(1)),
            ev(2, 0, 0, 2, EventKind::Modifying, Some(0)),
        ],
    )
    .expect("valid");
    Fixture {
        name: "restored_value",
        computation,
        snapshot: Snapshot::new(vec![(Value(0), Time(3))]),
        tau: Time(0),
    }
}

/// All boundary fixtures, in a stable order.
pub fn boundary_cases() -> Vec<Fixture> {
    vec![
        causally_inconsistent(),
        causal_not_quasi(),
        quasi_not_permissive(),
        quasi_not_causal(),
        restored_value(),
    ]
}
