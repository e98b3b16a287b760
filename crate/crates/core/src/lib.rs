//! snaplab: a simulator and checker suite for the quality of storage
//! snapshots taken from a running system.
//!
//! The crate simulates concurrent computations over memory regions with full
//! ground truth, acquires snapshots of them under four strategies (frozen,
//! sequential scan, copy-on-write, priority scan), and classifies each
//! snapshot against six quality criteria: correctness, instantaneous and
//! quasi-instantaneous consistency, causal consistency, and restrictive and
//! permissive integrity. Randomized campaigns verify the implication graph
//! between the criteria and collect witnesses for the non-implications.

pub mod acquisition;
pub mod causality;
pub mod evaluator;
pub mod fixtures;
pub mod model;
pub mod trace;
pub mod vclock;
pub mod workload;

pub use acquisition::{acquire, AcquisitionPlan};
pub use causality::{build_causal_order, enumerate_consistent_cuts, CausalOrder};
pub use evaluator::campaign::{verify_implications, CampaignConfig, CampaignReport};
pub use evaluator::{classify, evaluate_snapshot, Verdict, WitnessWindow};
pub use model::{
    replay, Computation, Cut, Event, EventId, EventKind, GroundTruth, ProcessId, RegionId,
    Snapshot, Time, Value,
};
pub use vclock::VectorClock;
pub use workload::{generate, KindRegime, WorkloadConfig, WorkloadShape};
