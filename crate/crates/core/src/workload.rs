//! Deterministic, seeded generators of computations: a uniform random
//! workload and a linked-list workload in which logical processes unlink,
//! relink, and write to list nodes, one memory region per node.
//!
//! Processes are actors inside a discrete-event simulation, not OS threads;
//! every event gets the next global tick, so timestamps are injective by
//! construction and a `(config, seed)` pair always produces the same
//! computation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Computation, Event, EventId, EventKind, ProcessId, RegionId, Time, Value};

/// Value pool for the all-modifying regime, kept small so that reverts to
/// earlier values actually happen.
const MODIFYING_POOL: u64 = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("invalid workload config: {0}")]
    InvalidConfig(String),
}

/// Which kinds of events the generator emits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindRegime {
    /// Every event writes a value its region never held before.
    AllUniquelyModifying,
    /// Every event writes a value different from the current one, drawn from
    /// a small pool, so values recur.
    AllModifying,
    /// Reads at the given fraction; the remaining events are uniquely
    /// modifying writes.
    MixedWithReads { read_fraction: f64 },
}

/// Shape of the generated access pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadShape {
    /// Independent uniform accesses.
    Random,
    /// Concurrent mutation of a doubly-linked list; one region per node.
    LinkedList { node_count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub region_count: usize,
    pub process_count: usize,
    pub event_count: usize,
    pub kind_regime: KindRegime,
    pub seed: u64,
    pub workload: WorkloadShape,
}

impl WorkloadConfig {
    fn validate(&self) -> Result<(), WorkloadError> {
        if self.region_count == 0 {
            return Err(WorkloadError::InvalidConfig(
                "region_count must be at least 1".into(),
            ));
        }
        if self.process_count == 0 {
            return Err(WorkloadError::InvalidConfig(
                "process_count must be at least 1".into(),
            ));
        }
        if let KindRegime::MixedWithReads { read_fraction } = self.kind_regime {
            if !(0.0..=1.0).contains(&read_fraction) {
                return Err(WorkloadError::InvalidConfig(format!(
                    "read_fraction {read_fraction} outside [0, 1]"
                )));
            }
        }
        if let WorkloadShape::LinkedList { node_count } = self.workload {
            if node_count != self.region_count {
                return Err(WorkloadError::InvalidConfig(format!(
                    "linked list needs one region per node ({} nodes, {} regions)",
                    node_count, self.region_count
                )));
            }
            if node_count < 2 {
                return Err(WorkloadError::InvalidConfig(
                    "linked list needs at least 2 nodes".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Assigns kinds and written values under a regime.
struct ValueSource {
    regime: KindRegime,
    next_fresh: Vec<u64>,
    current: Vec<u64>,
}

impl ValueSource {
    fn new(regime: KindRegime, initial: &[Value]) -> ValueSource {
        ValueSource {
            regime,
            next_fresh: initial.iter().map(|v| v.0 + 1).collect(),
            current: initial.iter().map(|v| v.0).collect(),
        }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng, r: RegionId) -> (EventKind, Option<Value>) {
        match self.regime {
            KindRegime::MixedWithReads { read_fraction } if rng.gen::<f64>() < read_fraction => {
                (EventKind::NonModifying, None)
            }
            KindRegime::AllModifying => {
                let i = r.index();
                let v = loop {
                    let candidate = rng.gen_range(0..MODIFYING_POOL);
                    if candidate != self.current[i] {
                        break candidate;
                    }
                };
                self.current[i] = v;
                (EventKind::Modifying, Some(Value(v)))
            }
            KindRegime::AllUniquelyModifying | KindRegime::MixedWithReads { .. } => {
                let i = r.index();
                let v = self.next_fresh[i];
                self.next_fresh[i] += 1;
                self.current[i] = v;
                (EventKind::UniquelyModifying, Some(Value(v)))
            }
        }
    }
}

/// Generates a computation. Deterministic in the seed; all regions start
/// at value 0.
pub fn generate(config: &WorkloadConfig) -> Result<Computation, WorkloadError> {
    config.validate()?;
    let initial = vec![Value(0); config.region_count];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut source = ValueSource::new(config.kind_regime, &initial);
    let accesses: Vec<(ProcessId, RegionId)> = match config.workload {
        WorkloadShape::Random => random_accesses(config, &mut rng),
        WorkloadShape::LinkedList { .. } => linked_list_accesses(config, &mut rng),
    };
    let events = accesses
        .into_iter()
        .enumerate()
        .map(|(i, (p, r))| {
            let (kind, written) = source.next(&mut rng, r);
            Event {
                id: EventId(i as u32),
                p,
                r,
                rt: Time(i as u64 + 1),
                kind,
                written,
            }
        })
        .collect();
    Computation::new(config.region_count, config.process_count, initial, events)
        .map_err(|e| WorkloadError::InvalidConfig(e.to_string()))
}

fn random_accesses(config: &WorkloadConfig, rng: &mut ChaCha8Rng) -> Vec<(ProcessId, RegionId)> {
    (0..config.event_count)
        .map(|_| {
            (
                ProcessId(rng.gen_range(0..config.process_count) as u32),
                RegionId(rng.gen_range(0..config.region_count) as u32),
            )
        })
        .collect()
}

/// A static population of list nodes, mutated by unlink, relink, and
/// buffer-write operations. Each operation touches one to three regions as
/// consecutive events by one process, and only ever dereferences nodes that
/// are currently linked (plus the node being moved).
fn linked_list_accesses(
    config: &WorkloadConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<(ProcessId, RegionId)> {
    let mut linked: Vec<u32> = (0..config.region_count as u32).collect();
    let mut free: Vec<u32> = Vec::new();
    let mut accesses = Vec::with_capacity(config.event_count);
    while accesses.len() < config.event_count {
        let p = ProcessId(rng.gen_range(0..config.process_count) as u32);
        let mut touched: Vec<u32> = Vec::with_capacity(3);
        match rng.gen_range(0..3u8) {
            0 if !free.is_empty() => {
                // Relink a free node: write the node's pointers, then patch
                // its new neighbors.
                let node = free.swap_remove(rng.gen_range(0..free.len()));
                let pos = rng.gen_range(0..=linked.len());
                touched.push(node);
                if pos > 0 {
                    touched.push(linked[pos - 1]);
                }
                if pos < linked.len() {
                    touched.push(linked[pos]);
                }
                linked.insert(pos, node);
            }
            1 if linked.len() > 2 => {
                // Unlink a node: patch the neighbors around it, then clear
                // the node itself.
                let pos = rng.gen_range(0..linked.len());
                if pos > 0 {
                    touched.push(linked[pos - 1]);
                }
                if pos + 1 < linked.len() {
                    touched.push(linked[pos + 1]);
                }
                let node = linked.remove(pos);
                touched.push(node);
                free.push(node);
            }
            _ => {
                // Write into the buffer of a linked node.
                touched.push(linked[rng.gen_range(0..linked.len())]);
            }
        }
        for region in touched {
            debug_assert!(region < config.region_count as u32);
            if accesses.len() == config.event_count {
                break;
            }
            accesses.push((p, RegionId(region)));
        }
    }
    accesses
}
