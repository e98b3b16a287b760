//! Independent oracles shared by the integration and acceptance suites.
//!
//! Everything here recomputes its answer from first principles (subset
//! enumeration, DFS reachability, tick-by-tick scans) without touching the
//! implementations under test.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use snaplab_core::model::{Computation, Cut, EventId, GroundTruth, Snapshot, Time};

/// Happened-before by depth-first search over the immediate process and
/// region adjacency edges, built from scratch.
pub struct ReachabilityOracle {
    succs: HashMap<EventId, Vec<EventId>>,
}

impl ReachabilityOracle {
    pub fn build(comp: &Computation) -> ReachabilityOracle {
        let mut succs: HashMap<EventId, Vec<EventId>> =
            comp.events().iter().map(|e| (e.id, Vec::new())).collect();
        let mut last_per_process: HashMap<u32, EventId> = HashMap::new();
        let mut last_per_region: HashMap<u32, EventId> = HashMap::new();
        for e in comp.events() {
            if let Some(&prev) = last_per_process.get(&e.p.0) {
                succs.get_mut(&prev).unwrap().push(e.id);
            }
            if let Some(&prev) = last_per_region.get(&e.r.0) {
                succs.get_mut(&prev).unwrap().push(e.id);
            }
            last_per_process.insert(e.p.0, e.id);
            last_per_region.insert(e.r.0, e.id);
        }
        ReachabilityOracle { succs }
    }

    pub fn happened_before(&self, e: EventId, f: EventId) -> bool {
        if e == f {
            return false;
        }
        let mut stack = vec![e];
        let mut seen = HashSet::new();
        while let Some(cur) = stack.pop() {
            for &next in &self.succs[&cur] {
                if next == f {
                    return true;
                }
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        false
    }
}

/// Every consistent cut by exhaustive enumeration of all event subsets,
/// checking the per-region prefix condition and closure under the oracle's
/// own happened-before. Only usable for small computations.
pub fn consistent_cuts_brute_force(comp: &Computation) -> Vec<Cut> {
    let oracle = ReachabilityOracle::build(comp);
    let ids: Vec<EventId> = comp.events().iter().map(|e| e.id).collect();
    assert!(ids.len() <= 16, "brute force oracle is exponential");
    let mut cuts = Vec::new();
    for mask in 0u32..1 << ids.len() {
        let cut: Cut = ids
            .iter()
            .enumerate()
            .filter_map(|(i, &id)| (mask >> i & 1 == 1).then_some(id))
            .collect();
        if is_region_prefix(comp, &cut) && is_closed(&oracle, &ids, &cut) {
            cuts.push(cut);
        }
    }
    cuts.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    cuts
}

fn is_region_prefix(comp: &Computation, cut: &Cut) -> bool {
    comp.regions().all(|r| {
        let on_region: Vec<EventId> = comp.events_on_region(r).map(|e| e.id).collect();
        let members = on_region.iter().filter(|&&id| cut.contains(id)).count();
        on_region[..members].iter().all(|&id| cut.contains(id))
    })
}

fn is_closed(oracle: &ReachabilityOracle, all: &[EventId], cut: &Cut) -> bool {
    cut.iter().all(|member| {
        all.iter()
            .all(|&other| !oracle.happened_before(other, member) || cut.contains(other))
    })
}

/// The smallest quasi-instantaneous witness by scanning every tick from 0 to
/// the last change point.
pub fn quasi_witness_tick_scan(s: &Snapshot, gt: &GroundTruth) -> Option<Time> {
    (0..=gt.max_change_time().tick())
        .map(Time)
        .find(|&t| s.entries().iter().all(|e| gt.value_at(e.r, t) == e.v))
}
