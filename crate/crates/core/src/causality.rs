//! The happened-before relation over a computation, consistency of cuts,
//! and enumeration of the lattice of consistent cuts.
//!
//! The causal order is the smallest transitive relation that orders
//! consecutive events of one process and consecutive events on one memory
//! region. The transitive closure is materialized eagerly as one bitset of
//! predecessors per event, which keeps pair queries cheap for the checkers.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{event_index, Computation, Cut, EventId};

/// Default cap on the event count for lattice enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CausalityError {
    #[error("an event is not concurrent with itself")]
    SameEvent,
    #[error("computation has {events} events, enumeration bound is {bound}")]
    TooLarge { events: usize, bound: usize },
}

/// Fixed-width bitset, one bit per event index.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn empty(bits: usize) -> BitSet {
        BitSet {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn union_with(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter_map(move |b| (w >> b & 1 == 1).then_some(wi * 64 + b))
        })
    }
}

/// The transitively closed happened-before relation of one computation.
#[derive(Debug, Clone)]
pub struct CausalOrder {
    /// Predecessor bitsets indexed by event position in rt order.
    preds: Vec<BitSet>,
    index_of: HashMap<EventId, usize>,
}

/// Builds the causal order: immediate process-adjacency and region-adjacency
/// edges, transitively closed.
pub fn build_causal_order(comp: &Computation) -> CausalOrder {
    let n = comp.events().len();
    let mut preds: Vec<BitSet> = Vec::with_capacity(n);
    let mut last_of_process: HashMap<u32, usize> = HashMap::new();
    let mut last_on_region: HashMap<u32, usize> = HashMap::new();
    // Events come sorted by rt, so every immediate predecessor is already
    // closed when its successor is processed.
    for (idx, e) in comp.events().iter().enumerate() {
        let mut set = BitSet::empty(n);
        for &prev in [last_of_process.get(&e.p.0), last_on_region.get(&e.r.0)]
            .into_iter()
            .flatten()
        {
            set.union_with(&preds[prev]);
            set.set(prev);
        }
        preds.push(set);
        last_of_process.insert(e.p.0, idx);
        last_on_region.insert(e.r.0, idx);
    }
    CausalOrder {
        preds,
        index_of: event_index(comp),
    }
}

impl CausalOrder {
    fn index(&self, id: EventId) -> usize {
        *self
            .index_of
            .get(&id)
            .unwrap_or_else(|| panic!("{id} is not part of this computation"))
    }

    /// All causal predecessors of `id`.
    pub fn predecessors(&self, id: EventId) -> impl Iterator<Item = usize> + '_ {
        self.preds[self.index(id)].ones()
    }

    pub fn event_count(&self) -> usize {
        self.preds.len()
    }
}

/// True iff `e` happened before `f`.
pub fn happened_before(order: &CausalOrder, e: EventId, f: EventId) -> bool {
    order.preds[order.index(f)].get(order.index(e))
}

/// True iff neither event happened before the other.
pub fn concurrent(order: &CausalOrder, e: EventId, f: EventId) -> Result<bool, CausalityError> {
    if e == f {
        return Err(CausalityError::SameEvent);
    }
    Ok(!happened_before(order, e, f) && !happened_before(order, f, e))
}

/// True iff the cut is closed under happened-before: every causal
/// predecessor of every member is also a member.
pub fn is_consistent_cut(comp: &Computation, order: &CausalOrder, cut: &Cut) -> bool {
    let events = comp.events();
    cut.iter().all(|id| {
        order
            .predecessors(id)
            .all(|pred_idx| cut.contains(events[pred_idx].id))
    })
}

/// Enumerates every consistent cut of the computation, using the default
/// event-count bound.
pub fn enumerate_consistent_cuts(comp: &Computation) -> Result<Vec<Cut>, CausalityError> {
    enumerate_consistent_cuts_bounded(comp, DEFAULT_ENUMERATION_BOUND)
}

/// Enumerates every consistent cut, sorted by cardinality and then by event
/// ids. Candidates are built as per-region prefixes (a cut line cannot skip
/// events inside one region's timeline) and filtered by closure.
pub fn enumerate_consistent_cuts_bounded(
    comp: &Computation,
    bound: usize,
) -> Result<Vec<Cut>, CausalityError> {
    let n = comp.events().len();
    if n > bound {
        return Err(CausalityError::TooLarge { events: n, bound });
    }
    let order = build_causal_order(comp);
    let per_region: Vec<Vec<EventId>> = comp
        .regions()
        .map(|r| comp.events_on_region(r).map(|e| e.id).collect())
        .collect();

    let mut cuts = Vec::new();
    let mut prefix_lens = vec![0usize; per_region.len()];
    loop {
        let cut: Cut = per_region
            .iter()
            .zip(&prefix_lens)
            .flat_map(|(ids, &len)| ids[..len].iter().copied())
            .collect();
        if is_consistent_cut(comp, &order, &cut) {
            cuts.push(cut);
        }
        // Advance the mixed-radix counter over prefix lengths.
        let mut pos = 0;
        loop {
            if pos == per_region.len() {
                cuts.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                return Ok(cuts);
            }
            if prefix_lens[pos] < per_region[pos].len() {
                prefix_lens[pos] += 1;
                break;
            }
            prefix_lens[pos] = 0;
            pos += 1;
        }
    }
}

/// An edge of the covering relation on the cut lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoveringEdge {
    pub from: usize,
    pub to: usize,
}

/// Pairs `(i, j)` of indices into `cuts` such that `cuts[j]` extends
/// `cuts[i]` by exactly one event.
pub fn covering_edges(cuts: &[Cut]) -> Vec<CoveringEdge> {
    let index: HashMap<&Cut, usize> = cuts.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut edges = Vec::new();
    for (j, cut) in cuts.iter().enumerate() {
        for dropped in cut.iter() {
            let smaller: Cut = cut.iter().filter(|&id| id != dropped).collect();
            if let Some(&i) = index.get(&smaller) {
                edges.push(CoveringEdge { from: i, to: j });
            }
        }
    }
    edges.sort_by_key(|e| (e.from, e.to));
    edges
}
