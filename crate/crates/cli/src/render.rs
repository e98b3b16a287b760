//! Deterministic DOT renderings: space/time diagrams of computations and the
//! lattice of consistent cuts.

use std::fmt::Write;

use snaplab_core::causality::{covering_edges, enumerate_consistent_cuts, CausalityError};
use snaplab_core::model::{Computation, Cut, Snapshot};

/// Renders a computation as a space/time diagram: one rail per region with
/// its events in realtime order, solid arrows between consecutive events of
/// a process, and an optional cut line drawn as one marker per region.
///
/// Markers follow the snapshot's per-region copy times when a snapshot is
/// given, otherwise the last cut member on each region.
pub fn spacetime_dot(comp: &Computation, snapshot: Option<&Snapshot>, cut: Option<&Cut>) -> String {
    let mut out = String::new();
    out.push_str("digraph spacetime {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle fontsize=10];\n");
    for r in comp.regions() {
        let events: Vec<_> = comp.events_on_region(r).collect();
        // Number of events that fall on the "past" side of the cut line.
        let boundary = match (snapshot, cut) {
            (Some(s), _) => Some(events.iter().filter(|e| e.rt <= s.time(r)).count()),
            (None, Some(c)) => Some(events.iter().filter(|e| c.contains(e.id)).count()),
            (None, None) => None,
        };
        writeln!(out, "  subgraph cluster_{r} {{").unwrap();
        writeln!(out, "    label=\"{r}\";").unwrap();
        writeln!(out, "    {r} [shape=plaintext label=\"{r}\"];").unwrap();
        let mut rail = vec![format!("{r}")];
        for (i, e) in events.iter().enumerate() {
            if boundary == Some(i) {
                rail.push(format!("cut_{r}"));
            }
            writeln!(out, "    {} [label=\"{}@{}\"];", e.id, e.id, e.rt.tick()).unwrap();
            rail.push(format!("{}", e.id));
        }
        if boundary == Some(events.len()) {
            rail.push(format!("cut_{r}"));
        }
        if boundary.is_some() {
            writeln!(out, "    cut_{r} [shape=point width=0.15];").unwrap();
        }
        if rail.len() > 1 {
            writeln!(
                out,
                "    {} [style=dashed arrowhead=none];",
                rail.join(" -> ")
            )
            .unwrap();
        }
        out.push_str("  }\n");
    }
    for p in 0..comp.process_count() {
        let ids: Vec<_> = comp
            .events_of_process(snaplab_core::model::ProcessId(p as u32))
            .map(|e| e.id)
            .collect();
        for pair in ids.windows(2) {
            writeln!(out, "  {} -> {} [label=\"p{p}\"];", pair[0], pair[1]).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Renders the lattice of consistent cuts, one edge per covering relation.
pub fn lattice_dot(comp: &Computation) -> Result<String, CausalityError> {
    let cuts = enumerate_consistent_cuts(comp)?;
    let edges = covering_edges(&cuts);
    let mut out = String::new();
    out.push_str("digraph lattice {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box fontsize=10];\n");
    for (i, cut) in cuts.iter().enumerate() {
        writeln!(out, "  c{i} [label=\"{cut}\"];").unwrap();
    }
    for edge in edges {
        writeln!(out, "  c{} -> c{};", edge.from, edge.to).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}
