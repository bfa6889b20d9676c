//! Graphviz output. Causality is drawn as its covering arrows; conflict and
//! overlap edges are dashed and undirected.

use std::fmt::Write;

use evstruct::{BinRel, EventStructure, FullGraph};

pub fn event_structure(es: &EventStructure) -> String {
    render("event_structure", es.carrier(), es.causality(), es.conflict(), "conflict")
}

pub fn fullgraph(fg: &FullGraph) -> String {
    render("full_graph", fg.carrier(), fg.containment(), fg.overlap(), "overlap")
}

fn render(name: &str, n: usize, order: &BinRel, edges: &BinRel, edge_class: &str) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {name} {{").unwrap();
    writeln!(s, "  node [shape=circle];").unwrap();
    for v in 0..n {
        writeln!(s, "  {v};").unwrap();
    }
    for (x, y) in order.transitive_reduction().pairs() {
        writeln!(s, "  {x} -> {y};").unwrap();
    }
    for (x, y) in edges.pairs().filter(|(x, y)| x < y) {
        writeln!(s, "  {x} -> {y} [dir=none, style=dashed, class={edge_class}];").unwrap();
    }
    s.push_str("}\n");
    s
}
