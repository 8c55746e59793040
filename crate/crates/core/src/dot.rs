//! DOT rendering of concept orders, for `graphviz`.

use crate::macneille::Completion;
use crate::relation::tuple_name;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Render the concept order as a DOT digraph: one box per concept labelled
/// with its extent and intent, one edge per covering pair, drawn bottom-up.
/// Output is deterministic: nodes in concept order, edges in scan order.
pub fn concepts_dot(c: &Completion) -> String {
    let mut out = String::from("digraph concepts {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for (k, concept) in c.concepts().iter().enumerate() {
        let extent = escape(&tuple_name(concept.extent.vals()));
        let intent = escape(&tuple_name(concept.intent.vals()));
        out.push_str(&format!("  k{k} [label=\"{extent}\\n{intent}\"];\n"));
    }
    for (lo, hi) in c.covering_pairs() {
        out.push_str(&format!("  k{lo} -> k{hi};\n"));
    }
    out.push_str("}\n");
    out
}
