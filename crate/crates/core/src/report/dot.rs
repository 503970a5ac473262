use alloc::string::String;
use core::fmt::Write;

use super::{EdgeStyle, OrderingGraph};

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// DOT digraph with nodes labelled `name (rating)` in rating order and
/// solid or dashed edges from worse to better.
pub fn emit_dot(graph: &OrderingGraph) -> String {
    let mut out = String::new();
    // Writing to a String cannot fail.
    let _ = writeln!(out, "digraph {} {{", quoted(graph.metric.name()));
    out.push_str("  rankdir=LR;\n  node [shape=box];\n");
    for node in &graph.nodes {
        let label = alloc::format!("{} ({:.1})", node.name, node.rating);
        let _ = writeln!(out, "  {} [label={}];", quoted(&node.name), quoted(&label));
    }
    for edge in &graph.edges {
        let style = match edge.style {
            EdgeStyle::Solid => "solid",
            EdgeStyle::Dotted => "dashed",
        };
        let _ = writeln!(out, "  {} -> {} [style={}];", quoted(&edge.from), quoted(&edge.to), style);
    }
    out.push_str("}\n");
    out
}
