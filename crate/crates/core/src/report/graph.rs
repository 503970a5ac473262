use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::ReportError;
use crate::stats::{pairwise, rating, Metric, MetricTable, PairwiseResult, Strength};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeStyle {
    /// Significantly better (p < 0.05).
    Solid,
    /// Tends to be better (0.05 <= p < 0.1).
    Dotted,
}

impl EdgeStyle {
    pub fn name(self) -> &'static str {
        match self {
            EdgeStyle::Solid => "solid",
            EdgeStyle::Dotted => "dotted",
        }
    }
}

/// `from` is the worse paradigm, `to` the better one.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub style: EdgeStyle,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphNode {
    pub name: String,
    pub rating: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingGraph {
    pub metric: Metric,
    /// Sorted by rating, then name.
    pub nodes: Vec<GraphNode>,
    /// Edges after transitive reduction of solid chains.
    pub edges: Vec<Edge>,
    /// Every pairwise test that was run, reduced edges included.
    pub pairwise: Vec<PairwiseResult>,
}

/// Runs the paired test for every pair of paradigms and draws an edge from
/// the worse to the better one for each significant or tending result.
///
/// A solid edge is dropped when a chain of two or more solid edges already
/// connects its endpoints; dotted edges are kept and never justify removing
/// anything.
pub fn ordering_graph(table: &MetricTable) -> Result<OrderingGraph, ReportError> {
    let ratings = rating(table)?;
    let labels = table.paradigms();
    let rows: Vec<Vec<f64>> = labels.iter().map(|l| table.row(l)).collect::<Result<_, _>>()?;

    let mut results = Vec::new();
    let mut edges = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            let pairs: Vec<(f64, f64)> = rows[i].iter().copied().zip(rows[j].iter().copied()).collect();
            let r = pairwise(&labels[i], &labels[j], &pairs)?;
            let style = match r.strength {
                Strength::Significant => Some(EdgeStyle::Solid),
                Strength::Tends => Some(EdgeStyle::Dotted),
                Strength::None => None,
            };
            if let (Some(style), Some(better)) = (style, r.better.as_ref()) {
                let (from, to) = if *better == labels[i] { (j, i) } else { (i, j) };
                edges.push((from, to, style, r.p_value));
            }
            results.push(r);
        }
    }

    let n = labels.len();
    check_acyclic(n, &edges, labels)?;

    let mut solid = vec![vec![false; n]; n];
    for &(u, v, style, _) in &edges {
        if style == EdgeStyle::Solid {
            solid[u][v] = true;
        }
    }
    let implied = |u: usize, w: usize| (0..n).any(|v| v != w && solid[u][v] && reaches(&solid, v, w));
    let kept: Vec<_> = edges.iter().filter(|&&(u, w, style, _)| style == EdgeStyle::Dotted || !implied(u, w)).collect();

    let mut nodes: Vec<GraphNode> = ratings.into_iter().map(|(name, rating)| GraphNode { name, rating }).collect();
    nodes.sort_by(|a, b| a.rating.total_cmp(&b.rating).then_with(|| a.name.cmp(&b.name)));
    let position = |label: &str| nodes.iter().position(|n| n.name == label).expect("node exists");
    let mut edges: Vec<Edge> = kept
        .into_iter()
        .map(|&(u, v, style, p_value)| Edge { from: labels[u].clone(), to: labels[v].clone(), style, p_value })
        .collect();
    edges.sort_by_key(|e| (position(&e.from), position(&e.to)));

    Ok(OrderingGraph { metric: table.metric(), nodes, edges, pairwise: results })
}

fn reaches(adj: &[Vec<bool>], from: usize, to: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        if core::mem::replace(&mut seen[u], true) {
            continue;
        }
        stack.extend((0..adj.len()).filter(|&v| adj[u][v]));
    }
    false
}

fn check_acyclic(n: usize, edges: &[(usize, usize, EdgeStyle, f64)], labels: &[String]) -> Result<(), ReportError> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v, _, _) in edges {
        adj[u][v] = true;
    }
    for &(u, v, _, _) in edges {
        if reaches(&adj, v, u) {
            return Err(ReportError::Cycle(vec![labels[u].clone(), labels[v].clone(), labels[u].clone()]));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc_table() -> MetricTable {
        let rows: [(&str, [f64; 6]); 4] = [
            ("Chapel", [32.0, 61.0, 74.0, 58.0, 36.0, 159.0]),
            ("Cilk", [40.0, 95.0, 139.0, 72.0, 58.0, 251.0]),
            ("Go", [71.0, 118.0, 191.0, 98.0, 86.0, 330.0]),
            ("TBB", [53.0, 98.0, 137.0, 81.0, 62.0, 302.0]),
        ];
        let problems = ["randmat", "thresh", "winnow", "outer", "product", "chain"];
        let mut t = MetricTable::new(Metric::Loc);
        for (l, vals) in rows {
            for (p, v) in problems.iter().zip(vals) {
                t.insert(l, p, v).unwrap();
            }
        }
        t
    }

    fn edge_set(g: &OrderingGraph) -> Vec<(&str, &str, EdgeStyle)> {
        let mut e: Vec<_> = g.edges.iter().map(|e| (e.from.as_str(), e.to.as_str(), e.style)).collect();
        e.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        e
    }

    #[test]
    fn loc_graph_reduces_go_to_chapel() {
        let g = ordering_graph(&loc_table()).unwrap();
        assert_eq!(
            edge_set(&g),
            vec![
                ("Cilk", "Chapel", EdgeStyle::Solid),
                ("Go", "Cilk", EdgeStyle::Solid),
                ("Go", "TBB", EdgeStyle::Solid),
                ("TBB", "Chapel", EdgeStyle::Solid),
                ("TBB", "Cilk", EdgeStyle::Dotted),
            ]
        );
        assert_eq!(g.pairwise.len(), 6);
        assert_eq!(g.nodes[0].name, "Chapel");
        assert_eq!(g.nodes[0].rating, 1.0);
    }

    #[test]
    fn single_paradigm_has_no_edges() {
        let mut t = MetricTable::new(Metric::Loc);
        t.insert("only", "p", 3.0).unwrap();
        let g = ordering_graph(&t).unwrap();
        assert!(g.edges.is_empty());
        assert_eq!(g.nodes.len(), 1);
    }

    #[test]
    fn dotted_edges_never_remove_solid_ones() {
        // a beats b (solid) and b tends to beat c: a->c solid must survive
        // only if not implied by solid chains; here it is implied by none.
        let adj = vec![vec![false, true], vec![false, false]];
        assert!(reaches(&adj, 0, 1));
        assert!(!reaches(&adj, 1, 0));
    }
}
