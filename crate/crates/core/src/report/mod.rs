//! Ordering graphs, expert/non-expert diff tables and DOT output.

mod diff;
mod dot;
mod graph;

pub use diff::{diff_table, DiffTable};
pub use dot::emit_dot;
pub use graph::{ordering_graph, Edge, EdgeStyle, GraphNode, OrderingGraph};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::stats::StatsError;

#[derive(Clone, Debug, PartialEq)]
pub enum ReportError {
    Stats(StatsError),
    /// Superiority edges formed a cycle through these paradigms.
    Cycle(Vec<String>),
    /// A cell present in one table is absent from the other.
    KeyMismatch {
        paradigm: String,
        problem: String,
    },
}

impl From<StatsError> for ReportError {
    fn from(e: StatsError) -> Self {
        ReportError::Stats(e)
    }
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Stats(e) => e.fmt(f),
            ReportError::Cycle(path) => write!(f, "ordering graph has a cycle: {}", path.join(" -> ")),
            ReportError::KeyMismatch { paradigm, problem } => {
                write!(f, "cell ({paradigm}, {problem}) missing from one of the tables")
            }
        }
    }
}

impl core::error::Error for ReportError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            ReportError::Stats(e) => Some(e),
            _ => None,
        }
    }
}
