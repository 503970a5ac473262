use alloc::string::String;
use alloc::vec::Vec;

use super::ReportError;
use crate::stats::{Metric, MetricTable};

/// Expert value divided by non-expert value, per (paradigm, problem).
#[derive(Clone, Debug, PartialEq)]
pub struct DiffTable {
    pub metric: Metric,
    pub cells: Vec<(String, String, f64)>,
}

impl DiffTable {
    pub fn get(&self, paradigm: &str, problem: &str) -> Option<f64> {
        self.cells.iter().find(|(l, p, _)| l == paradigm && p == problem).map(|c| c.2)
    }
}

/// Ratios `expert / non_expert`; both tables must hold exactly the same cells.
pub fn diff_table(expert: &MetricTable, non_expert: &MetricTable) -> Result<DiffTable, ReportError> {
    let missing = |l: &str, p: &str| ReportError::KeyMismatch { paradigm: l.into(), problem: p.into() };
    if let Some((l, p, _)) = non_expert.iter().find(|(l, p, _)| expert.get(l, p).is_none()) {
        return Err(missing(l, p));
    }
    let cells = expert
        .iter()
        .map(|(l, p, v)| {
            let base = non_expert.get(l, p).ok_or_else(|| missing(l, p))?;
            Ok((String::from(l), String::from(p), v / base))
        })
        .collect::<Result<_, ReportError>>()?;
    Ok(DiffTable { metric: expert.metric(), cells })
}
