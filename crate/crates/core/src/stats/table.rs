use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::StatsError;

/// What a [`MetricTable`] measures. All metrics except [`Metric::Speedup`]
/// are "smaller is better".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Loc,
    CodingTime,
    ExecTime,
    /// Raw speedups; larger is better. Invert before rating or ordering.
    Speedup,
    InverseSpeedup,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Loc => "loc",
            Metric::CodingTime => "coding",
            Metric::ExecTime => "exec",
            Metric::Speedup => "speedup",
            Metric::InverseSpeedup => "inverse-speedup",
        }
    }

    pub fn smaller_is_better(self) -> bool {
        self != Metric::Speedup
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Positive metric values per (paradigm, problem). Row and column order is
/// the order labels were first seen.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTable {
    metric: Metric,
    paradigms: Vec<String>,
    problems: Vec<String>,
    cells: Vec<Option<f64>>,
}

impl MetricTable {
    pub fn new(metric: Metric) -> Self {
        MetricTable { metric, paradigms: Vec::new(), problems: Vec::new(), cells: Vec::new() }
    }

    /// Builds a table from `(paradigm, problem, value)` triples.
    pub fn from_cells<'a, I>(metric: Metric, cells: I) -> Result<Self, StatsError>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let mut t = MetricTable::new(metric);
        for (l, p, v) in cells {
            t.insert(l, p, v)?;
        }
        Ok(t)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn paradigms(&self) -> &[String] {
        &self.paradigms
    }

    pub fn problems(&self) -> &[String] {
        &self.problems
    }

    fn paradigm_index(&mut self, label: &str) -> usize {
        if let Some(i) = self.paradigms.iter().position(|l| l == label) {
            return i;
        }
        self.paradigms.push(label.to_string());
        self.cells.extend(core::iter::repeat_n(None, self.problems.len()));
        self.paradigms.len() - 1
    }

    fn problem_index(&mut self, label: &str) -> usize {
        if let Some(j) = self.problems.iter().position(|p| p == label) {
            return j;
        }
        let old = self.problems.len();
        let mut cells = Vec::with_capacity(self.paradigms.len() * (old + 1));
        for i in 0..self.paradigms.len() {
            cells.extend_from_slice(&self.cells[i * old..(i + 1) * old]);
            cells.push(None);
        }
        self.cells = cells;
        self.problems.push(label.to_string());
        old
    }

    /// Sets a cell, adding unseen labels. Values must be finite and positive.
    pub fn insert(&mut self, paradigm: &str, problem: &str, value: f64) -> Result<(), StatsError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(StatsError::NonPositive { paradigm: paradigm.into(), problem: problem.into(), value });
        }
        let i = self.paradigm_index(paradigm);
        let j = self.problem_index(problem);
        let w = self.problems.len();
        self.cells[i * w + j] = Some(value);
        Ok(())
    }

    pub fn get(&self, paradigm: &str, problem: &str) -> Option<f64> {
        let i = self.paradigms.iter().position(|l| l == paradigm)?;
        let j = self.problems.iter().position(|p| p == problem)?;
        self.cells[i * self.problems.len() + j]
    }

    fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.cells[i * self.problems.len() + j]
    }

    fn require(&self, i: usize, j: usize) -> Result<f64, StatsError> {
        self.at(i, j).ok_or_else(|| StatsError::MissingCell {
            paradigm: self.paradigms[i].clone(),
            problem: self.problems[j].clone(),
        })
    }

    /// All values of `paradigm`, in problem order; errors on a missing cell.
    pub fn row(&self, paradigm: &str) -> Result<Vec<f64>, StatsError> {
        let i = self
            .paradigms
            .iter()
            .position(|l| l == paradigm)
            .ok_or_else(|| StatsError::UnknownLabel(paradigm.into()))?;
        (0..self.problems.len()).map(|j| self.require(i, j)).collect()
    }

    /// Errors naming the first missing cell, if any.
    pub fn check_complete(&self) -> Result<(), StatsError> {
        if self.paradigms.is_empty() || self.problems.is_empty() {
            return Err(StatsError::EmptyTable);
        }
        for i in 0..self.paradigms.len() {
            for j in 0..self.problems.len() {
                self.require(i, j)?;
            }
        }
        Ok(())
    }

    /// `(paradigm, problem, value)` for every present cell, row by row.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        let w = self.problems.len();
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(k, v)| v.map(|v| (self.paradigms[k / w].as_str(), self.problems[k % w].as_str(), v)))
    }

    fn column_min(&self, j: usize) -> Option<f64> {
        (0..self.paradigms.len()).filter_map(|i| self.at(i, j)).min_by(f64::total_cmp)
    }

    fn map_cells(&self, metric: Metric, f: impl Fn(usize, f64) -> f64) -> MetricTable {
        let w = self.problems.len().max(1);
        MetricTable {
            metric,
            paradigms: self.paradigms.clone(),
            problems: self.problems.clone(),
            cells: self.cells.iter().enumerate().map(|(k, v)| v.map(|v| f(k % w, v))).collect(),
        }
    }
}

/// Divides every cell by its problem's smallest value.
pub fn normalize(table: &MetricTable) -> MetricTable {
    let mins: Vec<Option<f64>> = (0..table.problems.len()).map(|j| table.column_min(j)).collect();
    table.map_cells(table.metric, |j, v| v / mins[j].expect("column has a value"))
}

/// Cell-wise reciprocal of a speedup table, tagged as inverse speedup.
pub fn invert_for_speedup(table: &MetricTable) -> Result<MetricTable, StatsError> {
    // Positivity is a table invariant; re-check for hand-built inputs.
    if let Some((l, p, v)) = table.iter().find(|(_, _, v)| !v.is_finite() || *v <= 0.0) {
        return Err(StatsError::NonPositive { paradigm: l.into(), problem: p.into(), value: v });
    }
    Ok(table.map_cells(Metric::InverseSpeedup, |_, v| 1.0 / v))
}

/// Average over problems of each paradigm's value relative to the best
/// (smallest) value on that problem. 1.0 means best everywhere.
pub fn rating(table: &MetricTable) -> Result<Vec<(String, f64)>, StatsError> {
    if !table.metric.smaller_is_better() {
        return Err(StatsError::WrongMetric(table.metric));
    }
    table.check_complete()?;
    let np = table.problems.len();
    let mins: Vec<f64> = (0..np).map(|j| table.column_min(j).expect("complete")).collect();
    Ok(table
        .paradigms
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let sum: f64 = (0..np).map(|j| table.at(i, j).expect("complete") / mins[j]).sum();
            (l.clone(), sum / np as f64)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn table(rows: &[(&str, &[f64])]) -> MetricTable {
        let mut t = MetricTable::new(Metric::ExecTime);
        for (l, vals) in rows {
            for (j, v) in vals.iter().enumerate() {
                t.insert(l, &alloc::format!("p{j}"), *v).unwrap();
            }
        }
        t
    }

    #[test]
    fn best_everywhere_rates_one() {
        let t = table(&[("a", &[1.0, 2.0]), ("b", &[3.0, 2.5])]);
        let r = rating(&t).unwrap();
        assert_eq!(r[0], ("a".into(), 1.0));
    }

    #[test]
    fn direct_formula() {
        let t = table(&[("x", &[2.0]), ("y", &[4.0])]);
        assert_eq!(rating(&t).unwrap(), vec![("x".into(), 1.0), ("y".into(), 2.0)]);
    }

    #[test]
    fn missing_cell_named() {
        let mut t = table(&[("x", &[2.0, 1.0])]);
        t.insert("y", "p0", 3.0).unwrap();
        assert_eq!(rating(&t), Err(StatsError::MissingCell { paradigm: "y".into(), problem: "p1".into() }));
    }

    #[test]
    fn rejects_non_positive() {
        let mut t = MetricTable::new(Metric::Loc);
        assert!(t.insert("a", "p", 0.0).is_err());
        assert!(t.insert("a", "p", f64::NAN).is_err());
    }

    #[test]
    fn labels_added_late_keep_cells_aligned() {
        let mut t = MetricTable::new(Metric::Loc);
        t.insert("a", "p", 1.0).unwrap();
        t.insert("b", "p", 2.0).unwrap();
        t.insert("a", "q", 3.0).unwrap();
        t.insert("c", "r", 4.0).unwrap();
        assert_eq!(t.get("a", "p"), Some(1.0));
        assert_eq!(t.get("b", "p"), Some(2.0));
        assert_eq!(t.get("a", "q"), Some(3.0));
        assert_eq!(t.get("c", "r"), Some(4.0));
        assert_eq!(t.get("b", "q"), None);
        assert_eq!(t.iter().count(), 4);
    }

    #[test]
    fn normalize_examples() {
        let t = table(&[("a", &[2.0]), ("b", &[4.0]), ("c", &[8.0])]);
        let n = normalize(&t);
        assert_eq!(n.row("a").unwrap(), vec![1.0]);
        assert_eq!(n.row("b").unwrap(), vec![2.0]);
        assert_eq!(n.row("c").unwrap(), vec![4.0]);
        assert_eq!(normalize(&n), n);
    }

    #[test]
    fn inversion() {
        let mut t = MetricTable::new(Metric::Speedup);
        t.insert("a", "p", 2.0).unwrap();
        t.insert("b", "p", 8.0).unwrap();
        assert_eq!(rating(&t), Err(StatsError::WrongMetric(Metric::Speedup)));
        let inv = invert_for_speedup(&t).unwrap();
        assert_eq!(inv.metric(), Metric::InverseSpeedup);
        assert_eq!(inv.get("a", "p"), Some(0.5));
        // argmax of speedup becomes argmin.
        assert_eq!(rating(&inv).unwrap()[1], ("b".into(), 1.0));
    }

    proptest! {
        #[test]
        fn rating_at_least_one_and_scale_invariant(
            vals in proptest::collection::vec(proptest::collection::vec(1u32..1000, 5), 2..6),
            scale in 1u32..64, col in 0usize..5,
        ) {
            let rows: Vec<(String, Vec<f64>)> = vals.iter().enumerate()
                .map(|(i, v)| (alloc::format!("L{i}"), v.iter().map(|&x| x as f64).collect()))
                .collect();
            let refs: Vec<(&str, &[f64])> = rows.iter().map(|(l, v)| (l.as_str(), v.as_slice())).collect();
            let t = table(&refs);
            let r = rating(&t).unwrap();
            for (i, (_, score)) in r.iter().enumerate() {
                prop_assert!(*score >= 1.0);
                let best_everywhere = (0..5).all(|j| vals.iter().all(|row| vals[i][j] <= row[j]));
                prop_assert_eq!(*score == 1.0, best_everywhere);
            }
            // Power-of-two scaling keeps the arithmetic exact.
            let factor = (scale.next_power_of_two()) as f64;
            let scaled: Vec<(String, Vec<f64>)> = rows.iter()
                .map(|(l, v)| (l.clone(), v.iter().enumerate().map(|(j, &x)| if j == col { x * factor } else { x }).collect()))
                .collect();
            let srefs: Vec<(&str, &[f64])> = scaled.iter().map(|(l, v)| (l.as_str(), v.as_slice())).collect();
            prop_assert_eq!(rating(&table(&srefs)).unwrap(), r);
        }
    }
}
