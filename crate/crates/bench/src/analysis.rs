//! From measurements or the bundled dataset to ratings, pairwise tests,
//! ordering graphs, speedup curves and diff tables.

use std::collections::BTreeMap;

use multibench_core::coding_time::Variant;
use multibench_core::report::{diff_table, ordering_graph, OrderingGraph, ReportError};
use multibench_core::stats::{
    invert_for_speedup, mean, mean_ci, rating, speedup_curve, ConfidenceInterval, Metric, MetricTable, StatsError,
};

use crate::formats::{read_fixture, FormatError};
use crate::report::{
    CellDto, DiffCellDto, DiffDto, EdgeDto, GraphDto, MetricTableDto, NodeDto, PairwiseDto, RatingDto, RatingSet,
    Report, SpeedupDto,
};
use crate::runner::MeasurementRecord;

/// Confidence level of every interval in an analysis.
pub const LEVEL: f64 = 0.999;

/// Thread count the bundled parallel timings were taken at.
pub const FIXTURE_THREADS: usize = 32;

/// The bundled dataset: one CSV per metric.
pub const FIXTURES: [(Metric, &str, &str); 4] = [
    (Metric::Loc, "loc.csv", include_str!("../fixtures/loc.csv")),
    (Metric::CodingTime, "coding_time.csv", include_str!("../fixtures/coding_time.csv")),
    (Metric::ExecTime, "exec_time.csv", include_str!("../fixtures/exec_time.csv")),
    (Metric::Speedup, "speedup.csv", include_str!("../fixtures/speedup.csv")),
];

/// Metrics in report order.
pub const METRICS: [Metric; 4] = [Metric::Loc, Metric::CodingTime, Metric::ExecTime, Metric::Speedup];

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("no records")]
    NoRecords,
    #[error("bundled {file}: {source}")]
    Fixture { file: &'static str, source: FormatError },
    #[error("{metric} ({variant}): {source}")]
    Stats { metric: Metric, variant: Variant, source: StatsError },
    #[error("{metric} ({variant}): {source}")]
    Report { metric: Metric, variant: Variant, source: ReportError },
}

/// Parses a `--metric` value: `loc`, `coding`, `exec` or `speedup`.
pub fn parse_metric(s: &str) -> Option<Metric> {
    match s {
        "loc" => Some(Metric::Loc),
        "coding" | "coding-time" => Some(Metric::CodingTime),
        "exec" | "exec-time" => Some(Metric::ExecTime),
        "speedup" | "inverse-speedup" => Some(Metric::Speedup),
        _ => None,
    }
}

/// Per-(paradigm, problem, variant, threads) summary of measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanRow {
    pub paradigm: String,
    pub problem: String,
    pub variant: String,
    pub threads: usize,
    pub samples: usize,
    pub mean: f64,
    pub ci: Option<ConfidenceInterval>,
}

#[derive(Clone, Debug)]
pub struct NamedGraph {
    /// The metric as selected by the user; speedup graphs are built from the
    /// inverted table.
    pub metric: Metric,
    pub variant: Variant,
    pub graph: OrderingGraph,
}

#[derive(Clone, Debug, Default)]
pub struct Analysis {
    pub report: Report,
    pub graphs: Vec<NamedGraph>,
    pub means: Vec<MeanRow>,
    pub warnings: Vec<String>,
}

/// One value per (paradigm, problem) with an optional interval.
#[derive(Clone, Debug)]
struct Cell {
    paradigm: String,
    problem: String,
    value: f64,
    ci: Option<ConfidenceInterval>,
    samples: usize,
}

type CellSets = BTreeMap<(Metric, Variant), Vec<Cell>>;

fn selected(filter: Option<Metric>, m: Metric) -> bool {
    filter.is_none_or(|f| f == m)
}

/// Analysis of the bundled dataset.
pub fn analyze_fixture(filter: Option<Metric>) -> Result<Analysis, AnalysisError> {
    let mut sets = CellSets::new();
    let mut exec_rows = Vec::new();
    for (metric, file, text) in FIXTURES {
        let rows = read_fixture(text).map_err(|source| AnalysisError::Fixture { file, source })?;
        if metric == Metric::ExecTime {
            exec_rows = rows.clone();
        }
        if !selected(filter, metric) {
            continue;
        }
        for r in rows {
            let variant = Variant::parse_any(&r.variant).expect("validated by read_fixture");
            sets.entry((metric, variant)).or_default().push(Cell {
                paradigm: r.paradigm,
                problem: r.problem,
                value: r.value,
                ci: None,
                samples: 1,
            });
        }
    }
    let mut analysis = Analysis::default();
    if selected(filter, Metric::ExecTime) || selected(filter, Metric::Speedup) {
        let seq: BTreeMap<(&str, &str), f64> = exec_rows
            .iter()
            .filter(|r| Variant::parse_any(&r.variant) == Some(Variant::Seq))
            .map(|r| ((r.paradigm.as_str(), r.problem.as_str()), r.value))
            .collect();
        for r in &exec_rows {
            let variant = Variant::parse_any(&r.variant).expect("validated by read_fixture");
            if !matches!(variant, Variant::Par | Variant::ExpertPar) {
                continue;
            }
            let Some(&base) = seq.get(&(r.paradigm.as_str(), r.problem.as_str())) else { continue };
            let curve =
                speedup_curve(&r.paradigm, &r.problem, Some(&[base]), &[(FIXTURE_THREADS, vec![r.value])], LEVEL)
                    .map_err(|source| AnalysisError::Stats { metric: Metric::Speedup, variant, source })?;
            analysis.report.speedups.push(SpeedupDto::from_curve(&curve, variant));
        }
    }
    finish(analysis, sets)
}

/// Analysis of measurement records.
pub fn analyze_measurements(records: &[MeasurementRecord], filter: Option<Metric>) -> Result<Analysis, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::NoRecords);
    }
    let mut groups: BTreeMap<(&str, &str, Variant, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        let variant = Variant::parse_any(&r.variant).expect("validated by read_measurements");
        groups.entry((&r.paradigm, &r.problem, variant, r.threads)).or_default().push(r.seconds);
    }
    let mut analysis = Analysis::default();
    for (&(paradigm, problem, variant, threads), samples) in &groups {
        analysis.means.push(MeanRow {
            paradigm: paradigm.into(),
            problem: problem.into(),
            variant: variant.name().into(),
            threads,
            samples: samples.len(),
            mean: mean(samples),
            ci: interval(samples),
        });
    }

    let mut sets = CellSets::new();
    // Cells at each (paradigm, problem, variant)'s largest thread count.
    let mut at_max: BTreeMap<(&str, &str, Variant), (usize, &Vec<f64>)> = BTreeMap::new();
    for (&(paradigm, problem, variant, threads), samples) in &groups {
        at_max.insert((paradigm, problem, variant), (threads, samples));
    }
    if selected(filter, Metric::ExecTime) {
        for (&(paradigm, problem, variant), (_, samples)) in &at_max {
            sets.entry((Metric::ExecTime, variant)).or_default().push(Cell {
                paradigm: paradigm.into(),
                problem: problem.into(),
                value: mean(samples),
                ci: interval(samples),
                samples: samples.len(),
            });
        }
    }

    if selected(filter, Metric::ExecTime) || selected(filter, Metric::Speedup) {
        for &(paradigm, problem, variant) in at_max.keys() {
            if paradigm == SEQUENTIAL {
                continue;
            }
            let seq: Vec<f64> = groups
                .iter()
                .filter(|((l, p, _, t), _)| *l == SEQUENTIAL && *p == problem && *t == 1)
                .flat_map(|(_, s)| s.iter().copied())
                .collect();
            let par: Vec<(usize, Vec<f64>)> = groups
                .iter()
                .filter(|((l, p, v, _), _)| *l == paradigm && *p == problem && *v == variant)
                .map(|((_, _, _, t), s)| (*t, s.clone()))
                .collect();
            let seq = (!seq.is_empty()).then_some(seq.as_slice());
            match speedup_curve(paradigm, problem, seq, &par, LEVEL) {
                Ok(curve) => {
                    let last = curve.points.last().expect("at least one thread count");
                    if selected(filter, Metric::Speedup) {
                        sets.entry((Metric::Speedup, variant)).or_default().push(Cell {
                            paradigm: paradigm.into(),
                            problem: problem.into(),
                            value: last.speedup,
                            ci: last.ci.filter(|c| !c.unbounded),
                            samples: par.last().map_or(0, |p| p.1.len()),
                        });
                    }
                    analysis.report.speedups.push(SpeedupDto::from_curve(&curve, variant));
                }
                Err(StatsError::MissingBaseline) => analysis.warnings.push(format!(
                    "no speedup for {paradigm}/{problem}: neither sequential nor 1-thread timings present"
                )),
                Err(source) => return Err(AnalysisError::Stats { metric: Metric::Speedup, variant, source }),
            }
        }
    }
    finish(analysis, sets)
}

/// Paradigm label of the sequential strategy, used as speedup baseline.
pub const SEQUENTIAL: &str = "sequential";

fn interval(samples: &[f64]) -> Option<ConfidenceInterval> {
    if samples.len() < 2 {
        return None;
    }
    mean_ci(samples, LEVEL).ok()
}

fn table_of(metric: Metric, variant: Variant, cells: &[Cell]) -> Result<MetricTable, AnalysisError> {
    let mut t = MetricTable::new(metric);
    for c in cells {
        t.insert(&c.paradigm, &c.problem, c.value).map_err(|source| AnalysisError::Stats {
            metric,
            variant,
            source,
        })?;
    }
    Ok(t)
}

fn finish(mut analysis: Analysis, sets: CellSets) -> Result<Analysis, AnalysisError> {
    let mut tables: BTreeMap<(Metric, Variant), MetricTable> = BTreeMap::new();
    for (&(metric, variant), cells) in &sets {
        tables.insert((metric, variant), table_of(metric, variant, cells)?);
        analysis.report.metrics.push(MetricTableDto {
            metric: metric.name().into(),
            variant: variant.name().into(),
            cells: cells
                .iter()
                .map(|c| CellDto {
                    paradigm: c.paradigm.clone(),
                    problem: c.problem.clone(),
                    value: c.value,
                    ci_lo: c.ci.map(|ci| ci.lo),
                    ci_hi: c.ci.map(|ci| ci.hi),
                    samples: c.samples,
                })
                .collect(),
        });
    }

    for (&(metric, variant), table) in &tables {
        let rated = if metric == Metric::Speedup {
            invert_for_speedup(table).map_err(|source| AnalysisError::Stats { metric, variant, source })?
        } else {
            table.clone()
        };
        if let Err(e) = rated.check_complete() {
            analysis.warnings.push(format!("{metric} ({variant}) not rated: {e}"));
            continue;
        }
        let ratings = rating(&rated).map_err(|source| AnalysisError::Stats { metric, variant, source })?;
        let graph = ordering_graph(&rated).map_err(|source| AnalysisError::Report { metric, variant, source })?;
        analysis.report.ratings.push(RatingSet {
            metric: metric.name().into(),
            variant: variant.name().into(),
            ratings: ratings.into_iter().map(|(paradigm, rating)| RatingDto { paradigm, rating }).collect(),
        });
        analysis.report.pairwise.extend(graph.pairwise.iter().map(|r| PairwiseDto {
            metric: metric.name().into(),
            variant: variant.name().into(),
            a: r.a.clone(),
            b: r.b.clone(),
            n: r.test.n,
            w_plus: r.test.w_plus,
            w_minus: r.test.w_minus,
            p_value: r.p_value,
            exact: r.test.exact,
            better: r.better.clone(),
            strength: r.strength.name().into(),
        }));
        analysis.report.graphs.push(GraphDto {
            metric: metric.name().into(),
            variant: variant.name().into(),
            nodes: graph.nodes.iter().map(|n| NodeDto { name: n.name.clone(), rating: n.rating }).collect(),
            edges: graph
                .edges
                .iter()
                .map(|e| EdgeDto {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    style: e.style.name().into(),
                    p_value: e.p_value,
                })
                .collect(),
        });
        analysis.graphs.push(NamedGraph { metric, variant, graph });
    }

    for metric in METRICS {
        for (expert, base) in [(Variant::ExpertPar, Variant::Par), (Variant::ExpertSeq, Variant::Seq)] {
            let (Some(ex), Some(non)) = (tables.get(&(metric, expert)), tables.get(&(metric, base))) else {
                continue;
            };
            let d = diff_table(ex, non).map_err(|source| AnalysisError::Report { metric, variant: expert, source })?;
            analysis.report.diffs.push(DiffDto {
                metric: metric.name().into(),
                expert_variant: expert.name().into(),
                base_variant: base.name().into(),
                cells: d
                    .cells
                    .into_iter()
                    .map(|(paradigm, problem, ratio)| DiffCellDto { paradigm, problem, ratio })
                    .collect(),
            });
        }
    }
    Ok(analysis)
}
