//! `report.json`, per-table CSVs, DOT graphs and the markdown summary.
//!
//! JSON floats carry 17 significant digits and so read back bit-exactly;
//! markdown shows ratings to one decimal and other values to three
//! significant digits.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use multibench_core::coding_time::Variant;
use multibench_core::report::emit_dot;
use multibench_core::stats::{Metric, SpeedupCurve};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::analysis::{Analysis, MeanRow, METRICS};
use crate::formats::{fmt_g17, fmt_sig};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metrics: Vec<MetricTableDto>,
    pub ratings: Vec<RatingSet>,
    pub pairwise: Vec<PairwiseDto>,
    pub graphs: Vec<GraphDto>,
    pub speedups: Vec<SpeedupDto>,
    pub diffs: Vec<DiffDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricTableDto {
    pub metric: String,
    pub variant: String,
    pub cells: Vec<CellDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDto {
    pub paradigm: String,
    pub problem: String,
    pub value: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingSet {
    pub metric: String,
    pub variant: String,
    pub ratings: Vec<RatingDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingDto {
    pub paradigm: String,
    pub rating: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseDto {
    pub metric: String,
    pub variant: String,
    pub a: String,
    pub b: String,
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    pub exact: bool,
    pub better: Option<String>,
    pub strength: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDto {
    pub metric: String,
    pub variant: String,
    pub nodes: Vec<NodeDto>,
    pub edges: Vec<EdgeDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDto {
    pub name: String,
    pub rating: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDto {
    pub from: String,
    pub to: String,
    pub style: String,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupDto {
    pub paradigm: String,
    pub problem: String,
    pub variant: String,
    pub baseline: String,
    pub baseline_seconds: f64,
    pub points: Vec<PointDto>,
}

impl SpeedupDto {
    pub fn from_curve(curve: &SpeedupCurve, variant: Variant) -> Self {
        SpeedupDto {
            paradigm: curve.paradigm.clone(),
            problem: curve.problem.clone(),
            variant: variant.name().into(),
            baseline: curve.baseline.name().into(),
            baseline_seconds: curve.baseline_seconds,
            points: curve
                .points
                .iter()
                .map(|p| {
                    let ci = p.ci.filter(|c| !c.unbounded);
                    PointDto {
                        threads: p.threads,
                        speedup: p.speedup,
                        ci_lo: ci.map(|c| c.lo),
                        ci_hi: ci.map(|c| c.hi),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointDto {
    pub threads: usize,
    pub speedup: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffDto {
    pub metric: String,
    pub expert_variant: String,
    pub base_variant: String,
    pub cells: Vec<DiffCellDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffCellDto {
    pub paradigm: String,
    pub problem: String,
    pub ratio: f64,
}

/// Pretty JSON whose floats are written with 17 significant digits.
struct G17<'a>(PrettyFormatter<'a>);

impl Formatter for G17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_g17(v).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn emit_json(report: &Report) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17(PrettyFormatter::new()));
    report.serialize(&mut ser).expect("report fields are always serializable");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn parse_json(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing to a Vec cannot fail.
    let _ = w.write_record(header);
    for r in rows {
        let _ = w.write_record(&r);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("UTF-8 fields")
}

pub fn metric_csv(report: &Report, metric: &str) -> String {
    csv_text(
        &["paradigm", "problem", "variant", "value", "ci_lo", "ci_hi", "samples"],
        report.metrics.iter().filter(|t| t.metric == metric).flat_map(|t| {
            t.cells.iter().map(|c| {
                vec![
                    c.paradigm.clone(),
                    c.problem.clone(),
                    t.variant.clone(),
                    fmt_g17(c.value),
                    opt(c.ci_lo),
                    opt(c.ci_hi),
                    c.samples.to_string(),
                ]
            })
        }),
    )
}

pub fn means_csv(means: &[MeanRow]) -> String {
    csv_text(
        &["paradigm", "problem", "variant", "threads", "samples", "mean", "ci_lo", "ci_hi"],
        means.iter().map(|m| {
            vec![
                m.paradigm.clone(),
                m.problem.clone(),
                m.variant.clone(),
                m.threads.to_string(),
                m.samples.to_string(),
                fmt_g17(m.mean),
                opt(m.ci.map(|c| c.lo)),
                opt(m.ci.map(|c| c.hi)),
            ]
        }),
    )
}

pub fn ratings_csv(report: &Report) -> String {
    csv_text(
        &["metric", "variant", "paradigm", "rating"],
        report.ratings.iter().flat_map(|s| {
            s.ratings.iter().map(|r| vec![s.metric.clone(), s.variant.clone(), r.paradigm.clone(), fmt_g17(r.rating)])
        }),
    )
}

pub fn pairwise_csv(report: &Report) -> String {
    csv_text(
        &["metric", "variant", "a", "b", "n", "w_plus", "w_minus", "p_value", "exact", "better", "strength"],
        report.pairwise.iter().map(|p| {
            vec![
                p.metric.clone(),
                p.variant.clone(),
                p.a.clone(),
                p.b.clone(),
                p.n.to_string(),
                fmt_g17(p.w_plus),
                fmt_g17(p.w_minus),
                fmt_g17(p.p_value),
                p.exact.to_string(),
                p.better.clone().unwrap_or_default(),
                p.strength.clone(),
            ]
        }),
    )
}

pub fn speedups_csv(report: &Report) -> String {
    csv_text(
        &["paradigm", "problem", "variant", "baseline", "baseline_seconds", "threads", "speedup", "ci_lo", "ci_hi"],
        report.speedups.iter().flat_map(|s| {
            s.points.iter().map(|p| {
                vec![
                    s.paradigm.clone(),
                    s.problem.clone(),
                    s.variant.clone(),
                    s.baseline.clone(),
                    fmt_g17(s.baseline_seconds),
                    p.threads.to_string(),
                    fmt_g17(p.speedup),
                    opt(p.ci_lo),
                    opt(p.ci_hi),
                ]
            })
        }),
    )
}

pub fn diffs_csv(report: &Report) -> String {
    csv_text(
        &["metric", "expert_variant", "base_variant", "paradigm", "problem", "ratio"],
        report.diffs.iter().flat_map(|d| {
            d.cells.iter().map(|c| {
                vec![
                    d.metric.clone(),
                    d.expert_variant.clone(),
                    d.base_variant.clone(),
                    c.paradigm.clone(),
                    c.problem.clone(),
                    fmt_g17(c.ratio),
                ]
            })
        }),
    )
}

/// The variant summarised for a metric: the most refined one present.
fn headline(variants: impl Iterator<Item = Variant> + Clone) -> Option<Variant> {
    [Variant::ExpertPar, Variant::Par, Variant::ExpertSeq, Variant::Seq]
        .into_iter()
        .find(|v| variants.clone().any(|x| x == *v))
}

fn heading(metric: Metric) -> &'static str {
    match metric {
        Metric::Loc => "Source code size",
        Metric::CodingTime => "Coding time",
        Metric::ExecTime => "Execution time",
        Metric::Speedup | Metric::InverseSpeedup => "Speedup",
    }
}

/// Ratings table in the layout of a language-by-metric overview, followed by
/// ordering edges and the headline values of every metric.
pub fn markdown(analysis: &Analysis) -> String {
    let report = &analysis.report;
    let mut out = String::from("# Benchmark summary\n\n");
    let columns: Vec<(Metric, Variant)> = METRICS
        .into_iter()
        .filter_map(|m| {
            let vs = report.ratings.iter().filter(|r| r.metric == m.name()).filter_map(|r| variant(&r.variant));
            headline(vs).map(|v| (m, v))
        })
        .collect();
    if columns.is_empty() {
        out.push_str("No complete tables to rate.\n");
    } else {
        let sets: Vec<&RatingSet> = columns
            .iter()
            .map(|(m, v)| {
                report.ratings.iter().find(|r| r.metric == m.name() && r.variant == v.name()).expect("present")
            })
            .collect();
        out.push_str("## Average relative ratings\n\n1.0 is best on every problem.\n\n| Paradigm |");
        for (m, v) in &columns {
            let _ = write!(out, " {} ({}) |", heading(*m), v.name());
        }
        out.push_str("\n|:--|");
        out.push_str(&"--:|".repeat(columns.len()));
        out.push('\n');
        let mut paradigms: Vec<&str> = Vec::new();
        for s in &sets {
            for r in &s.ratings {
                if !paradigms.contains(&r.paradigm.as_str()) {
                    paradigms.push(&r.paradigm);
                }
            }
        }
        for p in paradigms {
            let _ = write!(out, "| {p} |");
            for s in &sets {
                let best = s.ratings.iter().map(|r| r.rating).fold(f64::INFINITY, f64::min);
                match s.ratings.iter().find(|r| r.paradigm == p) {
                    Some(r) if format!("{:.1}", r.rating) == format!("{best:.1}") => {
                        let _ = write!(out, " **{:.1}** |", r.rating);
                    }
                    Some(r) => {
                        let _ = write!(out, " {:.1} |", r.rating);
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out.push_str("\n## Ordering\n\nAn edge points from the worse paradigm to the better one.\n\n");
        for (m, v) in &columns {
            let g = report.graphs.iter().find(|g| g.metric == m.name() && g.variant == v.name()).expect("present");
            let _ = write!(out, "- {} ({}):", heading(*m), v.name());
            if g.edges.is_empty() {
                out.push_str(" no significant differences\n");
                continue;
            }
            for (i, e) in g.edges.iter().enumerate() {
                let sep = if i == 0 { " " } else { ", " };
                let _ = write!(out, "{sep}{} -> {} ({}, p = {})", e.from, e.to, e.style, fmt_sig(e.p_value, 3));
            }
            out.push('\n');
        }
    }
    for m in METRICS {
        let tables = report.metrics.iter().filter(|t| t.metric == m.name());
        let Some(v) = headline(tables.clone().filter_map(|t| variant(&t.variant))) else { continue };
        let t = tables.clone().find(|t| t.variant == v.name()).expect("present");
        let _ = write!(out, "\n## {} ({})\n\n| Paradigm |", heading(m), v.name());
        let mut problems: Vec<&str> = Vec::new();
        let mut paradigms: Vec<&str> = Vec::new();
        for c in &t.cells {
            if !problems.contains(&c.problem.as_str()) {
                problems.push(&c.problem);
            }
            if !paradigms.contains(&c.paradigm.as_str()) {
                paradigms.push(&c.paradigm);
            }
        }
        for p in &problems {
            let _ = write!(out, " {p} |");
        }
        out.push_str("\n|:--|");
        out.push_str(&"--:|".repeat(problems.len()));
        out.push('\n');
        for l in paradigms {
            let _ = write!(out, "| {l} |");
            for p in &problems {
                match t.cells.iter().find(|c| c.paradigm == l && c.problem == *p) {
                    Some(c) => {
                        let _ = write!(out, " {} |", fmt_sig(c.value, 3));
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
    }
    out
}

fn variant(s: &str) -> Option<Variant> {
    Variant::parse_any(s)
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct WriteError {
    pub path: PathBuf,
    pub source: io::Error,
}

/// File name of a graph's DOT output: `<metric>.dot` for the metric's
/// headline variant, `<metric>-<variant>.dot` otherwise.
pub fn dot_file_name(analysis: &Analysis, metric: Metric, v: Variant) -> String {
    let head = headline(analysis.graphs.iter().filter(|g| g.metric == metric).map(|g| g.variant));
    if head == Some(v) {
        format!("{}.dot", metric.name())
    } else {
        format!("{}-{}.dot", metric.name(), v.name())
    }
}

/// Writes every artifact into `dir`, creating it if needed; returns the
/// paths written.
pub fn write_report(analysis: &Analysis, dir: &Path) -> Result<Vec<PathBuf>, WriteError> {
    std::fs::create_dir_all(dir).map_err(|source| WriteError { path: dir.into(), source })?;
    let mut files: Vec<(String, String)> = vec![
        ("report.json".into(), emit_json(&analysis.report)),
        ("summary.md".into(), markdown(analysis)),
        ("ratings.csv".into(), ratings_csv(&analysis.report)),
        ("pairwise.csv".into(), pairwise_csv(&analysis.report)),
        ("speedups.csv".into(), speedups_csv(&analysis.report)),
        ("diffs.csv".into(), diffs_csv(&analysis.report)),
    ];
    if !analysis.means.is_empty() {
        files.push(("means.csv".into(), means_csv(&analysis.means)));
    }
    for m in METRICS {
        if analysis.report.metrics.iter().any(|t| t.metric == m.name()) {
            files.push((format!("{}.csv", m.name()), metric_csv(&analysis.report, m.name())));
        }
    }
    for g in &analysis.graphs {
        files.push((dot_file_name(analysis, g.metric, g.variant), emit_dot(&g.graph)));
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| WriteError { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
