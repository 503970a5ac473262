//! Text formats: kernel inputs and outputs, measurement and fixture CSVs,
//! commit logs.
//!
//! Kernel data is whitespace-separated text whose first line gives the
//! dimensions:
//!
//! * integer matrix and mask: `nrows ncols`, then one row per line (masks as
//!   `0`/`1`);
//! * point list: `nelts`, then one `row col` pair per line;
//! * real vector: `n`, then one value per line;
//! * real matrix: `n n`, then one row per line.
//!
//! Reals are written with 17 significant digits so they read back exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use multibench_core::coding_time::{CommitEvent, Variant};
use multibench_core::kernels::{IntMatrix, KernelInput, KernelOutput, Mask, PointList, RealMatrix, RealVector};
use multibench_core::Problem;
use serde::Deserialize;

use crate::runner::MeasurementRecord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    /// 1-based; 0 when the error concerns the whole input.
    pub line: usize,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError { line, message: message.into() }
    }
}

/// `v` with `digits` significant digits, in the style of C's `%.<digits>g`.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (p as i32 - 1 - exp) as usize, v)).to_string()
    }
}

/// 17 significant digits: enough for every `f64` to read back unchanged.
pub fn fmt_g17(v: f64) -> String {
    fmt_sig(v, 17)
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Whitespace-separated tokens with their line numbers.
struct Tokens<'a> {
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let tokens =
            text.lines().enumerate().flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t))).collect();
        Tokens { tokens, pos: 0, last_line: text.lines().count() }
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<T, FormatError> {
        let Some(&(line, tok)) = self.tokens.get(self.pos) else {
            return Err(FormatError::new(self.last_line, format!("unexpected end of input, expected {what}")));
        };
        self.pos += 1;
        tok.parse().map_err(|_| FormatError::new(line, format!("expected {what}, found {tok:?}")))
    }

    fn line(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.last_line, |t| t.0)
    }

    fn finish(&self) -> Result<(), FormatError> {
        match self.tokens.get(self.pos) {
            Some(&(line, tok)) => Err(FormatError::new(line, format!("unexpected trailing {tok:?}"))),
            None => Ok(()),
        }
    }
}

fn read_dims(t: &mut Tokens<'_>) -> Result<(usize, usize), FormatError> {
    Ok((t.next("row count")?, t.next("column count")?))
}

fn cells<T: FromStr>(t: &mut Tokens<'_>, n: usize, what: &str) -> Result<Vec<T>, FormatError> {
    let mut v = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        v.push(t.next(what)?);
    }
    Ok(v)
}

fn checked_cells(line: usize, a: usize, b: usize) -> Result<usize, FormatError> {
    a.checked_mul(b).ok_or_else(|| FormatError::new(line, "dimensions overflow"))
}

fn read_int_matrix(t: &mut Tokens<'_>) -> Result<IntMatrix, FormatError> {
    let line = t.line();
    let (r, c) = read_dims(t)?;
    let data = cells(t, checked_cells(line, r, c)?, "matrix element")?;
    IntMatrix::new(r, c, data).map_err(|e| FormatError::new(line, e.to_string()))
}

fn read_mask(t: &mut Tokens<'_>) -> Result<Mask, FormatError> {
    let line = t.line();
    let (r, c) = read_dims(t)?;
    let bits: Vec<u8> = cells(t, checked_cells(line, r, c)?, "mask bit 0 or 1")?;
    if bits.iter().any(|&b| b > 1) {
        return Err(FormatError::new(line, "mask bits must be 0 or 1"));
    }
    Mask::new(r, c, bits.into_iter().map(|b| b == 1).collect()).map_err(|e| FormatError::new(line, e.to_string()))
}

fn read_points(t: &mut Tokens<'_>) -> Result<PointList, FormatError> {
    let n: usize = t.next("point count")?;
    let mut points = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        points.push((t.next("point row")?, t.next("point column")?));
    }
    Ok(PointList::new(points))
}

fn read_real_vector(t: &mut Tokens<'_>) -> Result<RealVector, FormatError> {
    let n: usize = t.next("vector length")?;
    Ok(RealVector::new(cells(t, n, "real")?))
}

fn read_real_matrix(t: &mut Tokens<'_>) -> Result<RealMatrix, FormatError> {
    let line = t.line();
    let (r, c) = read_dims(t)?;
    if r != c {
        return Err(FormatError::new(line, "real matrix must be square"));
    }
    let data = cells(t, checked_cells(line, r, c)?, "real")?;
    RealMatrix::new(r, data).map_err(|e| FormatError::new(line, e.to_string()))
}

pub fn write_int_matrix(out: &mut String, m: &IntMatrix) {
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        join_line(out, m.row(r).iter().map(|v| v.to_string()));
    }
}

pub fn write_mask(out: &mut String, m: &Mask) {
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        join_line(out, m.row(r).iter().map(|&b| if b { "1" } else { "0" }.to_string()));
    }
}

pub fn write_points(out: &mut String, p: &PointList) {
    let _ = writeln!(out, "{}", p.len());
    for (r, c) in &p.points {
        let _ = writeln!(out, "{r} {c}");
    }
}

pub fn write_real_vector(out: &mut String, v: &RealVector) {
    let _ = writeln!(out, "{}", v.len());
    for x in &v.data {
        out.push_str(&fmt_g17(*x));
        out.push('\n');
    }
}

pub fn write_real_matrix(out: &mut String, m: &RealMatrix) {
    let _ = writeln!(out, "{} {}", m.n(), m.n());
    for i in 0..m.n() {
        join_line(out, m.row(i).iter().map(|&x| fmt_g17(x)));
    }
}

fn join_line(out: &mut String, items: impl Iterator<Item = String>) {
    for (i, s) in items.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&s);
    }
    out.push('\n');
}

/// Parses the contents of `<problem>.in`.
///
/// randmat takes `nrows ncols seed`; thresh a matrix then `percent`; winnow a
/// matrix, a mask and `nelts`; outer a point list; product a real matrix and a
/// real vector; chain `nelts seed percent`.
pub fn read_input(problem: Problem, text: &str) -> Result<KernelInput, FormatError> {
    let mut t = Tokens::new(text);
    let input = match problem {
        Problem::Randmat => {
            KernelInput::Randmat { nrows: t.next("nrows")?, ncols: t.next("ncols")?, seed: t.next("seed")? }
        }
        Problem::Thresh => KernelInput::Thresh { matrix: read_int_matrix(&mut t)?, percent: t.next("percent")? },
        Problem::Winnow => {
            KernelInput::Winnow { matrix: read_int_matrix(&mut t)?, mask: read_mask(&mut t)?, nelts: t.next("nelts")? }
        }
        Problem::Outer => KernelInput::Outer { points: read_points(&mut t)? },
        Problem::Product => {
            KernelInput::Product { matrix: read_real_matrix(&mut t)?, vector: read_real_vector(&mut t)? }
        }
        Problem::Chain => {
            KernelInput::Chain { nelts: t.next("nelts")?, seed: t.next("seed")?, percent: t.next("percent")? }
        }
    };
    t.finish()?;
    Ok(input)
}

pub fn write_input(input: &KernelInput) -> String {
    let mut out = String::new();
    match input {
        KernelInput::Randmat { nrows, ncols, seed } => {
            let _ = writeln!(out, "{nrows} {ncols} {seed}");
        }
        KernelInput::Thresh { matrix, percent } => {
            write_int_matrix(&mut out, matrix);
            let _ = writeln!(out, "{percent}");
        }
        KernelInput::Winnow { matrix, mask, nelts } => {
            write_int_matrix(&mut out, matrix);
            write_mask(&mut out, mask);
            let _ = writeln!(out, "{nelts}");
        }
        KernelInput::Outer { points } => write_points(&mut out, points),
        KernelInput::Product { matrix, vector } => {
            write_real_matrix(&mut out, matrix);
            write_real_vector(&mut out, vector);
        }
        KernelInput::Chain { nelts, seed, percent } => {
            let _ = writeln!(out, "{nelts} {seed} {percent}");
        }
    }
    out
}

pub fn write_output(output: &KernelOutput) -> String {
    let mut out = String::new();
    match output {
        KernelOutput::Matrix(m) => write_int_matrix(&mut out, m),
        KernelOutput::Mask(m) => write_mask(&mut out, m),
        KernelOutput::Points(p) => write_points(&mut out, p),
        KernelOutput::Outer(m, v) => {
            write_real_matrix(&mut out, m);
            write_real_vector(&mut out, v);
        }
        KernelOutput::Vector(v) => write_real_vector(&mut out, v),
    }
    out
}

pub const MEASUREMENT_HEADER: [&str; 6] = ["paradigm", "problem", "variant", "threads", "rep", "seconds"];
pub const FIXTURE_HEADER: [&str; 4] = ["paradigm", "problem", "variant", "value"];

pub fn write_measurements(records: &[MeasurementRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing to a Vec cannot fail.
    let _ = w.write_record(MEASUREMENT_HEADER);
    for r in records {
        let _ = w.write_record([
            r.paradigm.as_str(),
            r.problem.as_str(),
            r.variant.as_str(),
            &r.threads.to_string(),
            &r.rep.to_string(),
            &fmt_g17(r.seconds),
        ]);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}

fn csv_rows<T: for<'de> Deserialize<'de>>(text: &str, header: &[&str]) -> Result<Vec<(usize, T)>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let Some(first) = records.next() else {
        return Ok(Vec::new());
    };
    let to_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        FormatError::new(line, e.to_string())
    };
    let first = first.map_err(to_err)?;
    let line = first.position().map_or(1, |p| p.line() as usize);
    if first.iter().ne(header.iter().copied()) {
        return Err(FormatError::new(line, format!("expected header `{}`", header.join(","))));
    }
    let header_rec = csv::StringRecord::from(header.to_vec());
    records
        .map(|rec| {
            let rec = rec.map_err(to_err)?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let row = rec.deserialize(Some(&header_rec)).map_err(|e| FormatError::new(line, e.to_string()))?;
            Ok((line, row))
        })
        .collect()
}

/// Parses a measurement CSV. An input without any line, or with only the
/// header, yields no records.
pub fn read_measurements(text: &str) -> Result<Vec<MeasurementRecord>, FormatError> {
    csv_rows::<MeasurementRecord>(text, &MEASUREMENT_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            if Variant::parse_any(&r.variant).is_none() {
                return Err(FormatError::new(line, format!("unknown variant {:?}", r.variant)));
            }
            if r.threads == 0 {
                return Err(FormatError::new(line, "threads must be at least 1"));
            }
            if !(r.seconds.is_finite() && r.seconds > 0.0) {
                return Err(FormatError::new(line, "seconds must be finite and positive"));
            }
            Ok(r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct FixtureRow {
    pub paradigm: String,
    pub problem: String,
    pub variant: String,
    pub value: f64,
}

/// Parses a `paradigm,problem,variant,value` table; `#` lines are comments.
pub fn read_fixture(text: &str) -> Result<Vec<FixtureRow>, FormatError> {
    csv_rows::<FixtureRow>(text, &FIXTURE_HEADER)?
        .into_iter()
        .map(|(line, r)| match Variant::parse_any(&r.variant) {
            None => Err(FormatError::new(line, format!("unknown variant {:?}", r.variant))),
            Some(_) if !(r.value.is_finite() && r.value > 0.0) => {
                Err(FormatError::new(line, "value must be finite and positive"))
            }
            Some(_) => Ok(r),
        })
        .collect()
}

/// Seconds since the Unix epoch; timestamps without an offset are UTC.
fn parse_timestamp(s: &str) -> Option<i64> {
    if let Ok(t) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp());
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| chrono::NaiveDateTime::parse_from_str(s, f).ok())
        .map(|t| t.and_utc().timestamp())
}

/// Parses `timestamp<TAB>language-problem-variant keyword` lines. Blank lines
/// are skipped. Each event is paired with its line number.
pub fn read_commit_log(text: &str) -> Result<Vec<(usize, CommitEvent)>, FormatError> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (ts, msg) = line.split_once('\t').ok_or_else(|| FormatError::new(n, "expected `timestamp<TAB>message`"))?;
        let ts = parse_timestamp(ts.trim())
            .ok_or_else(|| FormatError::new(n, format!("invalid ISO 8601 timestamp {:?}", ts.trim())))?;
        let ev = CommitEvent::parse(ts, msg).map_err(|e| FormatError::new(n, e.to_string()))?;
        events.push((n, ev));
    }
    Ok(events)
}
