//! File formats: the edge-list text format, JSON reports and benchmark CSV.
//!
//! Edge list: UTF-8, first line `n <count>`, then one `u\tv\tw` line per
//! edge with `u < v`, sorted lexicographically, weights printed with 17
//! significant digits (`%.17g`). Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::coherence::CoherenceValue;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::greedy::{Algorithm, SelectionReport};

/// Formats like C's `%.17g`: shortest of fixed/scientific with 17
/// significant digits and trailing zeros removed. Round-trips every f64.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.n());
    for e in g.edges() {
        writeln!(out, "{}\t{}\t{}", e.u, e.v, format_g17(e.w)).unwrap();
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        match n {
            None => {
                let count = line
                    .strip_prefix("n ")
                    .ok_or_else(|| err(format!("expected 'n <count>', found '{line}'")))?;
                n = Some(count.trim().parse().map_err(|e| err(format!("bad node count: {e}")))?);
            }
            Some(_) => {
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 3 {
                    return Err(err(format!("expected 'u<TAB>v<TAB>w', found '{line}'")));
                }
                let u: usize = fields[0].trim().parse().map_err(|e| err(format!("bad u: {e}")))?;
                let v: usize = fields[1].trim().parse().map_err(|e| err(format!("bad v: {e}")))?;
                let w: f64 = fields[2].trim().parse().map_err(|e| err(format!("bad weight: {e}")))?;
                edges.push(Edge::new(u, v, w));
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing 'n <count>' header".into(),
    })?;
    Graph::new(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn save_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    fs::write(path, write_edge_list(g))?;
    Ok(())
}

/// JSON report of a greedy or tree run. Field order is the on-disk order.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile<C: Serialize> {
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub config: C,
    pub selected: Vec<(usize, usize, f64)>,
    pub gains: Vec<f64>,
    pub trace_before: f64,
    pub trace_after: f64,
    /// `None` (JSON `null`) for a disconnected graph.
    pub coherence_before: Option<f64>,
    pub coherence_after: Option<f64>,
    pub eval_counts: Vec<usize>,
    pub wall_times_s: Vec<f64>,
}

impl<C: Serialize> ReportFile<C> {
    /// With `timings == false` every wall time is written as 0 so that
    /// reruns produce byte-identical files.
    pub fn new(
        report: &SelectionReport,
        config: C,
        coherence_before: CoherenceValue,
        coherence_after: CoherenceValue,
        timings: bool,
    ) -> Self {
        let finite = |c: CoherenceValue| c.is_finite().then_some(c.value);
        ReportFile {
            algorithm: report.algorithm,
            seed: report.seed,
            config,
            selected: report.selected.iter().map(|e| (e.u, e.v, e.w)).collect(),
            gains: report.gains.clone(),
            trace_before: report.trace_before,
            trace_after: report.trace_after,
            coherence_before: finite(coherence_before),
            coherence_after: finite(coherence_after),
            eval_counts: report.eval_counts.clone(),
            wall_times_s: if timings {
                report.wall_times.clone()
            } else {
                vec![0.0; report.wall_times.len()]
            },
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// One row of the naive-vs-lazy benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRecord {
    pub n: usize,
    pub algorithm: Algorithm,
    pub evals: usize,
    pub seconds: f64,
    pub trace_before: f64,
    pub trace_after: f64,
}

pub const BENCHMARK_HEADER: &str = "n,algorithm,evals,seconds,trace_before,trace_after";

pub fn benchmark_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from(BENCHMARK_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.algorithm,
            r.evals,
            format_g17(r.seconds),
            format_g17(r.trace_before),
            format_g17(r.trace_after)
        )
        .unwrap();
    }
    out
}
