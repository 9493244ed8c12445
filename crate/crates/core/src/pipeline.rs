//! Multi-step runs shared by the command line and the tests: bound versus
//! simulation curves, and the radius comparison table.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::capability::{table1, Table1Row};
use crate::bounds::dfr::{qc_analyzer, BoundReport, DfrAnalyzer, Method};
use crate::code::gamma::distinct_row_profiles;
use crate::code::{ParityCheckMatrix, Structure};
use crate::decoder::Thresholds;
use crate::error::Result;
use crate::montecarlo::{estimate_dfr, DfrEstimate, TrialPlan};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// `key: value` pairs written as `#` comment lines ahead of a CSV table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn new() -> Self {
        Self(vec![("tool".into(), TOOL_VERSION.into())])
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Code description lines.
    pub fn code(mut self, h: &ParityCheckMatrix) -> Self {
        self.push("fingerprint", h.fingerprint());
        self.push("n", h.n());
        self.push("r", h.r());
        if let Some(p) = h.block_size() {
            self.push("p", p);
        }
        self
    }
}

/// Writes the metadata block followed by the serialized rows.
pub fn write_csv<W: Write, T: Serialize>(mut out: W, meta: &Metadata, rows: &[T]) -> Result<()> {
    for (k, v) in &meta.0 {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Bound evaluator choosing the fastest exact path for the structure.
pub fn analyzer_for(h: &ParityCheckMatrix, max_t: u64) -> Result<(DfrAnalyzer, Method)> {
    match h.structure() {
        Structure::Qc2 { .. } => Ok((qc_analyzer(h, max_t)?, Method::Qc)),
        _ => Ok((DfrAnalyzer::new(&distinct_row_profiles(h), max_t), Method::Th4)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub t: usize,
    pub b: usize,
    pub bound_log2: f64,
    pub bound: f64,
    pub dfr_hat: f64,
    pub stderr: f64,
    pub trials: u64,
    pub failures: u64,
    pub method: String,
}

impl CompareRow {
    fn new(report: &BoundReport, b: usize, est: &DfrEstimate, method: Method) -> Self {
        Self {
            t: est.t,
            b,
            bound_log2: report.log2_bound,
            bound: report.value(),
            dfr_hat: est.p_hat,
            stderr: est.std_err,
            trials: est.trials,
            failures: est.failures,
            method: method.to_string(),
        }
    }
}

/// Bound and Monte Carlo estimate with the same threshold for every `t`.
/// `plan.t` is ignored; each weight reuses the plan's seed.
pub fn compare(h: &ParityCheckMatrix, ts: &[usize], b: usize, plan: &TrialPlan) -> Result<Vec<CompareRow>> {
    let max_t = ts.iter().copied().max().unwrap_or(0) as u64;
    let (analyzer, method) = analyzer_for(h, max_t)?;
    let th = Thresholds::Uniform(b);
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let report = analyzer.th4(t as u64, &th)?;
        let est = estimate_dfr(h, &TrialPlan { t, ..plan.clone() }, &th)?;
        log::info!("t={t} log2 bound={:.3} dfr={:.3e} ({} trials)", report.log2_bound, est.p_hat, est.trials);
        rows.push(CompareRow::new(&report, b, &est, method));
    }
    Ok(rows)
}

/// Per-girth summary of the radius comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Summary {
    pub g: u64,
    pub ours: &'static str,
    pub theirs: &'static str,
    /// Column weights with a strict improvement.
    pub improved: Vec<u64>,
    pub range: String,
}

fn formulas(g: u64) -> (&'static str, &'static str) {
    match g {
        4 => (">= floor(v/(2 delta))", "0"),
        6 => ("floor(v/2)", "ceil((v+2)/4)-1"),
        8 => ("floor(v/2)", "ceil(v/2)-1"),
        _ => ("floor(v/2)", "ceil((v^2+4)/8)-1"),
    }
}

/// Compact description of `set` within `lo..=hi`.
pub fn describe_range(set: &[u64], lo: u64, hi: u64) -> String {
    let all: Vec<u64> = (lo..=hi).collect();
    if set == all.as_slice() {
        return "all v".into();
    }
    let missing: Vec<u64> = all.iter().copied().filter(|v| !set.contains(v)).collect();
    if missing.len() <= 3 {
        return format!("all v except {}", join(&missing));
    }
    let evens: Vec<u64> = all.iter().copied().filter(|v| v % 2 == 0).collect();
    if let Some(&first) = set.first() {
        if set.iter().all(|v| v % 2 == 0) && evens.iter().filter(|&&v| v >= first).eq(set.iter()) {
            return format!("even v >= {first}");
        }
    }
    if set.is_empty() {
        return "none".into();
    }
    format!("v in {{{}}}", join(set))
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

pub fn table1_summary(lo: u64, hi: u64) -> (Vec<Table1Row>, Vec<Table1Summary>) {
    let rows = table1(lo..=hi);
    let summary = [4, 6, 8, 10]
        .into_iter()
        .map(|g| {
            let improved: Vec<u64> = rows.iter().filter(|r| r.g == g && r.improves()).map(|r| r.v).collect();
            let (ours, theirs) = formulas(g);
            let range = describe_range(&improved, lo, hi);
            Table1Summary { g, ours, theirs, improved, range }
        })
        .collect();
    (rows, summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_qc2;

    #[test]
    fn range_descriptions() {
        assert_eq!(describe_range(&(1..=10).collect::<Vec<_>>(), 1, 10), "all v");
        assert_eq!(describe_range(&[2, 4, 5, 6, 7, 8, 9, 10], 1, 10), "all v except 1,3");
        assert_eq!(describe_range(&[2, 4, 6, 8, 10], 1, 10), "even v >= 2");
        assert_eq!(describe_range(&[2], 1, 10), "v in {2}");
    }

    #[test]
    fn compare_rows_share_thresholds() {
        let h = build_qc2(31, &[0, 2, 7, 11, 19], &[1, 3, 4, 16, 25]).unwrap();
        let mut plan = TrialPlan::new(0, 20_000, 5);
        plan.stop_failures = 50;
        let rows = compare(&h, &[1, 2, 4, 8], 3, &plan).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.b, 3);
            assert_eq!(r.method, "qc");
            assert!(r.bound + 3.0 * r.stderr >= r.dfr_hat);
        }
        let mut buf = Vec::new();
        let meta = Metadata::new().code(&h).with("seed", plan.seed);
        write_csv(&mut buf, &meta, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# tool: "));
        assert!(text.contains(&format!("# fingerprint: {}", h.fingerprint())));
        assert!(text.contains("# seed: 5"));
        assert!(text.contains("t,b,bound_log2,bound,dfr_hat,stderr,trials,failures,method"));
    }
}
