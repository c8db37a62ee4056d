//! Report document and its JSON / CSV renderings.

use koch_core::fixed_points::FixedPointRecord;
use koch_core::numeric::{Cx, Multiset};
use koch_core::space::{KochIndex, TypePair};
use koch_core::spectral::SpectrumReport;
use koch_core::suites::SuiteOutcome;
use serde::Serialize;
use std::io::Write;

/// Failures listed per suite; the full count is always reported.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JsonCx {
    pub re: f64,
    pub im: f64,
}

impl From<Cx> for JsonCx {
    fn from(z: Cx) -> Self {
        Self { re: z.re, im: z.im }
    }
}

fn values(m: &Multiset) -> Vec<JsonCx> {
    m.values().iter().map(|z| JsonCx::from(*z)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub d: Option<u32>,
    pub beta_index: Option<u32>,
    pub beta: Option<JsonCx>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub c: Option<JsonCx>,
    pub tol_residual: f64,
    pub tol_match: f64,
    pub tol_identity: f64,
    pub samples: usize,
    pub seed: u64,
    pub degree_cap: u64,
    pub sweep: Option<SweepEcho>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEcho {
    pub ds: Vec<u64>,
    pub js: Option<Vec<u64>>,
    pub ks: Vec<u64>,
    pub ms: Vec<u64>,
    pub max_cells: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexEcho {
    pub d: u32,
    pub beta_index: u32,
    pub beta: JsonCx,
    pub k: usize,
    pub m: usize,
}

impl IndexEcho {
    /// For index cells that failed validation; `beta` is still `exp(2 pi i j / d)`.
    pub fn raw(d: u32, beta_index: u32, k: usize, m: usize) -> Self {
        let beta = Cx::from_polar(1.0, std::f64::consts::TAU * beta_index as f64 / d.max(1) as f64);
        Self {
            d,
            beta_index,
            beta: beta.into(),
            k,
            m,
        }
    }
}

impl From<&KochIndex> for IndexEcho {
    fn from(i: &KochIndex) -> Self {
        Self {
            d: i.d,
            beta_index: i.beta_index,
            beta: i.beta().into(),
            k: i.k,
            m: i.m,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointSummary {
    pub index: IndexEcho,
    pub c: JsonCx,
    pub exact_type: TypePair,
    pub lambda: JsonCx,
    pub in_delta: bool,
    pub is_trivial: bool,
    pub multiplicity: usize,
    pub residual_param: f64,
    pub residual_fixed: f64,
    pub orbit: Vec<JsonCx>,
}

impl From<&FixedPointRecord> for FixedPointSummary {
    fn from(r: &FixedPointRecord) -> Self {
        Self {
            index: (&r.index).into(),
            c: r.c.into(),
            exact_type: r.exact_type,
            lambda: r.lambda.into(),
            in_delta: r.in_delta,
            is_trivial: r.is_trivial,
            multiplicity: r.multiplicity,
            residual_param: r.residual_param,
            residual_fixed: r.residual_fixed,
            orbit: r.orbit.iter().map(|z| JsonCx::from(*z)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub index: IndexEcho,
    pub c: JsonCx,
    pub exact_type: TypePair,
    pub case: &'static str,
    pub computed: Vec<JsonCx>,
    pub inner: Vec<JsonCx>,
    pub outer_predicted: Vec<JsonCx>,
    pub matched: bool,
    pub match_error: Option<f64>,
    pub match_failure: Option<String>,
    pub zero_or_expanding: bool,
    pub inner_expanding: bool,
    pub coincidences: usize,
    pub passed: bool,
}

impl SpectrumSummary {
    pub fn new(index: &KochIndex, s: &SpectrumReport) -> Self {
        Self {
            index: index.into(),
            c: s.c.into(),
            exact_type: s.exact_type,
            case: s.case.label(),
            computed: values(&s.computed),
            inner: values(&s.inner),
            outer_predicted: values(&s.outer_predicted),
            matched: s.matched,
            match_error: s.match_error.is_finite().then_some(s.match_error),
            match_failure: s.match_failure.clone(),
            zero_or_expanding: s.zero_or_expanding,
            inner_expanding: s.inner_expanding,
            coincidences: s.coincidences,
            passed: s.passed(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub max_error: f64,
    pub failure_count: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl From<&SuiteOutcome> for SuiteSummary {
    fn from(o: &SuiteOutcome) -> Self {
        Self {
            name: o.name.clone(),
            passed: o.passed(),
            checks: o.report.checks,
            max_error: o.report.max_error,
            failure_count: o.report.failures.len(),
            failures: o.report.failures.iter().take(MAX_LISTED_FAILURES).cloned().collect(),
            notes: o.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub index: IndexEcho,
    /// `"ok"` or `"skipped"`.
    pub status: &'static str,
    pub reason: Option<String>,
    pub fixed_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub version: &'static str,
    pub command: &'static str,
    pub config: ConfigEcho,
    pub cells: Vec<CellSummary>,
    pub fixed_points: Vec<FixedPointSummary>,
    pub spectra: Vec<SpectrumSummary>,
    pub suites: Vec<SuiteSummary>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub timing: Option<Timing>,
}

impl ReportDocument {
    pub fn new(command: &'static str, config: ConfigEcho) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            cells: Vec::new(),
            fixed_points: Vec::new(),
            spectra: Vec::new(),
            suites: Vec::new(),
            notes: Vec::new(),
            passed: true,
            timing: None,
        }
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    /// One table per command: fixed points for `enumerate`, spectra for
    /// `spectrum` and `sweep`, suites for `verify`.
    pub fn write_csv(&self, out: &mut dyn Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match self.command {
            "enumerate" => {
                for f in &self.fixed_points {
                    w.serialize(FixedPointRow::from(f))?;
                }
            }
            "verify" => {
                for s in &self.suites {
                    w.serialize(SuiteRow::from(s))?;
                }
            }
            _ => {
                for s in &self.spectra {
                    w.serialize(SpectrumRow::from(s))?;
                }
                for c in self.cells.iter().filter(|c| c.status == "skipped") {
                    w.serialize(SpectrumRow::skipped(c))?;
                }
            }
        }
        if self.is_empty_table() {
            w.write_record(self.header())?;
        }
        w.flush()?;
        Ok(())
    }

    fn is_empty_table(&self) -> bool {
        match self.command {
            "enumerate" => self.fixed_points.is_empty(),
            "verify" => self.suites.is_empty(),
            _ => self.spectra.is_empty() && self.cells.iter().all(|c| c.status != "skipped"),
        }
    }

    fn header(&self) -> &'static [&'static str] {
        match self.command {
            "enumerate" => FIXED_POINT_COLUMNS,
            "verify" => SUITE_COLUMNS,
            _ => SPECTRUM_COLUMNS,
        }
    }
}

fn join(values: &[JsonCx]) -> String {
    values
        .iter()
        .map(|z| {
            let sign = if z.im.is_sign_negative() { '-' } else { '+' };
            format!("{:?}{sign}{:?}i", z.re, z.im.abs())
        })
        .collect::<Vec<_>>()
        .join(";")
}

const FIXED_POINT_COLUMNS: &[&str] = &[
    "d",
    "beta_index",
    "k",
    "m",
    "c_re",
    "c_im",
    "exact_k",
    "exact_m",
    "lambda_re",
    "lambda_im",
    "in_delta",
    "is_trivial",
    "multiplicity",
    "residual_param",
    "residual_fixed",
];

#[derive(Serialize)]
struct FixedPointRow {
    d: u32,
    beta_index: u32,
    k: usize,
    m: usize,
    c_re: f64,
    c_im: f64,
    exact_k: usize,
    exact_m: usize,
    lambda_re: f64,
    lambda_im: f64,
    in_delta: bool,
    is_trivial: bool,
    multiplicity: usize,
    residual_param: f64,
    residual_fixed: f64,
}

impl From<&FixedPointSummary> for FixedPointRow {
    fn from(f: &FixedPointSummary) -> Self {
        Self {
            d: f.index.d,
            beta_index: f.index.beta_index,
            k: f.index.k,
            m: f.index.m,
            c_re: f.c.re,
            c_im: f.c.im,
            exact_k: f.exact_type.k,
            exact_m: f.exact_type.m,
            lambda_re: f.lambda.re,
            lambda_im: f.lambda.im,
            in_delta: f.in_delta,
            is_trivial: f.is_trivial,
            multiplicity: f.multiplicity,
            residual_param: f.residual_param,
            residual_fixed: f.residual_fixed,
        }
    }
}

const SPECTRUM_COLUMNS: &[&str] = &[
    "d",
    "beta_index",
    "k",
    "m",
    "c_re",
    "c_im",
    "exact_k",
    "exact_m",
    "case",
    "computed",
    "inner",
    "outer_predicted",
    "match_error",
    "verdict",
    "reason",
];

#[derive(Serialize)]
struct SpectrumRow {
    d: u32,
    beta_index: u32,
    k: usize,
    m: usize,
    c_re: Option<f64>,
    c_im: Option<f64>,
    exact_k: Option<usize>,
    exact_m: Option<usize>,
    case: &'static str,
    computed: String,
    inner: String,
    outer_predicted: String,
    match_error: Option<f64>,
    verdict: &'static str,
    reason: String,
}

impl From<&SpectrumSummary> for SpectrumRow {
    fn from(s: &SpectrumSummary) -> Self {
        Self {
            d: s.index.d,
            beta_index: s.index.beta_index,
            k: s.index.k,
            m: s.index.m,
            c_re: Some(s.c.re),
            c_im: Some(s.c.im),
            exact_k: Some(s.exact_type.k),
            exact_m: Some(s.exact_type.m),
            case: s.case,
            computed: join(&s.computed),
            inner: join(&s.inner),
            outer_predicted: join(&s.outer_predicted),
            match_error: s.match_error,
            verdict: if s.passed { "pass" } else { "fail" },
            reason: s.match_failure.clone().unwrap_or_default(),
        }
    }
}

impl SpectrumRow {
    fn skipped(c: &CellSummary) -> Self {
        Self {
            d: c.index.d,
            beta_index: c.index.beta_index,
            k: c.index.k,
            m: c.index.m,
            c_re: None,
            c_im: None,
            exact_k: None,
            exact_m: None,
            case: "",
            computed: String::new(),
            inner: String::new(),
            outer_predicted: String::new(),
            match_error: None,
            verdict: "skipped",
            reason: c.reason.clone().unwrap_or_default(),
        }
    }
}

const SUITE_COLUMNS: &[&str] = &["suite", "passed", "checks", "max_error", "failure_count"];

#[derive(Serialize)]
struct SuiteRow {
    suite: String,
    passed: bool,
    checks: usize,
    max_error: f64,
    failure_count: usize,
}

impl From<&SuiteSummary> for SuiteRow {
    fn from(s: &SuiteSummary) -> Self {
        Self {
            suite: s.name.clone(),
            passed: s.passed,
            checks: s.checks,
            max_error: s.max_error,
            failure_count: s.failure_count,
        }
    }
}
