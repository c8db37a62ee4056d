use crate::args::{parse_complex, parse_range, Command, GlobalArgs, SweepArgs};
use crate::report::{
    CellSummary, ConfigEcho, FixedPointSummary, IndexEcho, ReportDocument, SpectrumSummary, SuiteSummary, SweepEcho,
};
use koch_core::fixed_points::{enumerate_fixed_points, fixed_point_record, parameter_residual, FixedPointRecord};
use koch_core::numeric::Cx;
use koch_core::space::KochIndex;
use koch_core::spectral::verify_spectrum;
use koch_core::suites::{cell_suites, default_grid, derive_seed, enumerate_cell, global_suites, merge, SuiteConfig};
use koch_core::KochError;
use rayon::prelude::*;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or values; exit code 1.
    Usage(String),
    /// A numerical routine failed; exit code 2.
    Numeric {
        kind: String,
        message: String,
        residual: Option<f64>,
    },
}

impl From<KochError> for CliError {
    fn from(e: KochError) -> Self {
        let debug = format!("{e:?}");
        let kind = debug
            .split(|ch: char| !ch.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_string();
        CliError::Numeric {
            kind,
            message: e.to_string(),
            residual: None,
        }
    }
}

type CmdResult = Result<ReportDocument, CliError>;

pub fn run_command(command: &Command, g: &GlobalArgs) -> CmdResult {
    validate(g)?;
    match command {
        Command::Enumerate => enumerate(g),
        Command::Spectrum { c } => spectrum(g, c.as_deref()),
        Command::Verify => verify(g),
        Command::Sweep(s) => sweep(g, s),
    }
}

fn validate(g: &GlobalArgs) -> Result<(), CliError> {
    for (name, v) in [("--tol-residual", g.tol_residual), ("--tol-match", g.tol_match)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Usage(format!("{name} must be a positive number, got {v}")));
        }
    }
    Ok(())
}

fn suite_config(g: &GlobalArgs) -> SuiteConfig {
    SuiteConfig {
        tol_match: g.tol_match,
        tol_residual: g.tol_residual,
        samples: g.samples,
        seed: g.seed,
        degree_cap: g.degree_cap,
        ..SuiteConfig::default()
    }
}

fn echo(g: &GlobalArgs) -> ConfigEcho {
    let beta = match (g.d, g.beta_index) {
        (Some(d), Some(j)) if j >= 1 && j < d => KochIndex::new(d, j, 0, 1).ok().map(|i| i.beta().into()),
        _ => None,
    };
    ConfigEcho {
        d: g.d,
        beta_index: g.beta_index,
        beta,
        k: g.k,
        m: g.m,
        c: None,
        tol_residual: g.tol_residual,
        tol_match: g.tol_match,
        tol_identity: SuiteConfig::default().tol_identity,
        samples: g.samples,
        seed: g.seed,
        degree_cap: g.degree_cap,
        sweep: None,
    }
}

fn usage_index(e: KochError) -> CliError {
    CliError::Usage(e.to_string())
}

fn required_index(g: &GlobalArgs) -> Result<KochIndex, CliError> {
    match (g.d, g.beta_index, g.k, g.m) {
        (Some(d), Some(j), Some(k), Some(m)) => KochIndex::new(d, j, k, m).map_err(usage_index),
        _ => Err(CliError::Usage(
            "this command needs --d, --beta-index, --k and --m".to_string(),
        )),
    }
}

fn optional_index(g: &GlobalArgs) -> Result<Option<KochIndex>, CliError> {
    if g.d.is_none() && g.beta_index.is_none() && g.k.is_none() && g.m.is_none() {
        Ok(None)
    } else {
        required_index(g).map(Some)
    }
}

fn check_residuals(records: &[FixedPointRecord], tol: f64) -> Result<(), CliError> {
    match records.iter().find(|r| !(r.residual_param <= tol)) {
        Some(r) => Err(CliError::Numeric {
            kind: "ResidualAboveTolerance".to_string(),
            message: format!(
                "parameter residual |g(c)| = {:e} at c = {} exceeds {tol:e}",
                r.residual_param, r.c
            ),
            residual: Some(r.residual_param),
        }),
        None => Ok(()),
    }
}

fn enumerate(g: &GlobalArgs) -> CmdResult {
    let idx = required_index(g)?;
    let records = enumerate_fixed_points(&idx, g.degree_cap)?;
    check_residuals(&records, g.tol_residual)?;
    let mut doc = ReportDocument::new("enumerate", echo(g));
    doc.cells.push(CellSummary {
        index: (&idx).into(),
        status: "ok",
        reason: None,
        fixed_points: records.len(),
    });
    doc.fixed_points = records.iter().map(FixedPointSummary::from).collect();
    for r in records.iter().filter(|r| r.multiplicity > 1) {
        doc.notes
            .push(format!("c = {} is a root of multiplicity {} of the parameter equation", r.c, r.multiplicity));
    }
    Ok(doc)
}

fn spectrum(g: &GlobalArgs, c: Option<&str>) -> CmdResult {
    let idx = required_index(g)?;
    let mut config = echo(g);
    let records = match c {
        Some(s) => {
            let (re, im) = parse_complex(s).map_err(CliError::Usage)?;
            let c = Cx::new(re, im);
            config.c = Some(c.into());
            let residual = parameter_residual(&idx, c).0.norm();
            if !(residual <= g.tol_residual) {
                return Err(CliError::Numeric {
                    kind: "NotAFixedPoint".to_string(),
                    message: format!("c = {c} is not a fixed-point parameter: |g(c)| = {residual:e} > {:e}", g.tol_residual),
                    residual: Some(residual),
                });
            }
            vec![fixed_point_record(&idx, c)?]
        }
        None => enumerate_fixed_points(&idx, g.degree_cap)?,
    };
    let mut doc = ReportDocument::new("spectrum", config);
    doc.cells.push(CellSummary {
        index: (&idx).into(),
        status: "ok",
        reason: None,
        fixed_points: records.len(),
    });
    doc.fixed_points = records.iter().map(FixedPointSummary::from).collect();
    if idx.dim() == 0 {
        doc.notes.push("trivial space".to_string());
        return Ok(doc);
    }
    for r in &records {
        let s = verify_spectrum(r, g.tol_match)?;
        doc.passed &= s.passed();
        doc.spectra.push(SpectrumSummary::new(&idx, &s));
    }
    Ok(doc)
}

fn verify(g: &GlobalArgs) -> CmdResult {
    let grid = match optional_index(g)? {
        Some(idx) => vec![idx],
        None => default_grid(),
    };
    let cfg = suite_config(g);
    let per_cell = grid
        .par_iter()
        .enumerate()
        .map(|(n, idx)| {
            let cell = enumerate_cell(*idx, cfg.degree_cap)?;
            let outcomes = cell_suites(&cell, &cfg, derive_seed(cfg.seed, n as u64))?;
            Ok((cell.records.len(), outcomes))
        })
        .collect::<Result<Vec<_>, KochError>>()?;

    let mut doc = ReportDocument::new("verify", echo(g));
    let mut batches = vec![global_suites(&cfg)?];
    for (idx, (count, outcomes)) in grid.iter().zip(per_cell) {
        doc.cells.push(CellSummary {
            index: idx.into(),
            status: "ok",
            reason: None,
            fixed_points: count,
        });
        batches.push(outcomes);
    }
    doc.suites = merge(batches).iter().map(SuiteSummary::from).collect();
    doc.passed = doc.suites.iter().all(|s| s.passed);
    Ok(doc)
}

fn as_u32(v: u64, what: &str) -> Result<u32, CliError> {
    u32::try_from(v).map_err(|_| CliError::Usage(format!("{what} {v} is out of range")))
}

fn sweep(g: &GlobalArgs, s: &SweepArgs) -> CmdResult {
    let pick = |given: &Option<String>, global: Option<String>, default: &str| {
        given.clone().or(global).unwrap_or_else(|| default.to_string())
    };
    let ds = parse_range(&pick(&s.ds, g.d.map(|v| v.to_string()), "2")).map_err(CliError::Usage)?;
    let js = pick(&s.js, g.beta_index.map(|v| v.to_string()), "all");
    let js = if js.trim() == "all" {
        None
    } else {
        Some(parse_range(&js).map_err(CliError::Usage)?)
    };
    let ks = parse_range(&pick(&s.ks, g.k.map(|v| v.to_string()), "0..3")).map_err(CliError::Usage)?;
    let ms = parse_range(&pick(&s.ms, g.m.map(|v| v.to_string()), "1..3")).map_err(CliError::Usage)?;

    let mut cells = Vec::new();
    for &d in &ds {
        let d = as_u32(d, "degree")?;
        if d < 2 {
            return Err(CliError::Usage(format!("degree d = {d} must be at least 2")));
        }
        let betas: Vec<u64> = match &js {
            Some(js) => js.clone(),
            None => (1..d as u64).collect(),
        };
        for &j in &betas {
            for &k in &ks {
                for &m in &ms {
                    cells.push((d, as_u32(j, "beta index")?, k as usize, m as usize));
                }
            }
        }
    }
    if cells.len() > s.max_cells {
        return Err(CliError::Usage(format!(
            "sweep has {} cells, more than --max-cells {}",
            cells.len(),
            s.max_cells
        )));
    }
    let results = cells
        .par_iter()
        .map(|&(d, j, k, m)| match KochIndex::new(d, j, k, m) {
            Ok(idx) => sweep_cell(&idx, g),
            Err(e) => Ok((skipped_cell(IndexEcho::raw(d, j, k, m), e.to_string()), Vec::new())),
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut config = echo(g);
    config.sweep = Some(SweepEcho {
        ds,
        js,
        ks,
        ms,
        max_cells: s.max_cells,
    });
    let mut doc = ReportDocument::new("sweep", config);
    for (cell, spectra) in results {
        doc.passed &= spectra.iter().all(|s| s.passed);
        doc.cells.push(cell);
        doc.spectra.extend(spectra);
    }
    Ok(doc)
}

fn skipped_cell(index: IndexEcho, reason: String) -> CellSummary {
    CellSummary {
        index,
        status: "skipped",
        reason: Some(reason),
        fixed_points: 0,
    }
}

fn sweep_cell(idx: &KochIndex, g: &GlobalArgs) -> Result<(CellSummary, Vec<SpectrumSummary>), CliError> {
    let skipped = |reason: String| skipped_cell(idx.into(), reason);
    if idx.dim() == 0 {
        return Ok((skipped("dim 0".to_string()), Vec::new()));
    }
    let records = match enumerate_fixed_points(idx, g.degree_cap) {
        Ok(r) => r,
        Err(e @ KochError::DegreeCapExceeded { .. }) => return Ok((skipped(e.to_string()), Vec::new())),
        Err(e) => return Err(e.into()),
    };
    check_residuals(&records, g.tol_residual)?;
    let spectra = records
        .iter()
        .map(|r| verify_spectrum(r, g.tol_match).map(|s| SpectrumSummary::new(idx, &s)))
        .collect::<Result<Vec<_>, _>>()?;
    let cell = CellSummary {
        index: idx.into(),
        status: "ok",
        reason: None,
        fixed_points: records.len(),
    };
    Ok((cell, spectra))
}
