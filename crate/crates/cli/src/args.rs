use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "koch", version, about = "Enumerate and verify fixed points of Koch maps F_{k,m}")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Degree of the polynomial t^d + c.
    #[arg(long, global = true)]
    pub d: Option<u32>,

    /// Index j of beta = exp(2 pi i j / d), 1 <= j <= d - 1.
    #[arg(long, global = true)]
    pub beta_index: Option<u32>,

    /// Preperiod k.
    #[arg(long, global = true)]
    pub k: Option<usize>,

    /// Period m.
    #[arg(long, global = true)]
    pub m: Option<usize>,

    /// Largest accepted |g(c)| for a parameter given with `spectrum --c`,
    /// and for enumerated parameters.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_residual: f64,

    /// Absolute and relative tolerance of spectral multiset matching.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_match: f64,

    /// Random points per sampled identity.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Refuse parameter equations of higher degree.
    #[arg(long, global = true, default_value_t = koch_core::fixed_points::DEFAULT_DEGREE_CAP)]
    pub degree_cap: u64,

    /// Record wall-clock time in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the fixed points of F_{k,m} with their exact types and multipliers.
    Enumerate,
    /// Compare the Jacobian spectrum at each fixed point with its predicted decomposition.
    Spectrum {
        /// Restrict to the fixed point with this parameter, written `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
    },
    /// Run every property suite, over the default grid unless an index is given.
    Verify,
    /// Enumerate and check spectra over a range of indices.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Degrees: `a`, `a..b` (inclusive) or `a,b,c`. Defaults to `--d`, else 2.
    #[arg(long)]
    pub ds: Option<String>,

    /// Beta indices; `all` takes 1..=d-1 for each degree. Defaults to
    /// `--beta-index`, else `all`.
    #[arg(long)]
    pub js: Option<String>,

    /// Preperiods. Defaults to `--k`, else `0..3`.
    #[arg(long)]
    pub ks: Option<String>,

    /// Periods. Defaults to `--m`, else `1..3`.
    #[arg(long)]
    pub ms: Option<String>,

    /// Largest number of index cells a sweep may contain.
    #[arg(long, default_value_t = 256)]
    pub max_cells: usize,
}

/// Parses `a`, `a..b` (inclusive, empty when b < a), `a,b,c`, or the empty string.
pub fn parse_range(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let a = parse_u64(a)?;
        let b = parse_u64(b)?;
        return Ok((a..=b).collect());
    }
    s.split(',').map(parse_u64).collect()
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("invalid range element {:?}", s.trim()))
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("invalid number {:?} in --c", p.trim()));
    match parts.as_slice() {
        [re] => Ok((num(re)?, 0.0)),
        [re, im] => Ok((num(re)?, num(im)?)),
        _ => Err(format!("--c expects `re` or `re,im`, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3").unwrap(), vec![3]);
        assert_eq!(parse_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_range("2,5, 7").unwrap(), vec![2, 5, 7]);
        assert!(parse_range("3..1").unwrap().is_empty());
        assert!(parse_range("").unwrap().is_empty());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn complex_values() {
        assert_eq!(parse_complex("-1").unwrap(), (-1.0, 0.0));
        assert_eq!(parse_complex("0,1").unwrap(), (0.0, 1.0));
        assert!(parse_complex("1,2,3").is_err());
    }
}
