use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use spectralci::linalg::io::read_vector_csv;
use spectralci::linalg::{basis_vector, constant_unit_vector, norm};
use spectralci::montecarlo::ASpec;

use crate::CliError;

pub const THREADS_ENV: &str = "SPECTRALCI_THREADS";
const NORM_WARN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    CiMd,
    CiMdEntry,
    CiPca,
    CiPcaEntry,
    SimulateMd,
    SimulatePca,
    BerryEsseen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Md,
    Pca,
}

/// Confidence intervals for linear forms of eigenvectors, and the
/// simulation experiments that calibrate them.
///
/// Component and coordinate indices (--j, --i, coord:i) are one-based.
#[derive(Debug, Default, Parser, Deserialize)]
#[command(name = "spectralci", version)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Args {
    /// Operation to run.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Input CSV: symmetric n x n matrix (ci-md*) or p x n data (ci-pca*).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Rank of the signal.
    #[arg(long)]
    pub r: Option<usize>,
    /// Eigenvector component, 1..=r.
    #[arg(long)]
    pub j: Option<usize>,
    /// Coordinate for the entrywise modes, 1..=dim.
    #[arg(long)]
    pub i: Option<usize>,
    /// Direction: constant, coord:<i> or file:<path>.
    #[arg(long)]
    pub a: Option<String>,
    /// Significance level, 0 < alpha < 1 (default 0.05).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Output file; ci-* modes print to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the signal frame and the noise streams (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replications per cell (default 200, berry-esseen 1000).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Worker threads; falls back to SPECTRALCI_THREADS, then all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Model for berry-esseen (default md).
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Dimension n for simulations (default 200 md, 300 pca).
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension p for PCA simulations (default 200).
    #[arg(long)]
    pub p: Option<usize>,
    /// Directory for per-cell SVG histograms (simulate-*).
    #[arg(long)]
    pub hist_dir: Option<PathBuf>,
    /// JSON file with any of the above keys; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Args {
    /// Fills unset fields from `base`.
    pub fn over(self, base: Args) -> Args {
        Args {
            mode: self.mode.or(base.mode),
            input: self.input.or(base.input),
            r: self.r.or(base.r),
            j: self.j.or(base.j),
            i: self.i.or(base.i),
            a: self.a.or(base.a),
            alpha: self.alpha.or(base.alpha),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
            reps: self.reps.or(base.reps),
            threads: self.threads.or(base.threads),
            model: self.model.or(base.model),
            n: self.n.or(base.n),
            p: self.p.or(base.p),
            hist_dir: self.hist_dir.or(base.hist_dir),
            config: self.config,
        }
    }

    /// Flags merged over the `--config` file, if any.
    pub fn resolve(self) -> Result<Args, CliError> {
        match &self.config {
            None => Ok(self),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::validation(format!("cannot read config {}: {e}", path.display()))
                })?;
                let base: Args = serde_json::from_str(&text).map_err(|e| {
                    CliError::validation(format!("invalid config {}: {e}", path.display()))
                })?;
                Ok(self.over(base))
            }
        }
    }

    pub fn threads(&self) -> Result<usize, CliError> {
        if let Some(k) = self.threads {
            return positive("threads", k);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => {
                let k = v.trim().parse::<usize>().map_err(|_| {
                    CliError::validation(format!(
                        "{THREADS_ENV} must be a positive integer, got {v:?}"
                    ))
                })?;
                positive(THREADS_ENV, k)
            }
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |k| k.get())),
        }
    }
}

pub fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::validation(format!("{name} must be at least 1")));
    }
    Ok(v)
}

pub fn required<T: Clone>(name: &str, v: &Option<T>) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::validation(format!("--{name} is required for this mode")))
}

/// Converts a one-based index in `1..=bound` to zero-based.
pub fn one_based(name: &str, v: usize, bound: usize) -> Result<usize, CliError> {
    if v == 0 || v > bound {
        return Err(CliError::validation(format!(
            "--{name} must lie in 1..={bound}, got {v}"
        )));
    }
    Ok(v - 1)
}

/// Parsed `--a` value.
#[derive(Debug, Clone, PartialEq)]
pub enum Direction {
    Constant,
    Coordinate(usize),
    File(PathBuf),
}

impl Direction {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "constant" {
            return Ok(Direction::Constant);
        }
        if let Some(i) = s.strip_prefix("coord:") {
            let i = i.trim().parse::<usize>().map_err(|_| {
                CliError::validation(format!("--a coord:<i> needs a positive integer, got {s:?}"))
            })?;
            return Ok(Direction::Coordinate(i));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Direction::File(PathBuf::from(path)));
        }
        Err(CliError::validation(format!(
            "--a must be constant, coord:<i> or file:<path>, got {s:?}"
        )))
    }

    /// The unit vector of length `dim`.
    pub fn vector(&self, dim: usize) -> Result<Vec<f64>, CliError> {
        match self {
            Direction::Constant => Ok(constant_unit_vector(dim)),
            Direction::Coordinate(i) => Ok(basis_vector(dim, one_based("a coord", *i, dim)?)?),
            Direction::File(path) => load_direction(path, dim),
        }
    }

    pub fn spec(&self, dim: usize) -> Result<ASpec, CliError> {
        match self {
            Direction::Constant => Ok(ASpec::ConstantVector),
            Direction::Coordinate(i) => Ok(ASpec::Coordinate(one_based("a coord", *i, dim)?)),
            Direction::File(path) => Ok(ASpec::Custom(load_direction(path, dim)?)),
        }
    }
}

fn load_direction(path: &Path, dim: usize) -> Result<Vec<f64>, CliError> {
    let v = read_vector_csv(path)?;
    if v.len() != dim {
        return Err(CliError::validation(format!(
            "direction file {} has {} entries, expected {dim}",
            path.display(),
            v.len()
        )));
    }
    let len = norm(&v);
    if !(len > 0.0 && len.is_finite()) {
        return Err(CliError::validation(format!(
            "direction file {} has zero or non-finite norm",
            path.display()
        )));
    }
    if (len - 1.0).abs() > NORM_WARN_TOL {
        eprintln!(
            "warning: direction from {} has norm {len}; normalizing",
            path.display()
        );
    }
    Ok(v.iter().map(|x| x / len).collect())
}
