//! Seeded Monte Carlo replication of the coverage and distributional
//! experiments.
//!
//! A cell fixes the signal, whose eigenvector frame is drawn once from
//! stream 0 of `frame_seed`, and redraws the noise in every replication;
//! replication `k` uses stream `k + 1` of `base_seed`. Replications may run on any number of threads; results are
//! collected and reduced in replication order, so the output does not depend
//! on the schedule.

pub mod emit;
pub mod ks;

pub use emit::{
    emit_histograms, emit_summary, histogram_svg, parse_summary_csv, summary_csv, SummaryRow,
};
pub use ks::ks_to_normal;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    constant_unit_vector, dot, require_unit, sym_eig, OrderingMode, SpectralDecomposition,
};
use crate::md::{bias_md, ci_md_entrywise_from, ci_md_from, estimate_noise_md_with, MdEstimates};
use crate::models::{
    md_observation, pca_sample, random_orthonormal_frame, spiked_cov, GroundTruthMd, GroundTruthPca,
};
use crate::pca::{
    bias_pca, ci_pca_entrywise_from, ci_pca_from, covariance_decomposition, estimate_noise_pca_in,
    NoiseRegime, PcaEstimates,
};
use crate::rng::{derive_base, Seed};
use crate::theory::{s_md_theoretical, s_pca_theoretical, TheoryContextMd, TheoryContextPca};

/// The direction `a` whose projection on `u₁` is the target.
#[derive(Debug, Clone, PartialEq)]
pub enum ASpec {
    /// `a ≡ 1/√dim`.
    ConstantVector,
    /// `a = e_i` (zero-based); coverage uses the entrywise interval.
    Coordinate(usize),
    /// A user supplied unit vector.
    Custom(Vec<f64>),
}

impl ASpec {
    pub fn vector(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            ASpec::ConstantVector => Ok(constant_unit_vector(dim)),
            ASpec::Coordinate(i) => crate::linalg::basis_vector(dim, *i),
            ASpec::Custom(v) => {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: v.len(),
                    });
                }
                require_unit(v)?;
                Ok(v.clone())
            }
        }
    }
}

/// One matrix denoising cell: `λ_min = c₁√n·σ`, `Δ₁ = c₂ ln n·σ`,
/// spectrum `(5λ_min, 5λ_min − Δ₁, λ_min)`.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfigMd {
    pub n: usize,
    pub r: usize,
    pub sigma: f64,
    pub lambda_min_mult: f64,
    pub delta_mult: f64,
    pub reps: usize,
    pub alpha: f64,
    pub base_seed: u64,
    pub frame_seed: u64,
    pub a_spec: ASpec,
}

impl Default for McConfigMd {
    fn default() -> Self {
        Self {
            n: 200,
            r: 3,
            sigma: 1.0,
            lambda_min_mult: 2.0,
            delta_mult: 1.0,
            reps: 200,
            alpha: 0.05,
            base_seed: 0,
            frame_seed: 0,
            a_spec: ASpec::ConstantVector,
        }
    }
}

impl McConfigMd {
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min_mult * (self.n as f64).sqrt() * self.sigma
    }

    pub fn delta(&self) -> f64 {
        self.delta_mult * (self.n as f64).ln() * self.sigma
    }

    /// Draws the fixed signal from stream 0.
    pub fn ground_truth(&self) -> Result<GroundTruthMd<f64>> {
        validate_common(self.r, self.reps, self.alpha)?;
        let lambda = three_spike_spectrum(self.lambda_min(), self.delta())?;
        let u = random_orthonormal_frame(self.n, self.r, Seed::new(self.frame_seed, 0))?;
        GroundTruthMd::new(u, lambda, self.sigma)
    }
}

/// One spiked covariance cell: `λ_min = c₁ ln n·σ²`,
/// `Δ₁ = c₂(λ_min + σ²) ln n/√n`, spectrum `(5λ_min, 5λ_min − Δ₁, λ_min)`.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfigPca {
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub sigma2: f64,
    pub lambda_min_mult: f64,
    pub delta_mult: f64,
    pub reps: usize,
    pub alpha: f64,
    pub base_seed: u64,
    pub frame_seed: u64,
    pub a_spec: ASpec,
}

impl Default for McConfigPca {
    fn default() -> Self {
        Self {
            n: 300,
            p: 200,
            r: 3,
            sigma2: 1.0,
            lambda_min_mult: 2.0,
            delta_mult: 1.0,
            reps: 200,
            alpha: 0.05,
            base_seed: 0,
            frame_seed: 0,
            a_spec: ASpec::ConstantVector,
        }
    }
}

impl McConfigPca {
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min_mult * (self.n as f64).ln() * self.sigma2
    }

    pub fn delta(&self) -> f64 {
        let n = self.n as f64;
        self.delta_mult * (self.lambda_min() + self.sigma2) * n.ln() / n.sqrt()
    }

    /// Draws the fixed signal from stream 0.
    pub fn ground_truth(&self) -> Result<GroundTruthPca<f64>> {
        validate_common(self.r, self.reps, self.alpha)?;
        let lambda = three_spike_spectrum(self.lambda_min(), self.delta())?;
        let u = random_orthonormal_frame(self.p, self.r, Seed::new(self.frame_seed, 0))?;
        spiked_cov(u, lambda, self.sigma2)
    }
}

fn validate_common(r: usize, reps: usize, alpha: f64) -> Result<()> {
    if r != 3 {
        return Err(Error::InvalidParameter(format!(
            "simulation cells use r = 3, got {r}"
        )));
    }
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    crate::inference::check_alpha(alpha)
}

fn three_spike_spectrum(lambda_min: f64, delta: f64) -> Result<Vec<f64>> {
    let l1 = 5.0 * lambda_min;
    let l2 = l1 - delta;
    if !(lambda_min > 0.0 && delta > 0.0 && l2 > lambda_min) {
        return Err(Error::InvalidParameter(format!(
            "spectrum (5 lambda_min, 5 lambda_min - delta, lambda_min) is not strictly decreasing for lambda_min = {lambda_min}, delta = {delta}"
        )));
    }
    Ok(vec![l1, l2, lambda_min])
}

/// Per-replication record for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct RepRecord {
    pub stream: u64,
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    /// Sign-corrected true value.
    pub target: f64,
    pub covered: bool,
}

/// Aggregated output of one cell and target.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub coverage_mean: f64,
    /// `√(p̂(1 − p̂)/reps)`.
    pub coverage_std: f64,
    pub ks_biased: f64,
    pub ks_debiased: f64,
    /// `(aᵀû₁ − aᵀu₁·u₁ᵀû₁)/s` with `û₁` aligned to `u₁`.
    pub stats_biased: Vec<f64>,
    /// `(aᵀû₁√(1 + b₁) − aᵀu₁)/s` with `b₁` computed from the known noise level.
    pub stats_debiased: Vec<f64>,
    pub per_rep: Vec<RepRecord>,
    pub reps: usize,
}

impl McSummary {
    fn from_outcomes(outcomes: Vec<TargetOutcome>) -> Result<Self> {
        let reps = outcomes.len();
        let covered = outcomes.iter().filter(|o| o.record.covered).count();
        let p = covered as f64 / reps as f64;
        let stats_biased: Vec<f64> = outcomes.iter().map(|o| o.biased).collect();
        let stats_debiased: Vec<f64> = outcomes.iter().map(|o| o.debiased).collect();
        Ok(Self {
            coverage_mean: p,
            coverage_std: (p * (1.0 - p) / reps as f64).sqrt(),
            ks_biased: ks_to_normal(&stats_biased)?,
            ks_debiased: ks_to_normal(&stats_debiased)?,
            stats_biased,
            stats_debiased,
            per_rep: outcomes.into_iter().map(|o| o.record).collect(),
            reps,
        })
    }
}

struct TargetOutcome {
    biased: f64,
    debiased: f64,
    record: RepRecord,
}

struct Target {
    a: Vec<f64>,
    coordinate: Option<usize>,
    truth_proj: f64,
    s_theory: f64,
}

fn stream_of(rep: usize) -> u64 {
    rep as u64 + 1
}

/// Runs `body` for every replication, on `threads` workers when given,
/// and returns the results in replication order.
fn replicate<R: Send>(
    reps: usize,
    threads: Option<usize>,
    body: impl Fn(usize) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let run = || {
        (0..reps)
            .into_par_iter()
            .map(&body)
            .collect::<Vec<Result<R>>>()
    };
    let results = match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    results
        .into_iter()
        .enumerate()
        .map(|(rep, r)| {
            r.map_err(|e| Error::Replication {
                stream: stream_of(rep),
                source: Box::new(e),
            })
        })
        .collect()
}

fn collate(per_rep: Vec<Vec<TargetOutcome>>, targets: usize) -> Result<Vec<McSummary>> {
    let mut columns: Vec<Vec<TargetOutcome>> = (0..targets)
        .map(|_| Vec::with_capacity(per_rep.len()))
        .collect();
    for rep in per_rep {
        for (col, outcome) in columns.iter_mut().zip(rep) {
            col.push(outcome);
        }
    }
    columns.into_iter().map(McSummary::from_outcomes).collect()
}

/// Outcome for one target given the aligned leading estimate.
fn evaluate(
    target: &Target,
    dec: &SpectralDecomposition<f64>,
    sign: f64,
    cos: f64,
    b_known: f64,
    interval: crate::inference::InferenceResult<f64>,
    stream: u64,
) -> TargetOutcome {
    let est_proj = sign * dot(&target.a, &dec.eigenvector(0));
    let biased = (est_proj - target.truth_proj * cos) / target.s_theory;
    let debiased = (est_proj * (1.0 + b_known).sqrt() - target.truth_proj) / target.s_theory;
    let signed_target = sign * target.truth_proj;
    TargetOutcome {
        biased,
        debiased,
        record: RepRecord {
            stream,
            point: interval.point,
            lower: interval.lower,
            upper: interval.upper,
            target: signed_target,
            covered: interval.contains(signed_target),
        },
    }
}

fn sign_and_cos(u1: &[f64], dec: &SpectralDecomposition<f64>) -> (f64, f64) {
    let c = dot(u1, &dec.eigenvector(0));
    let sign = if c < 0.0 { -1.0 } else { 1.0 };
    (sign, c.abs())
}

/// A matrix denoising cell for `cfg.a_spec`.
pub fn run_md_cell(cfg: &McConfigMd) -> Result<McSummary> {
    let mut out = run_md_cell_targets(cfg, std::slice::from_ref(&cfg.a_spec), None)?;
    Ok(out.remove(0))
}

/// A matrix denoising cell evaluated for several targets on the same
/// replications. `cfg.a_spec` is ignored.
pub fn run_md_cell_targets(
    cfg: &McConfigMd,
    specs: &[ASpec],
    threads: Option<usize>,
) -> Result<Vec<McSummary>> {
    let truth = cfg.ground_truth()?;
    let targets = specs
        .iter()
        .map(|spec| {
            let a = spec.vector(cfg.n)?;
            let ctx = TheoryContextMd::new(&truth, &a, 0)?;
            let s_theory = s_md_theoretical(&ctx)?;
            let truth_proj = dot(&a, &truth.eigenvector(0));
            Ok(Target {
                coordinate: match spec {
                    ASpec::Coordinate(i) => Some(*i),
                    _ => None,
                },
                a,
                truth_proj,
                s_theory,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let u1 = truth.eigenvector(0);
    let sigma2 = cfg.sigma * cfg.sigma;
    let per_rep = replicate(cfg.reps, threads, |rep| {
        let stream = stream_of(rep);
        let s_hat = md_observation(&truth, Seed::new(cfg.base_seed, stream))?;
        let mut dec = sym_eig(&s_hat, OrderingMode::ByMagnitudeDesc)?;
        dec.canonicalize_signs(cfg.r);
        let sigma2_hat = estimate_noise_md_with(&s_hat, &dec, cfg.r)?;
        let b_known = bias_md(&dec, cfg.r, 0, sigma2)?;
        let (sign, cos) = sign_and_cos(&u1, &dec);
        let est = MdEstimates::from_decomposition(dec, cfg.r, sigma2_hat)?;
        targets
            .iter()
            .map(|t| {
                let interval = match t.coordinate {
                    Some(i) => ci_md_entrywise_from(&est, 0, i, cfg.alpha)?,
                    None => ci_md_from(&est, 0, &t.a, cfg.alpha)?,
                };
                Ok(evaluate(t, &est.dec, sign, cos, b_known, interval, stream))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    collate(per_rep, targets.len())
}

/// A spiked covariance cell for `cfg.a_spec`.
pub fn run_pca_cell(cfg: &McConfigPca) -> Result<McSummary> {
    let mut out = run_pca_cell_targets(cfg, std::slice::from_ref(&cfg.a_spec), None)?;
    Ok(out.remove(0))
}

/// A spiked covariance cell evaluated for several targets on the same
/// replications. `cfg.a_spec` is ignored.
pub fn run_pca_cell_targets(
    cfg: &McConfigPca,
    specs: &[ASpec],
    threads: Option<usize>,
) -> Result<Vec<McSummary>> {
    let truth = cfg.ground_truth()?;
    let targets = specs
        .iter()
        .map(|spec| {
            let a = spec.vector(cfg.p)?;
            let ctx = TheoryContextPca::new(&truth, &a, 0, cfg.n)?;
            let s_theory = s_pca_theoretical(&ctx)?;
            let truth_proj = dot(&a, &truth.eigenvector(0));
            Ok(Target {
                coordinate: match spec {
                    ASpec::Coordinate(i) => Some(*i),
                    _ => None,
                },
                a,
                truth_proj,
                s_theory,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let u1 = truth.eigenvector(0);
    let regime = NoiseRegime::select(cfg.n, cfg.p);
    let per_rep = replicate(cfg.reps, threads, |rep| {
        let stream = stream_of(rep);
        let x = pca_sample(&truth, cfg.n, Seed::new(cfg.base_seed, stream))?;
        let mut dec = covariance_decomposition(&x)?;
        dec.canonicalize_signs(cfg.r);
        let sigma2_hat = estimate_noise_pca_in(&dec, cfg.r, cfg.p, regime)?;
        let b_known = bias_pca(&dec, cfg.r, 0, cfg.n, cfg.p, cfg.sigma2)?;
        let (sign, cos) = sign_and_cos(&u1, &dec);
        let est = PcaEstimates::from_decomposition(dec, cfg.r, cfg.n, sigma2_hat, regime)?;
        targets
            .iter()
            .map(|t| {
                let interval = match t.coordinate {
                    Some(i) => ci_pca_entrywise_from(&est, 0, i, cfg.alpha)?,
                    None => ci_pca_from(&est, 0, &t.a, cfg.alpha)?,
                };
                Ok(evaluate(t, &est.dec, sign, cos, b_known, interval, stream))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    collate(per_rep, targets.len())
}

/// Grid multipliers `(c₂, c₁)` in table order: eigengap outer, signal
/// strength inner.
pub const GRID: [(f64, f64); 9] = [
    (1.0, 2.0),
    (1.0, 4.0),
    (1.0, 6.0),
    (2.0, 2.0),
    (2.0, 4.0),
    (2.0, 6.0),
    (3.0, 2.0),
    (3.0, 4.0),
    (3.0, 6.0),
];

/// The nine matrix denoising cells. All cells share the template's frame
/// seed, hence the same eigenvectors; cell `c` draws its noise from base
/// seed `derive_base(template.base_seed, c)`.
pub fn md_grid(template: &McConfigMd) -> Vec<(String, McConfigMd)> {
    GRID.iter()
        .enumerate()
        .map(|(c, &(delta, lmin))| {
            let cfg = McConfigMd {
                delta_mult: delta,
                lambda_min_mult: lmin,
                base_seed: derive_base(template.base_seed, c as u64),
                ..template.clone()
            };
            (
                format!("delta={delta}*ln(n);lambda_min={lmin}*sqrt(n)"),
                cfg,
            )
        })
        .collect()
}

/// The nine spiked covariance cells, seeded as in [`md_grid`].
pub fn pca_grid(template: &McConfigPca) -> Vec<(String, McConfigPca)> {
    GRID.iter()
        .enumerate()
        .map(|(c, &(delta, lmin))| {
            let cfg = McConfigPca {
                delta_mult: delta,
                lambda_min_mult: lmin,
                base_seed: derive_base(template.base_seed, c as u64),
                ..template.clone()
            };
            (
                format!("delta={delta}*(lambda_min+sigma2)*ln(n)/sqrt(n);lambda_min={lmin}*sigma2*ln(n)"),
                cfg,
            )
        })
        .collect()
}
