use std::fmt::Write as _;

use spectralci::linalg::io::{fmt_real, read_matrix_csv, read_sym_matrix_csv};
use spectralci::md::{ci_md, ci_md_entrywise};
use spectralci::montecarlo::{
    emit_histograms, md_grid, pca_grid, run_md_cell_targets, run_pca_cell_targets, summary_csv,
    ASpec, McConfigMd, McConfigPca, McSummary, GRID,
};
use spectralci::pca::{ci_pca, ci_pca_entrywise};

use crate::args::{one_based, positive, required, Args, Direction, Mode, Model};
use crate::output::{ci_json, deliver};
use crate::CliError;

const DEFAULT_ALPHA: f64 = 0.05;
const DEFAULT_REPS: usize = 200;
const DEFAULT_KS_REPS: usize = 1000;
pub const KS_HEADER: &str = "delta_mult,lambda_min_mult,ks_biased,ks_debiased,reps";

pub fn run(args: &Args) -> Result<(), CliError> {
    let mode = required("mode", &args.mode)?;
    match mode {
        Mode::CiMd | Mode::CiMdEntry | Mode::CiPca | Mode::CiPcaEntry => ci(mode, args),
        Mode::SimulateMd => simulate(Model::Md, args),
        Mode::SimulatePca => simulate(Model::Pca, args),
        Mode::BerryEsseen => berry_esseen(args),
    }
}

fn alpha(args: &Args) -> Result<f64, CliError> {
    let a = args.alpha.unwrap_or(DEFAULT_ALPHA);
    if !(a > 0.0 && a < 1.0) {
        return Err(CliError::validation(format!(
            "--alpha must lie in (0, 1), got {a}"
        )));
    }
    Ok(a)
}

fn ci(mode: Mode, args: &Args) -> Result<(), CliError> {
    let input = required("input", &args.input)?;
    let r = positive("r", required("r", &args.r)?)?;
    let j = one_based("j", required("j", &args.j)?, r)?;
    let alpha = alpha(args)?;
    let entry = matches!(mode, Mode::CiMdEntry | Mode::CiPcaEntry);
    let (coord, direction) = if entry {
        (Some(required("i", &args.i)?), None)
    } else {
        (None, Some(Direction::parse(&required("a", &args.a)?)?))
    };
    let result = match mode {
        Mode::CiMd | Mode::CiMdEntry => {
            let s = read_sym_matrix_csv(&input)?;
            let n = s.dim();
            match (coord, direction) {
                (Some(i), _) => ci_md_entrywise(&s, r, j, one_based("i", i, n)?, alpha)?,
                (_, Some(d)) => ci_md(&s, r, j, &d.vector(n)?, alpha)?,
                _ => unreachable!(),
            }
        }
        _ => {
            let x = read_matrix_csv(&input)?;
            let p = x.rows();
            match (coord, direction) {
                (Some(i), _) => ci_pca_entrywise(&x, r, j, one_based("i", i, p)?, alpha)?,
                (_, Some(d)) => ci_pca(&x, r, j, &d.vector(p)?, alpha)?,
                _ => unreachable!(),
            }
        }
    };
    deliver(&ci_json(&result), args.out.as_deref())?;
    Ok(())
}

/// The nine grid cells of one model, each with its label and summary.
fn run_grid(
    model: Model,
    args: &Args,
    default_reps: usize,
) -> Result<Vec<(String, McSummary)>, CliError> {
    let seed = args.seed.unwrap_or(0);
    let reps = positive("reps", args.reps.unwrap_or(default_reps))?;
    let alpha = alpha(args)?;
    let threads = Some(args.threads()?);
    let direction = Direction::parse(args.a.as_deref().unwrap_or("constant"))?;
    match model {
        Model::Md => {
            let template = McConfigMd {
                n: args.n.unwrap_or(McConfigMd::default().n),
                reps,
                alpha,
                base_seed: seed,
                frame_seed: seed,
                ..McConfigMd::default()
            };
            let spec: ASpec = direction.spec(template.n)?;
            md_grid(&template)
                .into_iter()
                .map(|(label, cfg)| {
                    Ok((
                        label,
                        run_md_cell_targets(&cfg, std::slice::from_ref(&spec), threads)?.remove(0),
                    ))
                })
                .collect()
        }
        Model::Pca => {
            let template = McConfigPca {
                n: args.n.unwrap_or(McConfigPca::default().n),
                p: args.p.unwrap_or(McConfigPca::default().p),
                reps,
                alpha,
                base_seed: seed,
                frame_seed: seed,
                ..McConfigPca::default()
            };
            let spec: ASpec = direction.spec(template.p)?;
            pca_grid(&template)
                .into_iter()
                .map(|(label, cfg)| {
                    Ok((
                        label,
                        run_pca_cell_targets(&cfg, std::slice::from_ref(&spec), threads)?.remove(0),
                    ))
                })
                .collect()
        }
    }
}

fn simulate(model: Model, args: &Args) -> Result<(), CliError> {
    let out = required("out", &args.out)?;
    let cells = run_grid(model, args, DEFAULT_REPS)?;
    deliver(&summary_csv(&cells)?, Some(&out))?;
    if let Some(dir) = &args.hist_dir {
        for (c, (label, summary)) in cells.iter().enumerate() {
            emit_histograms(summary, label, dir, &format!("cell{}", c + 1))?;
        }
    }
    Ok(())
}

fn berry_esseen(args: &Args) -> Result<(), CliError> {
    let out = required("out", &args.out)?;
    let cells = run_grid(args.model.unwrap_or(Model::Md), args, DEFAULT_KS_REPS)?;
    let mut text = format!("{KS_HEADER}\n");
    for ((_, s), (delta, lmin)) in cells.iter().zip(GRID) {
        let _ = writeln!(
            text,
            "{delta},{lmin},{},{},{}",
            fmt_real(s.ks_biased),
            fmt_real(s.ks_debiased),
            s.reps
        );
    }
    deliver(&text, Some(&out))?;
    Ok(())
}
