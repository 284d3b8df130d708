use spectralci::linalg::{normal_quantile, sym_eig, OrderingMode};
use spectralci::montecarlo::emit::{histogram_counts, HIST_BINS, SUMMARY_HEADER};
use spectralci::montecarlo::*;
use spectralci::rng::{Seed, SeededRng};
use spectralci::Error;

fn quick_md(reps: usize) -> McConfigMd {
    McConfigMd {
        reps,
        base_seed: 3,
        frame_seed: 3,
        ..McConfigMd::default()
    }
}

#[test]
fn ks_quantile_grid() {
    let n = 100;
    let samples: Vec<f64> = (1..=n)
        .map(|i| normal_quantile((i as f64 - 0.5) / n as f64).unwrap())
        .collect();
    assert!((ks_to_normal(&samples).unwrap() - 0.005).abs() < 1e-9);
}

#[test]
fn ks_edge_cases() {
    assert_eq!(ks_to_normal(&[0.0]).unwrap(), 0.5);
    assert!(matches!(ks_to_normal(&[]), Err(Error::EmptySample)));
    assert!(ks_to_normal(&[0.0, f64::NAN]).is_err());
}

#[test]
fn ks_gaussian_samples_within_dkw() {
    let n = 10000;
    let passes = (0..20)
        .filter(|&stream| {
            let mut rng = SeededRng::new(Seed::new(50, stream));
            let xs: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            ks_to_normal(&xs).unwrap() <= 1.95 / (n as f64).sqrt()
        })
        .count();
    assert!(passes >= 19, "{passes}");
}

#[test]
fn single_rep_cell() {
    let s = run_md_cell(&quick_md(1)).unwrap();
    assert!(s.coverage_mean == 0.0 || s.coverage_mean == 1.0);
    assert_eq!(s.coverage_std, 0.0);
    assert_eq!(s.reps, 1);
    assert_eq!(s.per_rep.len(), 1);
    assert_eq!(s.per_rep[0].stream, 1);
}

#[test]
fn coverage_std_is_binomial() {
    let s = run_md_cell(&quick_md(12)).unwrap();
    let p = s.per_rep.iter().filter(|r| r.covered).count() as f64 / 12.0;
    assert_eq!(s.coverage_mean, p);
    assert!((s.coverage_std - (p * (1.0 - p) / 12.0).sqrt()).abs() <= 1e-12);
    for r in &s.per_rep {
        assert_eq!(r.covered, r.lower <= r.target && r.target <= r.upper);
    }
}

#[test]
fn invalid_configs_rejected() {
    assert!(run_md_cell(&McConfigMd {
        reps: 0,
        ..quick_md(1)
    })
    .is_err());
    assert!(run_md_cell(&McConfigMd {
        r: 2,
        ..quick_md(1)
    })
    .is_err());
    assert!(run_md_cell(&McConfigMd {
        alpha: 1.5,
        ..quick_md(1)
    })
    .is_err());
    assert!(run_md_cell(&McConfigMd {
        a_spec: ASpec::Custom(vec![1.0; 200]),
        ..quick_md(1)
    })
    .is_err());
    assert!(run_pca_cell(&McConfigPca {
        a_spec: ASpec::Coordinate(200),
        reps: 1,
        ..McConfigPca::default()
    })
    .is_err());
}

#[test]
fn md_schedule_independent() {
    let cfg = quick_md(6);
    let specs = [ASpec::ConstantVector, ASpec::Coordinate(0)];
    let one = run_md_cell_targets(&cfg, &specs, Some(1)).unwrap();
    let three = run_md_cell_targets(&cfg, &specs, Some(3)).unwrap();
    assert_eq!(one, three);
    assert_eq!(one[0], run_md_cell(&cfg).unwrap());
    let again = run_md_cell_targets(&cfg, &specs, None).unwrap();
    assert_eq!(
        summary_csv(&[("x".into(), one[1].clone())]).unwrap(),
        summary_csv(&[("x".into(), again[1].clone())]).unwrap()
    );
}

#[test]
fn pca_schedule_independent() {
    let cfg = McConfigPca {
        reps: 4,
        base_seed: 9,
        frame_seed: 9,
        ..McConfigPca::default()
    };
    let specs = [ASpec::ConstantVector, ASpec::Coordinate(0)];
    let one = run_pca_cell_targets(&cfg, &specs, Some(1)).unwrap();
    let two = run_pca_cell_targets(&cfg, &specs, Some(2)).unwrap();
    assert_eq!(one, two);
}

#[test]
fn grid_layout_and_seeding() {
    let grid = md_grid(&quick_md(2));
    assert_eq!(grid.len(), 9);
    assert_eq!(grid[0].0, "delta=1*ln(n);lambda_min=2*sqrt(n)");
    assert_eq!(grid[8].0, "delta=3*ln(n);lambda_min=6*sqrt(n)");
    for (c, (_, cfg)) in grid.iter().enumerate() {
        assert_eq!((cfg.delta_mult, cfg.lambda_min_mult), GRID[c]);
        assert_eq!(cfg.frame_seed, 3);
    }
    let bases: std::collections::BTreeSet<u64> = grid.iter().map(|(_, c)| c.base_seed).collect();
    assert_eq!(bases.len(), 9);
    let pgrid = pca_grid(&McConfigPca::default());
    assert_eq!(
        pgrid[4].0,
        "delta=2*(lambda_min+sigma2)*ln(n)/sqrt(n);lambda_min=4*sigma2*ln(n)"
    );
}

#[test]
fn ground_truth_spectrum() {
    let cfg = McConfigMd {
        delta_mult: 2.0,
        lambda_min_mult: 4.0,
        ..McConfigMd::default()
    };
    let t = cfg.ground_truth().unwrap();
    let n = 200f64;
    let lmin = 4.0 * n.sqrt();
    let expected = [5.0 * lmin, 5.0 * lmin - 2.0 * n.ln(), lmin];
    assert_eq!(t.lambda(), &expected);
    let dec = sym_eig(t.s(), OrderingMode::ByMagnitudeDesc).unwrap();
    for k in 0..3 {
        assert!((dec.eigenvalue(k) - expected[k]).abs() < 1e-9);
    }
    let p = McConfigPca::default();
    let tp = p.ground_truth().unwrap();
    let lmin = 2.0 * 300f64.ln();
    assert_eq!(tp.lambda()[2], lmin);
    assert!(
        (tp.lambda()[0] - tp.lambda()[1] - (lmin + 1.0) * 300f64.ln() / 300f64.sqrt()).abs()
            < 1e-12
    );
}

#[test]
fn summary_round_trip() {
    let grid = md_grid(&quick_md(2));
    let cells: Vec<(String, McSummary)> = grid
        .iter()
        .map(|(label, cfg)| (label.clone(), run_md_cell(cfg).unwrap()))
        .collect();
    let text = summary_csv(&cells).unwrap();
    let rows = parse_summary_csv(&text).unwrap();
    assert_eq!(rows.len(), 9);
    for ((label, s), row) in cells.iter().zip(&rows) {
        assert_eq!(*row, SummaryRow::from_summary(label, s));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    emit_summary(&cells, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn empty_summary_is_header_only() {
    let text = summary_csv(&[]).unwrap();
    assert_eq!(text, format!("{}\n", SUMMARY_HEADER.join(",")));
    assert!(parse_summary_csv(&text).unwrap().is_empty());
    assert!(parse_summary_csv("a,b\n").is_err());
}

#[test]
fn histograms_written() {
    let s = run_md_cell(&quick_md(5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_histograms(&s, "cell <1>", dir.path(), "cell1").unwrap();
    let svg = std::fs::read_to_string(dir.path().join("cell1_biased.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains("version=\"1.1\""));
    assert!(svg.contains("cell &lt;1&gt; (biased)"));
    assert_eq!(svg.matches("<rect").count(), HIST_BINS);
    assert!(svg.contains("<polyline"));
    assert!(dir.path().join("cell1_debiased.svg").exists());
    let counts = histogram_counts(&[-5.0, -4.0, 0.0, 3.99, 4.0, 5.0]);
    assert_eq!(counts.iter().sum::<usize>(), 4);
    assert_eq!(counts[0], 1);
    assert_eq!(counts[HIST_BINS - 1], 2);
}

// At σ = 0.01 every quantity rescales, so the standardized statistics match
// the σ = 1 cell. Standardizing by the theoretical deviation, which carries a
// factor 2 over the GOE variance σ²(‖x‖²‖y‖² + (xᵀy)²), gives sd near 1/√2.
#[test]
fn small_noise_standardization() {
    let cfg = McConfigMd {
        sigma: 0.01,
        lambda_min_mult: 6.0,
        delta_mult: 3.0,
        reps: 1000,
        base_seed: 51,
        frame_seed: 51,
        ..McConfigMd::default()
    };
    let s = run_md_cell(&cfg).unwrap();
    let reps = s.reps as f64;
    let sd = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / reps;
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1.0)).sqrt()
    };
    let biased_sd = sd(&s.stats_biased);
    assert!(
        (biased_sd - std::f64::consts::FRAC_1_SQRT_2).abs()
            <= 0.1 * std::f64::consts::FRAC_1_SQRT_2,
        "{biased_sd}"
    );
    let mean = s.stats_debiased.iter().sum::<f64>() / reps;
    assert!(mean.abs() <= 4.0 / reps.sqrt(), "{mean}");
}
