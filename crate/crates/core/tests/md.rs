use proptest::prelude::*;
use spectralci::inference::InferenceResult;
use spectralci::linalg::*;
use spectralci::md::*;
use spectralci::models::*;
use spectralci::montecarlo::McConfigMd;
use spectralci::rng::Seed;
use spectralci::theory::{gamma_md_oracle_in, orthogonal_complement};
use spectralci::Error;
use std::collections::BTreeMap;

fn diag_dec(values: &[f64]) -> SpectralDecomposition<f64> {
    SpectralDecomposition::from_parts(
        values.to_vec(),
        Matrix::identity(values.len()),
        OrderingMode::ByMagnitudeDesc,
    )
    .unwrap()
}

fn table1_truth() -> GroundTruthMd<f64> {
    let cfg = McConfigMd {
        lambda_min_mult: 6.0,
        delta_mult: 3.0,
        ..McConfigMd::default()
    };
    cfg.ground_truth().unwrap()
}

#[test]
fn noise_examples() {
    let s = SymMatrix::<f64>::from_rows(&[
        vec![0.0, 2.0, 0.0],
        vec![2.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0],
    ])
    .unwrap();
    assert!((estimate_noise_md(&s, 0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
    assert_eq!(estimate_noise_md(&s, 3).unwrap(), 0.0);
    assert!(matches!(
        estimate_noise_md(&s, 4),
        Err(Error::RankOutOfRange { .. })
    ));
    let one = SymMatrix::<f64>::diagonal(&[1.0]);
    assert!(matches!(
        estimate_noise_md(&one, 0),
        Err(Error::DimensionTooSmall(1))
    ));
}

#[test]
fn noise_estimate_concentrates() {
    let truth = table1_truth();
    for stream in 0..50 {
        let s = md_observation(&truth, Seed::new(21, stream)).unwrap();
        let s2 = estimate_noise_md(&s, 3).unwrap();
        assert!((s2 - 1.0).abs() <= 0.25, "{stream}: {s2}");
    }
}

#[test]
fn bias_examples() {
    let dec = diag_dec(&[10.0, 1.0, 0.5]);
    assert!((bias_md(&dec, 1, 0, 1.0).unwrap() - 0.02342601).abs() < 1e-8);
    assert_eq!(bias_md(&dec, 1, 0, 0.0).unwrap(), 0.0);
    assert_eq!(bias_md(&dec, 3, 0, 1.0).unwrap(), 0.0);
    let tie = diag_dec(&[10.0, 1.0, 1.0]);
    assert!(matches!(
        bias_md(&tie, 2, 1, 1.0),
        Err(Error::DegenerateGap { .. })
    ));
}

#[test]
fn debias_examples() {
    let dec = diag_dec(&[10.0, 1.0, 0.5]);
    assert!((debias_eigenvalue_md(&dec, 1, 0, 1.0).unwrap() - 9.7836257).abs() < 1e-6);
    assert_eq!(debias_eigenvalue_md(&dec, 1, 0, 0.0).unwrap(), 10.0);
}

// The removed shift is about (n - r)σ²/λ_j while uᵀNu has sd √2σ, so the
// per-seed win rate tops out near Φ(γ/(2√2)); the mean shift must vanish.
#[test]
fn debias_removes_eigenvalue_shift() {
    let truth = table1_truth();
    let reps = 100;
    let mut wins = [0usize; 3];
    let mut shift_hat = [0.0f64; 3];
    let mut shift_check = [0.0f64; 3];
    for stream in 0..reps {
        let s = md_observation(&truth, Seed::new(22, stream)).unwrap();
        let est = MdEstimates::estimate(&s, 3).unwrap();
        for j in 0..3 {
            let lj = truth.lambda()[j];
            let e_hat = est.dec.eigenvalue(j) - lj;
            let e_check = est.lambda_check[j] - lj;
            wins[j] += usize::from(e_check.abs() <= e_hat.abs());
            shift_hat[j] += e_hat / reps as f64;
            shift_check[j] += e_check / reps as f64;
        }
    }
    for j in 0..3 {
        assert!(wins[j] > reps as usize / 2, "component {j}: {}", wins[j]);
        assert!(shift_check[j].abs() < shift_hat[j].abs(), "component {j}");
        assert!(
            shift_check[j].abs() <= 3.0 * (2.0f64 / reps as f64).sqrt(),
            "component {j}"
        );
    }
}

#[test]
fn variance_examples() {
    let dec = diag_dec(&[10.0, 1.0, 0.5]);
    let est = MdEstimates::from_parts(dec.clone(), 1, 1.0, vec![0.0], vec![10.0]).unwrap();
    let s = variance_md(&est, &[0.0, 1.0, 0.0], 0).unwrap();
    assert!((s - 0.1414214).abs() < 1e-7);
    assert_eq!(variance_md(&est, &[1.0, 0.0, 0.0], 0).unwrap(), 0.0);

    let est2 = MdEstimates::from_parts(dec, 2, 1.0, vec![0.0, 0.0], vec![10.0, 5.0]).unwrap();
    let s = variance_md(&est2, &[0.0, 1.0, 0.0], 0).unwrap();
    assert!((s - (2.0f64 / 25.0).sqrt()).abs() < 1e-12);
    assert!((s - 0.2828427).abs() < 1e-7);

    assert!(matches!(
        variance_md(&est2, &[0.0, 2.0, 0.0], 0),
        Err(Error::NotUnitVector(_))
    ));
    let zero =
        MdEstimates::from_parts(diag_dec(&[10.0, 1.0, 0.5]), 1, 1.0, vec![0.0], vec![0.0]).unwrap();
    assert!(matches!(
        variance_md(&zero, &[0.0, 1.0, 0.0], 0),
        Err(Error::ZeroEigenvalue(0))
    ));
    let tie = MdEstimates::from_parts(
        diag_dec(&[10.0, 1.0, 0.5]),
        2,
        1.0,
        vec![0.0, 0.0],
        vec![5.0, 5.0],
    )
    .unwrap();
    assert!(matches!(
        variance_md(&tie, &[0.0, 0.0, 1.0], 0),
        Err(Error::DegenerateGap { .. })
    ));
}

#[test]
fn assembled_interval() {
    let point = 0.5 * 1.0225f64.sqrt();
    let ci = InferenceResult::new(point, 0.1, 0.05, BTreeMap::new()).unwrap();
    assert!((ci.point - 0.5056).abs() < 1e-3);
    assert!((ci.lower - 0.3096).abs() < 1e-3);
    assert!((ci.upper - 0.7016).abs() < 1e-3);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let dec = SpectralDecomposition::from_parts(
        vec![10.0, 1.0, 0.5],
        Matrix::from_rows(&[vec![h, -h, 0.0], vec![h, h, 0.0], vec![0.0, 0.0, 1.0]]).unwrap(),
        OrderingMode::ByMagnitudeDesc,
    )
    .unwrap();
    let a = [(0.5 + 0.75f64.sqrt()) * h, (0.5 - 0.75f64.sqrt()) * h, 0.0];
    let est = MdEstimates::from_parts(dec, 1, 0.5, vec![0.0225], vec![10.0]).unwrap();
    let ci = ci_md_from(&est, 0, &a, 0.05).unwrap();
    assert!((ci.point - 0.5056).abs() < 1e-3);
    assert!((ci.s_hat - 0.1 * 0.75f64.sqrt()).abs() < 1e-12);
}

#[test]
fn half_variance_halves_width() {
    let a = InferenceResult::<f64>::new(0.3, 0.2, 0.1, BTreeMap::new()).unwrap();
    let b = InferenceResult::<f64>::new(0.3, 0.1, 0.1, BTreeMap::new()).unwrap();
    assert!((a.width() - 2.0 * b.width()).abs() < 1e-15);
    assert!((a.width() - 2.0 * normal_quantile(0.95).unwrap() * 0.2).abs() < 1e-12);
}

#[test]
fn pipeline_diagnostics_and_errors() {
    let truth = table1_truth();
    let s = md_observation(&truth, Seed::new(5, 1)).unwrap();
    let a = constant_unit_vector(truth.n());
    let ci = ci_md(&s, 3, 0, &a, 0.05).unwrap();
    for key in [
        "sigma2_hat",
        "b_hat_j",
        "s_hat",
        "lambda_check_1",
        "lambda_check_3",
        "lambda_hat_2",
    ] {
        assert!(ci.diagnostics.contains_key(key), "{key}");
    }
    assert!(ci.lower <= ci.point && ci.point <= ci.upper);
    assert!(((ci.point - ci.lower) - (ci.upper - ci.point)).abs() <= 1e-12);
    assert!(matches!(
        ci_md(&s, 3, 3, &a, 0.05),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(ci_md(&s, 3, 0, &a, 0.0).is_err());
    assert!(ci_md(&s, 3, 0, &a, 1.0).is_err());
    assert!(matches!(
        ci_md(&s, 200, 0, &a, 0.05),
        Err(Error::RankOutOfRange { .. })
    ));
    assert!(matches!(
        ci_md_entrywise(&s, 3, 0, 200, 0.05),
        Err(Error::IndexOutOfRange { .. })
    ));
}

#[test]
fn entrywise_matches_variance_with_basis_vector() {
    let truth = table1_truth();
    let s = md_observation(&truth, Seed::new(5, 2)).unwrap();
    let est = MdEstimates::estimate(&s, 3).unwrap();
    for i in [0, 17, 199] {
        let ci = ci_md_entrywise_from(&est, 1, i, 0.05).unwrap();
        let e = basis_vector(200, i).unwrap();
        assert_eq!(ci.s_hat, variance_md(&est, &e, 1).unwrap());
        assert_eq!(ci.point, est.dec.eigenvectors()[(i, 1)]);
    }
    assert_eq!(
        ci_md_entrywise(&s, 3, 1, 17, 0.05).unwrap().point,
        est.dec.eigenvectors()[(17, 1)]
    );
}

#[test]
fn entrywise_zero_noise_degenerate() {
    let dec = diag_dec(&[10.0, 1.0, 0.5]);
    let est = MdEstimates::from_decomposition(dec, 1, 0.0).unwrap();
    let ci = ci_md_entrywise_from(&est, 0, 1, 0.05).unwrap();
    assert_eq!(ci.width(), 0.0);
    assert_eq!(ci.point, 0.0);
}

#[test]
fn gamma_hat_tracks_oracle() {
    let truth = table1_truth();
    let perp = orthogonal_complement(truth.u()).unwrap();
    let bound_scale = 10.0 * truth.sigma().powi(2) * truth.r() as f64;
    for stream in 0..100 {
        let (s, noise) = md_observation_with_noise(&truth, Seed::new(23, stream)).unwrap();
        let est = MdEstimates::estimate(&s, 3).unwrap();
        for j in 0..3 {
            let lj = est.dec.eigenvalue(j);
            let hat = gamma_hat_md(&est.dec, 3, j, est.sigma2_hat).unwrap();
            let oracle = gamma_md_oracle_in(lj, truth.sigma().powi(2), &noise, &perp).unwrap();
            assert!(
                (hat - oracle).abs() <= bound_scale / lj.abs(),
                "{stream}/{j}"
            );
        }
    }
}

fn random_sym(n: usize) -> impl Strategy<Value = SymMatrix<f64>> {
    prop::collection::vec(-5.0f64..5.0, n * (n + 1) / 2).prop_map(move |v| {
        let mut it = v.into_iter();
        SymMatrix::from_upper_fn(n, |_, _| it.next().unwrap())
    })
}

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let nv = norm(&v);
    (nv > 1e-3).then(|| v.iter().map(|x| x / nv).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bias_linear_in_sigma2(s in random_sym(8), c in 0.0f64..10.0) {
        let dec = sym_eig(&s, OrderingMode::ByMagnitudeDesc).unwrap();
        if let Ok(base) = bias_md(&dec, 2, 0, 1.0) {
            let scaled = bias_md(&dec, 2, 0, c).unwrap();
            prop_assert!((scaled - c * base).abs() <= 1e-12 * (1.0 + c * base));
            prop_assert!(base >= 0.0);
        }
    }

    #[test]
    fn variance_linear_in_sigma2_with_fixed_bias(s in random_sym(8), v in prop::collection::vec(-1.0f64..1.0, 8), c in 0.01f64..10.0) {
        let Some(a) = unit(v) else { return Ok(()) };
        let dec = sym_eig(&s, OrderingMode::ByMagnitudeDesc).unwrap();
        let Ok(est) = MdEstimates::from_decomposition(dec, 3, 1.0) else { return Ok(()) };
        let scaled = MdEstimates::from_parts(est.dec.clone(), 3, c, est.b_hat.clone(), est.lambda_check.clone()).unwrap();
        if let (Ok(s1), Ok(sc)) = (variance_md(&est, &a, 0), variance_md(&scaled, &a, 0)) {
            prop_assert!((sc * sc - c * s1 * s1).abs() <= 1e-10 * (1.0 + c * s1 * s1));
        }
    }

    #[test]
    fn completeness_identity(s in random_sym(10), v in prop::collection::vec(-1.0f64..1.0, 10), r in 1usize..10) {
        let Some(a) = unit(v) else { return Ok(()) };
        let dec = sym_eig(&s, OrderingMode::ByMagnitudeDesc).unwrap();
        let proj = dec.leading_projections(&a, r);
        let inside: f64 = proj.iter().map(|x| x * x).sum();
        let outside: f64 = (r..10).map(|k| dot(&dec.eigenvector(k), &a).powi(2)).sum();
        prop_assert!((inside + outside - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn interval_symmetric(point in -1.0f64..1.0, s in 0.0f64..1.0, alpha in 0.001f64..0.999) {
        let ci = InferenceResult::new(point, s, alpha, BTreeMap::new()).unwrap();
        prop_assert!(((ci.point - ci.lower) - (ci.upper - ci.point)).abs() <= 1e-12);
        let z = normal_quantile(1.0 - alpha / 2.0).unwrap();
        prop_assert!((ci.width() - 2.0 * z * s).abs() <= 1e-12);
    }
}
