use proptest::prelude::*;
use spectralci::linalg::*;
use spectralci::models::*;
use spectralci::rng::Seed;
use spectralci::Error;

fn gram_defect(u: &Matrix<f64>) -> f64 {
    u.orthonormality_defect()
}

#[test]
fn goe_zero_sigma_is_zero() {
    let n = goe_sample::<f64>(5, 0.0, Seed::new(1, 0)).unwrap();
    assert_eq!(n, SymMatrix::zeros(5));
}

#[test]
fn goe_rejects_empty() {
    assert!(matches!(
        goe_sample::<f64>(0, 1.0, Seed::new(1, 0)),
        Err(Error::InvalidDimension(_))
    ));
}

#[test]
fn goe_moments() {
    let n = 2000;
    let m = goe_sample::<f64>(n, 1.0, Seed::new(11, 0)).unwrap();
    let (mut s, mut s2, mut d2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        d2 += m.get(i, i).powi(2);
        for j in i + 1..n {
            let x = m.get(i, j);
            s += x;
            s2 += x * x;
        }
    }
    let cnt = (n * (n - 1) / 2) as f64;
    let mean = s / cnt;
    assert!(mean.abs() <= 4.0 / cnt.sqrt(), "{mean}");
    let var = s2 / cnt - mean * mean;
    assert!((var - 1.0).abs() <= 0.05, "{var}");
    let dvar = d2 / n as f64;
    assert!((dvar - 2.0).abs() <= 0.3, "{dvar}");
}

#[test]
fn goe_operator_norm() {
    let n = 500;
    for stream in 0..20 {
        let m = goe_sample::<f64>(n, 1.0, Seed::new(3, stream)).unwrap();
        let dec = sym_eig(&m, OrderingMode::ByMagnitudeDesc).unwrap();
        assert!(dec.eigenvalue(0).abs() <= 3.0 * (n as f64).sqrt());
    }
}

#[test]
fn goe_frobenius_mean() {
    let (n, sigma) = (100, 0.7);
    let mut acc = 0.0;
    for stream in 0..50 {
        let m = goe_sample::<f64>(n, sigma, Seed::new(5, stream)).unwrap();
        acc += m.frobenius_norm().powi(2);
    }
    let expected = sigma * sigma * (n * n + n) as f64;
    assert!((acc / 50.0 - expected).abs() <= 0.05 * expected);
}

#[test]
fn goe_deterministic_and_symmetric() {
    let a = goe_sample::<f64>(30, 1.3, Seed::new(9, 4)).unwrap();
    let b = goe_sample::<f64>(30, 1.3, Seed::new(9, 4)).unwrap();
    assert_eq!(a, b);
    let c = goe_sample::<f64>(30, 1.3, Seed::new(9, 5)).unwrap();
    assert_ne!(a, c);
    let m = a.as_matrix();
    for i in 0..30 {
        for j in 0..30 {
            assert_eq!(m[(i, j)], m[(j, i)]);
        }
    }
}

fn small_truth(sigma: f64) -> GroundTruthMd<f64> {
    let u = random_orthonormal_frame(12, 2, Seed::new(2, 0)).unwrap();
    GroundTruthMd::new(u, vec![6.0, -3.0], sigma).unwrap()
}

#[test]
fn md_observation_examples() {
    let t = small_truth(0.0);
    assert_eq!(md_observation(&t, Seed::new(1, 1)).unwrap(), *t.s());
    let t = small_truth(0.5);
    let a = md_observation(&t, Seed::new(1, 1)).unwrap();
    assert_eq!(a, md_observation(&t, Seed::new(1, 1)).unwrap());
    let noise = goe_sample(12, 0.5, Seed::new(1, 1)).unwrap();
    assert_eq!(a, t.s().add(&noise).unwrap());
}

#[test]
fn md_truth_quantities() {
    let t = small_truth(1.0);
    assert_eq!(t.lambda_min(), 3.0);
    assert_eq!(t.lambda_max(), 6.0);
    assert_eq!(t.kappa(), 2.0);
    assert_eq!(t.eigengap(0), 9.0);
    assert_eq!(t.min_eigengap(), 9.0);
    let single = GroundTruthMd::new(
        random_orthonormal_frame(6, 1, Seed::new(0, 0)).unwrap(),
        vec![4.0],
        1.0,
    )
    .unwrap();
    assert_eq!(single.eigengap(0), 4.0);
    let dec = sym_eig(t.s(), OrderingMode::ByMagnitudeDesc).unwrap();
    assert!((dec.eigenvalue(0) - 6.0).abs() < 1e-12);
    assert!((dec.eigenvalue(1) + 3.0).abs() < 1e-12);
}

#[test]
fn md_truth_rejects_zero_eigenvalue() {
    let u = random_orthonormal_frame(6, 2, Seed::new(0, 0)).unwrap();
    assert!(GroundTruthMd::new(u, vec![1.0, 0.0], 1.0).is_err());
}

#[test]
fn frame_examples() {
    let u1 = random_orthonormal_frame::<f64>(10, 1, Seed::new(4, 0)).unwrap();
    assert!((norm(&u1.column(0)) - 1.0).abs() < 1e-14);
    let u3 = random_orthonormal_frame::<f64>(200, 3, Seed::new(4, 0)).unwrap();
    assert!(gram_defect(&u3) <= 1e-10);
    assert_eq!(
        u3,
        random_orthonormal_frame::<f64>(200, 3, Seed::new(4, 0)).unwrap()
    );
    assert!(random_orthonormal_frame::<f64>(3, 4, Seed::new(4, 0)).is_err());
}

#[test]
fn gmmb_four_by_four() {
    let t = gmmb_signal(4, 0.0f64, 2.0, 0.0, &Matrix::identity(2), 1.0).unwrap();
    let z = Matrix::from_rows(&[
        vec![1.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.0, 1.0],
    ])
    .unwrap();
    assert_eq!(z.gram_cols(), Matrix::diagonal(&[2.0, 2.0]));
    let mut expected = z
        .matmul(&Matrix::diagonal(&[2.0, 2.0]))
        .unwrap()
        .matmul(&z.transpose())
        .unwrap();
    expected.scale(0.25);
    assert!(t.s().as_matrix().sub(&expected).unwrap().max_abs() < 1e-14);
    for l in t.lambda() {
        assert!((l - 1.0).abs() < 1e-14);
    }
}

#[test]
fn gmmb_alpha_zero_structure() {
    let n = 40;
    let t = gmmb_signal(n, 0.0f64, 7.0, 2.0, &Matrix::identity(2), 1.0).unwrap();
    let u1 = t.eigenvector(0);
    let u2 = t.eigenvector(1);
    assert!(dot(&u1, &u2).abs() < 1e-12);
    for i in 1..n / 2 {
        assert!((u1[i] - u1[0]).abs() < 1e-12);
    }
    for i in n / 2 + 1..n {
        assert!((u1[i] - u1[n / 2]).abs() < 1e-12);
    }
    let expected = SymMatrix::from_upper_fn(n, |i, j| {
        if (i < n / 2) == (j < n / 2) {
            if i < n / 2 {
                9.0 / n as f64
            } else {
                7.0 / n as f64
            }
        } else {
            0.0
        }
    });
    assert!(t.s().sub(&expected).unwrap().frobenius_norm() < 1e-12);
    // ZᵀZ at α = 0 has λ_min = n/2.
    assert!((t.lambda_min() - 7.0 / 2.0).abs() < 1e-12);
}

#[test]
fn gmmb_gap_lower_bound() {
    let n = 200usize;
    let sigma = 1.0;
    let lambda = 2.0 * (n as f64).sqrt() * sigma;
    let eps = (n as f64).ln() * sigma;
    let t = gmmb_signal(n, 0.05, lambda, eps, &Matrix::identity(2), sigma).unwrap();
    let dec = sym_eig(t.s(), OrderingMode::ByMagnitudeDesc).unwrap();
    assert!(dec.eigenvalue(0) - dec.eigenvalue(1) >= eps / 100.0);
    let shat = rank_r_truncation(&dec, 2).unwrap();
    assert!(shat.sub(t.s()).unwrap().frobenius_norm() < 1e-10);
}

#[test]
fn gmmb_rounding_and_validation() {
    let t = gmmb_signal(201, 0.05, 5.0, 1.0, &Matrix::identity(2), 1.0).unwrap();
    assert_eq!(t.n(), 201);
    assert!(gram_defect(t.u()) <= 1e-10);
    assert!(matches!(
        gmmb_signal(10, 1.0, 5.0, 1.0, &Matrix::identity(2), 1.0),
        Err(Error::InvalidPartition(_))
    ));
    assert!(matches!(
        gmmb_signal(1, 0.0, 5.0, 1.0, &Matrix::identity(2), 1.0),
        Err(Error::InvalidPartition(_))
    ));
}

#[test]
fn spiked_diagonal_model() {
    let t = diagonal_spiked_cov(6, 4.0f64, 1.5, 0.5).unwrap();
    assert_eq!(
        *t.sigma0(),
        SymMatrix::diagonal(&[5.5, 4.0, 0.0, 0.0, 0.0, 0.0])
    );
    assert_eq!(t.eigengap(0), 1.5);
}

#[test]
fn spiked_dense_model() {
    let p = 8;
    let t = dense_spiked_cov(p, 4.0f64, 1.5, 0.5).unwrap();
    assert!(gram_defect(t.u()) <= 1e-14);
    let m = t.sigma0().as_matrix();
    for i in 0..p {
        for j in 0..p {
            let same = (i < p / 2) == (j < p / 2);
            let expected = if same {
                (5.5 + 4.0) / p as f64
            } else {
                (5.5 - 4.0) / p as f64
            };
            assert!((m[(i, j)] - expected).abs() < 1e-14);
        }
    }
    assert_eq!(t.eigengap(0), 1.5);
    assert!(dense_spiked_cov(7, 4.0f64, 1.5, 0.5).is_err());
}

#[test]
fn spiked_rank_one_noiseless() {
    let u = random_orthonormal_frame::<f64>(5, 1, Seed::new(8, 0)).unwrap();
    let t = spiked_cov(u.clone(), vec![1.0f64], 0.0).unwrap();
    let dec = sym_eig(&t.covariance(), OrderingMode::ByValueDesc).unwrap();
    assert!((dec.eigenvalue(0) - 1.0).abs() < 1e-14);
    for k in 1..5 {
        assert!(dec.eigenvalue(k).abs() < 1e-14);
    }
    let outer = u.matmul(&u.transpose()).unwrap();
    assert!(t.covariance().as_matrix().sub(&outer).unwrap().max_abs() < 1e-15);
}

#[test]
fn spiked_eigenvalues_and_order() {
    let u = random_orthonormal_frame::<f64>(9, 3, Seed::new(8, 1)).unwrap();
    let t = spiked_cov(u.clone(), vec![5.0f64, 3.0, 2.0], 0.25).unwrap();
    let dec = sym_eig(&t.covariance(), OrderingMode::ByValueDesc).unwrap();
    let expected = [5.25, 3.25, 2.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25];
    for (k, e) in expected.iter().enumerate() {
        assert!((dec.eigenvalue(k) - e).abs() < 1e-12);
    }
    assert!(matches!(
        spiked_cov(u, vec![3.0, 5.0, 2.0], 0.25),
        Err(Error::NonDescendingSpectrum)
    ));
}

#[test]
fn pca_sample_noiseless_rank_one() {
    let u = random_orthonormal_frame(7, 1, Seed::new(1, 2)).unwrap();
    let t = spiked_cov(u.clone(), vec![2.0], 0.0).unwrap();
    let x = pca_sample(&t, 25, Seed::new(1, 3)).unwrap();
    let u1 = u.column(0);
    for c in 0..25 {
        let col = x.column(c);
        let coef = dot(&col, &u1);
        let resid: Vec<f64> = col.iter().zip(&u1).map(|(a, b)| a - coef * b).collect();
        assert!(norm(&resid) <= 1e-12 * norm(&col).max(1.0));
    }
    assert_eq!(x, pca_sample(&t, 25, Seed::new(1, 3)).unwrap());
}

#[test]
fn pca_sample_identity_concentration() {
    let (p, n) = (50, 20000);
    let u = random_orthonormal_frame(p, 1, Seed::new(2, 2)).unwrap();
    let t = spiked_cov(u, vec![1e-12], 1.0).unwrap();
    let x = pca_sample(&t, n, Seed::new(2, 3)).unwrap();
    let mut cov = x.gram_rows();
    cov.scale(1.0 / n as f64);
    let diff = SymMatrix::from_matrix(cov.sub(&Matrix::identity(p)).unwrap()).unwrap();
    let dec = sym_eig(&diff, OrderingMode::ByMagnitudeDesc).unwrap();
    assert!(dec.eigenvalue(0).abs() <= 0.1);
}

#[test]
fn pca_sample_spike_covariance() {
    let (p, n) = (20, 20000);
    let u = random_orthonormal_frame(p, 2, Seed::new(6, 0)).unwrap();
    let t = spiked_cov(u.clone(), vec![4.0, 2.0], 0.5).unwrap();
    let x = pca_sample(&t, n, Seed::new(6, 1)).unwrap();
    let proj = u.transpose().matmul(&x).unwrap();
    let mut c = proj.gram_rows();
    c.scale(1.0 / n as f64);
    let target = [[4.5, 0.0], [0.0, 2.5]];
    for a in 0..2 {
        for b in 0..2 {
            assert!((c[(a, b)] - target[a][b]).abs() <= 0.1 * 4.5, "{a}{b}");
        }
    }
    let cov = SymMatrix::from_matrix(x.gram_rows()).unwrap();
    let dec = sym_eig(&cov, OrderingMode::ByValueDesc).unwrap();
    assert!(dec.eigenvalues().iter().all(|l| *l >= -1e-8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frame_is_orthonormal(n in 1usize..40, r_frac in 0.0f64..1.0, base in any::<u64>()) {
        let r = 1 + ((n - 1) as f64 * r_frac) as usize;
        let u = random_orthonormal_frame::<f64>(n, r, Seed::new(base, 0)).unwrap();
        prop_assert!(u.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn goe_symmetric(n in 1usize..30, base in any::<u64>(), stream in any::<u64>()) {
        let m = goe_sample::<f64>(n, 1.0, Seed::new(base, stream)).unwrap();
        let a = m.as_matrix();
        prop_assert_eq!(a.clone(), a.transpose());
    }
}
