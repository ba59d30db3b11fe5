// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use qcg_core::encodings::*;
use qcg_core::linalg::{c, identity, spectral_norm, unitarity_defect, CMatrix, Complex64};
use qcg_core::polytools::{sign_degree, uniform_grid};
use qcg_core::qsp::SolveOptions;
use qcg_core::Error;

fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_fn(v.len(), v.len(), |i, j| c(if i == j { v[i] } else { 0.0 }))
}

fn hermitian(n: usize, vals: &[f64]) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(vals[(i * n + j) % vals.len()], vals[(j * n + i + 1) % vals.len()])
    });
    let h = (&m + m.adjoint()) * c(0.5);
    let s = spectral_norm(&h);
    if s > 0.0 {
        h * c(0.99 / s)
    } else {
        h
    }
}

fn amplified_poisson(n_qubits: usize, alpha: f64, eps: f64, gap: Option<f64>) -> (LinearSystem, Result<BlockEncoding, Error>) {
    let s = poisson_system(n_qubits, RhsCase::Case1).unwrap();
    let dil = exact_dilation(&(s.matrix() * c(1.0 / alpha))).unwrap();
    let be_a = BlockEncoding::new(dil.unitary().clone(), alpha, 1, n_qubits, 0.0).unwrap();
    let cfg = AmplificationConfig { gamma: 3.0, gap, eps };
    let opts = SolveOptions {
        degree_cap: 4096,
        ..SolveOptions::default()
    };
    let out = amplified_a_prime(&be_a, &cfg, &opts);
    (s, out)
}

#[test]
fn verify_examples() {
    let be = exact_dilation(&diag(&[0.5])).unwrap();
    assert!(verify_block_encoding(&be, &diag(&[0.5])).unwrap() <= 1e-14);
    let id = BlockEncoding::new(identity(2), 1.0, 0, 1, 0.0).unwrap();
    assert_eq!(verify_block_encoding(&id, &identity(2)).unwrap(), 0.0);
    let s = poisson_system(4, RhsCase::Case1).unwrap();
    let be = a_prime_encoding(&s, 4.0).unwrap();
    assert!(verify_block_encoding(&be, &a_prime(&s, 4.0)).unwrap() <= 1e-12);
    assert!(matches!(
        verify_block_encoding(&be, &identity(4)),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn dilation_examples() {
    let be = exact_dilation(&diag(&[0.5])).unwrap();
    let u = be.unitary();
    let r = 0.75f64.sqrt();
    let want = [[0.5, r], [r, -0.5]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((u[(i, j)] - c(want[i][j])).norm() < 1e-15);
        }
    }
    assert_eq!((be.alpha(), be.n_a(), be.eps()), (1.0, 1, 0.0));
    let be = exact_dilation(&identity(4)).unwrap();
    let mut want = identity(8);
    for k in 4..8 {
        want[(k, k)] = c(-1.0);
    }
    assert!((be.unitary() - want).norm() < 1e-15);
    let s = poisson_system(3, RhsCase::Case1).unwrap();
    let be = exact_dilation(&a_prime(&s, 4.0)).unwrap();
    assert!(verify_block_encoding(&be, &a_prime(&s, 4.0)).unwrap() <= 1e-12);
    assert!(matches!(exact_dilation(&diag(&[1.01])), Err(Error::Norm(_))));
    assert!(exact_dilation(&diag(&[1.0 + 1e-13])).is_ok());
}

#[test]
fn poisson_examples() {
    let s = poisson_system(2, RhsCase::Case1).unwrap();
    assert_eq!((s.kappa() * 100.0).round() / 100.0, 9.47);
    let s = poisson_system(4, RhsCase::Case1).unwrap();
    assert_eq!(s.kappa().round(), 116.0);
    assert_eq!((s.norm_a() * 100.0).round() / 100.0, 3.97);
    let s = poisson_system(1, RhsCase::Case2).unwrap();
    assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14 && (s.eigenvalues()[1] - 3.0).abs() < 1e-14);
    assert!((s.kappa() - 3.0).abs() < 1e-14);
    let b = poisson_system(4, RhsCase::Case1).unwrap().rhs().clone();
    assert!((b[7].re - 0.5f64.sqrt()).abs() < 1e-15 && (b[8].re - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((b.norm() - 1.0).abs() < 1e-15);
}

#[test]
fn poisson_spectrum_closed_form() {
    for nq in 1..=5 {
        let s = poisson_system(nq, RhsCase::Case2).unwrap();
        let n = 1 << nq;
        let closed: Vec<f64> = (1..=n)
            .map(|j| 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        assert_eq!(poisson_eigenvalues(n).len(), n);
        for (a, b) in s.eigenvalues().iter().zip(&closed) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(s.is_positive_definite());
        assert!((s.kappa() - closed[n - 1] / closed[0]).abs() < 1e-9 * s.kappa());
    }
}

#[test]
fn cyclic_shift_examples() {
    let x = cyclic_shift(1, Direction::Plus);
    assert_eq!(x[(1, 0)], c(1.0));
    assert_eq!(x[(0, 1)], c(1.0));
    let p = cyclic_shift(2, Direction::Plus);
    let p4 = &p * &p * &p * &p;
    assert_eq!(p4, identity(4));
    assert_eq!(&p * cyclic_shift(2, Direction::Minus), identity(4));
    let p3 = cyclic_shift(3, Direction::Plus);
    assert_eq!(p3[(0, 7)], c(1.0));
    assert_eq!(p3[(5, 4)], c(1.0));
}

#[test]
fn lcu_examples() {
    let id = BlockEncoding::new(identity(2), 1.0, 0, 1, 0.0).unwrap();
    let lcu = lcu_a_prime(&id).unwrap();
    assert_eq!((lcu.alpha(), lcu.n_a()), (3.0, 1));
    assert!((lcu.block() - identity(2) * c(1.0 / 3.0)).norm() < 1e-14);
    let zero = exact_dilation(&CMatrix::zeros(2, 2)).unwrap();
    let lcu = lcu_a_prime(&zero).unwrap();
    assert!((lcu.block() + identity(2) * c(1.0 / 3.0)).norm() < 1e-14);
    for nq in [2, 3, 4] {
        let s = poisson_system(nq, RhsCase::Case1).unwrap();
        let dil = exact_dilation(&(s.matrix() * c(0.25))).unwrap();
        let be_a = BlockEncoding::new(dil.unitary().clone(), 4.0, 1, nq, 0.0).unwrap();
        let lcu = lcu_a_prime(&be_a).unwrap();
        assert_eq!(lcu.n_a(), 2);
        assert!(unitarity_defect(lcu.unitary()) < 1e-12);
        assert!(verify_block_encoding(&lcu, &a_prime(&s, 4.0)).unwrap() <= 1e-12);
        assert!((lcu.block() * c(3.0) - a_prime(&s, 4.0)).norm() < 1e-12);
    }
}

#[test]
fn lamp_with_gap_bounds() {
    let cfg = AmplificationConfig { gamma: 3.0, gap: Some(1.0), eps: 0.1 };
    let (p, r) = lamp_poly_with_gap(&cfg, 4.0).unwrap();
    let lp = 0.25;
    let rect = sign_degree((1.0 - lp) / 3.0, 2.0 * lp / 3.0, 0.1 / 6.0).unwrap().degree - 1;
    assert_eq!(r.degree, rect + 1);
    assert_eq!(p.degree(), r.degree);
    assert_eq!(p.eval(0.0), 0.0);
    for x in uniform_grid(0.0, (1.0 - 2.0 * lp) / 3.0, 2000) {
        assert!((3.0 * x - p.eval(x)).abs() <= 0.1);
        assert!((-3.0 * x - p.eval(-x)).abs() <= 0.1);
    }
    for x in uniform_grid(0.0, 1.0 / 3.0, 2000) {
        assert!(p.eval(x).abs() <= 1.0 && p.eval(-x).abs() <= 1.0);
    }
    for x in uniform_grid(1.0 / 3.0, 1.0, 2000) {
        assert!(p.eval(x).abs() <= 0.1 && p.eval(-x).abs() <= 0.1);
    }
    assert!(lamp_poly_with_gap(&AmplificationConfig { gap: Some(2.5), ..cfg }, 4.0).is_err());
    assert!(lamp_poly_with_gap(&AmplificationConfig { gap: None, ..cfg }, 4.0).is_err());
}

#[test]
fn lamp_no_gap_bounds() {
    let (gamma, eps) = (3.0, 0.1);
    let (p, r) = lamp_poly_no_gap_capped(gamma, eps, 8192).unwrap();
    let rect = sign_degree((1.0 + eps / 4.0) / gamma, eps / (2.0 * gamma), eps / (4.0 * gamma)).unwrap().degree - 1;
    assert_eq!(r.degree, rect + 1);
    assert_eq!(p.eval(0.0), 0.0);
    for x in uniform_grid(0.0, 1.0 / gamma, 2000) {
        assert!((gamma * x - p.eval(x)).abs() <= eps);
        assert!(p.eval(x).abs() <= 1.0);
    }
    for x in uniform_grid(1.0 / gamma, (1.0 + eps / 2.0) / gamma, 2000) {
        assert!(p.eval(x).abs() <= 1.0);
    }
    for x in uniform_grid((1.0 + eps / 2.0) / gamma, 1.0, 2000) {
        assert!(p.eval(x).abs() <= eps && p.eval(-x).abs() <= eps);
    }
    assert!(matches!(lamp_poly_no_gap(gamma, eps), Err(Error::Resource { .. })));
}

#[test]
fn amplified_poisson_with_gap() {
    let s = poisson_system(2, RhsCase::Case1).unwrap();
    let gap = s.eigenvalues()[0];
    assert!((gap - 0.38197).abs() < 1e-5);
    let (s, be) = amplified_poisson(2, 4.0, 0.05, Some(gap));
    let be = be.unwrap();
    assert_eq!((be.alpha(), be.n_a()), (1.0, 3));
    assert!(unitarity_defect(be.unitary()) < 1e-10);
    let err = verify_block_encoding(&be, &a_prime(&s, 4.0)).unwrap();
    assert!(err <= 0.05, "error {err}");
    assert!(err <= be.eps());
}

#[test]
fn amplified_degree_grows_as_eps_shrinks() {
    let s = poisson_system(2, RhsCase::Case1).unwrap();
    let gap = s.eigenvalues()[0];
    let d = |eps: f64| {
        let cfg = AmplificationConfig { gamma: 3.0, gap: Some(gap), eps };
        lamp_poly_with_gap_capped(&cfg, 4.0, 8192).unwrap().1.degree
    };
    assert!(d(0.02) > d(0.05));
}

#[test]
fn amplified_zero_target_without_gap() {
    let dil = exact_dilation(&(identity(2) * c(0.5))).unwrap();
    let be_a = BlockEncoding::new(dil.unitary().clone(), 1.0, 1, 1, 0.0).unwrap();
    let cfg = AmplificationConfig { gamma: 3.0, gap: None, eps: 0.4 };
    let opts = SolveOptions {
        degree_cap: 1024,
        ..SolveOptions::default()
    };
    let be = amplified_a_prime(&be_a, &cfg, &opts).unwrap();
    assert!(verify_block_encoding(&be, &CMatrix::zeros(2, 2)).unwrap() <= 0.4);
}

#[test]
fn amplified_requires_gamma_three() {
    let dil = exact_dilation(&(identity(2) * c(0.5))).unwrap();
    let cfg = AmplificationConfig { gamma: 2.0, gap: None, eps: 0.1 };
    assert!(matches!(
        amplified_a_prime(&dil, &cfg, &SolveOptions::default()),
        Err(Error::Domain(_))
    ));
}

#[test]
fn rejects_non_unitary_and_bad_dims() {
    assert!(BlockEncoding::new(identity(2) * c(2.0), 1.0, 0, 1, 0.0).is_err());
    assert!(matches!(
        BlockEncoding::new(identity(3), 1.0, 0, 1, 0.0),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(BlockEncoding::new(identity(2), 1.0, 40, 40, 0.0).is_err());
}

#[test]
fn linear_system_rejects_non_hermitian() {
    let mut m = identity(2);
    m[(0, 1)] = c(1.0);
    let b = qcg_core::linalg::CVector::from_element(2, c(1.0));
    assert!(LinearSystem::new(m, b).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dilation_block_is_exact(n in prop::sample::select(vec![1usize, 2, 4, 8, 16, 32]), vals in prop::collection::vec(-1.0f64..1.0, 16..64)) {
        let a = hermitian(n, &vals);
        let be = exact_dilation(&a).unwrap();
        prop_assert!(unitarity_defect(be.unitary()) < 1e-12);
        prop_assert!((be.block() - &a).norm() <= 1e-13 * (n as f64));
        prop_assert!(verify_block_encoding(&be, &a).unwrap() <= 1e-13);
    }

    #[test]
    fn lcu_reproduces_a_prime(n in prop::sample::select(vec![1usize, 2, 4, 8]), vals in prop::collection::vec(-1.0f64..1.0, 16..64), alpha in 1.0f64..4.0) {
        let a = hermitian(n, &vals);
        let dil = exact_dilation(&a).unwrap();
        let be_a = BlockEncoding::new(dil.unitary().clone(), alpha, 1, dil.n_s(), 0.0).unwrap();
        let lcu = lcu_a_prime(&be_a).unwrap();
        let target = &a * c(2.0) - identity(n);
        prop_assert!(unitarity_defect(lcu.unitary()) < 1e-12);
        prop_assert!((lcu.block() * c(3.0) - target).norm() < 1e-12);
    }
}
