// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use qcg_core::encodings::*;
use qcg_core::estimation::ShotModel;
use qcg_core::linalg::{c, identity, CMatrix, CVector};
use qcg_core::solvers::*;
use qcg_core::Error;

fn diag_system(d: &[f64], b: &[f64]) -> LinearSystem {
    let a = CMatrix::from_fn(d.len(), d.len(), |i, j| c(if i == j { d[i] } else { 0.0 }));
    LinearSystem::new(a, CVector::from_iterator(b.len(), b.iter().map(|&v| c(v)))).unwrap()
}

fn solve(nq: usize, case: RhsCase) -> (LinearSystem, QcgTrace) {
    let s = poisson_system(nq, case).unwrap();
    let be = a_prime_encoding(&s, 4.0).unwrap();
    let cfg = QcgConfig::new(&s, 0.1, 4.0);
    let t = qcg_solve(&s, &be, &cfg).unwrap();
    (s, t)
}

fn dist(a: &[qcg_core::linalg::Complex64], b: &CVector) -> f64 {
    a.iter().zip(b.iter()).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn classical_scaled_identity() {
    let s = diag_system(&[2.0, 2.0], &[0.3, -1.2]);
    let r = cg_classical(&s, 1e-10).unwrap();
    assert_eq!(r.iterations, 1);
    assert!((r.alphas[0] - 0.5).abs() < 1e-15);
    assert!((&r.x - s.rhs() * c(0.5)).norm() < 1e-15);
}

#[test]
fn classical_two_by_two() {
    let s = diag_system(&[1.0, 2.0], &[1.0, 1.0]);
    let r = cg_classical(&s, 1e-12).unwrap();
    assert!(r.iterations <= 2);
    assert!((r.x[0] - c(1.0)).norm() < 1e-12 && (r.x[1] - c(0.5)).norm() < 1e-12);
}

#[test]
fn classical_poisson_stops_by_eight() {
    let s = poisson_system(4, RhsCase::Case1).unwrap();
    let crit = residual_criterion(&s, 0.1);
    let lam = |j: f64| 2.0 - 2.0 * (j * std::f64::consts::PI / 17.0).cos();
    assert!((crit - 0.1 * lam(1.0)).abs() < 1e-15);
    assert!((crit - 3.40538e-3).abs() < 1e-8);
    assert!((crit - 3.40e-3).abs() < 1e-5);
    let r = cg_classical(&s, crit / s.norm_b()).unwrap();
    assert!(r.iterations <= 8);
    assert!(*r.residuals.last().unwrap() <= crit);
}

#[test]
fn classical_rejects_indefinite() {
    let s = diag_system(&[1.0, -1.0], &[1.0, 1.0]);
    assert!(matches!(cg_classical(&s, 1e-8), Err(Error::NotPositiveDefinite(_))));
}

#[test]
fn tracked_first_step() {
    let s = poisson_system(2, RhsCase::Case2).unwrap();
    let t = cg_tracked(&s, 4.0, 10).unwrap();
    let a0 = t.alphas[0];
    assert_eq!(t.steps[1].x, vec![a0]);
    assert_eq!(t.steps[1].r, vec![1.0, -a0]);
    let b0 = t.betas[0];
    assert_eq!(t.steps[1].p, vec![1.0 + b0, -a0]);
    // alpha_0 = <b|b> / <b|(A/alpha)|b>.
    let bhat = s.rhs_normalized().unwrap();
    let pap = bhat.dotc(&(s.matrix() * &bhat)).re / 4.0;
    assert!((a0 - 1.0 / pap).abs() < 1e-14);
}

#[test]
fn tracked_matches_classical_on_scaled_system() {
    for nq in 1..=4 {
        let s = poisson_system(nq, RhsCase::Case2).unwrap();
        let t = cg_tracked(&s, 4.0, 40).unwrap();
        let scaled = LinearSystem::new(s.matrix() * c(0.25), s.rhs_normalized().unwrap()).unwrap();
        let cl = cg_classical(&scaled, 1e-10).unwrap();
        let k = t.alphas.len().min(cl.alphas.len());
        for i in 0..k {
            assert!((t.alphas[i] - cl.alphas[i]).abs() <= 1e-8 * cl.alphas[i].abs().max(1.0));
        }
        let last = t.steps.last().unwrap();
        let xv = reconstruct(&s, 4.0, &last.x).unwrap();
        assert!((xv - &cl.x).norm() < 1e-8, "nq = {nq}");
    }
}

#[test]
fn tracked_degrees_and_residual_identity() {
    let s = poisson_system(4, RhsCase::Case1).unwrap();
    let t = cg_tracked(&s, 4.0, 40).unwrap();
    let bhat = s.rhs_normalized().unwrap();
    for step in &t.steps {
        assert_eq!(step.r.len(), step.k + 1);
        assert_eq!(step.x.len(), step.k);
        let r = reconstruct(&s, 4.0, &step.r).unwrap();
        let x = if step.x.is_empty() { CVector::zeros(16) } else { reconstruct(&s, 4.0, &step.x).unwrap() };
        let want = &bhat - (s.matrix() * c(0.25)) * x;
        assert!((r - want).norm() < 1e-10, "k = {}", step.k);
    }
}

#[test]
fn tracked_x8_solves_scaled_system() {
    let s = poisson_system(4, RhsCase::Case1).unwrap();
    let t = cg_tracked(&s, 4.0, 40).unwrap();
    let x8 = reconstruct(&s, 4.0, &t.steps[8].x).unwrap();
    let want = s.solve() * c(4.0 / s.norm_b());
    let e = &x8 - &want;
    let a_norm = e.dotc(&(s.matrix() * c(0.25) * &e)).re.sqrt();
    assert!(a_norm < 0.1);
}

#[test]
fn qcg_matches_tracked() {
    for case in [RhsCase::Case1, RhsCase::Case2] {
        for nq in 1..=4 {
            let (s, t) = solve(nq, case);
            let tk = cg_tracked(&s, 4.0, 40).unwrap();
            assert!(t.converged);
            for (i, it) in t.iterations.iter().enumerate() {
                assert!((it.alpha_k - tk.alphas[i]).abs() < 1e-8);
                assert!((it.residual - tk.residuals[i + 1]).abs() < 1e-8);
                if let Some(b) = it.beta_k {
                    assert!((b - tk.betas[i]).abs() < 1e-8);
                }
            }
            let want = &tk.steps[t.m + 1].x;
            assert_eq!(t.x_coeffs.len(), want.len());
            for (u, v) in t.x_coeffs.iter().zip(want) {
                assert!((u - v).abs() <= 1e-8 * v.abs().max(1.0), "nq = {nq}");
            }
        }
    }
}

#[test]
fn qcg_stops_within_bound_and_error() {
    for nq in 2..=5 {
        for case in [RhsCase::Case1, RhsCase::Case2] {
            let (s, t) = solve(nq, case);
            let bound = iteration_bound(s.kappa(), s.norm_a(), s.norm_b(), 0.1);
            assert!(t.m + 1 <= bound, "N = {}: m = {}, bound {bound}", 1 << nq, t.m);
            assert!(t.iterations.last().unwrap().residual <= t.criterion);
            assert!(dist(&t.solution, &s.solve()) <= 0.1);
        }
    }
}

#[test]
fn qcg_degrees_match_table() {
    for (nq, m) in [(2, 1), (3, 3), (4, 7), (5, 15)] {
        let (_, t) = solve(nq, RhsCase::Case1);
        assert_eq!(t.m, m);
    }
}

#[test]
fn qcg_residuals_non_increasing() {
    let (_, t) = solve(4, RhsCase::Case2);
    for w in t.iterations[1..].windows(2) {
        assert!(w[1].residual <= w[0].residual + 1e-12);
    }
}

#[test]
fn qcg_scaled_identity() {
    let s = diag_system(&[2.0, 2.0], &[0.6, 0.8]);
    let be = a_prime_encoding(&s, 2.0).unwrap();
    let t = qcg_solve(&s, &be, &QcgConfig::new(&s, 0.1, 2.0)).unwrap();
    assert_eq!(t.m, 0);
    assert!(t.x_coeffs.len() <= 2);
    assert!(dist(&t.solution, &(s.rhs() * c(0.5))) < 1e-10);
    assert!(t.success_probability > 0.0 && t.success_probability <= 1.0);
}

#[test]
fn qcg_rejects_wrong_encoding_and_delta() {
    let s = poisson_system(2, RhsCase::Case1).unwrap();
    let wrong = exact_dilation(&(identity(4) * c(0.5))).unwrap();
    let cfg = QcgConfig::new(&s, 0.1, 4.0);
    assert!(matches!(qcg_solve(&s, &wrong, &cfg), Err(Error::Domain(_))));
    let be = a_prime_encoding(&s, 4.0).unwrap();
    let mut big = cfg.clone();
    big.delta = 1.0;
    assert!(matches!(qcg_solve(&s, &be, &big), Err(Error::Domain(_))));
    big.enforce_delta_bound = false;
    big.delta = 1e-3;
    assert!(qcg_solve(&s, &be, &big).is_ok());
    let mut short = cfg.clone();
    short.max_iter = 1;
    assert!(matches!(qcg_solve(&s, &be, &short), Err(Error::MaxIterExceeded { .. })));
    let mut low = cfg;
    low.alpha = 1.0;
    assert!(matches!(qcg_solve(&s, &be, &low), Err(Error::Domain(_))));
}

#[test]
fn qcg_sampled_is_reproducible() {
    let s = poisson_system(1, RhsCase::Case1).unwrap();
    let be = a_prime_encoding(&s, 4.0).unwrap();
    let mut cfg = QcgConfig::new(&s, 0.1, 4.0);
    cfg.shot_model = ShotModel::sampled(1, 11).unwrap();
    let a = qcg_solve(&s, &be, &cfg).unwrap();
    let b = qcg_solve(&s, &be, &cfg).unwrap();
    assert_eq!(a.iterations, b.iterations);
    assert!(a.iterations[0].shots > 0);
    assert!(dist(&a.solution, &s.solve()) <= 0.1);
}

#[test]
fn a_norm_error_bound() {
    for nq in 2..=4 {
        let s = poisson_system(nq, RhsCase::Case2).unwrap();
        let t = cg_tracked(&s, 4.0, 40).unwrap();
        let kappa = s.kappa();
        let q = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
        let x = s.solve();
        let y = s.matrix() * c(0.25);
        for step in &t.steps[1..] {
            let xk = reconstruct(&s, 4.0, &step.x).unwrap() * c(s.norm_b() / 4.0);
            let e = &x - xk;
            let err = e.dotc(&(&y * &e)).re.sqrt();
            let bound = 2.0 * q.powi(step.k as i32) * kappa * s.norm_b() / s.norm_a();
            assert!(err <= bound, "k = {}", step.k);
        }
    }
}

#[test]
fn small_residual_implies_small_error() {
    for nq in 2..=4 {
        let s = poisson_system(nq, RhsCase::Case1).unwrap();
        let crit = residual_criterion(&s, 0.1);
        let t = cg_tracked(&s, 4.0, 40).unwrap();
        for (step, &res) in t.steps.iter().zip(&t.residuals).skip(1) {
            if res <= crit {
                let xk = reconstruct(&s, 4.0, &step.x).unwrap() * c(s.norm_b() / 4.0);
                assert!((s.solve() - xk).norm() <= 0.1);
            }
        }
    }
}

#[test]
fn iteration_bound_examples() {
    let e = std::f64::consts::E;
    assert_eq!(iteration_bound(1.0, 2.0, e * e, 2.0), 1);
    assert_eq!(iteration_bound(116.0, 3.97, 1.0, 0.1), 35);
}

#[test]
fn direct_degrees() {
    let d = direct_qsvt_degree(441.0, 4.0, 0.1).unwrap();
    assert!((d.total as f64 / 5.05e5 - 1.0).abs() < 5e-3);
    assert!((d.rect.degree as f64 / 4.45e5 - 1.0).abs() < 5e-3);
    let s = poisson_system(2, RhsCase::Case1).unwrap();
    let d4 = direct_qsvt_degree(s.kappa(), 4.0, 0.1).unwrap();
    assert_eq!((d4.total, d4.inverse.degree, d4.rect.degree), (7467, 855, 6612));
    let mut last = 0;
    for k in [9.47, 32.2, 116.0, 441.0] {
        let d = direct_qsvt_degree(k, 4.0, 0.1).unwrap().total;
        assert!(d > last);
        last = d;
    }
}

fn unit_trace(m: usize, r_max: f64, p_max: f64, pp_max: f64) -> QcgTrace {
    let s = diag_system(&[2.0, 2.0], &[0.6, 0.8]);
    let be = a_prime_encoding(&s, 2.0).unwrap();
    let mut t = qcg_solve(&s, &be, &QcgConfig::new(&s, 0.1, 2.0)).unwrap();
    let it = t.iterations[0].clone();
    t.iterations = (0..=m)
        .map(|k| {
            let mut i = it.clone();
            i.k = k;
            i.r_max = r_max;
            i.p_max = Some(p_max);
            i.pp_max = Some(pp_max);
            i
        })
        .collect();
    t.m = m;
    t
}

#[test]
fn query_cost_single_iteration() {
    let q = query_cost(&unit_trace(0, 1.0, 1.0, 1.0), 0.5);
    assert_eq!(q.per_iteration, vec![320.0]);
    assert_eq!(q.final_state, 0.0);
    assert_eq!(q.total, 320.0);
    assert_eq!(q.max_depth, 2);
}

#[test]
fn query_cost_depth_on_poisson() {
    let (_, t) = solve(4, RhsCase::Case1);
    let q = query_cost(&t, t.delta);
    assert_eq!(q.max_depth, 16);
    assert!(q.final_state > 0.0);
    let last = t.iterations.last().unwrap();
    let k = last.k as f64;
    let want = 32.0 * (k + 1.0) * last.r_max.powi(4) / (t.delta * t.delta);
    assert!((q.per_iteration[t.m] - want).abs() <= 1e-12 * want);
}

#[test]
fn fit_case1_against_k() {
    let (_, t) = solve(4, RhsCase::Case1);
    let fits = fit_scalings(&[t], Regressor::IterationK).unwrap();
    for f in &fits {
        let want = if f.quantity == Quantity::X { 2.0 } else { 1.0 };
        assert!((f.exponent - want).abs() <= 0.3, "{:?}: {}", f.quantity, f.exponent);
        assert!(f.points >= 4);
    }
}

#[test]
fn fit_case2_reports_r_squared() {
    let (_, t) = solve(4, RhsCase::Case2);
    let fits = fit_scalings(&[t], Regressor::IterationK).unwrap();
    for f in &fits {
        assert!(f.r_squared.is_finite() && (0.0..=1.0 + 1e-12).contains(&f.r_squared));
    }
}

#[test]
fn fit_needs_four_points() {
    let (_, t) = solve(2, RhsCase::Case1);
    assert!(matches!(
        fit_scalings(&[t], Regressor::IterationK),
        Err(Error::InsufficientData { needed: 4, .. })
    ));
}

#[test]
fn fit_synthetic_cube() {
    let xs: Vec<f64> = (1..=8).map(f64::from).collect();
    let ys: Vec<f64> = xs.iter().map(|k| k.powi(3)).collect();
    let (e, c0, r2) = fit_power_law(&xs, &ys).unwrap();
    assert!((e - 3.0).abs() < 1e-6 && c0.abs() < 1e-9 && (r2 - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bound_monotone_in_kappa(k1 in 1.0f64..500.0, dk in 0.0f64..500.0) {
        prop_assert!(iteration_bound(k1, 4.0, 1.0, 0.1) <= iteration_bound(k1 + dk, 4.0, 1.0, 0.1));
    }

    #[test]
    fn query_cost_scales_with_delta(r in 0.5f64..4.0, p in 0.5f64..4.0, q in 0.5f64..4.0, d in 1e-3f64..1.0) {
        let t = unit_trace(2, r, p, q);
        let a = query_cost(&t, d);
        let b = query_cost(&t, d / 2.0);
        for (x, y) in a.per_iteration.iter().zip(&b.per_iteration) {
            prop_assert!((y / x - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qcg_on_random_diagonal(d in prop::collection::vec(0.2f64..1.0, 4), b in prop::collection::vec(0.1f64..1.0, 4)) {
        let s = diag_system(&d, &b);
        let be = a_prime_encoding(&s, 1.0).unwrap();
        let t = qcg_solve(&s, &be, &QcgConfig::new(&s, 0.1, 1.0)).unwrap();
        let tk = cg_tracked(&s, 1.0, 20).unwrap();
        for (i, it) in t.iterations.iter().enumerate() {
            prop_assert!((it.alpha_k - tk.alphas[i]).abs() < 1e-8 * tk.alphas[i].max(1.0));
        }
        prop_assert!(dist(&t.solution, &s.solve()) <= 0.1);
    }
}
