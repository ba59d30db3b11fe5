// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use qcg_core::encodings::*;
use qcg_core::estimation::*;
use qcg_core::linalg::{c, identity, unitarity_defect, CMatrix, CVector, Complex64};
use qcg_core::polytools::{max_abs, positive_shift, Domain, Polynomial};
use qcg_core::qet::{qet_general, qet_oracle, Shift};
use qcg_core::qsp::SolveOptions;
use qcg_core::solvers::cg_tracked;
use qcg_core::Error;

fn column(u: &CMatrix) -> CVector {
    u.column(0).into_owned()
}

fn state_encoding(v: &CVector) -> BlockEncoding {
    // Block maps e_0 to v; a unitary prep works as a (1, 0) encoding.
    let u = prepare_state(v).unwrap();
    BlockEncoding::new(u, 1.0, 0, v.len().trailing_zeros() as usize, 0.0).unwrap()
}

#[test]
fn prepare_poisson_rhs() {
    let s2 = poisson_system(4, RhsCase::Case2).unwrap();
    let u = prepare_b(&s2).unwrap();
    assert!(unitarity_defect(&u) < 1e-13);
    assert!(column(&u).iter().all(|z| (z - c(0.25)).norm() < 1e-15));
    let s1 = poisson_system(4, RhsCase::Case1).unwrap();
    let col = column(&prepare_b(&s1).unwrap());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, z) in col.iter().enumerate() {
        let want = if i == 7 || i == 8 { h } else { 0.0 };
        assert!((z - c(want)).norm() < 1e-15);
    }
}

#[test]
fn swap_identical_and_orthogonal() {
    let psi = CVector::from_vec(vec![c(0.6), c(0.8)]);
    let be = state_encoding(&psi);
    let prep = identity(2);
    let r = swap_test(&be, &be, &prep, &ShotModel::exact()).unwrap();
    assert!((r.re_inner - 1.0).abs() < 1e-14);
    assert!((r.p0 - 1.0).abs() < 1e-14 && r.p1.abs() < 1e-14);
    let phi = CVector::from_vec(vec![c(0.8), c(-0.6)]);
    let r = swap_test(&be, &state_encoding(&phi), &prep, &ShotModel::exact()).unwrap();
    assert!(r.re_inner.abs() < 1e-14);
    assert!((r.p0 - 0.5).abs() < 1e-14 && (r.p1 - 0.5).abs() < 1e-14);
    assert_eq!(r.re_inner, r.p0 - r.p1);
    assert!(r.shots.is_none() && r.stderr.is_none());
}

#[test]
fn swap_dimension_mismatch() {
    let a = state_encoding(&CVector::from_vec(vec![c(1.0), c(0.0)]));
    let b = state_encoding(&CVector::from_vec(vec![c(1.0), c(0.0), c(0.0), c(0.0)]));
    assert!(matches!(
        swap_test(&a, &b, &identity(2), &ShotModel::exact()),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(matches!(
        swap_test(&a, &a, &identity(4), &ShotModel::exact()),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn swap_on_poisson_p_and_xp() {
    let s = poisson_system(4, RhsCase::Case1).unwrap();
    let track = cg_tracked(&s, 4.0, 40).unwrap();
    let base = a_prime_encoding(&s, 4.0).unwrap();
    let prep = prepare_b(&s).unwrap();
    let opts = SolveOptions::default();
    for step in &track.steps[1..5] {
        let p = Polynomial::from_monomial(step.p.clone());
        let xp = p.mul_x();
        let (u, au) = qet_general(&base, &p, Shift::PositiveSide, &opts).unwrap();
        let (v, av) = qet_general(&base, &xp, Shift::PositiveSide, &opts).unwrap();
        let r = swap_test(&u, &v, &prep, &ShotModel::exact()).unwrap();
        let bhat = s.rhs_normalized().unwrap();
        let pv = qet_oracle(&s, &p, 4.0) * &bhat;
        let xpv = qet_oracle(&s, &xp, 4.0) * &bhat;
        let oracle = pv.dotc(&xpv).re / (au.normalization * av.normalization);
        assert!((r.re_inner - oracle).abs() < 1e-10, "k = {}", step.k);
        // The normalizers come from the parity parts of the shifted forms.
        let cmax = |q: &Polynomial| {
            let s = positive_shift(q);
            max_abs(&s.even_part(), &Domain::full()).max(max_abs(&s.odd_part(), &Domain::full()))
        };
        assert!((au.c_max - cmax(&p)).abs() < 1e-12);
        assert!((av.c_max - cmax(&xp)).abs() < 1e-12);
    }
}

#[test]
fn required_shots_examples() {
    assert_eq!(required_shots(0.1, 0.95).unwrap(), 738);
    assert_eq!(required_shots(1.0, 0.63).unwrap(), 4);
    assert!(required_shots(0.0, 0.9).is_err());
    assert!(required_shots(0.1, 1.0).is_err());
}

#[test]
fn sampled_needs_shots() {
    assert!(ShotModel::sampled(0, 1).is_err());
    assert!(ShotModel::sampled(10, 1).is_ok());
}

#[test]
fn sampled_within_five_sigma() {
    let a = CVector::from_vec(vec![c(0.6), c(0.8), c(0.0), c(0.0)]);
    let b = CVector::from_vec(vec![c(0.5), c(0.5), c(0.5), c(0.5)]);
    let (u, v) = (state_encoding(&a), state_encoding(&b));
    let exact = swap_test(&u, &v, &identity(4), &ShotModel::exact()).unwrap();
    let mut hits = 0;
    for seed in 0..100 {
        let m = ShotModel::sampled(1_000_000, seed).unwrap();
        let r = swap_test(&u, &v, &identity(4), &m).unwrap();
        assert_eq!(r.shots, Some(1_000_000));
        if (r.re_inner - exact.re_inner).abs() <= 5.0 * r.stderr.unwrap() {
            hits += 1;
        }
    }
    assert!(hits >= 99, "{hits}");
}

#[test]
fn sampling_is_seeded() {
    let a = sample(0.4, 0.3, 5000, 17);
    assert_eq!(a, sample(0.4, 0.3, 5000, 17));
    assert_ne!(a, sample(0.4, 0.3, 5000, 18));
}

fn unit_vector(v: &[(f64, f64)]) -> CVector {
    let x = CVector::from_iterator(v.len(), v.iter().map(|&(r, i)| Complex64::new(r, i)));
    let n = x.norm();
    x / c(n)
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_equals_direct_inner_product(
        q in 1usize..=3,
        a in entries(64),
        b in entries(64),
        scale in 0.1f64..1.0,
        seed in any::<u64>(),
    ) {
        let n = 1 << q;
        let ma = CMatrix::from_fn(n, n, |i, j| Complex64::new(a[i * n + j].0, a[i * n + j].1));
        let mb = CMatrix::from_fn(n, n, |i, j| Complex64::new(b[i * n + j].0, b[i * n + j].1));
        let ha = (&ma + ma.adjoint()) * c(0.5);
        let hb = (&mb + mb.adjoint()) * c(0.5);
        let na = qcg_core::linalg::spectral_norm(&ha);
        let nb = qcg_core::linalg::spectral_norm(&hb);
        prop_assume!(na > 1e-3 && nb > 1e-3);
        let ha = ha * c(scale / na);
        let hb = hb * c(scale / nb);
        let u = exact_dilation(&ha).unwrap();
        let v = exact_dilation(&hb).unwrap();
        let psi = unit_vector(&a[..n]);
        let prep = prepare_state(&psi).unwrap();
        let r = swap_test(&u, &v, &prep, &ShotModel::exact()).unwrap();
        let direct = (&ha * &psi).dotc(&(&hb * &psi)).re;
        prop_assert!((r.re_inner - direct).abs() < 1e-12);
        prop_assert!(r.p0 >= 0.0 && r.p1 >= 0.0 && r.p0 + r.p1 <= 1.0 + 1e-12);
        let s = swap_test(&u, &v, &prep, &ShotModel::sampled(1000, seed).unwrap()).unwrap();
        prop_assert!(s.p0 >= 0.0 && s.p1 >= 0.0 && s.p0 + s.p1 <= 1.0 + 1e-12);
        prop_assert_eq!(s.re_inner, s.p0 - s.p1);
    }

    #[test]
    fn norm_preserving_blocks_saturate(a in entries(4)) {
        let psi = unit_vector(&a);
        let be = state_encoding(&psi);
        let phi = unit_vector(&[a[3], a[0], a[2], a[1]]);
        let r = swap_test(&be, &state_encoding(&phi), &identity(4), &ShotModel::exact()).unwrap();
        prop_assert!((r.p0 + r.p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halving_precision_quadruples(k in 1u32..20, conf in 0.5f64..0.99) {
        let p = 1.0 / (1u64 << k) as f64;
        let n = 2.0 * (2.0 / (1.0 - conf)).ln() / (p * p);
        prop_assume!((n - n.round()).abs() > 1e-6);
        let a = required_shots(p, conf).unwrap() as f64;
        let b = required_shots(p / 2.0, conf).unwrap() as f64;
        prop_assert!((b / a - 4.0).abs() < 4.0 / a);
    }
}
