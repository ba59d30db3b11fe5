// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra shared by the encoding and estimation code.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Dimension up to which the spectral norm uses a full SVD.
const SVD_LIMIT: usize = 256;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows().max(m.ncols()) <= SVD_LIMIT {
        return m
            .clone()
            .singular_values()
            .iter()
            .fold(0.0_f64, |acc, &s| acc.max(s));
    }
    power_norm(m)
}

// Power iteration on M^dagger M.
fn power_norm(m: &CMatrix) -> f64 {
    let n = m.ncols();
    let mut v = CVector::from_fn(n, |i, _| c(1.0 + (i as f64 * 0.618_034).fract()));
    v /= c(v.norm());
    let mut last = 0.0;
    for _ in 0..10_000 {
        let w = m.adjoint() * (m * &v);
        let lambda = w.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = w / c(lambda);
        if (lambda - last).abs() <= 1e-13 * lambda {
            return lambda.sqrt();
        }
        last = lambda;
    }
    last.sqrt()
}

/// Maximum entry of |U^dagger U - I|.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let p = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - c(target)).norm());
        }
    }
    worst
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.nrows(), |r, col| {
        eig.eigenvectors[(r, order[col])]
    });
    Ok((values, vectors))
}

/// Apply a real function to the spectrum: V f(L) V^dagger.
pub fn spectral_apply(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let fj = f(lam);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vectors.adjoint()
}

/// Number of qubits for a power-of-two dimension.
pub fn qubits_for(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}
