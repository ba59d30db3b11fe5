// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Block encodings, the Poisson test system and the linear amplification
//! of A' = 2A/alpha - I.
//!
//! Ancilla qubits are the most significant ones, so the encoded block is
//! the top-left 2^n_s x 2^n_s corner of the unitary.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigen, hermiticity_defect, identity, qubits_for, spectral_apply, spectral_norm,
    unitarity_defect, CMatrix, CVector,
};
use crate::polytools::{
    chebyshev, rect_poly_capped, DegreeReport, Polynomial, RectKind, DEFAULT_DEGREE_CAP,
};
use crate::qet::{qet_definite, phase_error};
use crate::qsp::{solve_phases_with, SolveOptions};

/// Tolerance on U^dagger U - I accepted when a unitary is handed in.
const UNITARY_TOL: f64 = 1e-10;

/// Largest total qubit count a dense encoding may have.
pub const MAX_QUBITS: usize = 16;

#[derive(Clone, Debug)]
pub struct BlockEncoding {
    unitary: CMatrix,
    alpha: f64,
    n_a: usize,
    n_s: usize,
    eps: f64,
}

/// Everything but the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingHeader {
    pub alpha: f64,
    pub n_a: usize,
    pub n_s: usize,
    pub eps: f64,
}

impl BlockEncoding {
    pub fn new(unitary: CMatrix, alpha: f64, n_a: usize, n_s: usize, eps: f64) -> Result<Self> {
        if n_a.saturating_add(n_s) > MAX_QUBITS {
            return Err(Error::Domain(format!("{} qubits exceed the dense limit {MAX_QUBITS}", n_a.saturating_add(n_s))));
        }
        let dim = 1usize << (n_a + n_s);
        if unitary.nrows() != dim || unitary.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{}, expected {dim}x{dim} for n_a = {n_a}, n_s = {n_s}",
                unitary.nrows(),
                unitary.ncols()
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) || !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("alpha = {alpha}, eps = {eps}")));
        }
        let defect = unitarity_defect(&unitary);
        if !(defect <= UNITARY_TOL) {
            return Err(Error::Domain(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(BlockEncoding {
            unitary,
            alpha,
            n_a,
            n_s,
            eps,
        })
    }

    pub(crate) fn from_parts(unitary: CMatrix, header: EncodingHeader) -> Self {
        BlockEncoding {
            unitary,
            alpha: header.alpha,
            n_a: header.n_a,
            n_s: header.n_s,
            eps: header.eps,
        }
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn header(&self) -> EncodingHeader {
        EncodingHeader {
            alpha: self.alpha,
            n_a: self.n_a,
            n_s: self.n_s,
            eps: self.eps,
        }
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn system_dim(&self) -> usize {
        1 << self.n_s
    }

    /// (<0|_a x I) U (|0>_a x I), without the alpha factor.
    pub fn block(&self) -> CMatrix {
        let n = self.system_dim();
        self.unitary.view((0, 0), (n, n)).into_owned()
    }

    /// Block applied to a system state.
    pub fn apply_block(&self, psi: &CVector) -> CVector {
        let n = self.system_dim();
        self.unitary.view((0, 0), (n, n)) * psi
    }
}

/// ||target - alpha * block|| in spectral norm.
pub fn verify_block_encoding(be: &BlockEncoding, target: &CMatrix) -> Result<f64> {
    let n = be.system_dim();
    if target.nrows() != n || target.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "target is {}x{}, encoded block is {n}x{n}",
            target.nrows(),
            target.ncols()
        )));
    }
    Ok(spectral_norm(&(target - be.block() * c(be.alpha))))
}

/// U = [[a, sqrt(I - a^2)], [sqrt(I - a^2), -a]] for a Hermitian contraction.
pub fn exact_dilation(a: &CMatrix) -> Result<BlockEncoding> {
    let n_s = qubits_for(a.nrows())?;
    if a.ncols() != a.nrows() {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    let scale = a.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    if hermiticity_defect(a) > 1e-12 * scale {
        return Err(Error::Domain("matrix is not Hermitian".into()));
    }
    let (values, vectors) = hermitian_eigen(a)?;
    let norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if norm > 1.0 + 1e-9 {
        return Err(Error::Norm(norm));
    }
    let clip = |v: f64| v.clamp(-1.0, 1.0);
    let top = if norm > 1.0 {
        spectral_apply(&values, &vectors, clip)
    } else {
        a.clone()
    };
    let s = spectral_apply(&values, &vectors, |v| (1.0 - clip(v) * clip(v)).max(0.0).sqrt());
    let n = a.nrows();
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&top);
    u.view_mut((0, n), (n, n)).copy_from(&s);
    u.view_mut((n, 0), (n, n)).copy_from(&s);
    u.view_mut((n, n), (n, n)).copy_from(&(-top));
    Ok(BlockEncoding::from_parts(
        u,
        EncodingHeader {
            alpha: 1.0,
            n_a: 1,
            n_s,
            eps: 0.0,
        },
    ))
}

/// A Hermitian system A x = b with its spectrum cached.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    matrix: CMatrix,
    rhs: CVector,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    norm_a: f64,
    kappa: f64,
}

impl LinearSystem {
    pub fn new(matrix: CMatrix, rhs: CVector) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || rhs.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} with right-hand side of length {}",
                matrix.nrows(),
                matrix.ncols(),
                rhs.len()
            )));
        }
        let scale = matrix.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
        if hermiticity_defect(&matrix) > 1e-12 * scale {
            return Err(Error::Domain("matrix is not Hermitian".into()));
        }
        let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix)?;
        let norm_a = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let min_abs = eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let kappa = norm_a / min_abs;
        Ok(LinearSystem {
            matrix,
            rhs,
            eigenvalues,
            eigenvectors,
            norm_a,
            kappa,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &CVector {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }

    pub fn norm_b(&self) -> f64 {
        self.rhs.norm()
    }

    /// ||A|| ||A^-1||; lambda_max / lambda_min for positive definite A.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues.first().is_some_and(|&v| v > 0.0)
    }

    pub fn rhs_normalized(&self) -> Result<CVector> {
        let n = self.rhs.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(&self.rhs / c(n))
    }

    /// A^-1 b through the cached spectrum.
    pub fn solve(&self) -> CVector {
        spectral_apply(&self.eigenvalues, &self.eigenvectors, |v| 1.0 / v) * &self.rhs
    }

    /// f(A) by spectral synthesis.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        spectral_apply(&self.eigenvalues, &self.eigenvectors, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsCase {
    /// (|N/2 - 1> + |N/2>) / sqrt 2.
    Case1,
    /// Uniform superposition.
    Case2,
}

/// Closed-form spectrum 2 - 2 cos(j pi / (N + 1)), j = 1..N.
pub fn poisson_eigenvalues(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
        .collect()
}

/// Dirichlet second-difference matrix tridiag(-1, 2, -1) of size 2^n.
pub fn poisson_system(n_qubits: usize, case: RhsCase) -> Result<LinearSystem> {
    if n_qubits == 0 || n_qubits > 20 {
        return Err(Error::Domain(format!("n_qubits = {n_qubits} out of range")));
    }
    let n = 1usize << n_qubits;
    let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    let mut b = CVector::zeros(n);
    match case {
        RhsCase::Case1 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            b[n / 2 - 1] = c(h);
            b[n / 2] = c(h);
        }
        RhsCase::Case2 => b.fill(c(1.0 / (n as f64).sqrt())),
    }
    LinearSystem::new(crate::linalg::to_complex(&a), b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Plus,
    Minus,
}

/// Permutation |j> -> |j +- 1 mod 2^n>.
pub fn cyclic_shift(n_qubits: usize, direction: Direction) -> CMatrix {
    let n = 1usize << n_qubits;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        let to = match direction {
            Direction::Plus => (j + 1) % n,
            Direction::Minus => (j + n - 1) % n,
        };
        m[(to, j)] = c(1.0);
    }
    m
}

/// A' = 2A/alpha - I.
pub fn a_prime(system: &LinearSystem, alpha: f64) -> CMatrix {
    let n = system.dim();
    system.matrix() * c(2.0 / alpha) - identity(n)
}

/// One-ancilla dilation of A' for a positive semidefinite system.
pub fn a_prime_encoding(system: &LinearSystem, alpha: f64) -> Result<BlockEncoding> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha}")));
    }
    exact_dilation(&a_prime(system, alpha))
}

/// (3, n_a + 1) encoding of A' = 2A/alpha - I: R_y(theta) prepares weights
/// 2/3 and 1/3 on U_A and -I, with theta = 2 atan(sqrt(1/2)).
pub fn lcu_a_prime(be_a: &BlockEncoding) -> Result<BlockEncoding> {
    let theta = 2.0 * (0.5f64).sqrt().atan();
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let d = be_a.dim();
    let u = be_a.unitary();
    let id = identity(d);
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d))
        .copy_from(&(u * c(cs * cs) - &id * c(sn * sn)));
    let off = (u + &id) * c(-cs * sn);
    m.view_mut((0, d), (d, d)).copy_from(&off);
    m.view_mut((d, 0), (d, d)).copy_from(&off);
    m.view_mut((d, d), (d, d))
        .copy_from(&(u * c(sn * sn) - &id * c(cs * cs)));
    Ok(BlockEncoding::from_parts(
        m,
        EncodingHeader {
            alpha: 3.0,
            n_a: be_a.n_a() + 1,
            n_s: be_a.n_s(),
            eps: 2.0 * be_a.eps() / be_a.alpha(),
        },
    ))
}

/// Linear amplification settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationConfig {
    pub gamma: f64,
    /// Certified distance Lambda of the spectrum of A from 0 and alpha.
    pub gap: Option<f64>,
    pub eps: f64,
}

fn lamp_from_rect(rect: &Polynomial, scale: f64) -> Polynomial {
    let c = chebyshev::mul_x(rect.chebyshev_coeffs());
    Polynomial::from_chebyshev(c.into_iter().map(|v| v * scale).collect())
}

fn check_lamp_common(gamma: f64, eps: f64) -> Result<()> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma = {gamma} must exceed 1")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps = {eps} not in (0, 1)")));
    }
    Ok(())
}

pub fn lamp_poly_with_gap(cfg: &AmplificationConfig, alpha: f64) -> Result<(Polynomial, DegreeReport)> {
    lamp_poly_with_gap_capped(cfg, alpha, DEFAULT_DEGREE_CAP)
}

/// gamma x * closed rect((1 - L')/gamma, 2L'/gamma, eps/gamma), L' = gap/alpha.
pub fn lamp_poly_with_gap_capped(
    cfg: &AmplificationConfig,
    alpha: f64,
    cap: usize,
) -> Result<(Polynomial, DegreeReport)> {
    check_lamp_common(cfg.gamma, cfg.eps)?;
    let gap = cfg
        .gap
        .ok_or_else(|| Error::Domain("amplification with a gap needs a gap".into()))?;
    if !(gap > 0.0 && gap < alpha / 2.0) {
        return Err(Error::Domain(format!(
            "gap = {gap} not in (0, alpha/2) for alpha = {alpha}"
        )));
    }
    let g = cfg.gamma;
    let lp = gap / alpha;
    let (rect, rep) = rect_poly_capped(
        (1.0 - lp) / g,
        2.0 * lp / g,
        cfg.eps / g,
        RectKind::Closed,
        cap.saturating_sub(1),
    )
    .map_err(|e| bump_degree(e, "lamp"))?;
    let report = DegreeReport::new(
        "lamp",
        rep.degree + 1,
        &[("gamma", g), ("alpha", alpha), ("gap", gap), ("eps", cfg.eps)],
    );
    Ok((lamp_from_rect(&rect, g), report))
}

/// gamma x / (1 + eps/2) * closed rect((1 + eps/4)/gamma, eps/(2 gamma), eps/(2 gamma)).
pub fn lamp_poly_no_gap(gamma: f64, eps: f64) -> Result<(Polynomial, DegreeReport)> {
    lamp_poly_no_gap_capped(gamma, eps, DEFAULT_DEGREE_CAP)
}

pub fn lamp_poly_no_gap_capped(gamma: f64, eps: f64, cap: usize) -> Result<(Polynomial, DegreeReport)> {
    check_lamp_common(gamma, eps)?;
    let (rect, rep) = rect_poly_capped(
        (1.0 + eps / 4.0) / gamma,
        eps / (2.0 * gamma),
        eps / (2.0 * gamma),
        RectKind::Closed,
        cap.saturating_sub(1),
    )
    .map_err(|e| bump_degree(e, "lamp"))?;
    let report = DegreeReport::new("lamp", rep.degree + 1, &[("gamma", gamma), ("eps", eps)]);
    Ok((lamp_from_rect(&rect, gamma / (1.0 + eps / 2.0)), report))
}

// A rect over its cap means the lamp (one degree higher) is over too.
fn bump_degree(e: Error, name: &str) -> Error {
    match e {
        Error::Resource { mut report, cap } => {
            report.name = name.to_string();
            report.degree += 1;
            Error::Resource { report, cap: cap + 1 }
        }
        other => other,
    }
}

/// (1, n_a + 2, eps) encoding of A' from an encoding of A: the LCU
/// encoding of A'/3 amplified by 3 with a lamp polynomial.
pub fn amplified_a_prime(
    be_a: &BlockEncoding,
    cfg: &AmplificationConfig,
    opts: &SolveOptions,
) -> Result<BlockEncoding> {
    if (cfg.gamma - 3.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "amplifying the LCU encoding needs gamma = 3, got {}",
            cfg.gamma
        )));
    }
    let lcu = lcu_a_prime(be_a)?;
    let (poly, _) = match cfg.gap {
        Some(_) => lamp_poly_with_gap_capped(cfg, be_a.alpha(), opts.degree_cap)?,
        None => lamp_poly_no_gap_capped(cfg.gamma, cfg.eps, opts.degree_cap)?,
    };
    let (phases, _) = solve_phases_with(&poly, opts)?;
    let out = qet_definite(&lcu, &phases)?;
    let header = EncodingHeader {
        eps: cfg.eps + phase_error(&phases, &poly),
        ..out.header()
    };
    Ok(BlockEncoding::from_parts(out.unitary, header))
}
