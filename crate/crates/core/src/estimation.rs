// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! State preparation and the swap test for block encodings.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::encodings::{BlockEncoding, LinearSystem};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::polytools::ceil_int;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShotMode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShotModel {
    pub mode: ShotMode,
    pub shots: u64,
    pub seed: u64,
}

impl Default for ShotModel {
    fn default() -> Self {
        ShotModel::exact()
    }
}

impl ShotModel {
    pub fn exact() -> Self {
        ShotModel {
            mode: ShotMode::Exact,
            shots: 1,
            seed: 0,
        }
    }

    pub fn sampled(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::Domain("sampled mode needs at least one shot".into()));
        }
        Ok(ShotModel {
            mode: ShotMode::Sampled,
            shots,
            seed,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapTestResult {
    pub p0: f64,
    pub p1: f64,
    /// p0 - p1, an estimate of Re <psi|phi>.
    pub re_inner: f64,
    pub shots: Option<u64>,
    pub stderr: Option<f64>,
}

/// Unitary whose first column is b/||b||, by a Householder reflection.
pub fn prepare_b(system: &LinearSystem) -> Result<CMatrix> {
    prepare_state(system.rhs())
}

pub fn prepare_state(b: &CVector) -> Result<CMatrix> {
    let norm = b.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n = b.len();
    let bhat = b / c(norm);
    // Rotate the phase out of the first entry so that the reflection
    // mapping e_0 onto it exists, then put it back.
    let phase = if bhat[0].norm() > 0.0 {
        bhat[0] / bhat[0].norm()
    } else {
        c(1.0)
    };
    let target = &bhat / phase;
    let mut w = -target;
    w[0] += c(1.0);
    let ww = w.norm_squared();
    let mut h = CMatrix::identity(n, n);
    if ww > 1e-30 {
        h -= (&w * w.adjoint()) * c(2.0 / ww);
    }
    Ok(h * phase)
}

/// Dense statevector with qubit 0 as the most significant bit.
#[derive(Clone, Debug)]
pub struct Statevector {
    amps: CVector,
}

impl Statevector {
    pub fn new(amps: CVector) -> Self {
        Statevector { amps }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// Hadamard on the top qubit.
    pub fn hadamard_top(&mut self) {
        let h = self.amps.len() / 2;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..h {
            let (a, b) = (self.amps[i], self.amps[i + h]);
            self.amps[i] = (a + b) * s;
            self.amps[i + h] = (a - b) * s;
        }
    }

    /// Apply `u` to the register below the top qubit when that qubit is
    /// `control`.
    pub fn controlled_lower(&mut self, u: &CMatrix, control: bool) {
        let h = self.amps.len() / 2;
        let start = if control { h } else { 0 };
        let part = u * self.amps.rows(start, h);
        self.amps.rows_mut(start, h).copy_from(&part);
    }

    /// Probability of reading `top` on the top qubit together with an
    /// index below `low` on the rest, i.e. an all-zero ancilla register
    /// when `low` is the system dimension.
    pub fn probability(&self, top: bool, low: usize) -> f64 {
        let h = self.amps.len() / 2;
        let start = if top { h } else { 0 };
        self.amps.rows(start, low).norm_squared()
    }
}

/// Hadamard, controlled-U on |1>, anti-controlled-V on |0>, Hadamard,
/// then the control and the ancilla register are measured. Both
/// unitaries act after `prep` has loaded the system register.
pub fn swap_test(
    u: &BlockEncoding,
    v: &BlockEncoding,
    prep: &CMatrix,
    model: &ShotModel,
) -> Result<SwapTestResult> {
    if u.dim() != v.dim() || u.n_s() != v.n_s() {
        return Err(Error::DimensionMismatch(format!(
            "swap test on encodings of dimension {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    let sys = u.system_dim();
    if prep.nrows() != sys || prep.ncols() != sys {
        return Err(Error::DimensionMismatch(format!(
            "preparation is {}x{}, system register has dimension {sys}",
            prep.nrows(),
            prep.ncols()
        )));
    }
    let mut amps = CVector::zeros(2 * u.dim());
    amps.rows_mut(0, sys).copy_from(&prep.column(0));
    let mut state = Statevector::new(amps);
    state.hadamard_top();
    state.controlled_lower(u.unitary(), true);
    state.controlled_lower(v.unitary(), false);
    state.hadamard_top();
    let p0 = state.probability(false, sys);
    let p1 = state.probability(true, sys);
    match model.mode {
        ShotMode::Exact => Ok(SwapTestResult {
            p0,
            p1,
            re_inner: p0 - p1,
            shots: None,
            stderr: None,
        }),
        ShotMode::Sampled => Ok(sample(p0, p1, model.shots, model.seed)),
    }
}

/// Draw the three-outcome distribution (0-branch, 1-branch, rest).
pub fn sample(p0: f64, p1: f64, shots: u64, seed: u64) -> SwapTestResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p0c = p0.clamp(0.0, 1.0);
    let n0 = Binomial::new(shots, p0c).map(|b| b.sample(&mut rng)).unwrap_or(0);
    let rest = 1.0 - p0c;
    let q = if rest > 0.0 { (p1 / rest).clamp(0.0, 1.0) } else { 0.0 };
    let n1 = Binomial::new(shots - n0, q).map(|b| b.sample(&mut rng)).unwrap_or(0);
    let n = shots as f64;
    let (f0, f1) = (n0 as f64 / n, n1 as f64 / n);
    let var = (f0 + f1 - (f0 - f1) * (f0 - f1)).max(0.0);
    SwapTestResult {
        p0: f0,
        p1: f1,
        re_inner: f0 - f1,
        shots: Some(shots),
        stderr: Some((var / n).sqrt()),
    }
}

/// Hoeffding count ceil(2 ln(2/(1 - confidence)) / precision^2).
pub fn required_shots(precision: f64, confidence: f64) -> Result<u64> {
    if !(precision > 0.0 && precision.is_finite()) {
        return Err(Error::Domain(format!("precision = {precision} must be > 0")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence = {confidence} not in (0, 1)")));
    }
    let n = 2.0 * (2.0 / (1.0 - confidence)).ln() / (precision * precision);
    if n >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok(ceil_int(n) as u64)
}
