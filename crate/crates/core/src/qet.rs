// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum eigenvalue transformation assembled as dense unitaries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encodings::{BlockEncoding, EncodingHeader, LinearSystem};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::polytools::{max_abs, positive_shift, window_shift, Domain, Polynomial};
use crate::qsp::{solve_phases_with, verify_phases, Convention, PhaseFactors, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Shift {
    None,
    /// P+(x) = P((x + 1)/2), for encodings of A' = 2A/alpha - I.
    PositiveSide,
    /// P((d2 - d1)/2 x + (d1 + d2)/2).
    Window { delta1: f64, delta2: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QetMode {
    DefiniteParity,
    General,
    PositiveSide,
}

/// Phase data and normalization behind an assembled encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QetAssembly {
    pub base: EncodingHeader,
    pub mode: QetMode,
    pub shift: Shift,
    pub phases_even: Option<PhaseFactors>,
    pub phases_odd: Option<PhaseFactors>,
    /// The returned block times this equals P.
    pub normalization: f64,
    pub c_max: f64,
}

/// e^{i phi Pi} with Pi = 2|0><0|_a - I: diagonal, +phi on the ancilla-zero
/// rows.
fn scale_columns_by_phase(m: &mut CMatrix, phi: f64, sys: usize) {
    let plus = Complex64::from_polar(1.0, phi);
    let minus = plus.conj();
    for (j, mut col) in m.column_iter_mut().enumerate() {
        col *= if j < sys { plus } else { minus };
    }
}

fn phase_sequence(base: &BlockEncoding, angles: &[f64], sign: f64) -> CMatrix {
    let u = base.unitary();
    let ud = u.adjoint();
    let sys = base.system_dim();
    let d = angles.len() - 1;
    let mut m = CMatrix::identity(base.dim(), base.dim());
    scale_columns_by_phase(&mut m, sign * angles[0], sys);
    for (k, &phi) in angles.iter().enumerate().skip(1) {
        // W^dagger on odd k + d, as in the scalar reflection sequence.
        m = if (k + d) % 2 == 1 { &m * &ud } else { &m * u };
        scale_columns_by_phase(&mut m, sign * phi, sys);
    }
    m
}

/// (1, n_a + 1, 0) encoding of P(A/alpha) for parity-definite P.
///
/// The extra ancilla takes the real part: H, then U_Phi or U_-Phi
/// controlled on it, then H, giving the block (U_Phi + U_-Phi)/2.
pub fn qet_definite(base: &BlockEncoding, phi: &PhaseFactors) -> Result<BlockEncoding> {
    let refl = phi.to_convention(Convention::Reflection);
    let plus = phase_sequence(base, refl.angles(), 1.0);
    let minus = phase_sequence(base, refl.angles(), -1.0);
    let sum = (&plus + &minus) * c(0.5);
    let diff = (&plus - &minus) * c(0.5);
    let header = EncodingHeader {
        alpha: 1.0,
        n_a: base.n_a() + 1,
        n_s: base.n_s(),
        eps: robust_eps(base, phi.degree()),
    };
    Ok(BlockEncoding::from_parts(hadamard_pair(&sum, &diff), header))
}

// [[s, t], [t, s]] with the new qubit most significant.
fn hadamard_pair(s: &CMatrix, t: &CMatrix) -> CMatrix {
    let d = s.nrows();
    let mut u = CMatrix::zeros(2 * d, 2 * d);
    u.view_mut((0, 0), (d, d)).copy_from(s);
    u.view_mut((0, d), (d, d)).copy_from(t);
    u.view_mut((d, 0), (d, d)).copy_from(t);
    u.view_mut((d, d), (d, d)).copy_from(s);
    u
}

// Perturbation bound 4 d sqrt(eps/alpha) for an inexact input encoding.
fn robust_eps(base: &BlockEncoding, d: usize) -> f64 {
    if base.eps() == 0.0 {
        0.0
    } else {
        4.0 * d as f64 * (base.eps() / base.alpha()).sqrt()
    }
}

/// Sup-norm error of the phases against their target on a dense grid.
pub(crate) fn phase_error(phi: &PhaseFactors, p: &Polynomial) -> f64 {
    verify_phases(phi, p, (8 * (p.degree() + 1)).max(256)).max_abs_error
}

/// (2 C_max, n_a + 2) encoding of an arbitrary real polynomial: even and
/// odd parts are each normalized by C_max, encoded on their own and mixed
/// with one more Hadamard pair.
pub fn qet_general(
    base: &BlockEncoding,
    p: &Polynomial,
    shift: Shift,
    opts: &SolveOptions,
) -> Result<(BlockEncoding, QetAssembly)> {
    let q = match shift {
        Shift::None => p.clone(),
        Shift::PositiveSide => positive_shift(p),
        Shift::Window { delta1, delta2 } => window_shift(p, delta1, delta2)?,
    };
    let parts = [q.even_part(), q.odd_part()];
    let maxima = [max_abs(&parts[0], &Domain::full()), max_abs(&parts[1], &Domain::full())];
    let c_max = maxima[0].max(maxima[1]);
    if !(c_max > 0.0) {
        return Err(Error::Normalization);
    }
    let d = 2 * base.dim();
    let mut unitaries = Vec::with_capacity(2);
    let mut phases = Vec::with_capacity(2);
    let mut eps = 0.0;
    for part in &parts {
        if part.is_zero() {
            // X on the real-part qubit: a unitary with a zero block.
            let mut x = CMatrix::zeros(d, d);
            x.view_mut((0, d / 2), (d / 2, d / 2)).fill_with_identity();
            x.view_mut((d / 2, 0), (d / 2, d / 2)).fill_with_identity();
            unitaries.push(x);
            phases.push(None);
            continue;
        }
        let target = part.scale(1.0 / c_max);
        let (phi, _) = solve_phases_with(&target, opts)?;
        eps += c_max * phase_error(&phi, &target);
        unitaries.push(qet_definite(base, &phi)?.unitary().clone());
        phases.push(Some(phi));
    }
    let sum = (&unitaries[0] + &unitaries[1]) * c(0.5);
    let diff = (&unitaries[0] - &unitaries[1]) * c(0.5);
    let header = EncodingHeader {
        alpha: 2.0 * c_max,
        n_a: base.n_a() + 2,
        n_s: base.n_s(),
        eps: eps + 2.0 * c_max * robust_eps(base, q.degree()),
    };
    let mode = match shift {
        Shift::PositiveSide => QetMode::PositiveSide,
        _ => QetMode::General,
    };
    let mut it = phases.into_iter();
    let assembly = QetAssembly {
        base: base.header(),
        mode,
        shift,
        phases_even: it.next().flatten(),
        phases_odd: it.next().flatten(),
        normalization: 2.0 * c_max,
        c_max,
    };
    Ok((BlockEncoding::from_parts(hadamard_pair(&sum, &diff), header), assembly))
}

/// sum_j P(lambda_j / alpha) |lambda_j><lambda_j|.
pub fn qet_oracle(system: &LinearSystem, p: &Polynomial, alpha: f64) -> CMatrix {
    system.apply_function(|lam| p.eval(lam / alpha))
}
