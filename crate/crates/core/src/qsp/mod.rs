// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar quantum signal processing: phase factors, their evaluation and
//! an optimization-based phase solver.

mod solver;

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytools::{chebyshev, Parity, Polynomial};

pub use solver::{solve_phases, solve_phases_with, SolveOptions, DEFAULT_SOLVER_CAP};

pub type Mat2 = Matrix2<Complex64>;

/// Ordering of the signal operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// e^{i phi_0 Z} W^dagger e^{i phi_1 Z} W ... with W^dagger and W
    /// alternating so that the unphased product telescopes.
    Reflection,
    /// e^{i phi_0 Z} prod_k W e^{i phi_k Z}.
    Wx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseRecord", into = "PhaseRecord")]
pub struct PhaseFactors {
    angles: Vec<f64>,
    convention: Convention,
}

#[derive(Serialize, Deserialize)]
struct PhaseRecord {
    convention: Convention,
    angles: Vec<f64>,
}

impl TryFrom<PhaseRecord> for PhaseFactors {
    type Error = Error;

    fn try_from(rec: PhaseRecord) -> Result<Self> {
        PhaseFactors::new(rec.angles, rec.convention)
    }
}

impl From<PhaseFactors> for PhaseRecord {
    fn from(p: PhaseFactors) -> Self {
        PhaseRecord {
            convention: p.convention,
            angles: p.angles,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QspResidual {
    pub max_abs_error: f64,
    pub grid_size: usize,
}

impl PhaseFactors {
    pub fn new(angles: Vec<f64>, convention: Convention) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Format("phase list is empty".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Format("non-finite phase angle".into()));
        }
        Ok(PhaseFactors { angles, convention })
    }

    pub fn zeros(degree: usize, convention: Convention) -> Self {
        PhaseFactors {
            angles: vec![0.0; degree + 1],
            convention,
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn degree(&self) -> usize {
        self.angles.len() - 1
    }

    pub fn target_parity(&self) -> Parity {
        Parity::of_degree(self.degree())
    }

    /// Same (0,0) entry under the other operator ordering.
    pub fn to_convention(&self, target: Convention) -> PhaseFactors {
        if target == self.convention {
            return self.clone();
        }
        let shifts = wx_shifts(self.degree());
        let sign = if target == Convention::Wx { 1.0 } else { -1.0 };
        let angles = self
            .angles
            .iter()
            .zip(shifts.iter())
            .map(|(&a, &s)| wrap(a + sign * s))
            .collect();
        PhaseFactors {
            angles,
            convention: target,
        }
    }
}

// Offsets taking reflection angles to wx angles. W^dagger equals
// -e^{i pi/2 Z} W e^{i pi/2 Z}; each such factor shifts both neighbouring
// phases by pi/2 and its sign is absorbed into phi_0 as e^{i pi Z} = -I.
fn wx_shifts(d: usize) -> Vec<f64> {
    let mut s = vec![0.0; d + 1];
    let mut daggers = 0;
    for k in 1..=d {
        if is_dagger(k, d) {
            daggers += 1;
            s[k - 1] += FRAC_PI_2;
            s[k] += FRAC_PI_2;
        }
    }
    s[0] += PI * daggers as f64;
    s
}

/// Whether the k-th signal operator (1-based) of a degree-d reflection
/// sequence is W^dagger.
fn is_dagger(k: usize, d: usize) -> bool {
    (k + d) % 2 == 1
}

/// Reduce to (-pi, pi].
fn wrap(a: f64) -> f64 {
    let t = a.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

pub fn signal(x: f64) -> Mat2 {
    let s = Complex64::new(0.0, (1.0 - x * x).max(0.0).sqrt());
    let xc = Complex64::new(x, 0.0);
    Mat2::new(xc, s, s, xc)
}

fn phase(phi: f64) -> Mat2 {
    let e = Complex64::from_polar(1.0, phi);
    Mat2::new(e, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), e.conj())
}

/// The full 2x2 product for the scalar signal x.
pub fn qsp_matrix(phi: &PhaseFactors, x: f64) -> Result<Mat2> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("qsp signal {x} outside [-1, 1]")));
    }
    let w = signal(x);
    let wd = w.adjoint();
    let d = phi.degree();
    let mut u = phase(phi.angles[0]);
    for k in 1..=d {
        let sig = match phi.convention {
            Convention::Wx => &w,
            Convention::Reflection if is_dagger(k, d) => &wd,
            Convention::Reflection => &w,
        };
        u = u * sig * phase(phi.angles[k]);
    }
    Ok(u)
}

pub fn qsp_eval(phi: &PhaseFactors, x: f64) -> Result<Complex64> {
    Ok(qsp_matrix(phi, x)?[(0, 0)])
}

/// Maximum of |Re <0|U|0> - P| over `grid` Chebyshev nodes of [-1, 1].
pub fn verify_phases(phi: &PhaseFactors, p: &Polynomial, grid: usize) -> QspResidual {
    let err = chebyshev::nodes(grid).iter().fold(0.0_f64, |m, &x| {
        let u = qsp_eval(phi, x).map(|z| z.re).unwrap_or(f64::NAN);
        m.max((u - p.eval(x)).abs())
    });
    QspResidual {
        max_abs_error: err,
        grid_size: grid,
    }
}
