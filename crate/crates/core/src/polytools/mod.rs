// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Real polynomials on [-1, 1] and the approximation polynomials built on
//! top of them (sign, rectangle, inverse).

mod approx;
pub mod chebyshev;
mod lambert;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use approx::{
    ceil_int, inverse_b, inverse_degree, inverse_poly, inverse_poly_capped, mi_degrees,
    rect_degree, rect_poly, rect_poly_capped, sign_degree, sign_k, sign_poly, sign_poly_capped,
    MiDegrees, RectKind,
};
pub use lambert::lambert_w;

/// Polynomials above this degree are only reported, never built.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// Inputs this close to +-1 are clamped before evaluation.
const CLAMP_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Chebyshev,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    pub fn of_degree(d: usize) -> Parity {
        if d % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        };
        f.write_str(s)
    }
}

/// A real polynomial stored in one basis, with the other basis derived on
/// first use.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PolynomialRecord", into = "PolynomialRecord")]
pub struct Polynomial {
    basis: Basis,
    coeffs: Vec<f64>,
    parity: Parity,
    other: OnceLock<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRecord {
    basis: Basis,
    coeffs: Vec<f64>,
    parity: Parity,
}

impl TryFrom<PolynomialRecord> for Polynomial {
    type Error = Error;

    fn try_from(rec: PolynomialRecord) -> Result<Self> {
        if rec.coeffs.is_empty() {
            return Err(Error::Format("polynomial has no coefficients".into()));
        }
        if rec.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Format("non-finite polynomial coefficient".into()));
        }
        let p = Polynomial::new(rec.basis, rec.coeffs);
        if rec.parity != Parity::None && rec.parity != p.parity {
            return Err(Error::ParityMismatch(format!(
                "declared {} but coefficients give {}",
                rec.parity, p.parity
            )));
        }
        Ok(p)
    }
}

impl From<Polynomial> for PolynomialRecord {
    fn from(p: Polynomial) -> Self {
        PolynomialRecord {
            basis: p.basis,
            parity: p.parity,
            coeffs: p.coeffs,
        }
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.coeffs == other.coeffs
    }
}

fn detect_parity(c: &[f64]) -> Parity {
    let odd_zero = c.iter().skip(1).step_by(2).all(|&v| v == 0.0);
    let even_zero = c.iter().step_by(2).all(|&v| v == 0.0);
    if odd_zero {
        Parity::Even
    } else if even_zero {
        Parity::Odd
    } else {
        Parity::None
    }
}

impl Polynomial {
    pub fn new(basis: Basis, mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        let parity = detect_parity(&coeffs);
        Polynomial {
            basis,
            coeffs,
            parity,
            other: OnceLock::new(),
        }
    }

    pub fn from_monomial(coeffs: Vec<f64>) -> Self {
        Self::new(Basis::Monomial, coeffs)
    }

    pub fn from_chebyshev(coeffs: Vec<f64>) -> Self {
        Self::new(Basis::Chebyshev, coeffs)
    }

    pub fn constant(c: f64) -> Self {
        Self::from_monomial(vec![c])
    }

    pub fn x() -> Self {
        Self::from_monomial(vec![0.0, 1.0])
    }

    /// The Chebyshev polynomial T_n.
    pub fn chebyshev_t(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::from_chebyshev(c)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficients in the stored basis.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn monomial_coeffs(&self) -> &[f64] {
        match self.basis {
            Basis::Monomial => &self.coeffs,
            Basis::Chebyshev => self.other.get_or_init(|| chebyshev::to_monomial(&self.coeffs)),
        }
    }

    pub fn chebyshev_coeffs(&self) -> &[f64] {
        match self.basis {
            Basis::Chebyshev => &self.coeffs,
            Basis::Monomial => self
                .other
                .get_or_init(|| chebyshev::from_monomial(&self.coeffs)),
        }
    }

    pub fn to_basis(&self, basis: Basis) -> Polynomial {
        match basis {
            Basis::Monomial => Self::from_monomial(self.monomial_coeffs().to_vec()),
            Basis::Chebyshev => Self::from_chebyshev(self.chebyshev_coeffs().to_vec()),
        }
    }

    /// P(x), clamping |x| <= 1 + 1e-12 onto [-1, 1].
    pub fn eval(&self, x: f64) -> f64 {
        let x = if x.abs() > 1.0 && x.abs() <= 1.0 + CLAMP_SLACK {
            x.signum()
        } else {
            x
        };
        match self.basis {
            Basis::Monomial => chebyshev::horner(&self.coeffs, x),
            Basis::Chebyshev => chebyshev::clenshaw(&self.coeffs, x),
        }
    }

    pub fn derivative(&self) -> Polynomial {
        match self.basis {
            Basis::Chebyshev => Self::from_chebyshev(chebyshev::derivative(&self.coeffs)),
            Basis::Monomial => Self::from_monomial(
                self.coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, &c)| i as f64 * c)
                    .collect(),
            ),
        }
    }

    fn with_coeffs(&self, coeffs: Vec<f64>) -> Polynomial {
        Self::new(self.basis, coeffs)
    }

    fn keep_parity(&self, keep: usize) -> Polynomial {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &v)| if i % 2 == keep { v } else { 0.0 })
            .collect();
        self.with_coeffs(c)
    }

    /// (P(x) + P(-x)) / 2.
    pub fn even_part(&self) -> Polynomial {
        self.keep_parity(0)
    }

    /// (P(x) - P(-x)) / 2.
    pub fn odd_part(&self) -> Polynomial {
        self.keep_parity(1)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        self.with_coeffs(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Sum in the basis of `self`.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let rhs = match self.basis {
            Basis::Monomial => other.monomial_coeffs(),
            Basis::Chebyshev => other.chebyshev_coeffs(),
        };
        let n = self.coeffs.len().max(rhs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + rhs.get(i).unwrap_or(&0.0))
            .collect();
        self.with_coeffs(c)
    }

    /// x * P(x).
    pub fn mul_x(&self) -> Polynomial {
        match self.basis {
            Basis::Chebyshev => self.with_coeffs(chebyshev::mul_x(&self.coeffs)),
            Basis::Monomial => {
                let mut c = Vec::with_capacity(self.coeffs.len() + 1);
                c.push(0.0);
                c.extend_from_slice(&self.coeffs);
                self.with_coeffs(c)
            }
        }
    }

    /// P(a x + b).
    pub fn compose_affine(&self, a: f64, b: f64) -> Polynomial {
        if a == 1.0 && b == 0.0 {
            return self.clone();
        }
        match self.basis {
            Basis::Monomial => {
                let mut acc = vec![0.0; self.coeffs.len()];
                let mut len = 0;
                for &ck in self.coeffs.iter().rev() {
                    // acc <- acc * (a x + b) + ck
                    for i in (0..=len).rev() {
                        let lower = if i > 0 { acc[i - 1] } else { 0.0 };
                        let here = if i < len { acc[i] } else { 0.0 };
                        acc[i] = here * b + lower * a;
                    }
                    acc[0] += ck;
                    len = (len + 1).min(self.coeffs.len());
                }
                Self::from_monomial(acc)
            }
            Basis::Chebyshev => {
                let d = self.degree();
                let c = chebyshev::interpolate(
                    |x| chebyshev::clenshaw(&self.coeffs, a * x + b),
                    d,
                    2 * (d + 1),
                );
                Self::from_chebyshev(c)
            }
        }
    }
}

/// Closed intervals inside [-1, 1], sorted and disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    intervals: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Domain("empty domain".into()));
        }
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) || a > b || a < -1.0 || b > 1.0 {
                return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
            }
            if i > 0 && intervals[i - 1].1 >= a {
                return Err(Error::Domain("intervals overlap or are unsorted".into()));
            }
        }
        Ok(Domain { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn full() -> Self {
        Domain {
            intervals: vec![(-1.0, 1.0)],
        }
    }

    pub fn unit() -> Self {
        Domain {
            intervals: vec![(0.0, 1.0)],
        }
    }

    /// [-1, -1/eta] u [1/eta, 1].
    pub fn d_eta(eta: f64) -> Result<Self> {
        if !(eta >= 1.0) {
            return Err(Error::Domain(format!("eta must be >= 1, got {eta}")));
        }
        Self::new(vec![(-1.0, -1.0 / eta), (1.0 / eta, 1.0)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }
}

/// Degree of a constructed or merely reported polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub name: String,
    pub degree: usize,
    pub parameters: BTreeMap<String, f64>,
}

impl DegreeReport {
    pub fn new(name: &str, degree: usize, params: &[(&str, f64)]) -> Self {
        DegreeReport {
            name: name.to_string(),
            degree,
            parameters: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

pub fn eval(p: &Polynomial, x: f64) -> f64 {
    p.eval(x)
}

/// Maximum of |P| over a domain: dense Chebyshev sampling, then Newton
/// refinement on P' wherever it changes sign between samples.
pub fn max_abs(p: &Polynomial, domain: &Domain) -> f64 {
    let c = p.chebyshev_coeffs();
    let dc = chebyshev::derivative(c);
    let ddc = chebyshev::derivative(&dc);
    let n = (8 * (p.degree() + 1)).max(64);
    let mut best = 0.0_f64;
    for &(a, b) in domain.intervals() {
        best = best.max(max_abs_on(c, &dc, &ddc, a, b, n));
    }
    best
}

fn max_abs_on(c: &[f64], dc: &[f64], ddc: &[f64], a: f64, b: f64, n: usize) -> f64 {
    let f = |x: f64| chebyshev::clenshaw(c, x);
    if a == b {
        return f(a).abs();
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut xs = Vec::with_capacity(n + 2);
    xs.push(a);
    xs.extend(chebyshev::nodes(n).iter().rev().map(|&t| mid + half * t));
    xs.push(b);
    let mut best = xs.iter().fold(0.0_f64, |m, &x| m.max(f(x).abs()));
    let ds: Vec<f64> = xs.iter().map(|&x| chebyshev::clenshaw(dc, x)).collect();
    for i in 0..xs.len() - 1 {
        if ds[i] == 0.0 {
            continue;
        }
        if ds[i] * ds[i + 1] < 0.0 {
            let x = refine_root(dc, ddc, xs[i], xs[i + 1], ds[i]);
            best = best.max(f(x).abs());
        }
    }
    best
}

// Safeguarded Newton for a root of P' bracketed by [lo, hi].
fn refine_root(dc: &[f64], ddc: &[f64], mut lo: f64, mut hi: f64, d_lo: f64) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..20 {
        let d = chebyshev::clenshaw(dc, x);
        if d == 0.0 {
            return x;
        }
        if (d > 0.0) == (d_lo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let dd = chebyshev::clenshaw(ddc, x);
        let newton = x - d / dd;
        x = if dd != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}

/// Coefficient product; stays monomial when both inputs are monomial.
pub fn multiply(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.basis == Basis::Monomial && q.basis == Basis::Monomial {
        let mut out = vec![0.0; p.coeffs.len() + q.coeffs.len() - 1];
        for (i, &a) in p.coeffs.iter().enumerate() {
            for (j, &b) in q.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        return Polynomial::from_monomial(out);
    }
    Polynomial::from_chebyshev(chebyshev::product(
        p.chebyshev_coeffs(),
        q.chebyshev_coeffs(),
    ))
}

/// P+(x) = P((x + 1) / 2).
pub fn positive_shift(p: &Polynomial) -> Polynomial {
    p.compose_affine(0.5, 0.5)
}

/// P((d2 - d1)/2 x + (d1 + d2)/2), mapping [-1, 1] onto [d1, d2].
pub fn window_shift(p: &Polynomial, delta1: f64, delta2: f64) -> Result<Polynomial> {
    if !(-1.0 <= delta1 && delta1 < delta2 && delta2 <= 1.0) {
        return Err(Error::Domain(format!(
            "window [{delta1}, {delta2}] must satisfy -1 <= d1 < d2 <= 1"
        )));
    }
    Ok(p.compose_affine(0.5 * (delta2 - delta1), 0.5 * (delta1 + delta2)))
}

/// `n` evenly spaced points on [a, b], endpoints included.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}
