// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Sign, rectangle and inverse approximants with their closed-form degrees.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};
use statrs::function::{erf::erf, gamma::ln_gamma};

use super::{chebyshev, lambert_w, DegreeReport, Polynomial, DEFAULT_DEGREE_CAP};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RectKind {
    /// Close to 0 on |x| < delta, close to 1 outside.
    Open,
    /// Close to 1 on |x| < delta, close to 0 outside.
    Closed,
}

/// Ceiling that forgives floating noise just above an integer.
pub fn ceil_int(v: f64) -> usize {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * r.abs().max(1.0) {
        r.max(0.0) as usize
    } else {
        v.ceil().max(0.0) as usize
    }
}

fn check_sign_params(delta: f64, big_delta: f64, eps: f64) -> Result<()> {
    let eps_max = (8.0 / (E * PI)).sqrt();
    if !(delta > -1.0 && delta < 1.0) {
        return Err(Error::Domain(format!("sign: delta = {delta} not in (-1, 1)")));
    }
    if !(big_delta > 0.0 && big_delta.is_finite()) {
        return Err(Error::Domain(format!("sign: Delta = {big_delta} must be > 0")));
    }
    if !(eps > 0.0 && eps <= eps_max) {
        return Err(Error::Domain(format!(
            "sign: eps = {eps} not in (0, {eps_max:.6}]"
        )));
    }
    if delta - big_delta / 2.0 <= -1.0 || delta + big_delta / 2.0 >= 1.0 {
        return Err(Error::Domain(format!(
            "sign: transition band around {delta} of width {big_delta} leaves (-1, 1)"
        )));
    }
    Ok(())
}

/// Steepness k of erf(k(x - delta)).
pub fn sign_k(big_delta: f64, eps: f64) -> f64 {
    (2.0 * (8.0 / (PI * eps * eps)).ln()).sqrt() / big_delta
}

pub fn sign_degree(delta: f64, big_delta: f64, eps: f64) -> Result<DegreeReport> {
    check_sign_params(delta, big_delta, eps)?;
    let k = sign_k(big_delta, eps);
    let w = lambert_w(512.0 / (PI * eps * eps * E * E))?;
    let inner = 16.0 * (1.0 + delta.abs()) * k / (PI.sqrt() * eps) * (-0.5 * w).exp();
    let degree = 2 * ceil_int(inner) + 1;
    Ok(DegreeReport::new(
        "sign",
        degree,
        &[("delta", delta), ("Delta", big_delta), ("eps", eps), ("k", k)],
    ))
}

fn over_cap(report: DegreeReport, cap: usize) -> Result<DegreeReport> {
    if report.degree > cap {
        Err(Error::Resource { report, cap })
    } else {
        Ok(report)
    }
}

pub fn sign_poly(delta: f64, big_delta: f64, eps: f64) -> Result<(Polynomial, DegreeReport)> {
    sign_poly_capped(delta, big_delta, eps, DEFAULT_DEGREE_CAP)
}

/// Chebyshev truncation of erf(k(x - delta)) approximating sign(x - delta).
pub fn sign_poly_capped(
    delta: f64,
    big_delta: f64,
    eps: f64,
    cap: usize,
) -> Result<(Polynomial, DegreeReport)> {
    let report = over_cap(sign_degree(delta, big_delta, eps)?, cap)?;
    let k = report.parameters["k"];
    let d = report.degree;
    let mut c = chebyshev::interpolate(|x| erf(k * (x - delta)), d, 4 * d);
    if delta == 0.0 {
        c.iter_mut().step_by(2).for_each(|v| *v = 0.0);
    }
    Ok((Polynomial::from_chebyshev(c), report))
}

fn check_rect_params(delta: f64, big_delta: f64, eps: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("rect: delta = {delta} not in (0, 1)")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("rect: eps = {eps} not in (0, 1)")));
    }
    if !(big_delta > 0.0) || delta - big_delta / 2.0 <= 0.0 || delta + big_delta / 2.0 >= 1.0 {
        return Err(Error::Domain(format!(
            "rect: band delta +- Delta/2 = {delta} +- {} must lie in (0, 1)",
            big_delta / 2.0
        )));
    }
    Ok(())
}

pub fn rect_degree(delta: f64, big_delta: f64, eps: f64) -> Result<DegreeReport> {
    check_rect_params(delta, big_delta, eps)?;
    let sign = sign_degree(delta, big_delta, eps / 2.0)?;
    Ok(DegreeReport::new(
        "rect",
        sign.degree - 1,
        &[("delta", delta), ("Delta", big_delta), ("eps", eps)],
    ))
}

pub fn rect_poly(
    delta: f64,
    big_delta: f64,
    eps: f64,
    kind: RectKind,
) -> Result<(Polynomial, DegreeReport)> {
    rect_poly_capped(delta, big_delta, eps, kind, DEFAULT_DEGREE_CAP)
}

/// Open: 1 + (S_d(x) + S_d(-x))/2. Closed: (S_-d(x) + S_-d(-x))/2.
pub fn rect_poly_capped(
    delta: f64,
    big_delta: f64,
    eps: f64,
    kind: RectKind,
    cap: usize,
) -> Result<(Polynomial, DegreeReport)> {
    let report = over_cap(rect_degree(delta, big_delta, eps)?, cap)?;
    let centre = match kind {
        RectKind::Open => delta,
        RectKind::Closed => -delta,
    };
    let (sign, _) = sign_poly_capped(centre, big_delta, eps / 2.0, usize::MAX)?;
    // The odd Chebyshev terms cancel exactly, so the top one drops out.
    let mut p = sign.even_part();
    if kind == RectKind::Open {
        p = p.add(&Polynomial::constant(1.0));
    }
    Ok((p, report))
}

fn check_inverse_params(kappa: f64, alpha: f64, eps: f64) -> Result<()> {
    if !(kappa >= 1.0 && kappa.is_finite()) || !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "inverse: need kappa >= 1 and alpha >= 1, got {kappa}, {alpha}"
        )));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("inverse: eps = {eps} not in (0, 1/2)")));
    }
    Ok(())
}

/// b = ceil((kappa alpha)^2 ln(2 kappa alpha / eps)).
pub fn inverse_b(kappa: f64, alpha: f64, eps: f64) -> Result<usize> {
    check_inverse_params(kappa, alpha, eps)?;
    let ka = kappa * alpha;
    Ok(ceil_int(ka * ka * (2.0 * ka / eps).ln()))
}

pub fn inverse_degree(kappa: f64, alpha: f64, eps: f64) -> Result<DegreeReport> {
    let b = inverse_b(kappa, alpha, eps)?;
    let bf = b as f64;
    let degree = 2 * ceil_int(0.5 * (bf * (8.0 * bf / eps).ln()).sqrt()) + 1;
    Ok(DegreeReport::new(
        "inverse",
        degree,
        &[("kappa", kappa), ("alpha", alpha), ("eps", eps), ("b", bf)],
    ))
}

pub fn inverse_poly(kappa: f64, alpha: f64, eps: f64) -> Result<(Polynomial, DegreeReport)> {
    inverse_poly_capped(kappa, alpha, eps, DEFAULT_DEGREE_CAP)
}

/// 4 sum_j (-1)^j [2^-2b sum_{i>j} C(2b, b+i)] T_{2j+1}(x).
pub fn inverse_poly_capped(
    kappa: f64,
    alpha: f64,
    eps: f64,
    cap: usize,
) -> Result<(Polynomial, DegreeReport)> {
    let report = over_cap(inverse_degree(kappa, alpha, eps)?, cap)?;
    let b = report.parameters["b"] as usize;
    let tails = binomial_tails(b);
    let d = report.degree;
    let mut c = vec![0.0; d + 1];
    for j in 0..=(d - 1) / 2 {
        let sign = if j % 2 == 0 { 4.0 } else { -4.0 };
        c[2 * j + 1] = sign * tails.get(j).copied().unwrap_or(0.0);
    }
    Ok((Polynomial::from_chebyshev(c), report))
}

// tails[j] = 4^-b sum_{i=j+1}^{b} C(2b, b+i), for j = 0..b.
fn binomial_tails(b: usize) -> Vec<f64> {
    let bf = b as f64;
    let mut t = Vec::with_capacity(b + 1);
    let mut ti = (ln_gamma(2.0 * bf + 1.0) - 2.0 * ln_gamma(bf + 1.0) - 2.0 * bf * 2f64.ln()).exp();
    t.push(ti);
    for i in 0..b {
        ti *= (bf - i as f64) / (bf + i as f64 + 1.0);
        t.push(ti);
    }
    let mut tails = vec![0.0; b + 1];
    let mut acc = 0.0;
    for j in (0..b).rev() {
        acc += t[j + 1];
        tails[j] = acc;
    }
    tails
}

/// Degrees of the direct matrix-inversion polynomial P^MI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiDegrees {
    pub total: usize,
    pub inverse: DegreeReport,
    pub rect: DegreeReport,
    pub eps_prime: f64,
}

/// d_inv(2 kappa, alpha, eps/2) + d_rect(3/(4 kappa alpha), 1/(2 kappa alpha), eps').
pub fn mi_degrees(kappa: f64, alpha: f64, eps: f64) -> Result<MiDegrees> {
    let inverse = inverse_degree(2.0 * kappa, alpha, eps / 2.0)?;
    let ka = kappa * alpha;
    let eps_prime = (2.0 * eps / (5.0 * ka)).min(ka / (2.0 * inverse.degree as f64));
    let rect = rect_degree(3.0 / (4.0 * ka), 1.0 / (2.0 * ka), eps_prime)?;
    Ok(MiDegrees {
        total: inverse.degree + rect.degree,
        inverse,
        rect,
        eps_prime,
    })
}
