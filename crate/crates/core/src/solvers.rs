// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Classical CG, CG with tracked polynomial coefficients, and the hybrid
//! quantum CG loop driven by swap-test estimates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encodings::{a_prime, verify_block_encoding, BlockEncoding, LinearSystem};
use crate::error::{Error, Result};
use crate::estimation::{prepare_b, required_shots, swap_test, ShotMode, ShotModel};
use crate::linalg::{c, CMatrix, CVector};
use crate::polytools::{ceil_int, max_abs, mi_degrees, Domain, MiDegrees, Polynomial};
use crate::qet::{qet_general, Shift};
use crate::qsp::SolveOptions;

/// Residual norm at which `cg_tracked` stops.
pub const TRACKED_STOP: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct CgClassical {
    pub x: CVector,
    /// ||r_k|| for k = 0, 1, ...
    pub residuals: Vec<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub iterations: usize,
}

/// Plain CG from x_0 = 0, stopping once ||r_{k+1}|| <= eps ||b||.
pub fn cg_classical(system: &LinearSystem, eps: f64) -> Result<CgClassical> {
    let a = system.matrix();
    let b = system.rhs();
    let bnorm = b.norm();
    let mut x = CVector::zeros(b.len());
    let mut r = b.clone();
    let mut p = b.clone();
    let mut rr = r.norm_squared();
    let mut out = CgClassical {
        x: x.clone(),
        residuals: vec![rr.sqrt()],
        alphas: vec![],
        betas: vec![],
        iterations: 0,
    };
    if rr.sqrt() <= eps * bnorm {
        return Ok(out);
    }
    let max_iter = 10 * b.len() + 10;
    for _ in 0..max_iter {
        let ap = a * &p;
        let pap = p.dotc(&ap).re;
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite(pap));
        }
        let alpha = rr / pap;
        x += &p * c(alpha);
        r -= &ap * c(alpha);
        let rr_next = r.norm_squared();
        out.alphas.push(alpha);
        out.residuals.push(rr_next.sqrt());
        out.iterations += 1;
        if rr_next.sqrt() <= eps * bnorm {
            out.x = x;
            return Ok(out);
        }
        let beta = rr_next / rr;
        out.betas.push(beta);
        p = &r + &p * c(beta);
        rr = rr_next;
    }
    Err(Error::MaxIterExceeded {
        max_iter,
        residual: rr.sqrt(),
    })
}

/// Monomial coefficients of x_k, r_k and p_k in A/alpha.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgCoefficients {
    pub k: usize,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
}

impl CgCoefficients {
    fn initial() -> Self {
        CgCoefficients {
            k: 0,
            x: vec![],
            r: vec![1.0],
            p: vec![1.0],
        }
    }

    /// One coefficient update; `beta` None leaves p_{k+1} empty.
    pub fn advance(&self, alpha: f64, beta: Option<f64>) -> CgCoefficients {
        let k = self.k;
        let at = |v: &[f64], l: usize| v.get(l).copied().unwrap_or(0.0);
        let x: Vec<f64> = (0..=k).map(|l| at(&self.x, l) + alpha * at(&self.p, l)).collect();
        let r: Vec<f64> = (0..=k + 1)
            .map(|l| at(&self.r, l) - if l > 0 { alpha * at(&self.p, l - 1) } else { 0.0 })
            .collect();
        let p = match beta {
            Some(b) => (0..=k + 1).map(|l| r[l] + b * at(&self.p, l)).collect(),
            None => vec![],
        };
        CgCoefficients { k: k + 1, x, r, p }
    }
}

/// CG carried out on the coefficient lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CgTrack {
    /// Coefficients for k = 0..=K; the last entry has no p when the run
    /// stopped on a vanishing residual.
    pub steps: Vec<CgCoefficients>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// ||r_k|| for k = 0..=K.
    pub residuals: Vec<f64>,
}

/// Krylov vectors (A/alpha)^l b/||b|| for l = 0..=n.
fn krylov(system: &LinearSystem, alpha: f64, n: usize) -> Result<Vec<CVector>> {
    let y = system.matrix() * c(1.0 / alpha);
    let mut out = Vec::with_capacity(n + 1);
    out.push(system.rhs_normalized()?);
    for l in 0..n {
        let next = &y * &out[l];
        out.push(next);
    }
    Ok(out)
}

fn combine(basis: &[CVector], coeffs: &[f64]) -> CVector {
    let mut v = CVector::zeros(basis[0].len());
    for (b, &cl) in basis.iter().zip(coeffs) {
        v += b * c(cl);
    }
    v
}

/// Vector sum_l c_l (A/alpha)^l b/||b|| for a coefficient list.
pub fn reconstruct(system: &LinearSystem, alpha: f64, coeffs: &[f64]) -> Result<CVector> {
    let basis = krylov(system, alpha, coeffs.len().max(1) - 1)?;
    Ok(combine(&basis, coeffs))
}

pub fn cg_tracked(system: &LinearSystem, alpha: f64, max_iter: usize) -> Result<CgTrack> {
    cg_tracked_with(system, alpha, max_iter, TRACKED_STOP)
}

/// Stops once ||r_{k+1}|| <= `stop` (in units of ||b||) or after
/// `max_iter` steps.
pub fn cg_tracked_with(system: &LinearSystem, alpha: f64, max_iter: usize, stop: f64) -> Result<CgTrack> {
    let basis = krylov(system, alpha, max_iter + 1)?;
    let mut cur = CgCoefficients::initial();
    let mut rr = 1.0;
    let mut track = CgTrack {
        steps: vec![cur.clone()],
        alphas: vec![],
        betas: vec![],
        residuals: vec![1.0],
    };
    for _ in 0..max_iter {
        let p = combine(&basis, &cur.p);
        let pp = combine(&basis[1..], &cur.p);
        let pap = p.dotc(&pp).re;
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite(pap));
        }
        let a = rr / pap;
        let probe = cur.advance(a, None);
        let rr_next = combine(&basis, &probe.r).norm_squared();
        track.alphas.push(a);
        track.residuals.push(rr_next.sqrt());
        if rr_next.sqrt() <= stop {
            track.steps.push(probe);
            return Ok(track);
        }
        let beta = rr_next / rr;
        track.betas.push(beta);
        cur = cur.advance(a, Some(beta));
        track.steps.push(cur.clone());
        rr = rr_next;
    }
    Ok(track)
}

/// Runtime settings of the quantum CG loop.
#[derive(Clone, Debug)]
pub struct QcgConfig {
    pub eps: f64,
    /// Inner-product precision.
    pub delta: f64,
    pub alpha: f64,
    pub shot_model: ShotModel,
    /// Shots per swap test in sampled mode; None derives them from the
    /// per-line precision.
    pub fixed_shots: Option<u64>,
    pub confidence: f64,
    pub max_iter: usize,
    /// Refuse delta >= (||A|| eps / (kappa ||b||))^2.
    pub enforce_delta_bound: bool,
    pub solver: SolveOptions,
}

impl QcgConfig {
    /// Defaults: delta at half the bound, four times the iteration bound.
    pub fn new(system: &LinearSystem, eps: f64, alpha: f64) -> Self {
        let crit = residual_criterion(system, eps);
        let bound = iteration_bound(system.kappa(), system.norm_a(), system.norm_b(), eps);
        QcgConfig {
            eps,
            delta: 0.5 * crit * crit,
            alpha,
            shot_model: ShotModel::exact(),
            fixed_shots: None,
            confidence: 0.95,
            max_iter: 4 * bound,
            enforce_delta_bound: true,
            solver: SolveOptions::default(),
        }
    }

    pub fn validate(&self, system: &LinearSystem) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Domain(format!("eps = {} not in (0, 1)", self.eps)));
        }
        if !(self.alpha >= system.norm_a()) {
            return Err(Error::Domain(format!(
                "alpha = {} is below ||A|| = {}",
                self.alpha,
                system.norm_a()
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::Domain(format!("delta = {} must be > 0", self.delta)));
        }
        let crit = residual_criterion(system, self.eps);
        if self.enforce_delta_bound && self.delta >= crit * crit {
            return Err(Error::Domain(format!(
                "delta = {:e} is not below (||A|| eps/(kappa ||b||))^2 = {:e}",
                self.delta,
                crit * crit
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// ||A|| eps / (kappa ||b||).
pub fn residual_criterion(system: &LinearSystem, eps: f64) -> f64 {
    system.norm_a() * eps / (system.kappa() * system.norm_b())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcgIteration {
    pub k: usize,
    pub alpha_k: f64,
    pub beta_k: Option<f64>,
    /// Estimate of <r_{k+1}|r_{k+1}>.
    pub rr_est: f64,
    /// Estimate of <p_k|p'_k> used for alpha_k.
    pub pp_est: f64,
    /// sqrt(rr_est).
    pub residual: f64,
    /// Max-abs values on [0, 1] of the k+1 polynomials.
    pub x_max: f64,
    pub r_max: f64,
    pub p_max: Option<f64>,
    pub pp_max: Option<f64>,
    /// Subnormalizations 2 C_max of the encodings actually built.
    pub r_norm: f64,
    pub p_norm: Option<f64>,
    pub pp_norm: Option<f64>,
    pub shots: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QcgTrace {
    pub iterations: Vec<QcgIteration>,
    pub converged: bool,
    /// Index of the last iteration.
    pub m: usize,
    pub delta: f64,
    pub criterion: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    /// Coefficients of x_{m+1}.
    pub x_coeffs: Vec<f64>,
    pub x_max: f64,
    /// Subnormalization of the final encoding.
    pub x_norm: f64,
    /// || |x_{m+1}> ||.
    pub x_length: f64,
    /// Normalized output state.
    pub solution_state: Vec<Complex64>,
    /// (||b||/alpha) |x_{m+1}>, the estimate of A^-1 b.
    pub solution: Vec<Complex64>,
    /// Probability of the all-zero ancilla outcome on the final circuit.
    pub success_probability: f64,
    /// (|| |x_{m+1}> || / (2 X_max))^2.
    pub success_probability_xmax: f64,
}

struct Estimator<'a> {
    base: &'a BlockEncoding,
    prep: CMatrix,
    cfg: &'a QcgConfig,
    counter: u64,
}

impl Estimator<'_> {
    fn encode(&self, coeffs: &[f64]) -> Result<(BlockEncoding, f64)> {
        let poly = Polynomial::from_monomial(coeffs.to_vec());
        let (be, asm) = qet_general(self.base, &poly, Shift::PositiveSide, &self.cfg.solver)?;
        Ok((be, asm.normalization))
    }

    /// Raw inner product from a swap test, and the shots spent.
    fn inner(&mut self, u: &(BlockEncoding, f64), v: &(BlockEncoding, f64), precision: f64) -> Result<(f64, u64)> {
        let model = match self.cfg.shot_model.mode {
            ShotMode::Exact => ShotModel::exact(),
            ShotMode::Sampled => {
                let shots = match self.cfg.fixed_shots {
                    Some(n) => n,
                    None => required_shots(precision, self.cfg.confidence)?,
                };
                self.counter += 1;
                ShotModel::sampled(shots, self.cfg.shot_model.seed.wrapping_add(self.counter))?
            }
        };
        let res = swap_test(&u.0, &v.0, &self.prep, &model)?;
        Ok((res.re_inner * u.1 * v.1, res.shots.unwrap_or(0)))
    }
}

fn positive_max(coeffs: &[f64]) -> f64 {
    max_abs(&Polynomial::from_monomial(coeffs.to_vec()), &Domain::unit())
}

fn times_y(coeffs: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(coeffs.len() + 1);
    v.push(0.0);
    v.extend_from_slice(coeffs);
    v
}

/// The hybrid loop: coefficients updated classically, inner products
/// estimated by swap tests on positive-side QET encodings.
pub fn qcg_solve(system: &LinearSystem, be_a_prime: &BlockEncoding, cfg: &QcgConfig) -> Result<QcgTrace> {
    cfg.validate(system)?;
    if !system.is_positive_definite() {
        return Err(Error::NotPositiveDefinite(system.eigenvalues()[0]));
    }
    if be_a_prime.system_dim() != system.dim() {
        return Err(Error::DimensionMismatch(format!(
            "encoding acts on dimension {}, system has {}",
            be_a_prime.system_dim(),
            system.dim()
        )));
    }
    let target = a_prime(system, cfg.alpha);
    let err = verify_block_encoding(be_a_prime, &target)?;
    if err > be_a_prime.eps() + 1e-9 {
        return Err(Error::Domain(format!(
            "encoding misses A' = 2A/alpha - I by {err:e}"
        )));
    }
    let criterion = residual_criterion(system, cfg.eps);
    let mut est = Estimator {
        base: be_a_prime,
        prep: prepare_b(system)?,
        cfg,
        counter: 0,
    };

    let mut cur = CgCoefficients::initial();
    let mut rr = 1.0;
    let mut p_enc = est.encode(&cur.p)?;
    let mut pp_enc = est.encode(&times_y(&cur.p))?;
    let (mut pp, mut shots) = est.inner(&p_enc, &pp_enc, cfg.delta)?;
    let mut iterations = Vec::new();
    let mut converged = false;
    for k in 0..cfg.max_iter {
        if !(pp > 0.0) {
            return Err(Error::DivisionByZero(pp));
        }
        let a = rr / pp;
        let next = cur.advance(a, None);
        let r_max = positive_max(&next.r);
        let x_max = positive_max(&next.x);
        let r_enc = est.encode(&next.r)?;
        let (rr_next, s) = est.inner(&r_enc, &r_enc, cfg.delta / (4.0 * r_max * r_max))?;
        shots += s;
        let residual = rr_next.max(0.0).sqrt();
        let mut it = QcgIteration {
            k,
            alpha_k: a,
            beta_k: None,
            rr_est: rr_next,
            pp_est: pp,
            residual,
            x_max,
            r_max,
            p_max: None,
            pp_max: None,
            r_norm: r_enc.1,
            p_norm: None,
            pp_norm: None,
            shots,
        };
        if residual <= criterion {
            cur = next;
            iterations.push(it);
            converged = true;
            break;
        }
        let beta = rr_next / rr;
        cur = cur.advance(a, Some(beta));
        let p_max = positive_max(&cur.p);
        let pp_poly = times_y(&cur.p);
        let pp_max = positive_max(&pp_poly);
        p_enc = est.encode(&cur.p)?;
        pp_enc = est.encode(&pp_poly)?;
        let (pp_next, s) = est.inner(&p_enc, &pp_enc, cfg.delta / (4.0 * p_max * pp_max))?;
        it.beta_k = Some(beta);
        it.p_max = Some(p_max);
        it.pp_max = Some(pp_max);
        it.p_norm = Some(p_enc.1);
        it.pp_norm = Some(pp_enc.1);
        it.shots = s + shots;
        iterations.push(it);
        shots = 0;
        rr = rr_next;
        pp = pp_next;
    }
    let last = iterations.last().map(|i| i.residual).unwrap_or(1.0);
    if !converged {
        return Err(Error::MaxIterExceeded {
            max_iter: cfg.max_iter,
            residual: last,
        });
    }
    let m = iterations.len() - 1;
    let x_max = positive_max(&cur.x);
    let x_enc = est.encode(&cur.x)?;
    let bhat = system.rhs_normalized()?;
    let out = x_enc.0.apply_block(&bhat);
    let success = out.norm_squared();
    let x_vec = &out * c(x_enc.1);
    let x_length = x_vec.norm();
    let scale = system.norm_b() / cfg.alpha;
    let state = if success > 0.0 { &out / c(success.sqrt()) } else { out.clone() };
    Ok(QcgTrace {
        iterations,
        converged,
        m,
        delta: cfg.delta,
        criterion,
        alpha: cfg.alpha,
        kappa: system.kappa(),
        norm_a: system.norm_a(),
        norm_b: system.norm_b(),
        x_coeffs: cur.x,
        x_max,
        x_norm: x_enc.1,
        x_length,
        solution_state: state.iter().copied().collect(),
        solution: (x_vec * c(scale)).iter().copied().collect(),
        success_probability: success,
        success_probability_xmax: (x_length / (2.0 * x_max)).powi(2),
    })
}

/// ceil(sqrt(kappa)/2 ln(2 kappa ||b|| / (||A|| eps))), at least 1.
pub fn iteration_bound(kappa: f64, norm_a: f64, norm_b: f64, eps: f64) -> usize {
    let v = 0.5 * kappa.sqrt() * (2.0 * kappa * norm_b / (norm_a * eps)).ln();
    ceil_int(v).max(1)
}

/// Degree of the direct QSVT inversion polynomial and its two factors.
pub fn direct_qsvt_degree(kappa: f64, alpha: f64, eps: f64) -> Result<MiDegrees> {
    mi_degrees(kappa, alpha, eps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryCost {
    /// Q_k per iteration.
    pub per_iteration: Vec<f64>,
    /// m (2 X_max / || |x_{m+1}> ||)^2.
    pub final_state: f64,
    pub total: f64,
    /// 2(m + 1).
    pub max_depth: usize,
}

/// Q_k = 32(k+1) R^4/delta^2 + 16(2k+3) P^2 P'^2/delta^2, with the P
/// term absent on the iteration that stops.
pub fn query_cost(trace: &QcgTrace, delta: f64) -> QueryCost {
    let d2 = delta * delta;
    let per_iteration: Vec<f64> = trace
        .iterations
        .iter()
        .map(|it| {
            let k = it.k as f64;
            let r_term = 32.0 * (k + 1.0) * it.r_max.powi(4) / d2;
            let p_term = match (it.p_max, it.pp_max) {
                (Some(p), Some(q)) => 16.0 * (2.0 * k + 3.0) * (p * q).powi(2) / d2,
                _ => 0.0,
            };
            r_term + p_term
        })
        .collect();
    let final_state = if trace.x_length > 0.0 {
        trace.m as f64 * (2.0 * trace.x_max / trace.x_length).powi(2)
    } else {
        0.0
    };
    QueryCost {
        total: per_iteration.iter().sum::<f64>() + final_state,
        per_iteration,
        final_state,
        max_depth: 2 * (trace.m + 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    X,
    R,
    P,
    PPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    IterationK,
    Kappa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub quantity: Quantity,
    pub regressor: Regressor,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least squares for log y = e log x + c; returns (e, c, r^2).
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: xs.len().min(ys.len()),
        });
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("regressor values are all equal".into()));
    }
    let e = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((e, my - e * mx, r2))
}

/// Max-abs values indexed by polynomial index k = 1..=m+1.
pub fn max_abs_series(trace: &QcgTrace, q: Quantity) -> Vec<(usize, f64)> {
    trace
        .iterations
        .iter()
        .filter_map(|it| {
            let v = match q {
                Quantity::X => Some(it.x_max),
                Quantity::R => Some(it.r_max),
                Quantity::P => it.p_max,
                Quantity::PPrime => it.pp_max,
            };
            v.map(|v| (it.k + 1, v))
        })
        .collect()
}

/// Power-law exponents of the max-abs values, against the iteration
/// index (points with k >= `k_min` of every trace) or against kappa (the
/// largest value of each trace).
pub fn fit_scalings_from(traces: &[QcgTrace], regressor: Regressor, k_min: usize) -> Result<Vec<ScalingFit>> {
    let mut fits = Vec::new();
    for q in [Quantity::X, Quantity::R, Quantity::P, Quantity::PPrime] {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for t in traces {
            let series = max_abs_series(t, q);
            match regressor {
                Regressor::IterationK => {
                    for (k, v) in series.into_iter().filter(|&(k, _)| k >= k_min) {
                        xs.push(k as f64);
                        ys.push(v);
                    }
                }
                Regressor::Kappa => {
                    if let Some(v) = series.iter().map(|&(_, v)| v).reduce(f64::max) {
                        xs.push(t.kappa);
                        ys.push(v);
                    }
                }
            }
        }
        if xs.len() < 4 {
            return Err(Error::InsufficientData {
                needed: 4,
                got: xs.len(),
            });
        }
        let (exponent, intercept, r_squared) = fit_power_law(&xs, &ys)?;
        fits.push(ScalingFit {
            quantity: q,
            regressor,
            exponent,
            intercept,
            r_squared,
            points: xs.len(),
        });
    }
    Ok(fits)
}

/// `fit_scalings_from` starting at k = 2.
pub fn fit_scalings(traces: &[QcgTrace], regressor: Regressor) -> Result<Vec<ScalingFit>> {
    fit_scalings_from(traces, regressor, 2)
}
