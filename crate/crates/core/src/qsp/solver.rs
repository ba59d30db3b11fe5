// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Phase finding for real, parity-definite polynomials.
//!
//! Works on symmetric wx phases, (phi_0..phi_d) with phi_k = phi_{d-k},
//! which leaves ceil((d+1)/2) unknowns matched against P at as many
//! positive Chebyshev nodes. Newton steps on that square system do the
//! heavy lifting; L-BFGS on the sum of squares takes over when a Newton
//! step cannot reduce the residual.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{signal, Convention, PhaseFactors, QspResidual};
use crate::error::{Error, Result};
use crate::polytools::{max_abs, Domain, Parity, Polynomial};

pub const DEFAULT_SOLVER_CAP: usize = 512;

/// |P| may exceed 1 by this much before the solve is refused.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub degree_cap: usize,
    pub max_iter: usize,
    pub convention: Convention,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            degree_cap: DEFAULT_SOLVER_CAP,
            max_iter: 200,
            convention: Convention::Reflection,
        }
    }
}

pub fn solve_phases(p: &Polynomial, tol: f64) -> Result<(PhaseFactors, QspResidual)> {
    solve_phases_with(
        p,
        &SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_phases_with(p: &Polynomial, opts: &SolveOptions) -> Result<(PhaseFactors, QspResidual)> {
    if p.parity() == Parity::None {
        return Err(Error::ParityMismatch(
            "phase factors need an even or odd polynomial".into(),
        ));
    }
    let d = p.degree();
    if d > opts.degree_cap {
        return Err(Error::Resource {
            report: crate::polytools::DegreeReport::new("phase solve", d, &[]),
            cap: opts.degree_cap,
        });
    }
    let bound = max_abs(p, &Domain::full());
    if bound > 1.0 + BOUND_SLACK {
        return Err(Error::ConditionViolation { max_abs: bound });
    }
    let problem = Problem::new(p);
    let (mut theta, mut residual) = problem.solve(opts);
    // At |P| = 1 the factorization degenerates and above it none exists, so
    // a saturated target that stalls is retried at a scale within tol/2.
    let margin = 0.5 * opts.tol;
    if !(residual <= opts.tol) && bound > 1.0 - margin {
        let (t, _) = Problem::new(&p.scale((1.0 - margin) / bound)).solve(opts);
        let r = problem.eval(&t, false).0.amax();
        if r < residual {
            theta = t;
            residual = r;
        }
    }
    if !(residual <= opts.tol) {
        return Err(Error::NotConverged { residual });
    }
    let wx = PhaseFactors::new(problem.full_phases(&theta), Convention::Wx)?;
    Ok((
        wx.to_convention(opts.convention),
        QspResidual {
            max_abs_error: residual,
            grid_size: problem.nodes.len(),
        },
    ))
}

struct Problem {
    d: usize,
    nodes: Vec<f64>,
    targets: Vec<f64>,
}

impl Problem {
    fn new(p: &Polynomial) -> Self {
        let d = p.degree();
        let m = d / 2 + 1;
        let nodes: Vec<f64> = (1..=m)
            .map(|j| ((2 * j - 1) as f64 * PI / (4 * m) as f64).cos())
            .collect();
        let targets = nodes.iter().map(|&x| p.eval(x)).collect();
        Problem { d, nodes, targets }
    }

    fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    fn full_phases(&self, theta: &[f64]) -> Vec<f64> {
        (0..=self.d).map(|k| theta[k.min(self.d - k)]).collect()
    }

    fn initial(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.unknowns()];
        t[0] = FRAC_PI_4;
        t
    }

    /// Residuals, and the Jacobian in the reduced unknowns if requested.
    fn eval(&self, theta: &[f64], jac: bool) -> (DVector<f64>, Option<DMatrix<f64>>) {
        let m = self.unknowns();
        let phi = self.full_phases(theta);
        let e: Vec<Complex64> = phi.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        let mut f = DVector::zeros(m);
        let mut j = if jac { Some(DMatrix::zeros(m, m)) } else { None };
        let mut rows: Vec<[Complex64; 2]> = vec![[Complex64::default(); 2]; self.d + 1];
        for (row, &x) in self.nodes.iter().enumerate() {
            let w = signal(x);
            // rows[k] = <0| E_0 W E_1 ... W, the prefix before E_k.
            let mut l = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
            for k in 0..=self.d {
                rows[k] = l;
                if k < self.d {
                    let a = l[0] * e[k];
                    let b = l[1] * e[k].conj();
                    l = [a * w[(0, 0)] + b * w[(1, 0)], a * w[(0, 1)] + b * w[(1, 1)]];
                }
            }
            let u00 = rows[self.d][0] * e[self.d];
            f[row] = u00.re - self.targets[row];
            if let Some(jm) = j.as_mut() {
                // r = W E_{k+1} ... E_d |0>, the suffix after E_k.
                let mut r = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
                for k in (0..=self.d).rev() {
                    let l = rows[k];
                    let i = Complex64::new(0.0, 1.0);
                    let g = l[0] * i * e[k] * r[0] - l[1] * i * e[k].conj() * r[1];
                    jm[(row, k.min(self.d - k))] += g.re;
                    if k > 0 {
                        let a = e[k] * r[0];
                        let b = e[k].conj() * r[1];
                        r = [w[(0, 0)] * a + w[(0, 1)] * b, w[(1, 0)] * a + w[(1, 1)] * b];
                    }
                }
            }
        }
        (f, j)
    }

    fn solve(&self, opts: &SolveOptions) -> (Vec<f64>, f64) {
        let mut theta = self.initial();
        let (mut f, _) = self.eval(&theta, false);
        let mut best = f.amax();
        let target = (opts.tol * 1e-3).max(1e-15);
        let mut iter = 0;
        while iter < opts.max_iter && best > target {
            iter += 1;
            match self.newton_step(&theta, &f) {
                Some((t, g)) => {
                    let before = best;
                    theta = t;
                    f = g;
                    best = f.amax();
                    // Quadratic convergence has stalled at round-off.
                    if best <= opts.tol && best > 0.5 * before {
                        break;
                    }
                }
                None => {
                    let (t, g) = self.lbfgs(&theta, 200);
                    if g.norm() >= f.norm() {
                        break;
                    }
                    theta = t;
                    f = g;
                    best = f.amax();
                }
            }
        }
        (theta, best)
    }

    // Newton step with backtracking on ||f||.
    fn newton_step(&self, theta: &[f64], f: &DVector<f64>) -> Option<(Vec<f64>, DVector<f64>)> {
        let (_, jac) = self.eval(theta, true);
        let step = jac?.lu().solve(&(-f))?;
        if step.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let norm0 = f.norm();
        let mut s = 1.0;
        for _ in 0..30 {
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, d)| t + s * d).collect();
            let (g, _) = self.eval(&trial, false);
            if g.norm() < norm0 {
                return Some((trial, g));
            }
            s *= 0.5;
        }
        None
    }

    fn objective(&self, theta: &[f64]) -> (f64, DVector<f64>, DVector<f64>) {
        let (f, j) = self.eval(theta, true);
        let grad = j.expect("jacobian requested").transpose() * &f;
        (0.5 * f.norm_squared(), grad, f)
    }

    // Limited-memory BFGS on 0.5 ||f||^2 with Armijo backtracking.
    fn lbfgs(&self, start: &[f64], iters: usize) -> (Vec<f64>, DVector<f64>) {
        const MEMORY: usize = 10;
        let mut x = DVector::from_column_slice(start);
        let (mut fx, mut g, mut res) = self.objective(start);
        let mut hist: VecDeque<(DVector<f64>, DVector<f64>, f64)> = VecDeque::new();
        for _ in 0..iters {
            let mut q = g.clone();
            let mut alphas = Vec::with_capacity(hist.len());
            for (s, y, rho) in hist.iter().rev() {
                let a = rho * s.dot(&q);
                q -= y * a;
                alphas.push(a);
            }
            if let Some((s, y, _)) = hist.back() {
                q *= s.dot(y) / y.norm_squared();
            }
            for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
                let b = rho * y.dot(&q);
                q += s * (a - b);
            }
            let mut dir = -q;
            if dir.dot(&g) >= 0.0 {
                dir = -g.clone();
                hist.clear();
            }
            let slope = dir.dot(&g);
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let trial = &x + &dir * step;
                let (ft, gt, rt) = self.objective(trial.as_slice());
                if ft <= fx + 1e-4 * step * slope {
                    accepted = Some((trial, ft, gt, rt));
                    break;
                }
                step *= 0.5;
            }
            let Some((xn, fn_, gn, rn)) = accepted else { break };
            let s = &xn - &x;
            let y = &gn - &g;
            let sy = s.dot(&y);
            if sy > 1e-300 {
                if hist.len() == MEMORY {
                    hist.pop_front();
                }
                hist.push_back((s, y, 1.0 / sy));
            }
            x = xn;
            fx = fn_;
            g = gn;
            res = rn;
            if g.amax() < 1e-16 {
                break;
            }
        }
        (x.as_slice().to_vec(), res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsp::{qsp_eval, verify_phases};

    #[test]
    fn identity_target() {
        let (phi, res) = solve_phases(&Polynomial::x(), 1e-12).unwrap();
        assert!(res.max_abs_error <= 1e-12);
        for &x in &[-1.0, -0.4, 0.1, 0.9] {
            assert!((qsp_eval(&phi, x).unwrap().re - x).abs() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_targets() {
        for d in [2, 4, 7, 16] {
            let p = Polynomial::chebyshev_t(d);
            let (phi, _) = solve_phases(&p, 1e-10).unwrap();
            assert!(verify_phases(&phi, &p, 1000).max_abs_error <= 1e-10, "d = {d}");
        }
    }

    #[test]
    fn constant_targets() {
        for c in [0.0, 0.3, -1.0] {
            let (phi, _) = solve_phases(&Polynomial::constant(c), 1e-12).unwrap();
            assert!((qsp_eval(&phi, 0.2).unwrap().re - c).abs() < 1e-12);
        }
    }

    #[test]
    fn saturated_target() {
        // Max |P| sits a hair above 1 from round-off in the coefficients.
        let p = Polynomial::from_chebyshev(vec![0.0, 0.5 + 1e-12, 0.0, 0.5]);
        assert!(max_abs(&p, &Domain::full()) > 1.0);
        let (phi, res) = solve_phases(&p, 1e-10).unwrap();
        assert!(res.max_abs_error <= 1e-10);
        assert!(verify_phases(&phi, &p, 1000).max_abs_error <= 1e-10);
    }

    #[test]
    fn rejections() {
        let mixed = Polynomial::from_monomial(vec![0.1, 0.5]);
        assert!(matches!(solve_phases(&mixed, 1e-10), Err(Error::ParityMismatch(_))));
        let big = Polynomial::from_monomial(vec![0.0, 1.5]);
        assert!(matches!(solve_phases(&big, 1e-10), Err(Error::ConditionViolation { .. })));
        let opts = SolveOptions {
            degree_cap: 3,
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve_phases_with(&Polynomial::chebyshev_t(5), &opts),
            Err(Error::Resource { .. })
        ));
    }
}
