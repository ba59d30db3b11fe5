// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Chebyshev-basis kernels: evaluation, basis changes, products and
//! interpolation at Chebyshev nodes of the first kind.

use std::f64::consts::PI;

/// Clenshaw recurrence for sum c_j T_j(x).
pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &cj in c.iter().skip(1).rev() {
        let b0 = cj + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

pub fn horner(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &ai| acc * x + ai)
}

/// Coefficients of x * sum c_j T_j.
pub fn mul_x(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + 1];
    for (j, &cj) in c.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        if j == 0 {
            out[1] += cj;
        } else {
            out[j + 1] += 0.5 * cj;
            out[j - 1] += 0.5 * cj;
        }
    }
    out
}

pub fn to_monomial(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    // Monomial coefficients of T_{j-1} and T_j.
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    out[0] += c[0];
    if n > 1 {
        out[1] += c[1];
    }
    for cj in c.iter().skip(2) {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, &v) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * v;
        }
        for (i, &v) in prev.iter().enumerate() {
            next[i] -= v;
        }
        for (o, &v) in out.iter_mut().zip(next.iter()) {
            *o += cj * v;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// Horner's scheme carried out in the Chebyshev basis.
pub fn from_monomial(a: &[f64]) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::with_capacity(a.len());
    for &ai in a.iter().rev() {
        acc = if acc.is_empty() { vec![] } else { mul_x(&acc) };
        if acc.is_empty() {
            acc.push(0.0);
        }
        acc[0] += ai;
    }
    acc.truncate(a.len().max(1));
    acc
}

/// T_i T_j = (T_{i+j} + T_{|i-j|}) / 2.
pub fn product(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return vec![0.0];
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &pi) in p.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (j, &qj) in q.iter().enumerate() {
            let h = 0.5 * pi * qj;
            out[i + j] += h;
            out[i.abs_diff(j)] += h;
        }
    }
    out
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Chebyshev nodes of the first kind, cos((2j+1)pi/(2n)), descending.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| ((2 * j + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// Degree-`degree` Chebyshev interpolant of `f` from `n > degree` nodes.
pub fn interpolate(f: impl Fn(f64) -> f64, degree: usize, n: usize) -> Vec<f64> {
    let n = n.max(degree + 1);
    let mut c = vec![0.0; degree + 1];
    for j in 0..n {
        let theta = (2 * j + 1) as f64 * PI / (2 * n) as f64;
        let ct = theta.cos();
        let fx = f(ct);
        // cos(k theta) by the three-term recurrence.
        let (mut tkm1, mut tk) = (1.0, ct);
        c[0] += fx;
        if degree >= 1 {
            c[1] += fx * ct;
        }
        for ck in c.iter_mut().skip(2) {
            let t = 2.0 * ct * tk - tkm1;
            tkm1 = tk;
            tk = t;
            *ck += fx * t;
        }
    }
    let scale = 2.0 / n as f64;
    for ck in c.iter_mut() {
        *ck *= scale;
    }
    c[0] *= 0.5;
    c
}
