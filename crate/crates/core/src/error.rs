// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::polytools::DegreeReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degree {} of {} exceeds the cap {cap}", report.degree, report.name)]
    Resource { report: DegreeReport, cap: usize },

    #[error("phase solver did not converge (best residual {residual:e})")]
    NotConverged { residual: f64 },

    #[error("|P| reaches {max_abs} > 1 on [-1, 1]")]
    ConditionViolation { max_abs: f64 },

    #[error("parity mismatch: {0}")]
    ParityMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix norm {0} exceeds 1")]
    Norm(f64),

    #[error("normalization constant is zero")]
    Normalization,

    #[error("matrix is not positive definite (<p|Ap> = {0:e})")]
    NotPositiveDefinite(f64),

    #[error("no convergence within {max_iter} iterations (residual {residual:e})")]
    MaxIterExceeded { max_iter: usize, residual: f64 },

    #[error("estimated <p|Ap> = {0:e} is not positive; inner product precision too low")]
    DivisionByZero(f64),

    #[error("right-hand side is the zero vector")]
    ZeroVector,

    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
