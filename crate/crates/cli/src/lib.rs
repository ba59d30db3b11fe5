// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment driver behind the `qcg` binary.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qcg_core::encodings::{
    a_prime_encoding, amplified_a_prime, exact_dilation, poisson_system, AmplificationConfig,
    BlockEncoding, LinearSystem, RhsCase,
};
use qcg_core::estimation::{ShotMode, ShotModel};
use qcg_core::io::{max_abs_rows, trace_rows, trace_to_json, write_csv};
use qcg_core::linalg::c;
use qcg_core::qsp::SolveOptions;
use qcg_core::solvers::{
    direct_qsvt_degree, iteration_bound, qcg_solve, query_cost, QcgConfig, QcgTrace, QueryCost,
};

pub const SEED_ENV: &str = "QCG_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] qcg_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid configuration file: {0}")]
    Toml(#[from] toml::de::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qcg_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Toml(_) => 3,
            CliError::NotConverged(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 4,
            CliError::Core(e) => match e {
                E::NotConverged { .. } | E::MaxIterExceeded { .. } => 2,
                E::Domain(_)
                | E::Norm(_)
                | E::Resource { .. }
                | E::ConditionViolation { .. }
                | E::ParityMismatch(_)
                | E::DimensionMismatch(_)
                | E::InsufficientData { .. }
                | E::Format(_)
                | E::Json(_)
                | E::Csv(_) => 3,
                _ => 4,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Poisson,
}

/// How the encoding of A' = 2A/alpha - I is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingMethod {
    /// Exact one-ancilla unitary dilation.
    Dilation,
    /// LCU of A' / 3 followed by linear amplification with gap lambda_min.
    Amplified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub n_qubits: usize,
    pub rhs_case: RhsCase,
    pub eps: f64,
    pub alpha: f64,
    pub shot_model: ShotModel,
    /// In sampled mode, derive shots per swap test from the requested
    /// precision instead of using `shot_model.shots`.
    pub derive_shots: bool,
    pub confidence: f64,
    /// Inner-product precision; None uses half the admissible bound.
    pub delta: Option<f64>,
    pub encoding: EncodingMethod,
    /// Accuracy of the amplified encoding.
    pub encoding_eps: f64,
    pub degree_cap: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemKind::Poisson,
            n_qubits: 4,
            rhs_case: RhsCase::Case1,
            eps: 0.1,
            alpha: 4.0,
            shot_model: ShotModel::exact(),
            derive_shots: false,
            confidence: 0.95,
            delta: None,
            encoding: EncodingMethod::Dilation,
            encoding_eps: 0.05,
            degree_cap: 4096,
            output_dir: PathBuf::from("qcg-out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> CliResult<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&s)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(1..=6).contains(&self.n_qubits) {
            return Err(CliError::Config(format!("n_qubits = {} not in [1, 6]", self.n_qubits)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(CliError::Config(format!("eps = {} not in (0, 1)", self.eps)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(CliError::Config(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(CliError::Config(format!("confidence = {} not in (0, 1)", self.confidence)));
        }
        if self.shot_model.mode == ShotMode::Sampled && !self.derive_shots && self.shot_model.shots == 0 {
            return Err(CliError::Config("sampled mode needs shots > 0".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(CliError::Config(format!("delta = {d} must be positive")));
            }
        }
        if !(self.encoding_eps > 0.0 && self.encoding_eps < 1.0) {
            return Err(CliError::Config(format!("encoding_eps = {} not in (0, 1)", self.encoding_eps)));
        }
        Ok(())
    }
}

/// Reads `QCG_SEED`, which takes precedence over any other seed.
pub fn seed_from_env() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV} = {v:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

pub fn build_encoding(system: &LinearSystem, cfg: &ExperimentConfig) -> CliResult<BlockEncoding> {
    let opts = SolveOptions {
        degree_cap: cfg.degree_cap,
        ..SolveOptions::default()
    };
    Ok(match cfg.encoding {
        EncodingMethod::Dilation => a_prime_encoding(system, cfg.alpha)?,
        EncodingMethod::Amplified => {
            let dil = exact_dilation(&(system.matrix() * c(1.0 / cfg.alpha)))?;
            let be_a = BlockEncoding::new(dil.unitary().clone(), cfg.alpha, dil.n_a(), dil.n_s(), 0.0)?;
            let amp = AmplificationConfig {
                gamma: 3.0,
                gap: Some(system.eigenvalues()[0]),
                eps: cfg.encoding_eps,
            };
            amplified_a_prime(&be_a, &amp, &opts)?
        }
    })
}

pub fn qcg_config(system: &LinearSystem, cfg: &ExperimentConfig) -> QcgConfig {
    let mut q = QcgConfig::new(system, cfg.eps, cfg.alpha);
    if let Some(d) = cfg.delta {
        q.delta = d;
    }
    q.shot_model = cfg.shot_model;
    q.confidence = cfg.confidence;
    q.fixed_shots = if cfg.derive_shots { None } else { Some(cfg.shot_model.shots) };
    q.solver.degree_cap = cfg.degree_cap;
    q
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub n: usize,
    pub kappa: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    pub criterion: f64,
    pub delta: f64,
    pub m: usize,
    pub qcg_degree: usize,
    pub iteration_bound: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub final_error: f64,
    pub success_probability: f64,
    pub success_probability_xmax: f64,
    pub x_max: f64,
    pub query_cost: QueryCost,
    pub total_shots: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub state: Vec<[f64; 2]>,
    pub solution: Vec<[f64; 2]>,
    pub exact: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub trace: QcgTrace,
    pub summary: Summary,
    pub exit_code: i32,
}

pub const RESIDUALS_FILE: &str = "residuals.csv";
pub const MAXABS_FILE: &str = "maxabs.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TRACE_FILE: &str = "trace.json";
pub const SOLUTION_FILE: &str = "solution.json";

fn pairs(v: impl IntoIterator<Item = qcg_core::linalg::Complex64>) -> Vec<[f64; 2]> {
    v.into_iter().map(|z| [z.re, z.im]).collect()
}

/// Solves without touching the filesystem.
pub fn solve_experiment(cfg: &ExperimentConfig) -> CliResult<(QcgTrace, Summary)> {
    cfg.validate()?;
    let system = poisson_system(cfg.n_qubits, cfg.rhs_case)?;
    let be = build_encoding(&system, cfg)?;
    let qcfg = qcg_config(&system, cfg);
    let trace = qcg_solve(&system, &be, &qcfg)?;
    for row in trace_rows(&trace) {
        log::info!("{}", serde_json::to_string(&row).unwrap_or_default());
    }
    let exact = system.solve();
    let sol = qcg_core::linalg::CVector::from_vec(trace.solution.clone());
    let final_error = (&exact - &sol).norm();
    let last = trace.iterations.last().expect("a converged trace has an iteration");
    let summary = Summary {
        config: cfg.clone(),
        n: system.dim(),
        kappa: system.kappa(),
        norm_a: system.norm_a(),
        norm_b: system.norm_b(),
        criterion: trace.criterion,
        delta: trace.delta,
        m: trace.m,
        qcg_degree: trace.m + 1,
        iteration_bound: iteration_bound(system.kappa(), system.norm_a(), system.norm_b(), cfg.eps),
        converged: trace.converged,
        final_residual: last.residual,
        final_error,
        success_probability: trace.success_probability,
        success_probability_xmax: trace.success_probability_xmax,
        x_max: trace.x_max,
        query_cost: query_cost(&trace, trace.delta),
        total_shots: trace.iterations.iter().map(|i| i.shots).sum(),
    };
    Ok((trace, summary))
}

/// Runs one experiment and writes its residual, max-abs, trace, summary
/// and solution files into `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let (trace, summary) = solve_experiment(cfg)?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    write_csv(File::create(dir.join(RESIDUALS_FILE))?, &trace_rows(&trace))?;
    write_csv(File::create(dir.join(MAXABS_FILE))?, &max_abs_rows(&trace))?;
    std::fs::write(dir.join(TRACE_FILE), trace_to_json(&trace)?)?;
    let system = poisson_system(cfg.n_qubits, cfg.rhs_case)?;
    let record = SolutionRecord {
        state: pairs(trace.solution_state.iter().copied()),
        solution: pairs(trace.solution.iter().copied()),
        exact: pairs(system.solve().iter().copied()),
    };
    std::fs::write(dir.join(SOLUTION_FILE), json(&record)?)?;
    std::fs::write(dir.join(SUMMARY_FILE), json(&summary)?)?;
    let ok = summary.converged && summary.m + 1 <= summary.iteration_bound && summary.final_error <= cfg.eps;
    Ok(RunReport {
        trace,
        summary,
        exit_code: if ok { 0 } else { 2 },
    })
}

pub fn json<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Core(e.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    #[serde(rename = "N")]
    pub n: usize,
    pub kappa: f64,
    pub qcg_m: usize,
    pub qcg_degree: usize,
    pub direct_degree: usize,
    pub rect_degree: usize,
    pub inverse_degree: usize,
}

pub const TABLE2_SIZES: [usize; 4] = [4, 8, 16, 32];

/// Degree comparison for Poisson sizes N (powers of two).
pub fn emit_table2(eps: f64, alpha: f64, sizes: &[usize]) -> CliResult<Vec<Table2Row>> {
    let mut rows = Vec::new();
    for &n in sizes {
        if n < 2 || !n.is_power_of_two() || n > 64 {
            return Err(CliError::Config(format!("size {n} is not a power of two in [2, 64]")));
        }
        let cfg = ExperimentConfig {
            n_qubits: n.trailing_zeros() as usize,
            eps,
            alpha,
            ..ExperimentConfig::default()
        };
        let (trace, summary) = solve_experiment(&cfg)?;
        let mi = direct_qsvt_degree(summary.kappa, alpha, eps)?;
        rows.push(Table2Row {
            n,
            kappa: summary.kappa,
            qcg_m: trace.m,
            qcg_degree: trace.m + 1,
            direct_degree: mi.total,
            rect_degree: mi.rect.degree,
            inverse_degree: mi.inverse.degree,
        });
    }
    Ok(rows)
}
