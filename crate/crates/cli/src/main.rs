// Copyright 2026 The qcg Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcg_cli::{
    emit_table2, json, run_experiment, seed_from_env, CliError, CliResult, EncodingMethod,
    ExperimentConfig, TABLE2_SIZES,
};
use qcg_core::encodings::{
    a_prime, a_prime_encoding, amplified_a_prime, exact_dilation, lamp_poly_no_gap_capped,
    lamp_poly_with_gap_capped, lcu_a_prime, poisson_system, verify_block_encoding,
    AmplificationConfig, BlockEncoding, RhsCase,
};
use qcg_core::estimation::{ShotMode, ShotModel};
use qcg_core::io::{
    decode_matrix, phases_from_json, phases_to_json, polynomial_from_json, polynomial_to_json,
    read_block_encoding, trace_from_json, write_block_encoding, write_csv,
};
use qcg_core::linalg::c;
use qcg_core::polytools::{inverse_poly_capped, rect_poly_capped, sign_poly_capped, RectKind};
use qcg_core::qsp::{solve_phases_with, verify_phases, Convention, SolveOptions};
use qcg_core::solvers::{fit_scalings_from, Regressor};

#[derive(Parser)]
#[command(name = "qcg", version, about = "Quantum conjugate gradient experiments on dense simulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poisson experiments.
    Poisson {
        #[command(subcommand)]
        command: PoissonCommand,
    },
    /// Same as `poisson run`.
    Run(RunArgs),
    /// Polynomial degree comparison across Poisson sizes.
    Table2(Table2Args),
    /// Approximation polynomials.
    Poly {
        #[command(subcommand)]
        command: PolyCommand,
    },
    /// Phase factors.
    Phases {
        #[command(subcommand)]
        command: PhasesCommand,
    },
    /// Block encodings.
    Encode {
        #[command(subcommand)]
        command: EncodeCommand,
    },
    /// Power-law fits of max-abs traces.
    Scalings {
        #[command(subcommand)]
        command: ScalingsCommand,
    },
}

#[derive(Subcommand)]
enum PoissonCommand {
    /// Run QCG on the Dirichlet Poisson system.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Case1,
    Case2,
}

impl From<CaseArg> for RhsCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Case1 => RhsCase::Case1,
            CaseArg::Case2 => RhsCase::Case2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Dilation,
    Amplified,
}

#[derive(Args)]
struct RunArgs {
    /// TOML file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_qubits: Option<usize>,
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Shots per swap test; selects sampled mode.
    #[arg(long)]
    shots: Option<u64>,
    /// Sampled mode with shots derived from the requested precision.
    #[arg(long)]
    derive_shots: bool,
    /// Overridden by QCG_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    #[arg(long)]
    degree_cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Table2Args {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    #[arg(long, value_delimiter = ',', default_values_t = TABLE2_SIZES)]
    sizes: Vec<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PolyOut {
    #[arg(long, default_value_t = 4096)]
    cap: usize,
    /// Polynomial JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RectArg {
    Open,
    Closed,
}

#[derive(Subcommand)]
enum PolyCommand {
    /// Odd approximation of sign(x - delta).
    Sign {
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long)]
        big_delta: f64,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        out: PolyOut,
    },
    /// Even rectangle approximation.
    Rect {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        big_delta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "open")]
        kind: RectArg,
        #[command(flatten)]
        out: PolyOut,
    },
    /// Odd approximation of 1/(kappa alpha x) away from 0.
    Inverse {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        out: PolyOut,
    },
    /// Linear amplification by gamma.
    Lamp {
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        #[arg(long)]
        eps: f64,
        /// Certified spectral gap; enables the cheaper polynomial.
        #[arg(long, requires = "alpha")]
        gap: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        out: PolyOut,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Reflection,
    Wx,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Reflection => Convention::Reflection,
            ConventionArg::Wx => Convention::Wx,
        }
    }
}

#[derive(Subcommand)]
enum PhasesCommand {
    /// Phase factors for a polynomial JSON file.
    Solve {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = qcg_core::qsp::DEFAULT_SOLVER_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value = "reflection")]
        convention: ConventionArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Max deviation of the QSP real part from a polynomial.
    Verify {
        #[arg(long)]
        phases: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Dilation,
    Lcu,
    Amplified,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    A,
    APrime,
}

#[derive(Subcommand)]
enum EncodeCommand {
    /// Write an encoding of the Poisson A' = 2A/alpha - I.
    Poisson {
        #[arg(long)]
        n_qubits: usize,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "dilation")]
        method: MethodArg,
        /// Accuracy of the amplified encoding.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 4096)]
        cap: usize,
        /// Output stem; writes <stem>.bin and <stem>.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a stored encoding against a target matrix.
    Verify {
        /// Stem of <stem>.bin and <stem>.json.
        #[arg(long)]
        encoding: PathBuf,
        /// Binary target matrix on the system register.
        #[arg(long, conflicts_with = "poisson")]
        target: Option<PathBuf>,
        /// Poisson qubit count to build the target from.
        #[arg(long)]
        poisson: Option<usize>,
        #[arg(long, value_enum, default_value = "a-prime")]
        operator: OperatorArg,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegressorArg {
    K,
    Kappa,
}

#[derive(Subcommand)]
enum ScalingsCommand {
    /// Fit exponents from trace.json files written by `run`.
    Fit {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "k")]
        regressor: RegressorArg,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
    },
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn resolve(args: RunArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.n_qubits {
        cfg.n_qubits = v;
    }
    if let Some(v) = args.case {
        cfg.rhs_case = v.into();
    }
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.shots {
        cfg.shot_model.mode = ShotMode::Sampled;
        cfg.shot_model.shots = v;
        cfg.derive_shots = false;
    }
    if args.derive_shots {
        cfg.shot_model.mode = ShotMode::Sampled;
        cfg.derive_shots = true;
    }
    if let Some(v) = args.seed {
        cfg.shot_model.seed = v;
    }
    if let Some(v) = seed_from_env()? {
        cfg.shot_model.seed = v;
    }
    if let Some(v) = args.delta {
        cfg.delta = Some(v);
    }
    if let Some(v) = args.encoding {
        cfg.encoding = match v {
            EncodingArg::Dilation => EncodingMethod::Dilation,
            EncodingArg::Amplified => EncodingMethod::Amplified,
        };
    }
    if let Some(v) = args.degree_cap {
        cfg.degree_cap = v;
    }
    if let Some(v) = args.out {
        cfg.output_dir = v;
    }
    if cfg.shot_model.mode == ShotMode::Exact {
        cfg.shot_model = ShotModel {
            seed: cfg.shot_model.seed,
            ..ShotModel::exact()
        };
    }
    Ok(cfg)
}

fn run(args: RunArgs) -> CliResult<i32> {
    let cfg = resolve(args)?;
    let report = run_experiment(&cfg)?;
    emit(None, &json(&report.summary)?)?;
    Ok(report.exit_code)
}

fn poly_out(p: qcg_core::polytools::Polynomial, report: qcg_core::polytools::DegreeReport, out: &PolyOut) -> CliResult<i32> {
    eprintln!("{}", serde_json::to_string(&report).map_err(qcg_core::Error::from)?);
    emit(out.out.as_deref(), &polynomial_to_json(&p)?)?;
    Ok(0)
}

fn poly(cmd: PolyCommand) -> CliResult<i32> {
    match cmd {
        PolyCommand::Sign { delta, big_delta, eps, out } => {
            let (p, r) = sign_poly_capped(delta, big_delta, eps, out.cap)?;
            poly_out(p, r, &out)
        }
        PolyCommand::Rect { delta, big_delta, eps, kind, out } => {
            let kind = match kind {
                RectArg::Open => RectKind::Open,
                RectArg::Closed => RectKind::Closed,
            };
            let (p, r) = rect_poly_capped(delta, big_delta, eps, kind, out.cap)?;
            poly_out(p, r, &out)
        }
        PolyCommand::Inverse { kappa, alpha, eps, out } => {
            let (p, r) = inverse_poly_capped(kappa, alpha, eps, out.cap)?;
            poly_out(p, r, &out)
        }
        PolyCommand::Lamp { gamma, eps, gap, alpha, out } => {
            let (p, r) = match (gap, alpha) {
                (Some(gap), Some(alpha)) => {
                    let cfg = AmplificationConfig { gamma, gap: Some(gap), eps };
                    lamp_poly_with_gap_capped(&cfg, alpha, out.cap)?
                }
                _ => lamp_poly_no_gap_capped(gamma, eps, out.cap)?,
            };
            poly_out(p, r, &out)
        }
    }
}

fn phases(cmd: PhasesCommand) -> CliResult<i32> {
    match cmd {
        PhasesCommand::Solve { poly, tol, cap, convention, out } => {
            let p = polynomial_from_json(&read(&poly)?)?;
            let opts = SolveOptions {
                tol,
                degree_cap: cap,
                convention: convention.into(),
                ..SolveOptions::default()
            };
            let (phi, res) = solve_phases_with(&p, &opts)?;
            eprintln!("{}", serde_json::to_string(&res).map_err(qcg_core::Error::from)?);
            emit(out.as_deref(), &phases_to_json(&phi)?)?;
            Ok(0)
        }
        PhasesCommand::Verify { phases, poly, grid, tol } => {
            let phi = phases_from_json(&read(&phases)?)?;
            let p = polynomial_from_json(&read(&poly)?)?;
            if grid == 0 {
                return Err(CliError::Config("grid must be positive".into()));
            }
            let res = verify_phases(&phi, &p, grid);
            emit(None, &json(&res)?)?;
            if res.max_abs_error <= tol {
                Ok(0)
            } else {
                Err(CliError::Numerical(format!(
                    "max error {:e} exceeds {tol:e}",
                    res.max_abs_error
                )))
            }
        }
    }
}

#[derive(serde::Serialize)]
struct VerifyReport {
    error: f64,
    eps: f64,
    ok: bool,
}

fn encode(cmd: EncodeCommand) -> CliResult<i32> {
    match cmd {
        EncodeCommand::Poisson { n_qubits, alpha, method, eps, cap, out } => {
            let system = poisson_system(n_qubits, RhsCase::Case1)?;
            let be = match method {
                MethodArg::Dilation => a_prime_encoding(&system, alpha)?,
                MethodArg::Lcu | MethodArg::Amplified => {
                    let dil = exact_dilation(&(system.matrix() * c(1.0 / alpha)))?;
                    let be_a = BlockEncoding::new(dil.unitary().clone(), alpha, dil.n_a(), dil.n_s(), 0.0)?;
                    if let MethodArg::Lcu = method {
                        lcu_a_prime(&be_a)?
                    } else {
                        let amp = AmplificationConfig {
                            gamma: 3.0,
                            gap: Some(system.eigenvalues()[0]),
                            eps,
                        };
                        let opts = SolveOptions {
                            degree_cap: cap,
                            ..SolveOptions::default()
                        };
                        amplified_a_prime(&be_a, &amp, &opts)?
                    }
                }
            };
            write_block_encoding(&be, &out)?;
            emit(None, &json(&be.header())?)?;
            Ok(0)
        }
        EncodeCommand::Verify { encoding, target, poisson, operator, alpha } => {
            let be = read_block_encoding(&encoding)?;
            let n = be.system_dim();
            let target = match (target, poisson) {
                (Some(p), _) => {
                    let bytes = std::fs::read(&p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                    decode_matrix(&bytes, n, n)?
                }
                (None, Some(q)) => {
                    let system = poisson_system(q, RhsCase::Case1)?;
                    match operator {
                        OperatorArg::A => system.matrix().clone(),
                        OperatorArg::APrime => a_prime(&system, alpha),
                    }
                }
                (None, None) => return Err(CliError::Config("pass --target or --poisson".into())),
            };
            let error = verify_block_encoding(&be, &target)?;
            let ok = error <= be.eps() + 1e-12;
            emit(None, &json(&VerifyReport { error, eps: be.eps(), ok })?)?;
            if ok {
                Ok(0)
            } else {
                Err(CliError::Numerical(format!("block misses the target by {error:e}")))
            }
        }
    }
}

fn scalings(cmd: ScalingsCommand) -> CliResult<i32> {
    let ScalingsCommand::Fit { traces, regressor, k_min } = cmd;
    let mut loaded = Vec::new();
    for p in &traces {
        loaded.push(trace_from_json(&read(p)?)?);
    }
    let regressor = match regressor {
        RegressorArg::K => Regressor::IterationK,
        RegressorArg::Kappa => Regressor::Kappa,
    };
    let fits = fit_scalings_from(&loaded, regressor, k_min)?;
    emit(None, &json(&fits)?)?;
    Ok(0)
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Poisson { command: PoissonCommand::Run(args) } | Command::Run(args) => run(args),
        Command::Table2(args) => {
            let rows = emit_table2(args.eps, args.alpha, &args.sizes)?;
            match args.out {
                Some(p) => write_csv(std::fs::File::create(p)?, &rows)?,
                None => write_csv(std::io::stdout().lock(), &rows)?,
            }
            Ok(0)
        }
        Command::Poly { command } => poly(command),
        Command::Phases { command } => phases(command),
        Command::Encode { command } => encode(command),
        Command::Scalings { command } => scalings(command),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
