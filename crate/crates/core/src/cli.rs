//! Command-line front end. Each subcommand returns its rendered output and
//! exit code so the binary stays a thin shell and tests can drive commands
//! in-process.
//!
//! Exit codes: 0 success, 1 a reproduced value missed its tolerance, 2 bad
//! input, 3 an optimizer did not converge (values are still printed).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discord::verify_gap;
use crate::entropy::shannon;
use crate::error::Error;
use crate::locking::{locking_report, parse_scenario, EncodingScenario, LockingReport};
use crate::optim::{OptimizerConfig, OptimizerInfo};
use crate::qstate::io::{parse_basis, parse_state};
use crate::qstate::random::{random_basis, random_bloch_in_ball};
use crate::qstate::{Basis, BlochVector, DensityMatrix};
use crate::randomness::{r_classical, r_classical_qubit_oracle, r_quantum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Largest accepted `|(R^C - R^Q) - D|`.
pub const GAP_RESIDUAL_TOL: f64 = 2e-3;

pub const SWEEP_HEADER: &str = "v,r_c_closed,r_c_numeric,r_q,gap";

#[derive(Debug, Parser)]
#[command(
    name = "qrandomness",
    version,
    about = "Coherence-based randomness measures and discord"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OptFlags {
    /// Random restarts for every optimizer (default 32 for R^C, 64 for discord)
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Outcomes of Eve's measurement in the R^C search (default rank^2)
    #[arg(long = "ensemble-size")]
    pub ensemble_size: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// Machine-readable output
    #[arg(long)]
    pub json: bool,
}

impl OptFlags {
    fn apply(&self, mut cfg: OptimizerConfig) -> OptimizerConfig {
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        cfg.ensemble_size = self.ensemble_size;
        cfg.seed = self.seed;
        cfg
    }

    pub fn roof(&self) -> OptimizerConfig {
        self.apply(OptimizerConfig::default())
    }

    pub fn discord(&self) -> OptimizerConfig {
        self.apply(OptimizerConfig::discord())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// H(p), R^Q, R^C and their gap for a state file
    Measures {
        state: PathBuf,
        /// z | x | computational | file:PATH
        #[arg(long, default_value = "computational")]
        basis: String,
        /// Also compute the discord of the post-measurement state
        #[arg(long)]
        discord: bool,
        #[command(flatten)]
        opts: OptFlags,
    },
    /// R^C and R^Q of v|+><+| + (1-v) I/2 over a grid of v, as CSV
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 1.0)]
        stop: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long, default_value = "z")]
        basis: String,
        #[command(flatten)]
        opts: OptFlags,
    },
    /// The BB84 locking example
    Bb84 {
        #[command(flatten)]
        opts: OptFlags,
    },
    /// Key sizes of an encoding scenario file, or of the preset `bb84`
    Locking {
        scenario: String,
        #[command(flatten)]
        opts: OptFlags,
    },
    /// Check R^C - R^Q = D on a state file or on random qubits
    VerifyGap {
        state: Option<PathBuf>,
        /// Number of random qubit states (each with a random basis unless --basis is given)
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        opts: OptFlags,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

/// Rendered output plus process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Measures {
            state,
            basis,
            discord,
            opts,
        } => cmd_measures(&state, &basis, discord, &opts),
        Command::Sweep {
            start,
            stop,
            steps,
            basis,
            opts,
        } => {
            let spec = SweepSpec::new(start, stop, steps, basis)?;
            cmd_sweep(&spec, &opts)
        }
        Command::Bb84 { opts } => cmd_bb84(&opts),
        Command::Locking { scenario, opts } => cmd_locking(&scenario, &opts),
        Command::VerifyGap {
            state,
            random,
            basis,
            opts,
        } => cmd_verify_gap(state.as_deref(), random, basis.as_deref(), &opts),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves a `--basis` flag for a state of dimension `dim`.
pub fn resolve_basis(flag: &str, dim: usize) -> Result<Basis, CliError> {
    let basis = match flag {
        "z" | "computational" => Basis::computational(dim),
        "x" => Basis::hadamard(dim)?,
        other => match other.strip_prefix("file:") {
            Some(path) => parse_basis(&read(Path::new(path))?)?,
            None => {
                return Err(CliError::Usage(format!(
                    "unknown basis {other:?}; expected z, x, computational or file:PATH"
                )))
            }
        },
    };
    if basis.dim() != dim {
        return Err(Error::DimMismatch(format!(
            "basis of dim {} for state of dim {dim}",
            basis.dim()
        ))
        .into());
    }
    Ok(basis)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Everything `measures` reports, in bits.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub dim: usize,
    pub total_entropy: f64,
    pub r_quantum: f64,
    pub r_classical: f64,
    pub gap: f64,
    pub discord: Option<f64>,
    pub residual: Option<f64>,
    pub roof_optimizer: Option<OptimizerInfo>,
    pub converged: bool,
}

pub fn measure_report(
    rho: &DensityMatrix,
    basis: &Basis,
    with_discord: bool,
    opts: &OptFlags,
) -> Result<MeasureReport, Error> {
    let total_entropy = shannon(&rho.populations(basis)?);
    let rq = r_quantum(rho, basis)?;
    let rc = r_classical(rho, basis, &opts.roof())?;
    let mut report = MeasureReport {
        dim: rho.dim(),
        total_entropy,
        r_quantum: rq.value,
        r_classical: rc.value,
        gap: rc.value - rq.value,
        discord: None,
        residual: None,
        roof_optimizer: rc.optimizer,
        converged: rc.converged(),
    };
    if with_discord {
        let g = verify_gap(rho, basis, &opts.roof(), &opts.discord())?;
        report.discord = Some(g.discord);
        report.residual = Some(g.residual);
        report.converged &= g.converged;
    }
    Ok(report)
}

pub fn cmd_measures(
    state: &Path,
    basis: &str,
    with_discord: bool,
    opts: &OptFlags,
) -> Result<Outcome, CliError> {
    let rho = parse_state(&read(state)?)?.density_matrix();
    let basis = resolve_basis(basis, rho.dim())?;
    let report = measure_report(&rho, &basis, with_discord, opts)?;
    let output = if opts.json {
        to_json(&report)
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "H(p)   {:.6}", report.total_entropy);
        let _ = writeln!(s, "R^Q    {:.6}", report.r_quantum);
        let _ = writeln!(s, "R^C    {:.6}", report.r_classical);
        let _ = writeln!(s, "gap    {:.6}", report.gap);
        if let (Some(d), Some(res)) = (report.discord, report.residual) {
            let _ = writeln!(s, "D      {d:.6}");
            let _ = writeln!(s, "resid  {res:.6}");
        }
        if !report.converged {
            let _ = writeln!(s, "warning: optimizer did not converge");
        }
        s
    };
    let code = if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok(Outcome { output, code })
}

/// Grid over the mixing parameter `v` of `v|+><+| + (1 - v) I/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub basis: String,
}

impl SweepSpec {
    pub fn new(start: f64, stop: f64, steps: usize, basis: String) -> Result<Self, CliError> {
        if !(0.0 <= start && start <= stop && stop <= 1.0) {
            return Err(CliError::Usage(format!(
                "need 0 <= start <= stop <= 1, got start {start}, stop {stop}"
            )));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "need at least 2 steps, got {steps}"
            )));
        }
        Ok(SweepSpec {
            start,
            stop,
            steps,
            basis,
        })
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.stop - self.start;
        (0..self.steps).map(move |k| self.start + span * k as f64 / (self.steps - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub v: f64,
    pub r_c_closed: f64,
    pub r_c_numeric: f64,
    pub r_q: f64,
    pub gap: f64,
    pub converged: bool,
}

pub fn sweep_rows(spec: &SweepSpec, opts: &OptFlags) -> Result<Vec<SweepRow>, CliError> {
    let basis = resolve_basis(&spec.basis, 2)?;
    spec.values()
        .map(|v| {
            let rho = BlochVector::new(v, 0.0, 0.0)?.to_state();
            let closed = r_classical_qubit_oracle(&rho, &basis)?.value;
            let rc = r_classical(&rho, &basis, &opts.roof())?;
            let rq = r_quantum(&rho, &basis)?;
            Ok(SweepRow {
                v,
                r_c_closed: closed,
                r_c_numeric: rc.value,
                r_q: rq.value,
                gap: rc.value - rq.value,
                converged: rc.converged(),
            })
        })
        .collect()
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.v, r.r_c_closed, r.r_c_numeric, r.r_q, r.gap
        );
    }
    s
}

pub fn cmd_sweep(spec: &SweepSpec, opts: &OptFlags) -> Result<Outcome, CliError> {
    let rows = sweep_rows(spec, opts)?;
    let output = if opts.json {
        to_json(&rows)
    } else {
        render_sweep_csv(&rows)
    };
    let code = if rows.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok(Outcome { output, code })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub expected: f64,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, expected: f64, value: f64, tolerance: f64) -> Self {
        Check {
            name,
            expected,
            value,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Bb84Outcome {
    pub report: LockingReport,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn bb84_outcome(opts: &OptFlags) -> Result<Bb84Outcome, Error> {
    let report = locking_report(&EncodingScenario::bb84(), &opts.roof(), &opts.discord())?;
    let checks = vec![
        Check::new("R^Q", 1.0, report.key_after_measurement, 1e-9),
        Check::new("R^C", 1.5, report.key_before_measurement, 1e-3),
        Check::new("D", 0.5, report.locking_advantage, 2e-3),
        Check::new("residual", 0.0, report.residual, GAP_RESIDUAL_TOL),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(Bb84Outcome {
        report,
        checks,
        pass,
    })
}

fn render_locking(r: &LockingReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "message entropy H(p)         {:.6}", r.message_entropy);
    let _ = writeln!(
        s,
        "key after measurement  R^Q   {:.6}",
        r.key_after_measurement
    );
    let _ = writeln!(
        s,
        "key before measurement R^C   {:.6}",
        r.key_before_measurement
    );
    let _ = writeln!(s, "locking advantage      D     {:.6}", r.locking_advantage);
    let _ = writeln!(
        s,
        "accessible with key          {:.6}",
        r.accessible_info_with_key
    );
    let _ = writeln!(s, "residual                     {:.6}", r.residual);
    s
}

/// `scenario` is a JSON file path or the preset name `bb84`.
pub fn cmd_locking(scenario: &str, opts: &OptFlags) -> Result<Outcome, CliError> {
    let scenario = if scenario == "bb84" {
        EncodingScenario::bb84()
    } else {
        parse_scenario(&read(Path::new(scenario))?)?
    };
    let report = locking_report(&scenario, &opts.roof(), &opts.discord())?;
    let output = if opts.json {
        to_json(&report)
    } else {
        let mut s = render_locking(&report);
        if !report.converged {
            let _ = writeln!(s, "warning: optimizer did not converge");
        }
        s
    };
    let code = if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok(Outcome { output, code })
}

pub fn cmd_bb84(opts: &OptFlags) -> Result<Outcome, CliError> {
    let out = bb84_outcome(opts)?;
    let output = if opts.json {
        to_json(&out)
    } else {
        let mut s = render_locking(&out.report);
        for c in &out.checks {
            let _ = writeln!(
                s,
                "{} {:<8} expected {:.6} got {:.6} (tol {:.0e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.value,
                c.tolerance
            );
        }
        s
    };
    Ok(Outcome {
        output,
        code: if out.pass { EXIT_OK } else { EXIT_FAIL },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub index: usize,
    pub bloch: Option<[f64; 3]>,
    pub r_classical: f64,
    pub r_quantum: f64,
    pub discord: f64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapSummary {
    pub rows: Vec<GapRow>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Random qubit states (uniform in the Bloch ball) from a ChaCha8 stream
/// seeded with `seed`, each paired with a Haar-random basis unless a fixed
/// one is given.
pub fn random_gap_inputs(
    count: usize,
    seed: u64,
    basis: Option<&Basis>,
) -> Vec<(BlochVector, Basis)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = random_bloch_in_ball(&mut rng);
            let b = random_basis(2, &mut rng);
            (n, basis.cloned().unwrap_or(b))
        })
        .collect()
}

pub fn gap_summary(
    state: Option<&Path>,
    random: Option<usize>,
    basis: Option<&str>,
    opts: &OptFlags,
) -> Result<GapSummary, CliError> {
    let inputs: Vec<(Option<BlochVector>, DensityMatrix, Basis)> = match (state, random) {
        (Some(path), None) => {
            let rho = parse_state(&read(path)?)?.density_matrix();
            let b = resolve_basis(basis.unwrap_or("computational"), rho.dim())?;
            vec![(None, rho, b)]
        }
        (None, Some(n)) => {
            let fixed = basis.map(|f| resolve_basis(f, 2)).transpose()?;
            random_gap_inputs(n, opts.seed, fixed.as_ref())
                .into_iter()
                .map(|(n, b)| (Some(n), n.to_state(), b))
                .collect()
        }
        _ => {
            return Err(CliError::Usage(
                "give either a state file or --random N".into(),
            ))
        }
    };
    let rows = inputs
        .iter()
        .enumerate()
        .map(|(index, (bloch, rho, b))| {
            let g = verify_gap(rho, b, &opts.roof(), &opts.discord())?;
            Ok(GapRow {
                index,
                bloch: bloch.map(|n| [n.nx, n.ny, n.nz]),
                r_classical: g.r_classical,
                r_quantum: g.r_quantum,
                discord: g.discord,
                residual: g.residual,
                converged: g.converged,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(GapSummary {
        pass: max_residual <= GAP_RESIDUAL_TOL,
        rows,
        max_residual,
        tolerance: GAP_RESIDUAL_TOL,
    })
}

pub fn cmd_verify_gap(
    state: Option<&Path>,
    random: Option<usize>,
    basis: Option<&str>,
    opts: &OptFlags,
) -> Result<Outcome, CliError> {
    let summary = gap_summary(state, random, basis, opts)?;
    let output = if opts.json {
        to_json(&summary)
    } else {
        let mut s = String::from("  #        R^C        R^Q          D   residual\n");
        for r in &summary.rows {
            let _ = writeln!(
                s,
                "{:>3} {:>10.6} {:>10.6} {:>10.6} {:>10.6}{}",
                r.index,
                r.r_classical,
                r.r_quantum,
                r.discord,
                r.residual,
                if r.converged { "" } else { "  (not converged)" }
            );
        }
        let _ = writeln!(
            s,
            "max residual {:.6} (tol {:.0e}): {}",
            summary.max_residual,
            summary.tolerance,
            if summary.pass { "PASS" } else { "FAIL" }
        );
        s
    };
    let code = if !summary.pass {
        EXIT_FAIL
    } else if summary.rows.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok(Outcome { output, code })
}
