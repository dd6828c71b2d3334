//! Command-line front end: model ingestion, dispatch and report emission.
//!
//! Exit codes: 0 on success, 1 on usage, parse, validation or I/O errors,
//! 2 when a verification fails, a quasi-period search hits its cap, or a
//! feasible identity instance is found.

pub mod document;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::betti::{alternating_sum_check, betti_number, ManifoldClass};
use crate::error::Error;
use crate::exact::{rational, Rational};
use crate::index::{analytical_period, index_table, m_zero, mean_index, verify_bott};
use crate::ledger::{
    chi_hat, contradiction_scan, default_mu, ledger_residual, IdentityOutcome, LedgerInput,
};
use crate::normal_form::{index_parity, initial_nullity, GeodesicModel, ValidationReport};
use crate::quasi::{
    find_quasi_period, verify_escape, verify_growth_bounds, verify_index_sum_bound,
    verify_quasi_periodicity, EpsilonChoice, QuasiPeriodConfig, QuasiPeriodResult,
};

pub use document::{parse_model_file, parse_model_str, ModelDocument};
pub use report::{emit_table, Format, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(Box<ValidationReport>),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Engine(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(Error::QuasiPeriodNotFound { .. }) => 2,
            _ => 1,
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: i64 = num
        .parse()
        .map_err(|_| format!("bad numerator in {text:?}"))?;
    let den: i64 = den
        .parse()
        .map_err(|_| format!("bad denominator in {text:?}"))?;
    if den == 0 {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(rational(num, den))
}

#[derive(Debug, Parser)]
#[command(
    name = "geodex",
    version,
    about = "Exact index iteration engine for closed geodesics"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArg {
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Explicit epsilon NUM/DEN in (0, 1/4); automatic when absent.
    #[arg(long, value_parser = parse_rational)]
    epsilon: Option<Rational>,
    #[arg(long)]
    strong: bool,
    #[arg(long, default_value_t = 1_000_000)]
    max_multiplier: u64,
}

impl SearchArgs {
    fn config(&self, tau: Option<Rational>) -> QuasiPeriodConfig {
        QuasiPeriodConfig {
            epsilon: match &self.epsilon {
                Some(e) => EpsilonChoice::Explicit(e.clone()),
                None => EpsilonChoice::Auto,
            },
            tau,
            strong_period: self.strong,
            max_multiplier: self.max_multiplier,
        }
    }
}

#[derive(Debug, Args)]
struct ClassArgs {
    #[arg(long)]
    d: u64,
    #[arg(long, default_value_t = 1)]
    h: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model document against every normal form invariant.
    Validate(ModelArg),
    /// Index and nullity of the first iterates.
    Iterate {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 10)]
        max_m: u64,
    },
    /// Analytical period and escape threshold.
    Period(ModelArg),
    /// Smallest admissible quasi-period.
    Quasi {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        search: SearchArgs,
        /// Also require the period-mean-index law (within TAU when irrational).
        #[arg(long, value_parser = parse_rational)]
        tau: Option<Rational>,
    },
    /// Pass/fail matrix of every index law at the found quasi-period.
    Verify {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_parser = parse_rational, default_value = "3/10")]
        tau: Rational,
        /// Iterates checked for the Bott laws.
        #[arg(long, default_value_t = 200)]
        max_m: u64,
        /// Escape and growth horizon; defaults to max(20, 3T).
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Betti numbers b_q for q <= max-q and the closed-form sum checks.
    Betti {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 40)]
        max_q: u64,
    },
    /// Exhaustive resonance identity scan.
    IdentityScan {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 100)]
        max_sum: u64,
        /// Defaults to 3(dh - 1).
        #[arg(long)]
        max_p: Option<u64>,
        #[arg(long)]
        reversible: bool,
    },
    /// Single-geodesic ledger residual from supplied k-vectors.
    Ledger {
        #[command(flatten)]
        model: ModelArg,
        /// Defaults to d = dim, h = 1.
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        h: Option<u64>,
        /// Defaults to <model stem>.kvectors.json beside the model.
        #[arg(long)]
        kvectors: Option<PathBuf>,
        /// Defaults to max(0, p(c) + dh - 3).
        #[arg(long)]
        mu: Option<u64>,
    },
}

struct Outcome {
    report: Report,
    code: i32,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, code: 0 }
    }
}

fn approx(q: &Rational) -> String {
    let v = q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN);
    format!("~{v:.6} (approximate)")
}

fn validate_cmd(path: &Path) -> Result<Outcome, CliError> {
    let model = parse_model_file(path)?;
    let nf = &model.nf;
    let mean = mean_index(&model);
    let mut report = Report::new(&["property", "value"]);
    let rows: Vec<(&str, String)> = vec![
        ("dim", model.dim.to_string()),
        ("index", model.initial_index.to_string()),
        ("nullity", initial_nullity(nf).to_string()),
        ("parity", index_parity(nf).to_string()),
        ("r", nf.r().to_string()),
        ("k", nf.k().to_string()),
        ("r_star", nf.r_star().to_string()),
        ("k_star", nf.k_star().to_string()),
        ("r_zero", nf.r_zero().to_string()),
        ("k_zero", nf.k_zero().to_string()),
    ];
    for (k, v) in rows {
        report.row(vec![k.to_string(), v]);
    }
    report.note(format!("mean index = {mean}"));
    if !mean.is_rational() {
        report.note(format!(
            "mean index {:.6} (approximate)",
            mean.to_f64_approx()
        ));
    }
    report.note("valid");
    Ok(Outcome::ok(report))
}

fn iterate_cmd(path: &Path, max_m: u64) -> Result<Outcome, CliError> {
    let model = parse_model_file(path)?;
    let mut report = Report::new(&["m", "index", "nullity"]);
    for (m, pair) in (1..=max_m).zip(index_table(&model, max_m)) {
        report.row(vec![
            m.to_string(),
            pair.index.to_string(),
            pair.nullity.to_string(),
        ]);
    }
    Ok(Outcome::ok(report))
}

fn period_cmd(path: &Path) -> Result<Outcome, CliError> {
    let model = parse_model_file(path)?;
    let n = analytical_period(&model);
    let m0 = m_zero(&model)?;
    let mut report = Report::new(&["n", "m0"]);
    report.row(vec![n.to_string(), m0.to_string()]);
    report.note(format!("mean index = {}", mean_index(&model)));
    Ok(Outcome::ok(report))
}

fn quasi_report(result: &QuasiPeriodResult) -> Report {
    let mut report = Report::new(&["T", "A", "P", "p_c", "epsilon_num", "epsilon_den"]);
    let p: Vec<String> = result.p.iter().map(|j| j.to_string()).collect();
    report.row(vec![
        result.t.to_string(),
        result.a.to_string(),
        p.join(" "),
        result.p_c.to_string(),
        result.epsilon_used.numer().to_string(),
        result.epsilon_used.denom().to_string(),
    ]);
    report.note(format!("epsilon {}", approx(&result.epsilon_used)));
    report
}

fn quasi_cmd(path: &Path, search: &SearchArgs, tau: Option<Rational>) -> Result<Outcome, CliError> {
    let model = parse_model_file(path)?;
    let result = find_quasi_period(&model, &search.config(tau))?;
    Ok(Outcome::ok(quasi_report(&result)))
}

fn verify_cmd(
    path: &Path,
    search: &SearchArgs,
    tau: &Rational,
    max_m: u64,
    horizon: Option<u64>,
) -> Result<Outcome, CliError> {
    let model = parse_model_file(path)?;
    let result = find_quasi_period(&model, &search.config(None))?;
    let m0 = m_zero(&model)?;
    let t = result.t;
    let horizon = horizon.unwrap_or((3 * t).max(20));
    let mut report = Report::new(&["check", "status", "detail"]);
    let status = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
    let mut all = true;
    let mut push = |name: &str, ok: bool, detail: String| {
        all &= ok;
        report.row(vec![name.to_string(), status(ok), detail]);
    };

    for check in verify_quasi_periodicity(&model, &result, m0, tau).checks {
        push(check.name, check.passed, check.detail);
    }
    let sum = verify_index_sum_bound(&model, &result);
    push(
        "index-sum-bound",
        sum.passed(),
        match sum.first_violation {
            None => format!("max i+nu = {} <= {}", sum.max_lhs, sum.bound),
            Some(m) => format!(
                "violated at m = {m}; max i+nu = {} > {}",
                sum.max_lhs, sum.bound
            ),
        },
    );
    let escape = verify_escape(&model, &result, m0, horizon);
    push(
        "escape",
        escape.passed(),
        match escape.first_violation {
            None => format!(
                "min gain {} >= {} over {horizon} iterates",
                escape.min_gain, escape.required
            ),
            Some(m) => format!("gain below {} at m = {m}", escape.required),
        },
    );
    let growth = verify_growth_bounds(&model, &result, horizon.max(3 * t));
    push(
        "growth-k1",
        growth.k1_violation.is_none(),
        match growth.k1_violation {
            None => format!("K1 = {}", growth.k1),
            Some(m) => format!("K1 = {} violated at m = {m}", growth.k1),
        },
    );
    push(
        "growth-k2",
        growth.k2_violation.is_none(),
        match growth.k2_violation {
            None => format!("K2 = {}", growth.k2),
            Some(m) => format!("K2 = {} violated at m = {m}", growth.k2),
        },
    );
    let bott = verify_bott(&model, max_m);
    push(
        "bott",
        bott.passed(),
        match &bott.violation {
            None => format!("parity and divisibility monotone up to m = {max_m}"),
            Some(v) => format!("{v:?}"),
        },
    );
    report.note(format!(
        "T = {t}, A = {}, p(c) = {}, m0 = {m0}",
        result.a, result.p_c
    ));
    let code = if all { 0 } else { 2 };
    Ok(Outcome { report, code })
}

fn class(args: &ClassArgs) -> Result<ManifoldClass, CliError> {
    Ok(ManifoldClass::new(args.d, args.h)?)
}

fn betti_cmd(args: &ClassArgs, max_q: u64) -> Result<Outcome, CliError> {
    let mc = class(args)?;
    let mut report = Report::new(&["q", "b_q"]);
    for q in 0..=max_q {
        report.row(vec![q.to_string(), betti_number(&mc, q as i64).to_string()]);
    }
    let kmax = max_q.max(mc.dim() - 1);
    let sums = alternating_sum_check(&mc, kmax)?;
    let code = match sums.first_failure() {
        None => {
            report.note(format!(
                "{:?} closed form holds for all {} values of k up to {kmax}",
                sums.kind,
                sums.rows.len()
            ));
            0
        }
        Some(row) => {
            report.note(format!(
                "{:?} closed form fails at k = {}: direct {} vs {}",
                sums.kind, row.k, row.direct, row.closed
            ));
            2
        }
    };
    Ok(Outcome { report, code })
}

fn scan_cmd(
    args: &ClassArgs,
    max_sum: u64,
    max_p: Option<u64>,
    reversible: bool,
) -> Result<Outcome, CliError> {
    let mc = class(args)?;
    let max_p = max_p.unwrap_or(3 * (mc.dim() - 1));
    let scan = contradiction_scan(&mc, max_sum, max_p, reversible)?;
    let mut report = Report::new(&["R", "p", "kappa_num", "kappa_den", "feasible"]);
    for row in &scan.rows {
        let kappa = row.outcome.kappa();
        report.row(vec![
            row.r.to_string(),
            row.p.to_string(),
            kappa.numer().to_string(),
            kappa.denom().to_string(),
            matches!(row.outcome, IdentityOutcome::Feasible(_)).to_string(),
        ]);
    }
    report.note(scan.to_string());
    let code = if scan.feasible().is_empty() { 0 } else { 2 };
    Ok(Outcome { report, code })
}

fn ledger_cmd(
    path: &Path,
    d: Option<u64>,
    h: Option<u64>,
    kvectors: Option<&Path>,
    mu: Option<u64>,
) -> Result<Outcome, CliError> {
    let model: GeodesicModel = parse_model_file(path)?;
    let mc = ManifoldClass::new(d.unwrap_or(model.dim), h.unwrap_or(1))?;
    if mc.dim() != model.dim {
        return Err(CliError::Usage(format!(
            "d*h = {} differs from the model dimension {}",
            mc.dim(),
            model.dim
        )));
    }
    let kv_path = kvectors
        .map(Path::to_path_buf)
        .unwrap_or_else(|| document::default_kvector_path(path));
    let entries = document::parse_kvector_file(&kv_path)?;
    let input = LedgerInput::new(model.clone(), entries)?;
    let mu = match mu {
        Some(mu) => mu,
        None => {
            let result = find_quasi_period(&model, &QuasiPeriodConfig::default())?;
            default_mu(&mc, result.p_c)
        }
    };
    let residual = ledger_residual(&input, &mc, mu)?;
    let chi = chi_hat(&input);
    let mut report = Report::new(&["mu", "residual_num", "residual_den"]);
    report.row(vec![
        mu.to_string(),
        residual.numer().to_string(),
        residual.denom().to_string(),
    ]);
    report.note(format!("chi_hat = {chi}, n = {}", input.n));
    Ok(Outcome::ok(report))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate(m) => validate_cmd(&m.model),
        Command::Iterate { model, max_m } => iterate_cmd(&model.model, *max_m),
        Command::Period(m) => period_cmd(&m.model),
        Command::Quasi { model, search, tau } => quasi_cmd(&model.model, search, tau.clone()),
        Command::Verify {
            model,
            search,
            tau,
            max_m,
            horizon,
        } => verify_cmd(&model.model, search, tau, *max_m, *horizon),
        Command::Betti { class, max_q } => betti_cmd(class, *max_q),
        Command::IdentityScan {
            class,
            max_sum,
            max_p,
            reversible,
        } => scan_cmd(class, *max_sum, *max_p, *reversible),
        Command::Ledger {
            model,
            d,
            h,
            kvectors,
            mu,
        } => ledger_cmd(&model.model, *d, *h, kvectors.as_deref(), *mu),
    }
}

/// Runs one invocation, writing to the given streams, and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let outcome = dispatch(&cli).and_then(|outcome| {
        emit_table(
            &outcome.report,
            cli.format,
            cli.out.as_deref(),
            stdout,
            stderr,
        )?;
        Ok(outcome.code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one invocation against the process streams.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
