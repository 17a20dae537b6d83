//! Command-line front end: apply a procedure to a data file, run
//! simulation sweeps from a config file, query the analytic oracles, and
//! print the built-in dose-response worked example.

mod config;
mod table;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use dirseq::{
    counterexample_check, mdfwer_two_dependent, mdfwer_two_indep, sharpness_chain_quantiles,
    BivariateCdf, DistributionFamily, ProcedureKind, Sign, TestBattery,
};

/// Failures carry their process exit code: usage errors (bad flag or
/// environment values) exit 1, data errors (bad file contents, failed
/// runs) exit 2.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dirseq",
    version,
    about = "Directional fixed-sequence multiple testing with mdFWER control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a procedure to a CSV of statistics or (p-value, sign) rows.
    Apply(ApplyArgs),
    /// Run a simulation sweep described by a JSON config file.
    Simulate(SimulateArgs),
    /// Query the analytic oracles; results print as JSON.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Print the built-in hypertension dose-response example table.
    Example,
}

#[derive(Args)]
struct ApplyArgs {
    /// Input CSV with header `label,statistic` or `label,pvalue,sign`.
    #[arg(long)]
    input: PathBuf,
    /// Procedure name, e.g. fixed-seq-halving or hochberg.
    #[arg(long)]
    procedure: String,
    /// Overall mdFWER level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Marginal family used to turn statistics into p-values.
    #[arg(long, default_value = "normal")]
    family: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON scenario config; see the README for the schema.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    output: PathBuf,
    /// Worker threads for the replicate pool; overrides DIRSEQ_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed override; takes precedence over the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact mdFWER of the flat walk on (one false null, one true null).
    Lemma2 {
        #[arg(long, default_value = "normal")]
        family: String,
        /// Shift of the false null; nonzero.
        #[arg(long)]
        theta1: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Equicorrelation of the pair (normal family only).
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
    },
    /// Probe the directional-control inequality at a positive shift.
    Counterexample {
        #[arg(long, default_value = "cauchy")]
        family: String,
        /// Shift of the false null; positive.
        #[arg(long)]
        theta1: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Quantile ladder and exact error budget of the worst-case chain.
    Sharpness {
        /// Number of hypotheses in the chain.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Apply(args) => cmd_apply(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Oracle(cmd) => cmd_oracle(cmd),
        Command::Example => {
            print!("{}", table::render_example());
            Ok(())
        }
    }
}

fn check_alpha(alpha: f64) -> Result<f64, CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(CliError::Usage(format!(
            "invalid value for --alpha: must lie strictly inside (0, 1), got {alpha}"
        )))
    }
}

fn parse_family(name: &str) -> Result<DistributionFamily, String> {
    match name {
        "normal" => Ok(DistributionFamily::Normal),
        "cauchy" => Ok(DistributionFamily::Cauchy),
        other => Err(format!("unknown family `{other}` (expected normal or cauchy)")),
    }
}

// -------------------------------------------------------------------
// apply
// -------------------------------------------------------------------

enum InputData {
    Statistics(Vec<f64>),
    Pvalues(Vec<(f64, Sign)>),
}

fn cmd_apply(args: ApplyArgs) -> Result<(), CliError> {
    let alpha = check_alpha(args.alpha)?;
    let family = parse_family(&args.family)
        .map_err(|msg| CliError::Usage(format!("invalid value for --family: {msg}")))?;
    let procedure: ProcedureKind = args.procedure.parse().map_err(|_| {
        CliError::Usage(format!(
            "invalid value for --procedure: unknown procedure `{}`",
            args.procedure
        ))
    })?;
    let (labels, data) = read_input(&args.input)?;
    let battery = match data {
        InputData::Statistics(stats) => TestBattery::from_statistics(family, stats),
        InputData::Pvalues(entries) => TestBattery::from_pvalues(family, &entries),
    }
    .map_err(|err| CliError::Data(format!("{}: {err}", args.input.display())))?;
    let decisions = procedure
        .apply(&battery, alpha)
        .map_err(|err| CliError::Data(err.to_string()))?;
    let stdout = std::io::stdout();
    table::write_apply_table(stdout.lock(), &labels, &battery, &decisions)
        .map_err(|err| CliError::Data(format!("writing output: {err}")))
}

fn read_input(path: &std::path::Path) -> Result<(Vec<String>, InputData), CliError> {
    let data_err = |msg: String| CliError::Data(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|err| data_err(err.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|err| data_err(err.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let stat_form = match header.as_slice() {
        ["label", "statistic"] => true,
        ["label", "pvalue", "sign"] => false,
        _ => {
            return Err(data_err(
                "header must be `label,statistic` or `label,pvalue,sign`".into(),
            ))
        }
    };
    let mut labels = Vec::new();
    let mut stats = Vec::new();
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after the header
        let record = record.map_err(|err| data_err(err.to_string()))?;
        let field = |j: usize| record.get(j).unwrap_or_default();
        labels.push(field(0).to_string());
        if stat_form {
            let value: f64 = field(1)
                .parse()
                .map_err(|_| data_err(format!("row {row}: invalid statistic `{}`", field(1))))?;
            stats.push(value);
        } else {
            let p: f64 = field(1)
                .parse()
                .map_err(|_| data_err(format!("row {row}: invalid pvalue `{}`", field(1))))?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(data_err(format!(
                    "row {row}: pvalue must lie in (0, 1], got {p}"
                )));
            }
            let sign = match field(2) {
                "+" => Sign::Positive,
                "-" => Sign::Negative,
                other => {
                    return Err(data_err(format!(
                        "row {row}: sign must be `+` or `-`, got `{other}`"
                    )))
                }
            };
            entries.push((p, sign));
        }
    }
    if labels.is_empty() {
        return Err(data_err("no data rows".into()));
    }
    let data = if stat_form {
        InputData::Statistics(stats)
    } else {
        InputData::Pvalues(entries)
    };
    Ok((labels, data))
}

// -------------------------------------------------------------------
// simulate
// -------------------------------------------------------------------

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let workers = resolve_workers(args.workers)?;
    let text = fs::read_to_string(&args.config)
        .map_err(|err| CliError::Data(format!("{}: {err}", args.config.display())))?;
    let plan = config::parse_plan(&text, args.seed)?;
    let run = || config::execute(&plan);
    let rows = match workers {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|err| CliError::Data(format!("building worker pool: {err}")))?
            .install(run),
        None => run(),
    }?;
    let file = fs::File::create(&args.output)
        .map_err(|err| CliError::Data(format!("{}: {err}", args.output.display())))?;
    config::write_csv(std::io::BufWriter::new(file), &rows)
        .map_err(|err| CliError::Data(format!("{}: {err}", args.output.display())))
}

/// Worker-count precedence: --workers flag, then DIRSEQ_WORKERS, then the
/// default rayon pool.
fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let check = |n: usize, source: &str| {
        if n >= 1 {
            Ok(Some(n))
        } else {
            Err(CliError::Usage(format!(
                "invalid value for {source}: worker count must be at least 1"
            )))
        }
    };
    if let Some(n) = flag {
        return check(n, "--workers");
    }
    match std::env::var("DIRSEQ_WORKERS") {
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                CliError::Usage(format!(
                    "invalid value for DIRSEQ_WORKERS: expected a positive integer, got `{raw}`"
                ))
            })?;
            check(n, "DIRSEQ_WORKERS")
        }
        Err(_) => Ok(None),
    }
}

// -------------------------------------------------------------------
// oracle
// -------------------------------------------------------------------

fn cmd_oracle(cmd: OracleCmd) -> Result<(), CliError> {
    let value = match cmd {
        OracleCmd::Lemma2 {
            family,
            theta1,
            alpha,
            rho,
        } => {
            let alpha = check_alpha(alpha)?;
            let family = parse_family(&family)
                .map_err(|msg| CliError::Usage(format!("invalid value for --family: {msg}")))?;
            if !theta1.is_finite() || theta1 == 0.0 {
                return Err(CliError::Usage(format!(
                    "invalid value for --theta1: must be a finite nonzero shift, got {theta1}"
                )));
            }
            if !(0.0..1.0).contains(&rho) {
                return Err(CliError::Usage(format!(
                    "invalid value for --rho: must lie in [0, 1), got {rho}"
                )));
            }
            if rho != 0.0 && family != DistributionFamily::Normal {
                return Err(CliError::Usage(
                    "invalid value for --rho: must be 0 for the cauchy family".into(),
                ));
            }
            let mdfwer = if rho == 0.0 {
                mdfwer_two_indep(family, theta1, alpha)
            } else {
                BivariateCdf::equicorrelated_normal(rho, (theta1, 0.0))
                    .and_then(|cdf| mdfwer_two_dependent(&cdf, alpha))
            }
            .map_err(|err| CliError::Data(err.to_string()))?;
            serde_json::json!({
                "oracle": "lemma2",
                "family": family_name(family),
                "theta1": theta1,
                "alpha": alpha,
                "rho": rho,
                "mdfwer": mdfwer,
            })
        }
        OracleCmd::Counterexample {
            family,
            theta1,
            alpha,
        } => {
            let alpha = check_alpha(alpha)?;
            let family = parse_family(&family)
                .map_err(|msg| CliError::Usage(format!("invalid value for --family: {msg}")))?;
            if !(theta1.is_finite() && theta1 > 0.0) {
                return Err(CliError::Usage(format!(
                    "invalid value for --theta1: must be a finite positive shift, got {theta1}"
                )));
            }
            let report = counterexample_check(family, alpha, theta1)
                .map_err(|err| CliError::Data(err.to_string()))?;
            serde_json::json!({
                "oracle": "counterexample",
                "family": family_name(family),
                "theta1": theta1,
                "alpha": alpha,
                "critical_value": report.critical_value,
                "lhs": report.lhs,
                "rhs": report.rhs,
                "violated": report.violated,
                "mdfwer": report.mdfwer,
            })
        }
        OracleCmd::Sharpness { k, alpha } => {
            let alpha = check_alpha(alpha)?;
            if k == 0 {
                return Err(CliError::Usage(
                    "invalid value for --k: chain length must be at least 1".into(),
                ));
            }
            let chain = sharpness_chain_quantiles(k, alpha)
                .map_err(|err| CliError::Data(err.to_string()))?;
            serde_json::json!({
                "oracle": "sharpness",
                "k": k,
                "alpha": alpha,
                "quantiles": chain.quantiles,
                "components": chain.components,
                "total": chain.total,
            })
        }
    };
    let rendered = serde_json::to_string_pretty(&value).expect("plain JSON tree");
    println!("{rendered}");
    Ok(())
}

fn family_name(family: DistributionFamily) -> &'static str {
    match family {
        DistributionFamily::Normal => "normal",
        DistributionFamily::Cauchy => "cauchy",
    }
}
