//! Simulation config schema, plan construction, execution, and the CSV
//! serialization of sweep results.
//!
//! A config is a JSON object with a `setting` discriminator:
//!
//! * `1` — dense-shift sweep: `n` hypotheses, the first `floor(pi1 * n)`
//!   shifted by `theta`, swept over a `pi1_grid`, one run per value in
//!   `rho`.
//! * `2` — geometric-decay sweep: `n_false` leading shifts
//!   `theta0 * r^i`, swept over a `rho_grid`.
//! * `"custom"` — one scenario: explicit `thetas`, a single `rho`, and an
//!   optional `family`.
//! * `"sharpness"` — the adversarial chain on `k` hypotheses, the first
//!   `k - 1` shifted by `theta`.
//!
//! Grids are either arrays (`[0.0, 0.5]`) or ranges
//! (`{"from": 0.05, "to": 1.0, "step": 0.05}`, endpoints inclusive).

use std::io::Write;

use dirseq::{
    run_scenario, run_sweep, Dependence, DistributionFamily, ProcedureKind, ProcedureOutcome,
    ScenarioConfig, SweepAxis, TruthVector,
};
use serde::Deserialize;

use crate::CliError;

const PAPER_FIVE: [ProcedureKind; 5] = [
    ProcedureKind::FixedSeqHalving,
    ProcedureKind::FixedSeqFlat,
    ProcedureKind::BonferroniDir,
    ProcedureKind::HolmDir,
    ProcedureKind::HochbergDir,
];

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SettingTag {
    Number(u64),
    Name(String),
}

/// A grid field: an explicit list, an inclusive range, or one scalar.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Range { from: f64, to: f64, step: f64 },
    List(Vec<f64>),
    Scalar(f64),
}

impl GridSpec {
    fn expand(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let err = |msg: String| CliError::Data(format!("config: `{field}`: {msg}"));
        match self {
            GridSpec::Scalar(value) => Ok(vec![*value]),
            GridSpec::List(values) => {
                if values.is_empty() {
                    Err(err("grid must not be empty".into()))
                } else {
                    Ok(values.clone())
                }
            }
            GridSpec::Range { from, to, step } => {
                if !(step.is_finite() && *step > 0.0) {
                    return Err(err(format!("step must be positive, got {step}")));
                }
                if !(from.is_finite() && to.is_finite() && to >= from) {
                    return Err(err(format!("bad range [{from}, {to}]")));
                }
                let count = ((to - from) / step + 1e-9).floor() as usize;
                Ok((0..=count).map(|i| from + i as f64 * step).collect())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    setting: SettingTag,
    alpha: Option<f64>,
    replications: Option<u64>,
    seed: Option<u64>,
    procedures: Option<Vec<String>>,
    family: Option<String>,
    n: Option<usize>,
    theta: Option<f64>,
    rho: Option<GridSpec>,
    pi1_grid: Option<GridSpec>,
    n_false: Option<usize>,
    theta0: Option<f64>,
    r: Option<f64>,
    rho_grid: Option<GridSpec>,
    thetas: Option<Vec<f64>>,
    k: Option<usize>,
}

/// One engine invocation plus the CSV cells its rows share.
pub struct RunSpec {
    base: ScenarioConfig<f64>,
    axis: Option<SweepAxis<f64>>,
    setting: &'static str,
    rho: Option<f64>,
    theta0: Option<f64>,
    r: Option<f64>,
}

pub struct Plan {
    runs: Vec<RunSpec>,
}

/// One output row of the results CSV.
pub struct CsvRow {
    pub setting: &'static str,
    pub pi1: Option<f64>,
    pub rho: Option<f64>,
    pub theta0: Option<f64>,
    pub r: Option<f64>,
    pub procedure: &'static str,
    pub mdfwer: f64,
    pub mdfwer_se: f64,
    pub power: f64,
    pub power_se: f64,
    pub reps: u64,
    pub seed: u64,
}

fn data(msg: String) -> CliError {
    CliError::Data(msg)
}

fn require<T>(value: Option<T>, field: &str, setting: &str) -> Result<T, CliError> {
    value.ok_or_else(|| data(format!("config: setting {setting} requires field `{field}`")))
}

fn forbid(present: bool, field: &str, setting: &str) -> Result<(), CliError> {
    if present {
        Err(data(format!(
            "config: field `{field}` does not apply to setting {setting}"
        )))
    } else {
        Ok(())
    }
}

fn check_n(n: Option<usize>) -> Result<usize, CliError> {
    let n = n.unwrap_or(20);
    if n == 0 {
        Err(data("config: `n` must be at least 1".into()))
    } else {
        Ok(n)
    }
}

fn parse_procedures(
    raw: &Option<Vec<String>>,
    default: &[ProcedureKind],
) -> Result<Vec<ProcedureKind>, CliError> {
    let Some(names) = raw else {
        return Ok(default.to_vec());
    };
    if names.is_empty() {
        return Err(data("config: `procedures` must not be empty".into()));
    }
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            name.parse().map_err(|_| {
                data(format!(
                    "config: `procedures[{i}]`: unknown procedure `{name}`"
                ))
            })
        })
        .collect()
}

/// Parses and validates a config file into an execution plan. A `--seed`
/// flag overrides the config's seed.
pub fn parse_plan(text: &str, seed_override: Option<u64>) -> Result<Plan, CliError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|err| data(format!("config: {err}")))?;
    let alpha = raw.alpha.unwrap_or(0.05);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(data(format!(
            "config: `alpha` must lie strictly inside (0, 1), got {alpha}"
        )));
    }
    let replications = raw.replications.unwrap_or(10_000);
    if replications == 0 {
        return Err(data("config: `replications` must be at least 1".into()));
    }
    let master_seed = seed_override.or(raw.seed).unwrap_or(0);

    let setting = match &raw.setting {
        SettingTag::Number(1) => "1",
        SettingTag::Number(2) => "2",
        SettingTag::Name(name) if name == "custom" => "custom",
        SettingTag::Name(name) if name == "sharpness" => "sharpness",
        SettingTag::Number(other) => {
            return Err(data(format!(
                "config: `setting` must be 1, 2, \"custom\", or \"sharpness\", got {other}"
            )))
        }
        SettingTag::Name(other) => {
            return Err(data(format!(
                "config: `setting` must be 1, 2, \"custom\", or \"sharpness\", got \"{other}\""
            )))
        }
    };

    let truth = |thetas: Vec<f64>| {
        TruthVector::new(thetas).map_err(|err| data(format!("config: `thetas`: {err}")))
    };
    let mut runs = Vec::new();
    match setting {
        "1" => {
            for (field, present) in [
                ("family", raw.family.is_some()),
                ("n_false", raw.n_false.is_some()),
                ("theta0", raw.theta0.is_some()),
                ("r", raw.r.is_some()),
                ("rho_grid", raw.rho_grid.is_some()),
                ("thetas", raw.thetas.is_some()),
                ("k", raw.k.is_some()),
            ] {
                forbid(present, field, setting)?;
            }
            let n = check_n(raw.n)?;
            let theta = raw.theta.unwrap_or(3.0);
            let procedures = parse_procedures(&raw.procedures, &PAPER_FIVE)?;
            let rho_values = match &raw.rho {
                Some(grid) => grid.expand("rho")?,
                None => vec![0.0, 0.5],
            };
            let pi1_grid = match &raw.pi1_grid {
                Some(grid) => grid.expand("pi1_grid")?,
                None => GridSpec::Range {
                    from: 0.05,
                    to: 1.0,
                    step: 0.05,
                }
                .expand("pi1_grid")?,
            };
            for rho in rho_values {
                runs.push(RunSpec {
                    base: ScenarioConfig {
                        family: DistributionFamily::Normal,
                        truth: truth(vec![0.0; n])?,
                        dependence: Dependence::Equicorrelated { rho },
                        alpha,
                        procedures: procedures.clone(),
                        replications,
                        master_seed,
                    },
                    axis: Some(SweepAxis::Pi1 {
                        grid: pi1_grid.clone(),
                        theta,
                    }),
                    setting,
                    rho: Some(rho),
                    theta0: None,
                    r: None,
                });
            }
        }
        "2" => {
            for (field, present) in [
                ("family", raw.family.is_some()),
                ("theta", raw.theta.is_some()),
                ("rho", raw.rho.is_some()),
                ("pi1_grid", raw.pi1_grid.is_some()),
                ("thetas", raw.thetas.is_some()),
                ("k", raw.k.is_some()),
            ] {
                forbid(present, field, setting)?;
            }
            let n = check_n(raw.n)?;
            let n_false = raw.n_false.unwrap_or(5);
            let theta0 = require(raw.theta0, "theta0", setting)?;
            let r = require(raw.r, "r", setting)?;
            let procedures = parse_procedures(&raw.procedures, &PAPER_FIVE)?;
            let grid = match &raw.rho_grid {
                Some(grid) => grid.expand("rho_grid")?,
                None => GridSpec::Range {
                    from: 0.0,
                    to: 0.9,
                    step: 0.1,
                }
                .expand("rho_grid")?,
            };
            runs.push(RunSpec {
                base: ScenarioConfig {
                    family: DistributionFamily::Normal,
                    truth: truth(vec![0.0; n])?,
                    dependence: Dependence::Equicorrelated { rho: 0.0 },
                    alpha,
                    procedures,
                    replications,
                    master_seed,
                },
                axis: Some(SweepAxis::Rho {
                    grid,
                    theta0,
                    decay: r,
                    n_false,
                }),
                setting,
                rho: None,
                theta0: Some(theta0),
                r: Some(r),
            });
        }
        "custom" => {
            for (field, present) in [
                ("n", raw.n.is_some()),
                ("theta", raw.theta.is_some()),
                ("pi1_grid", raw.pi1_grid.is_some()),
                ("n_false", raw.n_false.is_some()),
                ("theta0", raw.theta0.is_some()),
                ("r", raw.r.is_some()),
                ("rho_grid", raw.rho_grid.is_some()),
                ("k", raw.k.is_some()),
            ] {
                forbid(present, field, setting)?;
            }
            let family = match &raw.family {
                None => DistributionFamily::Normal,
                Some(name) => crate::parse_family(name)
                    .map_err(|msg| data(format!("config: `family`: {msg}")))?,
            };
            let thetas = require(raw.thetas, "thetas", setting)?;
            let rho = match &raw.rho {
                None => 0.0,
                Some(GridSpec::Scalar(value)) => *value,
                Some(_) => {
                    return Err(data(
                        "config: setting custom takes a single scalar `rho`".into(),
                    ))
                }
            };
            let procedures = parse_procedures(&raw.procedures, &PAPER_FIVE)?;
            runs.push(RunSpec {
                base: ScenarioConfig {
                    family,
                    truth: truth(thetas)?,
                    dependence: Dependence::Equicorrelated { rho },
                    alpha,
                    procedures,
                    replications,
                    master_seed,
                },
                axis: None,
                setting,
                rho: Some(rho),
                theta0: None,
                r: None,
            });
        }
        _ => {
            for (field, present) in [
                ("family", raw.family.is_some()),
                ("n", raw.n.is_some()),
                ("rho", raw.rho.is_some()),
                ("pi1_grid", raw.pi1_grid.is_some()),
                ("n_false", raw.n_false.is_some()),
                ("theta0", raw.theta0.is_some()),
                ("r", raw.r.is_some()),
                ("rho_grid", raw.rho_grid.is_some()),
                ("thetas", raw.thetas.is_some()),
            ] {
                forbid(present, field, setting)?;
            }
            let k = require(raw.k, "k", setting)?;
            if k < 2 {
                return Err(data(format!(
                    "config: `k` must be at least 2 for the chain, got {k}"
                )));
            }
            let theta = raw.theta.unwrap_or(1e-6);
            let mut thetas = vec![theta; k - 1];
            thetas.push(0.0);
            let procedures = parse_procedures(
                &raw.procedures,
                &[ProcedureKind::FixedSeqHalving, ProcedureKind::FixedSeqFlat],
            )?;
            runs.push(RunSpec {
                base: ScenarioConfig {
                    family: DistributionFamily::Normal,
                    truth: truth(thetas)?,
                    dependence: Dependence::WorstCaseChain,
                    alpha,
                    procedures,
                    replications,
                    master_seed,
                },
                axis: None,
                setting,
                rho: None,
                theta0: None,
                r: None,
            });
        }
    }
    for run in &runs {
        run.base
            .validate()
            .map_err(|err| data(format!("config: {err}")))?;
    }
    Ok(Plan { runs })
}

/// Runs every planned scenario on the current rayon pool and flattens the
/// outcomes into CSV rows.
pub fn execute(plan: &Plan) -> Result<Vec<CsvRow>, CliError> {
    let mut rows = Vec::new();
    for run in &plan.runs {
        let make = |pi1: Option<f64>, rho: Option<f64>, outcome: &ProcedureOutcome<f64>| CsvRow {
            setting: run.setting,
            pi1,
            rho: rho.or(run.rho),
            theta0: run.theta0,
            r: run.r,
            procedure: outcome.procedure.name(),
            mdfwer: outcome.mdfwer.estimate,
            mdfwer_se: outcome.mdfwer.se,
            power: outcome.avg_power.estimate,
            power_se: outcome.avg_power.se,
            reps: run.base.replications,
            seed: run.base.master_seed,
        };
        match &run.axis {
            Some(axis) => {
                let result =
                    run_sweep(&run.base, axis).map_err(|err| data(format!("simulate: {err}")))?;
                let pi1_axis = matches!(axis, SweepAxis::Pi1 { .. });
                for row in &result.rows {
                    rows.push(if pi1_axis {
                        make(Some(row.axis_value), None, &row.outcome)
                    } else {
                        make(None, Some(row.axis_value), &row.outcome)
                    });
                }
            }
            None => {
                let result =
                    run_scenario(&run.base).map_err(|err| data(format!("simulate: {err}")))?;
                for outcome in &result.outcomes {
                    rows.push(make(None, None, outcome));
                }
            }
        }
    }
    Ok(rows)
}

/// Probabilities and standard errors: 6 significant digits.
pub fn fmt_prob(value: f64) -> String {
    format!("{value:.5e}")
}

/// Grid scalars: plain decimals, at most 6 fractional digits, trailing
/// zeros trimmed.
pub fn fmt_scalar(value: f64) -> String {
    let text = format!("{value:.6}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    if text.is_empty() || text == "-" {
        "0".to_string()
    } else {
        text.to_string()
    }
}

pub fn write_csv<W: Write>(writer: W, rows: &[CsvRow]) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "setting", "pi1", "rho", "theta0", "r", "procedure", "mdfwer", "mdfwer_se", "power",
        "power_se", "reps", "seed",
    ])?;
    let cell = |v: Option<f64>| v.map(fmt_scalar).unwrap_or_default();
    for row in rows {
        out.write_record([
            row.setting.to_string(),
            cell(row.pi1),
            cell(row.rho),
            cell(row.theta0),
            cell(row.r),
            row.procedure.to_string(),
            fmt_prob(row.mdfwer),
            fmt_prob(row.mdfwer_se),
            fmt_prob(row.power),
            fmt_prob(row.power_se),
            row.reps.to_string(),
            row.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
