//! Deterministic parallel Monte Carlo engine.
//!
//! A scenario fixes the marginal family, the vector of true shifts, a
//! dependence model, a level, and a set of procedures. Each replicate
//! draws one statistic vector, applies every procedure, and scores the
//! decisions against the truth. Estimates are mdFWER (share of replicates
//! with at least one type 1 or directional error) and average power (mean
//! over replicates of the fraction of false nulls rejected with the
//! correct sign).
//!
//! Reproducibility contract: replicate r uses its own ChaCha8 stream
//! seeded by a splitmix64 hash of (master_seed, r), and per-procedure
//! results are folded into integer tallies whose merge is associative and
//! commutative. Results are therefore byte-identical for a fixed master
//! seed regardless of worker count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::dist::{erf, norm_quantile, DistributionFamily};
use crate::procedures::{evaluate_decisions, ErrorTally, ProcedureKind, TestBattery, TruthVector};
use crate::scalar::{count, lit, Scalar};

/// Errors from scenario configuration and sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("alpha must lie strictly inside (0, 1), got {value}")]
    InvalidAlpha { value: f64 },
    #[error("rho must lie in [0, 1], got {value}")]
    InvalidRho { value: f64 },
    #[error("at least one procedure is required")]
    NoProcedures,
    #[error("replications must be at least 1")]
    NoReplications,
    #[error("the worst-case chain needs at least two hypotheses, got {len}")]
    ChainTooShort { len: usize },
    #[error("the worst-case chain is defined for the normal family only")]
    ChainRequiresNormal,
    #[error("Cauchy statistics are sampled independently; rho must be 0, got {value}")]
    CauchyRequiresIndependence { value: f64 },
    #[error("{name} grid must not be empty")]
    EmptyGrid { name: &'static str },
    #[error("{name} value {value} lies outside {range}")]
    GridOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("shift theta must be finite and nonzero, got {value}")]
    InvalidShift { value: f64 },
    #[error("decay ratio must be finite and positive, got {value}")]
    InvalidDecay { value: f64 },
    #[error("n_false = {n_false} exceeds the {n} hypotheses of the template")]
    TooManyFalseNulls { n_false: usize, n: usize },
}

fn to_f64<R: Scalar>(v: R) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Derives the per-replicate RNG seed from the master seed. Splitmix64
/// finalizer over `master ^ r * golden`; bit avalanche keeps neighboring
/// replicate streams uncorrelated.
pub fn replicate_seed(master_seed: u64, replicate: u64) -> u64 {
    let mut z = master_seed ^ replicate.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Joint model of the statistic vector around its shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dependence<R> {
    /// One-factor exchangeable correlation: for the normal family,
    /// `T_i = theta_i + sqrt(rho) Z_0 + sqrt(1 - rho) Z_i`. The Cauchy
    /// family only supports `rho = 0` (independent draws).
    Equicorrelated { rho: R },
    /// The adversarial chain attaining the halving procedure's level:
    /// `Z_k` standard normal and `Z_i = Phi^{-1}(|2 Phi(Z_{i+1}) - 1|)`
    /// backward from the last coordinate. Normal family only.
    WorstCaseChain,
}

/// A full simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<R> {
    pub family: DistributionFamily,
    pub truth: TruthVector<R>,
    pub dependence: Dependence<R>,
    pub alpha: R,
    pub procedures: Vec<ProcedureKind>,
    pub replications: u64,
    pub master_seed: u64,
}

impl<R: Scalar> ScenarioConfig<R> {
    /// Checks the cross-field constraints; sampling assumes they hold.
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.alpha > R::zero() && self.alpha < R::one()) {
            return Err(SimError::InvalidAlpha {
                value: to_f64(self.alpha),
            });
        }
        if self.procedures.is_empty() {
            return Err(SimError::NoProcedures);
        }
        if self.replications == 0 {
            return Err(SimError::NoReplications);
        }
        match self.dependence {
            Dependence::Equicorrelated { rho } => {
                if !(rho >= R::zero() && rho <= R::one()) {
                    return Err(SimError::InvalidRho { value: to_f64(rho) });
                }
                if self.family == DistributionFamily::Cauchy && rho != R::zero() {
                    return Err(SimError::CauchyRequiresIndependence { value: to_f64(rho) });
                }
            }
            Dependence::WorstCaseChain => {
                if self.family != DistributionFamily::Normal {
                    return Err(SimError::ChainRequiresNormal);
                }
                if self.truth.len() < 2 {
                    return Err(SimError::ChainTooShort {
                        len: self.truth.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// One equicorrelated normal draw around the true shifts.
pub fn gen_equicorrelated_normal<R, G>(
    truth: &TruthVector<R>,
    rho: R,
    rng: &mut G,
) -> Result<Vec<R>, SimError>
where
    R: Scalar,
    StandardNormal: Distribution<R>,
    G: Rng + ?Sized,
{
    if !(rho >= R::zero() && rho <= R::one()) {
        return Err(SimError::InvalidRho { value: to_f64(rho) });
    }
    let shared_coef = rho.sqrt();
    let own_coef = (R::one() - rho).sqrt();
    let shared: R = rng.sample(StandardNormal);
    Ok(truth
        .thetas()
        .iter()
        .map(|&theta| {
            let own: R = rng.sample(StandardNormal);
            theta + shared_coef * shared + own_coef * own
        })
        .collect())
}

/// The backward recursion of the worst-case chain, before shifts.
fn chain_backward<R: Scalar>(k: usize, z_last: R) -> Vec<R> {
    let mut z = vec![R::zero(); k];
    z[k - 1] = z_last;
    let lo = R::min_positive_value();
    let hi = R::one() - R::epsilon();
    for i in (0..k - 1).rev() {
        // |2 Phi(w) - 1| = erf(|w| / sqrt(2)); the erf form avoids the
        // cancellation near w = 0 and the probit clamp handles |w| so
        // large that u rounds to 1.
        let u = erf(z[i + 1].abs() * R::FRAC_1_SQRT_2()).max(lo).min(hi);
        z[i] = norm_quantile(u);
    }
    z
}

/// One draw of the worst-case dependence chain around the true shifts.
pub fn gen_worst_case_chain<R, G>(truth: &TruthVector<R>, rng: &mut G) -> Result<Vec<R>, SimError>
where
    R: Scalar,
    StandardNormal: Distribution<R>,
    G: Rng + ?Sized,
{
    let k = truth.len();
    if k < 2 {
        return Err(SimError::ChainTooShort { len: k });
    }
    let z_last: R = rng.sample(StandardNormal);
    Ok(chain_backward(k, z_last)
        .into_iter()
        .zip(truth.thetas())
        .map(|(z, &theta)| theta + z)
        .collect())
}

/// One independent draw from the marginal family around the true shifts.
pub fn gen_independent<R, G>(
    family: DistributionFamily,
    truth: &TruthVector<R>,
    rng: &mut G,
) -> Vec<R>
where
    R: Scalar,
    Open01: Distribution<R>,
    G: Rng + ?Sized,
{
    truth
        .thetas()
        .iter()
        .map(|&theta| {
            let u: R = rng.sample(Open01);
            theta
                + family
                    .quantile(u)
                    .expect("Open01 samples lie strictly inside (0, 1)")
        })
        .collect()
}

fn draw_statistics<R, G>(config: &ScenarioConfig<R>, rng: &mut G) -> Vec<R>
where
    R: Scalar,
    StandardNormal: Distribution<R>,
    Open01: Distribution<R>,
    G: Rng + ?Sized,
{
    match (config.family, config.dependence) {
        (DistributionFamily::Normal, Dependence::Equicorrelated { rho }) => {
            gen_equicorrelated_normal(&config.truth, rho, rng).expect("validated rho")
        }
        (DistributionFamily::Normal, Dependence::WorstCaseChain) => {
            gen_worst_case_chain(&config.truth, rng).expect("validated chain length")
        }
        (DistributionFamily::Cauchy, _) => gen_independent(config.family, &config.truth, rng),
    }
}

/// Integer sufficient statistics of one procedure across replicates.
///
/// `sum_correct` and `sum_correct_sq` accumulate the per-replicate count of
/// correct directional rejections and its square; together with
/// `false_nulls` they determine the average-power estimate and its
/// standard error. Being integers, merges are exact and order-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicateTally {
    pub replications: u64,
    pub any_error: u64,
    pub sum_correct: u64,
    pub sum_correct_sq: u64,
    pub false_nulls: u64,
}

impl ReplicateTally {
    pub fn new(false_nulls: u64) -> Self {
        ReplicateTally {
            replications: 0,
            any_error: 0,
            sum_correct: 0,
            sum_correct_sq: 0,
            false_nulls,
        }
    }

    fn record(&mut self, tally: &ErrorTally) {
        self.replications += 1;
        self.any_error += u64::from(tally.any_error);
        let correct = tally.correct_directional_rejections as u64;
        self.sum_correct += correct;
        self.sum_correct_sq += correct * correct;
    }

    fn merge(&mut self, other: &ReplicateTally) {
        debug_assert_eq!(self.false_nulls, other.false_nulls);
        self.replications += other.replications;
        self.any_error += other.any_error;
        self.sum_correct += other.sum_correct;
        self.sum_correct_sq += other.sum_correct_sq;
    }

    /// Share of replicates with at least one type 1 or directional error,
    /// with its binomial standard error.
    pub fn mdfwer_estimate<R: Scalar>(&self) -> EstimateWithSE<R> {
        let reps = count::<R>(self.replications.max(1));
        let p = count::<R>(self.any_error) / reps;
        EstimateWithSE {
            estimate: p,
            se: (p * (R::one() - p) / reps).sqrt(),
            replications: self.replications,
        }
    }

    /// Mean over replicates of (correct directional rejections) /
    /// (false nulls), with the sample standard error of that mean. Zero
    /// with zero error under a fully null configuration.
    pub fn power_estimate<R: Scalar>(&self) -> EstimateWithSE<R> {
        if self.false_nulls == 0 {
            return EstimateWithSE {
                estimate: R::zero(),
                se: R::zero(),
                replications: self.replications,
            };
        }
        let reps = count::<R>(self.replications.max(1));
        let n1 = count::<R>(self.false_nulls);
        let mean = count::<R>(self.sum_correct) / (reps * n1);
        let se = if self.replications > 1 {
            let sum_sq = count::<R>(self.sum_correct_sq) / (n1 * n1);
            let var = ((sum_sq - reps * mean * mean) / (reps - R::one())).max(R::zero());
            (var / reps).sqrt()
        } else {
            R::zero()
        };
        EstimateWithSE {
            estimate: mean,
            se,
            replications: self.replications,
        }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithSE<R> {
    pub estimate: R,
    pub se: R,
    pub replications: u64,
}

/// Estimates for one procedure within a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcedureOutcome<R> {
    pub procedure: ProcedureKind,
    pub mdfwer: EstimateWithSE<R>,
    pub avg_power: EstimateWithSE<R>,
    pub tally: ReplicateTally,
}

/// All procedure outcomes of one scenario, in configuration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult<R> {
    pub outcomes: Vec<ProcedureOutcome<R>>,
}

/// Runs a scenario over the current rayon thread pool.
pub fn run_scenario<R>(config: &ScenarioConfig<R>) -> Result<ScenarioResult<R>, SimError>
where
    R: Scalar,
    StandardNormal: Distribution<R>,
    Open01: Distribution<R>,
{
    config.validate()?;
    let false_nulls = config.truth.false_null_count() as u64;
    let empty = || vec![ReplicateTally::new(false_nulls); config.procedures.len()];
    let tallies = (0..config.replications)
        .into_par_iter()
        .fold(empty, |mut acc, replicate| {
            let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(config.master_seed, replicate));
            let battery = TestBattery::from_statistics(config.family, draw_statistics(config, &mut rng))
                .expect("simulated statistics are finite and non-empty");
            for (slot, &kind) in acc.iter_mut().zip(&config.procedures) {
                let decisions = kind
                    .apply(&battery, config.alpha)
                    .expect("configuration was validated");
                let scored = evaluate_decisions(&decisions, &config.truth)
                    .expect("decision and truth lengths match by construction");
                slot.record(&scored);
            }
            acc
        })
        .reduce(empty, |mut left, right| {
            for (a, b) in left.iter_mut().zip(&right) {
                a.merge(b);
            }
            left
        });
    let outcomes = config
        .procedures
        .iter()
        .zip(tallies)
        .map(|(&procedure, tally)| ProcedureOutcome {
            procedure,
            mdfwer: tally.mdfwer_estimate(),
            avg_power: tally.power_estimate(),
            tally,
        })
        .collect();
    Ok(ScenarioResult { outcomes })
}

/// Number of false nulls implied by a fraction pi1 of n hypotheses. The
/// epsilon nudge keeps grid points like 0.35 * 20 from flooring to 6.
pub(crate) fn pi1_false_count<R: Scalar>(n: usize, pi1: R) -> usize {
    let scaled = pi1 * count::<R>(n as u64) + lit::<R>(1e-9);
    scaled.floor().to_usize().unwrap_or(0).min(n)
}

/// The grid axis of a sweep.
///
/// `Pi1` varies the fraction of false nulls: the first
/// `floor(pi1 * n)` shifts equal `theta`, the rest are zero, with n and the
/// dependence taken from the base scenario. `Rho` varies the
/// equicorrelation while the first `n_false` shifts follow the geometric
/// ladder `theta0 * decay^i`.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis<R> {
    Pi1 { grid: Vec<R>, theta: R },
    Rho {
        grid: Vec<R>,
        theta0: R,
        decay: R,
        n_false: usize,
    },
}

/// One grid point and one procedure of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<R> {
    pub axis_value: R,
    pub outcome: ProcedureOutcome<R>,
}

/// Sweep rows, outer order by grid point, inner by procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<R> {
    pub rows: Vec<SweepRow<R>>,
}

fn check_shift<R: Scalar>(theta: R) -> Result<(), SimError> {
    if theta.is_finite() && theta != R::zero() {
        Ok(())
    } else {
        Err(SimError::InvalidShift {
            value: to_f64(theta),
        })
    }
}

/// Runs one scenario per grid point, holding the master seed fixed so the
/// points share common random numbers.
pub fn run_sweep<R>(
    base: &ScenarioConfig<R>,
    axis: &SweepAxis<R>,
) -> Result<SweepResult<R>, SimError>
where
    R: Scalar,
    StandardNormal: Distribution<R>,
    Open01: Distribution<R>,
{
    let n = base.truth.len();
    let mut rows = Vec::new();
    match axis {
        SweepAxis::Pi1 { grid, theta } => {
            if grid.is_empty() {
                return Err(SimError::EmptyGrid { name: "pi1" });
            }
            check_shift(*theta)?;
            for &pi1 in grid {
                if !(pi1 >= R::zero() && pi1 <= R::one()) {
                    return Err(SimError::GridOutOfRange {
                        name: "pi1",
                        value: to_f64(pi1),
                        range: "[0, 1]",
                    });
                }
                let n1 = pi1_false_count(n, pi1);
                let mut thetas = vec![*theta; n1];
                thetas.resize(n, R::zero());
                let config = ScenarioConfig {
                    truth: TruthVector::new(thetas).expect("n >= 1 and finite shifts"),
                    ..base.clone()
                };
                let result = run_scenario(&config)?;
                rows.extend(result.outcomes.into_iter().map(|outcome| SweepRow {
                    axis_value: pi1,
                    outcome,
                }));
            }
        }
        SweepAxis::Rho {
            grid,
            theta0,
            decay,
            n_false,
        } => {
            if grid.is_empty() {
                return Err(SimError::EmptyGrid { name: "rho" });
            }
            check_shift(*theta0)?;
            if !(decay.is_finite() && *decay > R::zero()) {
                return Err(SimError::InvalidDecay {
                    value: to_f64(*decay),
                });
            }
            if *n_false > n {
                return Err(SimError::TooManyFalseNulls {
                    n_false: *n_false,
                    n,
                });
            }
            let mut thetas = Vec::with_capacity(n);
            for i in 0..n {
                if i < *n_false {
                    thetas.push(*theta0 * decay.powi(i as i32));
                } else {
                    thetas.push(R::zero());
                }
            }
            let truth = TruthVector::new(thetas).expect("n >= 1 and finite shifts");
            for &rho in grid {
                if !(rho >= R::zero() && rho <= R::one()) {
                    return Err(SimError::GridOutOfRange {
                        name: "rho",
                        value: to_f64(rho),
                        range: "[0, 1]",
                    });
                }
                let config = ScenarioConfig {
                    truth: truth.clone(),
                    dependence: Dependence::Equicorrelated { rho },
                    ..base.clone()
                };
                let result = run_scenario(&config)?;
                rows.extend(result.outcomes.into_iter().map(|outcome| SweepRow {
                    axis_value: rho,
                    outcome,
                }));
            }
        }
    }
    Ok(SweepResult { rows })
}
