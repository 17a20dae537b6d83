//! Directional fixed-sequence multiple testing with mixed-directional
//! FWER control.
//!
//! Each of n two-sided hypotheses `H_i: theta_i = 0` is tested in a fixed
//! order. On rejection the procedure also claims the sign of `theta_i`, so
//! two kinds of mistakes count against the error budget: rejecting a true
//! null (type 1) and rejecting a false null with the wrong sign claim
//! (directional, or type 3). The mixed-directional familywise error rate
//! (mdFWER) is the probability of making at least one of either.
//!
//! The crate provides
//!
//! * the eight directional procedures ([`procedures`]): five
//!   fixed-sequence variants differing in their per-step critical
//!   constants, plus directional Bonferroni, Holm, and Hochberg;
//! * the marginal machinery they sit on ([`dist`]): normal and Cauchy
//!   location families, two-sided p-values, critical pairs, and a
//!   monotone-likelihood-ratio grid check;
//! * closed-form oracles for the two-hypothesis case, the
//!   likelihood-ratio counterexample, and the sharpness chain
//!   ([`oracle`]);
//! * a deterministic parallel Monte Carlo engine ([`sim`]) whose output
//!   is byte-identical for a fixed master seed regardless of worker
//!   count.
//!
//! Everything numeric is generic over the scalar type through
//! [`scalar::Scalar`] (implemented for `f32` and `f64`); the crate root
//! exports `f64` aliases for the common case.
//!
//! ```
//! use dirseq::{DistributionFamily, ProcedureKind, TestBattery64};
//!
//! let battery =
//!     TestBattery64::from_statistics(DistributionFamily::Normal, vec![3.1, -2.6, 1.2]).unwrap();
//! let decisions = ProcedureKind::FixedSeqHalving.apply(&battery, 0.05).unwrap();
//! assert!(decisions[0].is_rejection());
//! ```

pub mod dist;
pub mod oracle;
pub mod procedures;
pub mod scalar;
pub mod sim;

pub use dist::{
    mlr_grid_check, CriticalPair, DistError, DistributionFamily, MlrReport, MlrTail, MlrViolation,
};
pub use oracle::{
    cauchy_counterexample, counterexample_check, mdfwer_two_dependent, mdfwer_two_indep,
    sharpness_chain_quantiles, BivariateCdf, CounterexampleReport, OracleError, SharpnessChain,
    DEFAULT_QUADRATURE_ORDER,
};
pub use procedures::{
    evaluate_decisions, Decision, ErrorTally, ProcedureError, ProcedureKind, Sign, TestBattery,
    TruthVector,
};
pub use scalar::Scalar;
pub use sim::{
    gen_equicorrelated_normal, gen_independent, gen_worst_case_chain, replicate_seed, run_scenario,
    run_sweep, Dependence, EstimateWithSE, ProcedureOutcome, ReplicateTally, ScenarioConfig,
    ScenarioResult, SimError, SweepAxis, SweepResult, SweepRow,
};

/// `f64` aliases for the generic types.
pub type CriticalPair64 = CriticalPair<f64>;
pub type TestBattery64 = TestBattery<f64>;
pub type TruthVector64 = TruthVector<f64>;
pub type BivariateCdf64 = BivariateCdf<f64>;
pub type CounterexampleReport64 = CounterexampleReport<f64>;
pub type SharpnessChain64 = SharpnessChain<f64>;
pub type Dependence64 = Dependence<f64>;
pub type ScenarioConfig64 = ScenarioConfig<f64>;
pub type ScenarioResult64 = ScenarioResult<f64>;
pub type EstimateWithSE64 = EstimateWithSE<f64>;
pub type SweepAxis64 = SweepAxis<f64>;
pub type SweepResult64 = SweepResult<f64>;
