//! Directional multiple-testing procedures and their error accounting.
//!
//! All procedures consume a [`TestBattery`] (ordered statistics with their
//! two-sided p-values) and return one [`Decision`] per hypothesis. A
//! rejection always carries the direction of its observed statistic.
//!
//! The fixed-sequence family tests hypotheses in the given order and stops
//! at the first acceptance; variants differ only in their critical
//! constants at step i (1-based):
//!
//! | kind                | constant        |
//! |---------------------|-----------------|
//! | `FixedSeqHalving`   | a / 2^(i-1)     |
//! | `FixedSeqFlat`      | a               |
//! | `FixedSeqLinear`    | 2a / (n+1)      |
//! | `FixedSeqTwoThirds` | 2a / 3          |
//! | `FixedSeqHalf`      | a / 2           |
//!
//! The comparison procedures ignore the ordering: single-step Bonferroni at
//! a/n, Holm's step-down and Hochberg's step-up with constants a/(n-k+1).
//! Ties between equal p-values are broken by original index, so every
//! procedure is a deterministic function of the battery.

use thiserror::Error;

use crate::dist::DistributionFamily;
use crate::scalar::{count, lit, Scalar};

/// Errors from battery construction and procedure application.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcedureError {
    #[error("a test battery needs at least one hypothesis")]
    EmptyBattery,
    #[error("statistic {index} is not finite")]
    NonFiniteStatistic { index: usize },
    #[error("p-value {index} must lie in (0, 1], got {value}")]
    InvalidPValue { index: usize, value: f64 },
    #[error("alpha must lie strictly inside (0, 1), got {value}")]
    InvalidAlpha { value: f64 },
    #[error("{kind:?} is not a fixed-sequence procedure")]
    NotFixedSequence { kind: ProcedureKind },
    #[error("decision vector has length {decisions}, truth vector length {truth}")]
    LengthMismatch { decisions: usize, truth: usize },
    #[error("truth value {index} is not finite")]
    NonFiniteTruth { index: usize },
}

/// Ordered battery of test statistics with their two-sided p-values.
///
/// Invariant: `pvalues[i] == family.two_sided_pvalue(statistics[i])` when
/// built from statistics; batteries built from reported p-values keep the
/// supplied p-values and synthesize sign-consistent statistics instead.
#[derive(Debug, Clone, PartialEq)]
pub struct TestBattery<R> {
    family: DistributionFamily,
    statistics: Vec<R>,
    pvalues: Vec<R>,
}

/// Reported sign of a statistic when only (p-value, sign) pairs are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl<R: Scalar> TestBattery<R> {
    /// Builds a battery from observed statistics, computing the p-values.
    pub fn from_statistics(
        family: DistributionFamily,
        statistics: Vec<R>,
    ) -> Result<Self, ProcedureError> {
        if statistics.is_empty() {
            return Err(ProcedureError::EmptyBattery);
        }
        if let Some(index) = statistics.iter().position(|t| !t.is_finite()) {
            return Err(ProcedureError::NonFiniteStatistic { index });
        }
        let pvalues = statistics
            .iter()
            .map(|&t| family.two_sided_pvalue(t))
            .collect();
        Ok(TestBattery {
            family,
            statistics,
            pvalues,
        })
    }

    /// Builds a battery from reported two-sided p-values and signs, as when
    /// reading published tables. Statistics are back-solved from the
    /// p-values (`t = sign * F_0^{-1}(1 - p/2)`) so downstream code can
    /// still ask for them; the supplied p-values are kept verbatim.
    pub fn from_pvalues(
        family: DistributionFamily,
        entries: &[(R, Sign)],
    ) -> Result<Self, ProcedureError> {
        if entries.is_empty() {
            return Err(ProcedureError::EmptyBattery);
        }
        let mut statistics = Vec::with_capacity(entries.len());
        let mut pvalues = Vec::with_capacity(entries.len());
        let half = lit::<R>(0.5);
        for (index, &(p, sign)) in entries.iter().enumerate() {
            if !(p > R::zero() && p <= R::one()) {
                return Err(ProcedureError::InvalidPValue {
                    index,
                    value: p.to_f64().unwrap_or(f64::NAN),
                });
            }
            let magnitude = if p == R::one() {
                R::zero()
            } else {
                family
                    .quantile(R::one() - half * p)
                    .expect("1 - p/2 lies in (0, 1) for p in (0, 1)")
            };
            statistics.push(match sign {
                Sign::Positive => magnitude,
                Sign::Negative => -magnitude,
            });
            pvalues.push(p);
        }
        Ok(TestBattery {
            family,
            statistics,
            pvalues,
        })
    }

    pub fn family(&self) -> DistributionFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.statistics.len()
    }

    /// Always false: construction rejects empty batteries.
    pub fn is_empty(&self) -> bool {
        self.statistics.is_empty()
    }

    pub fn statistics(&self) -> &[R] {
        &self.statistics
    }

    pub fn pvalues(&self) -> &[R] {
        &self.pvalues
    }
}

/// Per-hypothesis outcome of a directional procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    RejectPositive,
    RejectNegative,
}

impl Decision {
    pub fn is_rejection(self) -> bool {
        !matches!(self, Decision::Accept)
    }
}

/// The implemented directional procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcedureKind {
    FixedSeqHalving,
    FixedSeqFlat,
    FixedSeqLinear,
    FixedSeqTwoThirds,
    FixedSeqHalf,
    BonferroniDir,
    HolmDir,
    HochbergDir,
}

impl ProcedureKind {
    pub const ALL: [ProcedureKind; 8] = [
        ProcedureKind::FixedSeqHalving,
        ProcedureKind::FixedSeqFlat,
        ProcedureKind::FixedSeqLinear,
        ProcedureKind::FixedSeqTwoThirds,
        ProcedureKind::FixedSeqHalf,
        ProcedureKind::BonferroniDir,
        ProcedureKind::HolmDir,
        ProcedureKind::HochbergDir,
    ];

    pub fn is_fixed_sequence(self) -> bool {
        matches!(
            self,
            ProcedureKind::FixedSeqHalving
                | ProcedureKind::FixedSeqFlat
                | ProcedureKind::FixedSeqLinear
                | ProcedureKind::FixedSeqTwoThirds
                | ProcedureKind::FixedSeqHalf
        )
    }

    /// Stable kebab-case name used by the CLI and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            ProcedureKind::FixedSeqHalving => "fixed-seq-halving",
            ProcedureKind::FixedSeqFlat => "fixed-seq-flat",
            ProcedureKind::FixedSeqLinear => "fixed-seq-linear",
            ProcedureKind::FixedSeqTwoThirds => "fixed-seq-two-thirds",
            ProcedureKind::FixedSeqHalf => "fixed-seq-half",
            ProcedureKind::BonferroniDir => "bonferroni",
            ProcedureKind::HolmDir => "holm",
            ProcedureKind::HochbergDir => "hochberg",
        }
    }

    /// Applies the procedure to a battery at level `alpha`.
    pub fn apply<R: Scalar>(
        self,
        battery: &TestBattery<R>,
        alpha: R,
    ) -> Result<Vec<Decision>, ProcedureError> {
        match self {
            kind if kind.is_fixed_sequence() => fixed_seq_directional(battery, kind, alpha),
            ProcedureKind::BonferroniDir => bonferroni_directional(battery, alpha),
            ProcedureKind::HolmDir => holm_directional(battery, alpha),
            ProcedureKind::HochbergDir => hochberg_directional(battery, alpha),
            _ => unreachable!(),
        }
    }
}

impl std::fmt::Display for ProcedureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProcedureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProcedureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ProcedureKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown procedure {s:?}; expected one of {}", names.join(", "))
            })
    }
}

fn check_alpha<R: Scalar>(alpha: R) -> Result<(), ProcedureError> {
    if alpha > R::zero() && alpha < R::one() {
        Ok(())
    } else {
        Err(ProcedureError::InvalidAlpha {
            value: alpha.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn directional_rejection<R: Scalar>(statistic: R) -> Decision {
    // A rejected hypothesis has p < 1, so its statistic cannot be zero.
    debug_assert!(statistic != R::zero());
    if statistic > R::zero() {
        Decision::RejectPositive
    } else {
        Decision::RejectNegative
    }
}

/// Critical constant of a fixed-sequence variant at 1-based step `i`.
fn fixed_seq_constant<R: Scalar>(kind: ProcedureKind, alpha: R, i: usize, n: usize) -> R {
    let two = lit::<R>(2.0);
    match kind {
        ProcedureKind::FixedSeqHalving => alpha / two.powi(i as i32 - 1),
        ProcedureKind::FixedSeqFlat => alpha,
        ProcedureKind::FixedSeqLinear => two * alpha / count(n as u64 + 1),
        ProcedureKind::FixedSeqTwoThirds => two * alpha / lit(3.0),
        ProcedureKind::FixedSeqHalf => alpha / two,
        _ => unreachable!("not a fixed-sequence kind"),
    }
}

/// Fixed-sequence directional procedure: test hypotheses in order, reject
/// while `p_i <= constant_i`, stop at the first acceptance (all later
/// hypotheses are accepted untested).
pub fn fixed_seq_directional<R: Scalar>(
    battery: &TestBattery<R>,
    kind: ProcedureKind,
    alpha: R,
) -> Result<Vec<Decision>, ProcedureError> {
    if !kind.is_fixed_sequence() {
        return Err(ProcedureError::NotFixedSequence { kind });
    }
    check_alpha(alpha)?;
    let n = battery.len();
    let mut decisions = vec![Decision::Accept; n];
    for (i, decision) in decisions.iter_mut().enumerate() {
        if battery.pvalues[i] <= fixed_seq_constant(kind, alpha, i + 1, n) {
            *decision = directional_rejection(battery.statistics[i]);
        } else {
            break;
        }
    }
    Ok(decisions)
}

/// Single-step directional Bonferroni: reject every `p_i <= alpha/n`.
pub fn bonferroni_directional<R: Scalar>(
    battery: &TestBattery<R>,
    alpha: R,
) -> Result<Vec<Decision>, ProcedureError> {
    check_alpha(alpha)?;
    let n = battery.len();
    let threshold = alpha / count(n as u64);
    let mut decisions = vec![Decision::Accept; n];
    for (i, decision) in decisions.iter_mut().enumerate() {
        if battery.pvalues[i] <= threshold {
            *decision = directional_rejection(battery.statistics[i]);
        }
    }
    Ok(decisions)
}

/// Indices sorted by ascending p-value, ties broken by original index.
fn sorted_order<R: Scalar>(pvalues: &[R]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pvalues.len()).collect();
    order.sort_by(|&a, &b| {
        pvalues[a]
            .partial_cmp(&pvalues[b])
            .expect("p-values are finite")
            .then(a.cmp(&b))
    });
    order
}

/// Holm's step-down procedure with directional rejections: the k-th
/// smallest p-value is tested against `alpha/(n-k+1)`; the walk stops at
/// the first failure.
pub fn holm_directional<R: Scalar>(
    battery: &TestBattery<R>,
    alpha: R,
) -> Result<Vec<Decision>, ProcedureError> {
    check_alpha(alpha)?;
    let n = battery.len();
    let order = sorted_order(&battery.pvalues);
    let mut decisions = vec![Decision::Accept; n];
    for (k, &idx) in order.iter().enumerate() {
        if battery.pvalues[idx] <= alpha / count((n - k) as u64) {
            decisions[idx] = directional_rejection(battery.statistics[idx]);
        } else {
            break;
        }
    }
    Ok(decisions)
}

/// Hochberg's step-up procedure with directional rejections: rejects the
/// k* smallest p-values, where k* is the largest k with
/// `p_(k) <= alpha/(n-k+1)`.
pub fn hochberg_directional<R: Scalar>(
    battery: &TestBattery<R>,
    alpha: R,
) -> Result<Vec<Decision>, ProcedureError> {
    check_alpha(alpha)?;
    let n = battery.len();
    let order = sorted_order(&battery.pvalues);
    let mut decisions = vec![Decision::Accept; n];
    let mut k_star = 0;
    for k in (1..=n).rev() {
        if battery.pvalues[order[k - 1]] <= alpha / count((n - k + 1) as u64) {
            k_star = k;
            break;
        }
    }
    for &idx in &order[..k_star] {
        decisions[idx] = directional_rejection(battery.statistics[idx]);
    }
    Ok(decisions)
}

/// True signal pattern of a scenario: `thetas[i]` is the real shift of
/// statistic i; zero means the null is true.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthVector<R> {
    thetas: Vec<R>,
}

impl<R: Scalar> TruthVector<R> {
    pub fn new(thetas: Vec<R>) -> Result<Self, ProcedureError> {
        if thetas.is_empty() {
            return Err(ProcedureError::EmptyBattery);
        }
        if let Some(index) = thetas.iter().position(|t| !t.is_finite()) {
            return Err(ProcedureError::NonFiniteTruth { index });
        }
        Ok(TruthVector { thetas })
    }

    pub fn thetas(&self) -> &[R] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    /// Always false: construction rejects empty truth vectors.
    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Number of false nulls (nonzero shifts).
    pub fn false_null_count(&self) -> usize {
        self.thetas.iter().filter(|&&t| t != R::zero()).count()
    }
}

/// Error counts of one set of decisions against the truth.
///
/// `type1` counts rejections of true nulls; `type3` counts rejections of
/// false nulls whose claimed direction is wrong; a replicate contributes to
/// the mixed-directional FWER when either is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorTally {
    pub type1: usize,
    pub type3: usize,
    pub correct_directional_rejections: usize,
    pub any_error: bool,
}

/// Scores decisions against the true shifts.
pub fn evaluate_decisions<R: Scalar>(
    decisions: &[Decision],
    truth: &TruthVector<R>,
) -> Result<ErrorTally, ProcedureError> {
    if decisions.len() != truth.len() {
        return Err(ProcedureError::LengthMismatch {
            decisions: decisions.len(),
            truth: truth.len(),
        });
    }
    let mut tally = ErrorTally::default();
    for (&decision, &theta) in decisions.iter().zip(truth.thetas()) {
        match decision {
            Decision::Accept => {}
            Decision::RejectPositive | Decision::RejectNegative => {
                if theta == R::zero() {
                    tally.type1 += 1;
                } else {
                    let claimed_positive = decision == Decision::RejectPositive;
                    if claimed_positive == (theta > R::zero()) {
                        tally.correct_directional_rejections += 1;
                    } else {
                        tally.type3 += 1;
                    }
                }
            }
        }
    }
    tally.any_error = tally.type1 + tally.type3 > 0;
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Decision::{Accept, RejectNegative, RejectPositive};

    fn battery(ps: &[f64], signs: &[i8]) -> TestBattery<f64> {
        let entries: Vec<(f64, Sign)> = ps
            .iter()
            .zip(signs)
            .map(|(&p, &s)| (p, if s >= 0 { Sign::Positive } else { Sign::Negative }))
            .collect();
        TestBattery::from_pvalues(DistributionFamily::Normal, &entries).unwrap()
    }

    #[test]
    fn from_statistics_computes_pvalues() {
        let b = TestBattery::from_statistics(DistributionFamily::Normal, vec![1.959964f64, -0.5])
            .unwrap();
        assert!((b.pvalues()[0] - 0.05).abs() < 1e-8);
        assert!((b.pvalues()[1] - 0.617075).abs() < 1e-6);
    }

    #[test]
    fn from_pvalues_backsolves_consistent_statistics() {
        let b = battery(&[0.05, 1.0], &[-1, 1]);
        assert!((b.statistics()[0] + 1.9599639845400542).abs() < 1e-10);
        assert_eq!(b.statistics()[1], 0.0);
        let recomputed = b.family().two_sided_pvalue(b.statistics()[0]);
        assert!((recomputed - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_and_invalid_inputs() {
        assert_eq!(
            TestBattery::<f64>::from_statistics(DistributionFamily::Normal, vec![]),
            Err(ProcedureError::EmptyBattery)
        );
        assert!(TestBattery::from_statistics(
            DistributionFamily::Normal,
            vec![1.0, f64::NAN]
        )
        .is_err());
        assert!(
            TestBattery::from_pvalues(DistributionFamily::Normal, &[(0.0f64, Sign::Positive)])
                .is_err()
        );
        assert!(
            TestBattery::from_pvalues(DistributionFamily::Normal, &[(1.2f64, Sign::Positive)])
                .is_err()
        );
        let b = battery(&[0.01], &[1]);
        assert_eq!(
            ProcedureKind::FixedSeqFlat.apply(&b, 0.0),
            Err(ProcedureError::InvalidAlpha { value: 0.0 })
        );
        assert_eq!(
            fixed_seq_directional(&b, ProcedureKind::HolmDir, 0.05),
            Err(ProcedureError::NotFixedSequence {
                kind: ProcedureKind::HolmDir
            })
        );
    }

    #[test]
    fn halving_stops_at_first_failure() {
        // constants: 0.05, 0.025, 0.0125, ...
        let b = battery(&[0.0008, 0.0135, 0.0197, 0.7237], &[1, 1, 1, -1]);
        let d = ProcedureKind::FixedSeqHalving.apply(&b, 0.05).unwrap();
        assert_eq!(d, vec![RejectPositive, RejectPositive, Accept, Accept]);
    }

    #[test]
    fn flat_tests_every_step_at_alpha() {
        let b = battery(&[0.0008, 0.0135, 0.0197, 0.7237, 0.0003], &[1, 1, 1, -1, 1]);
        let d = ProcedureKind::FixedSeqFlat.apply(&b, 0.05).unwrap();
        // stops at 0.7237; the later 0.0003 stays untested
        assert_eq!(
            d,
            vec![RejectPositive, RejectPositive, RejectPositive, Accept, Accept]
        );
    }

    #[test]
    fn remark_variants_use_their_constants() {
        // n = 3, alpha = 0.05: linear 2a/(n+1) = 0.025, two-thirds = 0.0333..,
        // half = 0.025 at every step.
        let b = battery(&[0.03, 0.02, 0.01], &[1, -1, 1]);
        let linear = ProcedureKind::FixedSeqLinear.apply(&b, 0.05).unwrap();
        assert_eq!(linear, vec![Accept, Accept, Accept]);
        let two_thirds = ProcedureKind::FixedSeqTwoThirds.apply(&b, 0.05).unwrap();
        assert_eq!(
            two_thirds,
            vec![RejectPositive, RejectNegative, RejectPositive]
        );
        let half = ProcedureKind::FixedSeqHalf.apply(&b, 0.05).unwrap();
        assert_eq!(half, vec![Accept, Accept, Accept]);
        // boundary: rejection at exact equality
        let eq = battery(&[0.025, 0.5], &[-1, 1]);
        let d = ProcedureKind::FixedSeqHalf.apply(&eq, 0.05).unwrap();
        assert_eq!(d[0], RejectNegative);
    }

    #[test]
    fn single_hypothesis_reduces_to_the_two_sided_test() {
        // At n = 1 every step-1 constant equals alpha, except the two remark
        // variants whose constant is deliberately flat across steps
        // (two-thirds tests at 2a/3, half at a/2 even for a single
        // hypothesis).
        let at_alpha = [
            ProcedureKind::FixedSeqHalving,
            ProcedureKind::FixedSeqFlat,
            ProcedureKind::FixedSeqLinear,
            ProcedureKind::BonferroniDir,
            ProcedureKind::HolmDir,
            ProcedureKind::HochbergDir,
        ];
        for kind in at_alpha {
            let reject = battery(&[0.05], &[-1]);
            let accept = battery(&[0.050001], &[-1]);
            assert_eq!(
                kind.apply(&reject, 0.05).unwrap(),
                vec![RejectNegative],
                "{kind} at p = alpha"
            );
            assert_eq!(kind.apply(&accept, 0.05).unwrap(), vec![Accept], "{kind}");
        }
        for (kind, constant) in [
            (ProcedureKind::FixedSeqTwoThirds, 0.05 * 2.0 / 3.0),
            (ProcedureKind::FixedSeqHalf, 0.025),
        ] {
            let reject = battery(&[constant], &[1]);
            let accept = battery(&[constant + 1e-6], &[1]);
            assert_eq!(kind.apply(&reject, 0.05).unwrap(), vec![RejectPositive]);
            assert_eq!(kind.apply(&accept, 0.05).unwrap(), vec![Accept]);
        }
    }

    #[test]
    fn holm_walks_down_and_stops() {
        let b = battery(
            &[0.0008, 0.0135, 0.0197, 0.7237, 0.0003, 0.2779, 0.0054, 0.8473],
            &[1, 1, 1, -1, 1, 1, 1, 1],
        );
        let d = ProcedureKind::HolmDir.apply(&b, 0.05).unwrap();
        let rejected: Vec<usize> = (0..8).filter(|&i| d[i].is_rejection()).collect();
        assert_eq!(rejected, vec![0, 4, 6]);
    }

    #[test]
    fn hochberg_steps_up() {
        let b = battery(
            &[0.0008, 0.0135, 0.0197, 0.7237, 0.0003, 0.2779, 0.0054, 0.8473],
            &[1, 1, 1, -1, 1, 1, 1, 1],
        );
        let d = ProcedureKind::HochbergDir.apply(&b, 0.05).unwrap();
        let rejected: Vec<usize> = (0..8).filter(|&i| d[i].is_rejection()).collect();
        assert_eq!(rejected, vec![0, 4, 6]);
        // Hochberg rejects everything when the largest p-value passes alpha/1.
        let all = battery(&[0.04, 0.05, 0.045], &[1, -1, 1]);
        let d = ProcedureKind::HochbergDir.apply(&all, 0.05).unwrap();
        assert!(d.iter().all(|x| x.is_rejection()));
        // ... while Holm stops immediately at alpha/3.
        let h = ProcedureKind::HolmDir.apply(&all, 0.05).unwrap();
        assert!(h.iter().all(|x| !x.is_rejection()));
    }

    #[test]
    fn equal_pvalues_are_never_split() {
        // Sorted thresholds increase with position, so tied p-values stand
        // or fall together; the index tie-break only fixes the sort order.
        let b = battery(&[0.02, 0.02, 0.9], &[1, -1, 1]);
        let d = ProcedureKind::HochbergDir.apply(&b, 0.05).unwrap();
        assert_eq!(d, vec![RejectPositive, RejectNegative, Accept]);
        let h = ProcedureKind::HolmDir.apply(&b, 0.05).unwrap();
        assert_eq!(h, vec![Accept, Accept, Accept]);
        // Determinism: repeated application yields identical decisions.
        assert_eq!(d, ProcedureKind::HochbergDir.apply(&b, 0.05).unwrap());
    }

    #[test]
    fn bonferroni_uses_alpha_over_n() {
        let b = battery(&[0.0125, 0.0124, 0.9, 0.5], &[-1, 1, 1, 1]);
        let d = ProcedureKind::BonferroniDir.apply(&b, 0.05).unwrap();
        assert_eq!(d, vec![RejectNegative, RejectPositive, Accept, Accept]);
    }

    #[test]
    fn tally_counts_each_error_type() {
        let truth = TruthVector::new(vec![2.0f64, -1.0, 0.0, 1.0, 0.0]).unwrap();
        let decisions = vec![
            RejectPositive, // correct
            RejectPositive, // type 3
            RejectNegative, // type 1
            Accept,
            Accept,
        ];
        let tally = evaluate_decisions(&decisions, &truth).unwrap();
        assert_eq!(tally.type1, 1);
        assert_eq!(tally.type3, 1);
        assert_eq!(tally.correct_directional_rejections, 1);
        assert!(tally.any_error);
        assert_eq!(truth.false_null_count(), 3);

        let clean = evaluate_decisions(&[Accept; 5], &truth).unwrap();
        assert!(!clean.any_error);
        assert_eq!(
            evaluate_decisions(&[Accept; 3], &truth),
            Err(ProcedureError::LengthMismatch {
                decisions: 3,
                truth: 5
            })
        );
    }

    #[test]
    fn procedure_names_round_trip() {
        for kind in ProcedureKind::ALL {
            assert_eq!(kind.name().parse::<ProcedureKind>().unwrap(), kind);
        }
        assert!("fixedseq".parse::<ProcedureKind>().is_err());
    }
}
