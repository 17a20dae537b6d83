//! Analytic error-rate oracles for the two-hypothesis case.
//!
//! With n = 2, H_1 false (shift theta1) and H_2 true, the flat
//! fixed-sequence procedure's mixed-directional FWER has a closed form in
//! the joint CDF F of (T_1, T_2). Writing c1 < 0 < c2 for the two-sided
//! critical pair at level a:
//!
//! ```text
//! theta1 > 0:  a + F1(c1) - F1(c2) + F(c2, c2) - F(c2, c1)
//! theta1 < 0:  1 + F1(c1) - F1(c2) + F(c1, c1) - F(c1, c2)
//! ```
//!
//! where F1 is the marginal CDF of T_1. Under independence this collapses
//! to `a + F1(c1) - a*F1(c2)` (theta1 > 0) and `1 + a*F1(c1) - F1(c2)`
//! (theta1 < 0).
//!
//! The same marginal algebra yields the counterexample probe: the flat
//! procedure keeps control iff `F1(-c) <= a * F1(c)`, an inequality the
//! Cauchy family breaks at large theta1 because it lacks a monotone
//! likelihood ratio.
//!
//! The sharpness side: quantiles `q_i = Phi^{-1}(1 - a/2^i)` drive the
//! worst-case chain under which the halving procedure's error probability
//! telescopes to exactly `sum_{j<k} a/2^j + a/2^{k-1} = a`.

use thiserror::Error;

use crate::dist::{DistError, DistributionFamily};
use crate::scalar::{count, lit, Scalar};

/// Errors from oracle construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("rho must lie in [0, 1) for the equicorrelated evaluator, got {value}")]
    InvalidRho { value: f64 },
    #[error("theta1 must be finite and nonzero, got {value}")]
    InvalidTheta { value: f64 },
    #[error("the two-hypothesis oracle requires theta2 = 0, got {value}")]
    SecondShiftNotNull { value: f64 },
    #[error("quadrature order must be at least 1")]
    BadQuadratureOrder,
    #[error("Gauss-Hermite node search failed to converge at order {order}")]
    QuadratureDiverged { order: usize },
    #[error("chain length k must be at least 1")]
    BadChainLength,
}

fn check_theta1<R: Scalar>(theta1: R) -> Result<(), OracleError> {
    if theta1.is_finite() && theta1 != R::zero() {
        Ok(())
    } else {
        Err(OracleError::InvalidTheta {
            value: theta1.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Gauss-Hermite nodes and weights for `integral e^{-t^2} f(t) dt`,
/// computed by Newton iteration on the orthonormal Hermite recurrence.
pub(crate) fn gauss_hermite<R: Scalar>(order: usize) -> Result<Vec<(R, R)>, OracleError> {
    if order == 0 {
        return Err(OracleError::BadQuadratureOrder);
    }
    let n = order;
    let nf = count::<R>(n as u64);
    let two = lit::<R>(2.0);
    // pi^(-1/4), leading value of the orthonormal recurrence.
    let pim4 = lit::<R>(0.751_125_544_464_942_5);
    let eps = R::epsilon() * lit(50.0);
    let max_iter = 60;

    let m = n.div_ceil(2);
    let mut nodes = vec![(R::zero(), R::zero()); n];
    let mut z = R::zero();
    for i in 0..m {
        // Stroud-Secrest style initial guesses, refined from previous roots.
        z = match i {
            0 => {
                let a = (two * nf + R::one()).sqrt();
                a - lit::<R>(1.85575) * (two * nf + R::one()).powf(lit(-1.0 / 6.0))
            }
            1 => z - lit::<R>(1.14) * nf.powf(lit(0.426)) / z,
            2 => lit::<R>(1.86) * z - lit::<R>(0.86) * nodes[0].0,
            3 => lit::<R>(1.91) * z - lit::<R>(0.91) * nodes[1].0,
            _ => two * z - nodes[i - 2].0,
        };
        let mut pp = R::zero();
        let mut converged = false;
        for _ in 0..max_iter {
            let mut p1 = pim4;
            let mut p2 = R::zero();
            for j in 1..=n {
                let jf = count::<R>(j as u64);
                let p3 = p2;
                p2 = p1;
                p1 = z * (two / jf).sqrt() * p2 - ((jf - R::one()) / jf).sqrt() * p3;
            }
            pp = (two * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(OracleError::QuadratureDiverged { order });
        }
        // Ladder integrity: each root must sit strictly below its
        // predecessor and stay on the nonnegative side (the middle root of
        // an odd rule converges to zero up to roundoff). A guess that
        // escapes into the mirror basin at very large orders is caught
        // here instead of corrupting the rule silently.
        if (i > 0 && z >= nodes[i - 1].0) || z < -eps {
            return Err(OracleError::QuadratureDiverged { order });
        }
        let w = two / (pp * pp);
        nodes[i] = (z, w);
        nodes[n - 1 - i] = (-z, w);
    }
    Ok(nodes)
}

/// Default quadrature order of the equicorrelated evaluator.
///
/// Over the correlations the closed-form checks operate at (rho <= 0.5),
/// doubling this order moves the computed probabilities by less than
/// 1e-9; convergence slows as rho approaches 1 because the conditional
/// CDF factors steepen like 1/sqrt(1-rho), so stronger correlation needs
/// [`BivariateCdf::equicorrelated_normal_with_order`] with a higher order
/// (128 restores the 1e-9 bar at rho = 0.9). The Newton ladder that
/// locates the nodes is reliable up to order 192 and reports an error
/// beyond that rather than risk a corrupt rule.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

#[derive(Debug, Clone)]
enum BivariateModel<R> {
    Independent {
        family: DistributionFamily,
    },
    Equicorrelated {
        rho: R,
        nodes: Vec<(R, R)>,
    },
}

/// Joint CDF evaluator for a pair of statistics (T_1, T_2).
///
/// Two models: independent product with either marginal family, and the
/// one-factor equicorrelated normal model
/// `T_i = theta_i + sqrt(rho) Z_0 + sqrt(1-rho) Z_i`, whose rectangle
/// probability is reduced to a single Gauss-Hermite integral by
/// conditioning on the shared factor.
#[derive(Debug, Clone)]
pub struct BivariateCdf<R> {
    thetas: (R, R),
    model: BivariateModel<R>,
}

impl<R: Scalar> BivariateCdf<R> {
    /// Independent statistics with the given marginal family.
    pub fn independent(family: DistributionFamily, thetas: (R, R)) -> Self {
        BivariateCdf {
            thetas,
            model: BivariateModel::Independent { family },
        }
    }

    /// Equicorrelated normal pair at the default quadrature order.
    pub fn equicorrelated_normal(rho: R, thetas: (R, R)) -> Result<Self, OracleError> {
        Self::equicorrelated_normal_with_order(rho, thetas, DEFAULT_QUADRATURE_ORDER)
    }

    /// Equicorrelated normal pair with an explicit quadrature order, used
    /// by the convergence checks.
    pub fn equicorrelated_normal_with_order(
        rho: R,
        thetas: (R, R),
        order: usize,
    ) -> Result<Self, OracleError> {
        if !(rho >= R::zero() && rho < R::one()) {
            return Err(OracleError::InvalidRho {
                value: rho.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(BivariateCdf {
            thetas,
            model: BivariateModel::Equicorrelated {
                rho,
                nodes: gauss_hermite(order)?,
            },
        })
    }

    pub fn thetas(&self) -> (R, R) {
        self.thetas
    }

    /// Marginal family of each coordinate.
    pub fn marginal_family(&self) -> DistributionFamily {
        match self.model {
            BivariateModel::Independent { family } => family,
            BivariateModel::Equicorrelated { .. } => DistributionFamily::Normal,
        }
    }

    /// Pr(T_1 <= x, T_2 <= y).
    pub fn eval(&self, x: R, y: R) -> R {
        let (theta1, theta2) = self.thetas;
        match &self.model {
            BivariateModel::Independent { family } => {
                family.cdf(theta1, x) * family.cdf(theta2, y)
            }
            BivariateModel::Equicorrelated { rho, nodes } => {
                let normal = DistributionFamily::Normal;
                let scale = (R::one() - *rho).sqrt();
                // z = sqrt(2) t maps the standard normal factor onto the
                // e^{-t^2} weight; the 1/sqrt(pi) prefactor normalizes it.
                let factor = (*rho * lit(2.0)).sqrt();
                let mut sum = R::zero();
                for &(t, w) in nodes {
                    let shared = factor * t;
                    let a = normal.cdf(R::zero(), (x - theta1 - shared) / scale);
                    let b = normal.cdf(R::zero(), (y - theta2 - shared) / scale);
                    sum = sum + w * a * b;
                }
                (sum * R::FRAC_1_PI().sqrt()).max(R::zero()).min(R::one())
            }
        }
    }
}

/// mdFWER of the flat fixed-sequence procedure at n = 2 under independent
/// statistics, H_1 false with shift `theta1`, H_2 true.
pub fn mdfwer_two_indep<R: Scalar>(
    family: DistributionFamily,
    theta1: R,
    alpha: R,
) -> Result<R, OracleError> {
    check_theta1(theta1)?;
    let pair = family.critical_pair(alpha)?;
    let f1 = family.cdf(theta1, pair.lower);
    let f2 = family.cdf(theta1, pair.upper);
    Ok(if theta1 > R::zero() {
        alpha + f1 - alpha * f2
    } else {
        R::one() + alpha * f1 - f2
    })
}

/// mdFWER of the flat fixed-sequence procedure at n = 2 under the joint
/// model carried by `evaluator` (its shifts must be (theta1, 0)).
pub fn mdfwer_two_dependent<R: Scalar>(
    evaluator: &BivariateCdf<R>,
    alpha: R,
) -> Result<R, OracleError> {
    let (theta1, theta2) = evaluator.thetas();
    if theta2 != R::zero() {
        return Err(OracleError::SecondShiftNotNull {
            value: theta2.to_f64().unwrap_or(f64::NAN),
        });
    }
    check_theta1(theta1)?;
    let family = evaluator.marginal_family();
    let pair = family.critical_pair(alpha)?;
    let (c1, c2) = (pair.lower, pair.upper);
    let f1 = family.cdf(theta1, c1);
    let f2 = family.cdf(theta1, c2);
    Ok(if theta1 > R::zero() {
        alpha + f1 - f2 + evaluator.eval(c2, c2) - evaluator.eval(c2, c1)
    } else {
        R::one() + f1 - f2 + evaluator.eval(c1, c1) - evaluator.eval(c1, c2)
    })
}

/// Outcome of [`counterexample_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleReport<R> {
    /// Two-sided critical value c = F_0^{-1}(1 - alpha/2).
    pub critical_value: R,
    /// F_{theta1}(-c): probability of a directional error at step 1.
    pub lhs: R,
    /// alpha * F_{theta1}(c): the budget the control argument needs.
    pub rhs: R,
    /// True when lhs > rhs, i.e. the flat procedure's control fails.
    pub violated: bool,
    /// mdFWER of the flat procedure at n = 2: alpha + lhs - rhs.
    pub mdfwer: R,
}

/// Probes the inequality `F_{theta1}(-c) <= alpha * F_{theta1}(c)` that a
/// monotone likelihood ratio guarantees; requires theta1 > 0.
pub fn counterexample_check<R: Scalar>(
    family: DistributionFamily,
    alpha: R,
    theta1: R,
) -> Result<CounterexampleReport<R>, OracleError> {
    check_theta1(theta1)?;
    if theta1 < R::zero() {
        return Err(OracleError::InvalidTheta {
            value: theta1.to_f64().unwrap_or(f64::NAN),
        });
    }
    let pair = family.critical_pair(alpha)?;
    let c = pair.upper;
    let lhs = family.cdf(theta1, -c);
    let rhs = alpha * family.cdf(theta1, c);
    Ok(CounterexampleReport {
        critical_value: c,
        lhs,
        rhs,
        violated: lhs > rhs,
        mdfwer: alpha + lhs - rhs,
    })
}

/// The Cauchy instance of [`counterexample_check`]: the family without a
/// monotone likelihood ratio, where the violation appears at large theta1.
pub fn cauchy_counterexample<R: Scalar>(
    alpha: R,
    theta1: R,
) -> Result<CounterexampleReport<R>, OracleError> {
    counterexample_check(DistributionFamily::Cauchy, alpha, theta1)
}

/// Quantities of the worst-case chain at length k.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessChain<R> {
    pub alpha: R,
    /// q_i = Phi^{-1}(1 - alpha/2^i), i = 1..=k; strictly increasing.
    pub quantiles: Vec<R>,
    /// Error-event probabilities alpha/2^j for j = 1..k-1, then the final
    /// alpha/2^{k-1}.
    pub components: Vec<R>,
    /// Telescoping total of `components`; equals alpha exactly.
    pub total: R,
}

/// Quantile ladder and the exact error budget of the worst-case chain.
pub fn sharpness_chain_quantiles<R: Scalar>(
    k: usize,
    alpha: R,
) -> Result<SharpnessChain<R>, OracleError> {
    if k == 0 {
        return Err(OracleError::BadChainLength);
    }
    let normal = DistributionFamily::Normal;
    // Validates alpha as a side effect.
    normal.critical_pair(alpha)?;
    let two = lit::<R>(2.0);
    let mut quantiles = Vec::with_capacity(k);
    let mut tail = alpha;
    for _ in 1..=k {
        tail = tail / two; // alpha / 2^i, an exact exponent shift
        quantiles.push(-normal.quantile(tail)?);
    }
    let mut components: Vec<R> = (1..k).map(|j| alpha / two.powi(j as i32)).collect();
    components.push(alpha / two.powi(k as i32 - 1));
    // Summing smallest-first pairs equal magnitudes at every step, so the
    // telescoping total is exact in floating point: a/2^{k-1} + a/2^{k-1}
    // = a/2^{k-2}, and so on back up to a.
    let total = components.iter().rev().fold(R::zero(), |acc, &c| acc + c);
    Ok(SharpnessChain {
        alpha,
        quantiles,
        components,
        total,
    })
}
