//! Independent reference implementations used to cross-check the library
//! numerics. Deliberately naive: a Maclaurin series and a Laplace
//! continued fraction for the error function, bisection for quantiles,
//! and a Kolmogorov-Smirnov distance helper. None of this shares code
//! with the crate under test.

/// Maclaurin series for erf, accurate near the origin (|x| <= 2).
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= -x2 / n as f64;
        let contribution = term / (2 * n + 1) as f64;
        sum += contribution;
        if contribution.abs() < 1e-20 * sum.abs() + 1e-300 {
            break;
        }
        assert!(n < 200, "series failed to converge at x = {x}");
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// Laplace continued fraction for erfc, accurate in the tail (x >= 2).
pub fn erfc_continued_fraction(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut acc = 0.0;
    for i in (1..160).rev() {
        let den = if (i + 1) % 2 == 1 { x } else { 2.0 * x };
        acc = i as f64 / (den + acc);
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / (x + acc)
}

/// erfc on the whole line, dispatching between the two expansions.
pub fn erfc_oracle(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_oracle(-x)
    } else if x <= 2.0 {
        1.0 - erf_series(x)
    } else if x > 27.0 {
        0.0
    } else {
        erfc_continued_fraction(x)
    }
}

/// Standard normal CDF built on the reference erfc.
pub fn normal_cdf_oracle(x: f64) -> f64 {
    0.5 * erfc_oracle(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard Cauchy CDF; the tail uses an arctangent series in 1/x rather
/// than a library arctangent, keeping the route independent.
pub fn cauchy_cdf_oracle(x: f64) -> f64 {
    if x.abs() <= 2.0 {
        return 0.5 + x.atan() / std::f64::consts::PI;
    }
    // atan(1/|x|) by Maclaurin series, |1/x| <= 1/2.
    let t = 1.0 / x.abs();
    let t2 = t * t;
    let mut term = t;
    let mut sum = t;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= -t2;
        let contribution = term / (2 * k + 1) as f64;
        sum += contribution;
        if contribution.abs() < 1e-20 * sum {
            break;
        }
        assert!(k < 100);
    }
    let tail = sum / std::f64::consts::PI;
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Quantile by bisection on a monotone CDF.
pub fn bisect_quantile(cdf: impl Fn(f64) -> f64, u: f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(cdf(lo) < u && u < cdf(hi), "u = {u} not bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Kolmogorov-Smirnov distance of a sorted sample against the
/// uniform distribution on (0, 1).
pub fn ks_distance_uniform(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let above = (i as f64 + 1.0) / n - u;
            let below = u - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// KS distance of a sorted sample against an arbitrary continuous CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let u = cdf(x);
            let above = (i as f64 + 1.0) / n - u;
            let below = u - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}
