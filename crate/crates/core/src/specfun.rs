//! Special-function kernel: Gauss-Hermite rules, the standard normal CDF,
//! the Gauss hypergeometric function on the real line left of 1, and an
//! adaptive Gauss-Kronrod integrator.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{invalid, Error, Result};

/// Largest Gauss-Hermite order accepted by [`gauss_hermite`].
pub const MAX_HERMITE_ORDER: usize = 200;

/// Series truncation: a term is dropped once it is below this fraction of the partial sum.
const SERIES_REL_EPS: f64 = 1e-16;
/// Series that have not met the truncation criterion after this many terms are reported as divergent.
const SERIES_MAX_TERMS: usize = 10_000;

/// Nodes and weights of an `order`-point Gauss-Hermite rule for the weight `exp(-x^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    /// Roots of the physicists' Hermite polynomial, strictly increasing.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Approximates `∫ exp(-x^2) f(x) dx` over the real line.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the Gauss-Hermite rule of the given order.
///
/// Roots are found by Newton iteration on the orthonormal Hermite recurrence,
/// seeded with the usual asymptotic guesses for the largest roots and by
/// extrapolation from previously found roots for the rest, with the roots
/// already found deflated out of each Newton step. Only the positive
/// half is iterated; the negative half is mirrored so the rule is exactly
/// symmetric.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_HERMITE_ORDER {
        return Err(invalid(format!(
            "Gauss-Hermite order must be in 1..={MAX_HERMITE_ORDER}, got {order}"
        )));
    }
    let n = order;
    let nf = n as f64;
    let half = n.div_ceil(2);
    let pim4 = PI.powf(-0.25);
    // Positive roots in decreasing order with their weights.
    let mut roots = vec![0.0; half];
    let mut weights = vec![0.0; half];
    let mut z = 0.0_f64;

    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = orthonormal_hermite(n, z, pim4);
            // Maehly deflation keeps the iteration off roots already found.
            let repel: f64 = roots[..i].iter().map(|r| 1.0 / (z - r)).sum();
            let step = p / (dp - p * repel);
            let mut next = z - step;
            // Roots are found in decreasing order; keep the iterate below the last one and above 0.
            if i > 0 && next >= roots[i - 1] {
                next = 0.5 * (z + roots[i - 1]);
            } else if next < 0.0 {
                next = 0.5 * z;
            }
            z = next;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(invalid(format!(
                "Gauss-Hermite Newton iteration failed for root {i} of order {n}"
            )));
        }
        if n % 2 == 1 && i == half - 1 {
            // Middle root of an odd rule.
            z = 0.0;
        }
        let derivative = orthonormal_hermite(n, z, pim4).1;
        roots[i] = z;
        weights[i] = 2.0 / (derivative * derivative);
    }

    let mut nodes = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..half {
        nodes.push(-roots[i]);
        w.push(weights[i]);
    }
    let mirrored = if n % 2 == 1 { half - 1 } else { half };
    for i in (0..mirrored).rev() {
        nodes.push(roots[i]);
        w.push(weights[i]);
    }
    Ok(QuadratureRule {
        order: n,
        nodes,
        weights: w,
    })
}

/// Orthonormal Hermite function of degree `n` at `x` (without the Gaussian factor)
/// and its derivative scaled so that the weight is `2 / dp^2`.
fn orthonormal_hermite(n: usize, x: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = x * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Standard normal cumulative distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z < 1`.
///
/// `0 <= z < 1` is summed directly. For `-1 <= z < 0` the Pfaff
/// transformation maps the argument to `z / (z - 1)` in `(0, 1/2]`. For
/// `z < -1` the `1/z` connection formula is used when `b - a` is not an
/// integer (each resulting series is then evaluated through the Pfaff branch);
/// otherwise the Pfaff series is summed directly and may run out of terms.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let fail = |reason| Error::Hypergeometric { a, b, c, z, reason };
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(fail("non-finite argument"));
    }
    if is_nonpositive_integer(c) {
        return Err(fail("c is a nonpositive integer"));
    }
    if z >= 1.0 {
        return Err(fail("argument outside (-inf, 1)"));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        // Terminating polynomial: summed exactly as written.
        return series(a, b, c, z).map_err(fail);
    }
    if z > 0.0 {
        return series(a, b, c, z).map_err(fail);
    }
    if z >= -1.0 || is_integer(b - a) {
        let w = z / (z - 1.0);
        let s = series(a, c - b, c, w).map_err(fail)?;
        return Ok((1.0 - z).powf(-a) * s);
    }

    let mz = -z;
    let inv = 1.0 / z;
    let gc = libm::tgamma(c);
    let coef_a = gc * libm::tgamma(b - a) * rgamma(b) * rgamma(c - a);
    let coef_b = gc * libm::tgamma(a - b) * rgamma(a) * rgamma(c - b);
    let mut total = 0.0;
    if coef_a != 0.0 {
        total += coef_a * mz.powf(-a) * hyp2f1(a, a - c + 1.0, a - b + 1.0, inv)?;
    }
    if coef_b != 0.0 {
        total += coef_b * mz.powf(-b) * hyp2f1(b, b - c + 1.0, b - a + 1.0, inv)?;
    }
    if !total.is_finite() {
        return Err(fail("connection coefficients overflowed"));
    }
    Ok(total)
}

/// Direct hypergeometric series, valid for `|z| < 1` or terminating parameters.
fn series(a: f64, b: f64, c: f64, z: f64) -> std::result::Result<f64, &'static str> {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    // Coefficients can pass close to zero while n is below the parameter scale.
    let warmup = a.abs() + b.abs() + c.abs();
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if !sum.is_finite() {
            return Err("series overflowed");
        }
        if nf > warmup && term.abs() <= SERIES_REL_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err("series did not meet tolerance within the term limit")
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && is_integer(x)
}

fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4_000;

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[lo, hi]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate is within `max(abs_tol, rel_tol * |integral|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(invalid(format!(
            "integration bounds must be finite: [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let (value, err) = kronrod15(&mut f, lo, hi);
    let mut intervals = vec![(lo, hi, value, err)];
    let mut total = value;
    let mut total_err = err;
    loop {
        if !total.is_finite() {
            break;
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            break;
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (a, b, v, e) = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval cannot be split further in double precision.
            intervals.push((a, b, v, e));
            break;
        }
        let (v1, e1) = kronrod15(&mut f, a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, b);
        total += v1 + v2 - v;
        total_err += e1 + e2 - e;
        intervals.push((a, mid, v1, e1));
        intervals.push((mid, b, v2, e2));
    }
    // Re-sum to shed accumulated update rounding before reporting.
    let estimate: f64 = intervals.iter().map(|i| i.2).sum();
    let error_estimate: f64 = intervals.iter().map(|i| i.3).sum();
    if estimate.is_finite() && error_estimate <= abs_tol.max(rel_tol * estimate.abs()) {
        return Ok(estimate);
    }
    Err(Error::Integration {
        lo,
        hi,
        estimate,
        error_estimate,
        intervals: intervals.len(),
    })
}

/// [`integrate`] over consecutive sub-intervals split at `breaks` (sorted, inside `[lo, hi]`).
pub fn integrate_piecewise<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    let mut points = vec![lo];
    points.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
    points.push(hi);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut total = 0.0;
    for pair in points.windows(2) {
        total += integrate(&mut f, pair[0], pair[1], rel_tol, abs_tol)?;
    }
    Ok(total)
}
