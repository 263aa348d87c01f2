//! Normal distribution truncated to `[0, +inf)`: maximum-likelihood fitting and
//! the CDF used as the MRS probability.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;

use crate::error::{ResnError, Result};

/// Smallest standard deviation a fit may return.
pub const SD_FLOOR: f64 = 1e-12;

/// Standard normal CDF, accurate in the lower tail.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - cdf(z)`, accurate in the upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// `ln cdf(z)` without underflow for very negative `z`.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        normal_cdf(z).ln()
    } else {
        // Asymptotic expansion of the Mills ratio.
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - (-z).ln() - 0.5 * (2.0 * PI).ln() + series.ln()
    }
}

fn log_normal_sf(z: f64) -> f64 {
    log_normal_cdf(-z)
}

/// `P(X <= threshold)` for `X ~ N(mean, sd)` conditioned on `X >= 0`.
pub fn p_truncated_normal(mean: f64, sd: f64, threshold: f64) -> f64 {
    let sd = sd.max(SD_FLOOR);
    if threshold <= 0.0 {
        return 0.0;
    }
    let a = -mean / sd;
    let b = (threshold - mean) / sd;
    let p = if a <= 0.0 {
        // Lower tail values are accurate here and the normalizer is >= 1/2.
        (normal_cdf(b) - normal_cdf(a)) / normal_sf(a)
    } else {
        // Mean below the truncation point: work with survival ratios.
        -(log_normal_sf(b) - log_normal_sf(a)).exp_m1()
    };
    p.clamp(0.0, 1.0)
}

/// Maximum-likelihood `(mean, sd)` of a normal truncated to `[0, +inf)`.
///
/// The likelihood is evaluated in standardized coordinates (sample mean 0,
/// sample sd 1), where it depends on the data only through the truncation
/// point, and minimized with a bounded Nelder-Mead started at the moment
/// estimates. Identical samples return `(value, SD_FLOOR)`.
pub fn fit_truncated_normal(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(ResnError::Empty(format!(
            "truncated normal fit needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(ResnError::Data(format!(
            "truncated normal samples must be finite and >= 0, found {bad}"
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    if samples.iter().all(|&x| x == samples[0]) || !(sd > 0.0) || sd <= SD_FLOOR * 1e-3 {
        return Ok((samples[0], SD_FLOOR));
    }

    let lower = -mean / sd;
    let log_sd_min = (SD_FLOOR / sd).ln();
    let log_sd_max = 50f64.ln();
    let project = |p: [f64; 2]| [p[0].clamp(-50.0, 50.0), p[1].clamp(log_sd_min, log_sd_max)];
    // Per-sample negative log-likelihood, up to a constant.
    let nll = |p: [f64; 2]| {
        let [m, ls] = project(p);
        let s = ls.exp();
        ls + (1.0 + m * m) / (2.0 * s * s) + log_normal_cdf((m - lower) / s)
    };

    let mut best = [0.0, 0.0];
    for _ in 0..3 {
        best = project(nelder_mead(&nll, best, 0.25, 1e-13, 4000));
    }
    let fit_mean = mean + sd * best[0];
    let fit_sd = (sd * best[1].exp()).max(SD_FLOOR);
    Ok((fit_mean, fit_sd))
}

/// Minimal two-dimensional Nelder-Mead with standard coefficients.
fn nelder_mead<F: Fn([f64; 2]) -> f64>(
    f: &F,
    start: [f64; 2],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> [f64; 2] {
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = simplex.map(f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let spread = (values[2] - values[0]).abs();
        let size = simplex[1..]
            .iter()
            .map(|p| (p[0] - simplex[0][0]).abs().max((p[1] - simplex[0][1]).abs()))
            .fold(0.0, f64::max);
        if spread <= tol * (1.0 + values[0].abs()) && size <= 1e-10 {
            break;
        }

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (contracted, fc) = if fr < values[2] {
                let c = lerp(centroid, reflected, 0.5);
                (c, f(c))
            } else {
                let c = lerp(centroid, simplex[2], 0.5);
                (c, f(c))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], 0.5);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    simplex[best]
}
