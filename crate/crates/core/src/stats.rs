//! Two-sample Kolmogorov-Smirnov test and percentile bootstrap intervals.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::Rng;

use crate::nullmodel::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsError {
    EmptySample,
    NonFinite,
    InvalidLevel,
    NoIterations,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatsError::EmptySample => "sample is empty",
            StatsError::NonFinite => "sample contains NaN or infinite values",
            StatsError::InvalidLevel => "confidence level must lie strictly between 0 and 1",
            StatsError::NoIterations => "bootstrap needs at least one iteration",
        })
    }
}

impl core::error::Error for StatsError {}

/// How the KS p-value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KsMethod {
    /// Limiting Kolmogorov distribution at effective size `n1·n2/(n1+n2)`.
    #[default]
    Asymptotic,
    /// Lattice-path count of the exact null distribution (continuous data).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

impl KsResult {
    pub fn stars(&self) -> &'static str {
        star_code(self.p_value)
    }
}

/// `*` below 0.05, `**` below 0.01, `***` below 0.001.
pub fn star_code(p_value: f64) -> &'static str {
    if p_value < 0.001 {
        "***"
    } else if p_value < 0.01 {
        "**"
    } else if p_value < 0.05 {
        "*"
    } else {
        ""
    }
}

pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<KsResult, StatsError> {
    ks_two_sample_with(x, y, KsMethod::Asymptotic)
}

pub fn ks_two_sample_with(x: &[f64], y: &[f64], method: KsMethod) -> Result<KsResult, StatsError> {
    let statistic = ks_statistic(x, y)?;
    let (n1, n2) = (x.len(), y.len());
    let p_value = match method {
        KsMethod::Asymptotic => {
            let en = (n1 * n2) as f64 / (n1 + n2) as f64;
            kolmogorov_sf(libm::sqrt(en) * statistic)
        }
        KsMethod::Exact => ks_exact_sf(n1, n2, statistic),
    };
    Ok(KsResult {
        statistic,
        p_value,
        n1,
        n2,
    })
}

/// Largest vertical gap between the two empirical CDFs.
pub fn ks_statistic(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    Ok(d)
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let sf = if lambda < 1.18 {
        // Jacobi theta form converges fast for small arguments.
        let k = -PI * PI / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for j in 1..=20u32 {
            let m = f64::from(2 * j - 1);
            let term = libm::exp(m * m * k);
            cdf += term;
            if term < 1e-18 {
                break;
            }
        }
        1.0 - libm::sqrt(2.0 * PI) / lambda * cdf
    } else {
        let mut sum = 0.0;
        for j in 1..=100u32 {
            let jf = f64::from(j);
            let term = libm::exp(-2.0 * jf * jf * lambda * lambda);
            sum += if j % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        2.0 * sum
    };
    sf.clamp(0.0, 1.0)
}

/// Exact `P(D >= d)` for sample sizes `n1`, `n2`, assuming no ties.
///
/// Walks the `n1 × n2` lattice keeping the probability that a uniformly
/// random monotone path stays strictly inside `|i/n1 - j/n2| < d`.
pub fn ks_exact_sf(n1: usize, n2: usize, d: f64) -> f64 {
    let scale = (n1 * n2) as f64;
    let threshold = libm::round(d * scale) as i64;
    if threshold <= 0 {
        return 1.0;
    }
    let (n1i, n2i) = (n1 as i64, n2 as i64);
    let inside = |i: usize, j: usize| (i as i64 * n2i - j as i64 * n1i).abs() < threshold;
    let mut row = alloc::vec![0.0f64; n2 + 1];
    for i in 0..=n1 {
        for j in 0..=n2 {
            row[j] = if !inside(i, j) {
                0.0
            } else if i == 0 && j == 0 {
                1.0
            } else {
                let from_up = if i > 0 { i as f64 * row[j] } else { 0.0 };
                let from_left = if j > 0 { j as f64 * row[j - 1] } else { 0.0 };
                (from_up + from_left) / (i + j) as f64
            };
        }
    }
    (1.0 - row[n2]).clamp(0.0, 1.0)
}

/// One bootstrap resample (with replacement) driven by its own stream.
pub fn resample<T: Clone>(values: &[T], seed: u64, iteration: u64) -> Vec<T> {
    let mut rng = stream_rng(seed, iteration, "bootstrap");
    (0..values.len())
        .map(|_| values[rng.random_range(0..values.len())].clone())
        .collect()
}

/// Percentile interval at `level` with linear interpolation between order
/// statistics. Sorts `stats` in place.
pub fn percentile_interval(stats: &mut [f64], level: f64) -> Result<(f64, f64), StatsError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidLevel);
    }
    if stats.is_empty() {
        return Err(StatsError::NoIterations);
    }
    if stats.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    stats.sort_unstable_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((
        quantile_sorted(stats, tail),
        quantile_sorted(stats, 1.0 - tail),
    ))
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let lo_v = sorted[lo];
    let hi_v = sorted[hi];
    if lo_v == hi_v {
        lo_v
    } else {
        lo_v + (h - lo as f64) * (hi_v - lo_v)
    }
}

/// Percentile bootstrap confidence interval of `statistic`.
pub fn bootstrap_ci<T, F>(
    values: &[T],
    statistic: F,
    iterations: u32,
    level: f64,
    seed: u64,
) -> Result<(f64, f64), StatsError>
where
    T: Clone,
    F: Fn(&[T]) -> f64,
{
    let mut out = bootstrap_cis(
        values,
        |s| alloc::vec![statistic(s)],
        iterations,
        level,
        seed,
    )?;
    Ok(out.remove(0))
}

/// Intervals for a vector-valued statistic, all from the same resamples.
pub fn bootstrap_cis<T, F>(
    values: &[T],
    statistic: F,
    iterations: u32,
    level: f64,
    seed: u64,
) -> Result<Vec<(f64, f64)>, StatsError>
where
    T: Clone,
    F: Fn(&[T]) -> Vec<f64>,
{
    if values.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if iterations == 0 {
        return Err(StatsError::NoIterations);
    }
    let draws: Vec<Vec<f64>> = (0..iterations)
        .map(|i| statistic(&resample(values, seed, u64::from(i))))
        .collect();
    collect_intervals(draws, level)
}

/// Transpose per-iteration statistic vectors and take percentile intervals.
pub fn collect_intervals(draws: Vec<Vec<f64>>, level: f64) -> Result<Vec<(f64, f64)>, StatsError> {
    let width = draws.first().map_or(0, Vec::len);
    (0..width)
        .map(|k| {
            let mut column: Vec<f64> = draws.iter().map(|d| d[k]).collect();
            percentile_interval(&mut column, level)
        })
        .collect()
}

/// Arithmetic mean with Neumaier-compensated summation, kept inside
/// `[min, max]` so a constant sample averages to exactly that constant.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sum = 0.0;
    let mut carry = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
        let t = sum + v;
        if libm::fabs(sum) >= libm::fabs(v) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    ((sum + carry) / values.len() as f64).clamp(lo, hi)
}
