//! Empirical statistics: histograms, Kolmogorov-Smirnov tests and
//! estimators of the depolarizing strength.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::AnalyticLaw;

/// Asymptotic 1% critical coefficient of the Kolmogorov distribution.
pub const KS_COEFF_1PCT: f64 = 1.63;

/// Density-normalized histogram with an out-of-range tally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Bin counts divided by `count * width`; they integrate to
    /// `1 - overflow / count`.
    pub densities: Vec<f64>,
    /// All samples seen, including overflow.
    pub count: u64,
    /// Samples outside `[edges[0], edges[last]]`, and NaNs.
    pub overflow: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Integral of the density over all bins.
    pub fn mass(&self) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.densities)
            .map(|(w, d)| d * (w[1] - w[0]))
            .sum()
    }
}

/// Result of a Kolmogorov-Smirnov test at the 1% level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_statistic: f64,
    pub ks_critical_1pct: f64,
    pub n_samples: u64,
    pub passed: bool,
    /// Where the supremum deviation is attained.
    pub sup_location: f64,
}

impl GofReport {
    fn new(d: f64, critical: f64, n_samples: u64, at: f64) -> Self {
        GofReport {
            ks_statistic: d,
            ks_critical_1pct: critical,
            n_samples,
            passed: d < critical,
            sup_location: at,
        }
    }
}

/// Uniform-width histogram on `[lo, hi]`; the last bin is closed.
pub fn histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let (lo, hi) = range;
    if samples.is_empty() {
        return Err(Error::arg("histogram of an empty sample"));
    }
    if bins == 0 || !(lo < hi) {
        return Err(Error::arg(format!(
            "need bins >= 1 and lo < hi, got {bins} bins on ({lo}, {hi})"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut overflow = 0u64;
    for &x in samples {
        if !(lo..=hi).contains(&x) {
            overflow += 1;
            continue;
        }
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let total = samples.len() as f64;
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (total * (w[1] - w[0])))
        .collect();
    Ok(Histogram {
        edges,
        densities,
        count: samples.len() as u64,
        overflow,
    })
}

/// Default figure range in scaled coordinates: `[0, max(10, lambda + 8(1 - lambda))]`.
pub fn default_scaled_range(lambda: f64) -> (f64, f64) {
    (0.0, f64::max(10.0, lambda + 8.0 * (1.0 - lambda)))
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// One-sample KS test of `samples` against `law`.
pub fn ks_one_sample(samples: &[f64], law: &AnalyticLaw) -> Result<GofReport> {
    ks_one_sample_cdf(samples, |x| law.cdf(x))
}

/// One-sample KS test against an arbitrary continuous CDF.
pub fn ks_one_sample_cdf(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<GofReport> {
    if samples.is_empty() {
        return Err(Error::arg("KS test of an empty sample"));
    }
    let xs = sorted(samples);
    let s = xs.len() as f64;
    let (mut d, mut at) = (0.0f64, xs[0]);
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / s - f;
        let below = f - i as f64 / s;
        let dev = above.max(below);
        if dev > d {
            d = dev;
            at = x;
        }
    }
    Ok(GofReport::new(
        d,
        KS_COEFF_1PCT / s.sqrt(),
        xs.len() as u64,
        at,
    ))
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<GofReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::arg("KS test of an empty sample"));
    }
    let xs = sorted(a);
    let ys = sorted(b);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let (mut d, mut at) = (0.0f64, xs[0].min(ys[0]));
    while i < xs.len() && j < ys.len() {
        // Step past every copy of the smaller value on both sides so ties
        // move the two ECDFs together.
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        let dev = (i as f64 / na - j as f64 / nb).abs();
        if dev > d {
            d = dev;
            at = v;
        }
    }
    let critical = KS_COEFF_1PCT * ((na + nb) / (na * nb)).sqrt();
    Ok(GofReport::new(
        d,
        critical,
        (xs.len() + ys.len()) as u64,
        at,
    ))
}

/// Gap estimator: the smallest scaled probability observed. For exactly
/// depolarized inputs it never falls below `lambda` and approaches it from
/// above as the sample grows. Hardware data with readout smearing can land
/// inside the gap.
pub fn estimate_gap(samples: &[f64]) -> Result<f64> {
    samples
        .iter()
        .copied()
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::arg("gap estimate of an empty sample"))
}

/// Moment estimate `1 - sqrt(var / var_ideal)`, clamped to [0, 1], where
/// `var_ideal` is the scaled variance of the noiseless subsystem law for
/// dimensions `(N, M, K)`.
pub fn estimate_lambda_mean(samples: &[f64], shape: (u64, u64, u64)) -> Result<f64> {
    let (n, m, k) = shape;
    if samples.len() < 100 {
        return Err(Error::arg(format!(
            "moment estimate needs >= 100 samples, got {}",
            samples.len()
        )));
    }
    if m * k != n {
        return Err(Error::arg(format!(
            "inconsistent shape N={n}, M={m}, K={k}"
        )));
    }
    let (_, var_ideal) = AnalyticLaw::subsystem_beta(n, m)?.moments();
    let (_, var) = mean_var(samples);
    Ok((1.0 - (var / var_ideal).sqrt()).clamp(0.0, 1.0))
}

/// Sample mean and unbiased variance.
pub fn mean_var(samples: &[f64]) -> (f64, f64) {
    let s = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / s;
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    let var = if samples.len() > 1 {
        ss / (s - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Pearson correlation of paired samples; NaN when either side is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::arg(
            "correlation needs two equal-length samples of size >= 2",
        ));
    }
    let (mx, _) = mean_var(xs);
    let (my, _) = mean_var(ys);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok(sxy / (sxx * syy).sqrt())
}
