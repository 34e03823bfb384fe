//! Monte Carlo estimates of the outage probability, rate moments and the
//! eigenvalue histogram.
//!
//! Trial `t` draws its channel from a ChaCha8 stream keyed by `(seed, t)`, and
//! per-block partial results are reduced in block order, so every estimate is
//! a pure function of `(seed, trials)` whatever the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::ensemble::{
    mutual_information, sample_haar_columns, spectrum, truncate, ChannelDims, SnrParam,
};
use crate::error::{Error, Result};

const BLOCK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub dims: ChannelDims,
    pub snr: SnrParam,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(dims: ChannelDims, snr: SnrParam, trials: u64, seed: u64, workers: usize) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if workers == 0 {
            return Err(Error::Domain("workers must be at least 1".into()));
        }
        Ok(Self { dims, snr, trials, seed, workers })
    }
}

/// Which route produced an [`OutageEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    Exact,
    Ld,
    Gauss,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Exact => "exact",
            Method::Ld => "ld",
            Method::Gauss => "gauss",
        }
    }
}

/// Sample size behind a Monte Carlo estimate, or the numerical tolerance
/// of a deterministic one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Trials { trials: u64, hits: u64 },
    Tolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub method: Method,
    pub precision: Precision,
}

impl OutageEstimate {
    /// Point value from a deterministic solver; the interval collapses.
    pub fn deterministic(p: f64, method: Method, tolerance: f64) -> Self {
        Self { p, ci_low: p, ci_high: p, method, precision: Precision::Tolerance(tolerance) }
    }

    fn from_counts(hits: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = clopper_pearson(hits, trials, 0.05);
        Self {
            p: hits as f64 / trials as f64,
            ci_low,
            ci_high,
            method: Method::Mc,
            precision: Precision::Trials { trials, hits },
        }
    }

    /// Binomial standard error `sqrt(p (1 - p) / n)`; zero for deterministic routes.
    pub fn std_error(&self) -> f64 {
        match self.precision {
            Precision::Trials { trials, .. } => (self.p * (1.0 - self.p) / trials as f64).sqrt(),
            Precision::Tolerance(_) => 0.0,
        }
    }
}

fn invert_beta_reg(a: f64, b: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact (Clopper–Pearson) two-sided `1 - alpha` interval for a binomial rate.
pub fn clopper_pearson(hits: u64, trials: u64, alpha: f64) -> (f64, f64) {
    let (k, n) = (hits as f64, trials as f64);
    let lo = if hits == 0 { 0.0 } else { invert_beta_reg(k, n - k + 1.0, alpha / 2.0) };
    let hi = if hits == trials { 1.0 } else { invert_beta_reg(k + 1.0, n - k, 1.0 - alpha / 2.0) };
    (lo.min(k / n), hi.max(k / n))
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn trial_eigenvalues(dims: &ChannelDims, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let u = sample_haar_columns(dims.n, dims.nt, rng);
    let h = truncate(&u, dims).expect("sampled block has the configured shape");
    spectrum(&h).expect("Haar sample is unitary to working precision").eigenvalues
}

/// Run `per_block` over consecutive trial ranges on `cfg.workers` threads
/// and return the block results in trial order.
fn map_blocks<T, F>(cfg: &McConfig, per_block: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync,
{
    let blocks = cfg.trials.div_ceil(BLOCK);
    let run = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| per_block(b * BLOCK..((b + 1) * BLOCK).min(cfg.trials)))
            .collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// Normalized-frame mutual information of every trial, in trial order.
pub fn sample_rates(cfg: &McConfig) -> Vec<f64> {
    map_blocks(cfg, |range| {
        range
            .map(|t| {
                let s = crate::ensemble::SpectrumSample {
                    eigenvalues: trial_eigenvalues(&cfg.dims, &mut trial_rng(cfg.seed, t)),
                };
                mutual_information(&s, cfg.snr, &cfg.dims)
            })
            .collect::<Vec<_>>()
    })
    .concat()
}

/// `P(I < r)` at each rate, all from one shared set of trials.
pub fn outage_curve(cfg: &McConfig, rates: &[f64]) -> Result<Vec<OutageEstimate>> {
    if let Some(&r) = rates.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(Error::Domain(format!("rate must be finite and nonnegative, got {r}")));
    }
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&a, &b| rates[a].total_cmp(&rates[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| rates[i]).collect();

    // Trial with rate I is an outage at every threshold above I; record it
    // at the first such threshold and prefix-sum afterwards.
    let partial = map_blocks(cfg, |range| {
        let mut first_above = vec![0u64; sorted.len() + 1];
        for t in range {
            let s = crate::ensemble::SpectrumSample {
                eigenvalues: trial_eigenvalues(&cfg.dims, &mut trial_rng(cfg.seed, t)),
            };
            let i = mutual_information(&s, cfg.snr, &cfg.dims);
            first_above[sorted.partition_point(|&r| r <= i)] += 1;
        }
        first_above
    });
    let mut first_above = vec![0u64; sorted.len() + 1];
    for block in &partial {
        for (acc, c) in first_above.iter_mut().zip(block) {
            *acc += c;
        }
    }
    let mut out = vec![OutageEstimate::from_counts(0, cfg.trials); rates.len()];
    let mut hits = 0;
    for (j, &idx) in order.iter().enumerate() {
        hits += first_above[j];
        out[idx] = OutageEstimate::from_counts(hits, cfg.trials);
    }
    Ok(out)
}

/// Fraction of trials with `I < r`, with a Clopper–Pearson 95% interval.
pub fn estimate_outage(cfg: &McConfig, r: f64) -> Result<OutageEstimate> {
    Ok(outage_curve(cfg, &[r])?[0])
}

/// Sample mean and unbiased sample variance of the normalized rate.
pub fn moments(cfg: &McConfig) -> Result<(f64, f64)> {
    if cfg.trials < 2 {
        return Err(Error::Domain("moments need at least 2 trials".into()));
    }
    // (count, mean, sum of squared deviations) per block, merged pairwise.
    let parts = map_blocks(cfg, |range| {
        let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
        for t in range {
            let s = crate::ensemble::SpectrumSample {
                eigenvalues: trial_eigenvalues(&cfg.dims, &mut trial_rng(cfg.seed, t)),
            };
            let x = mutual_information(&s, cfg.snr, &cfg.dims);
            n += 1.0;
            let d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        (n, mean, m2)
    });
    let (n, mean, m2) = parts.into_iter().fold((0.0, 0.0, 0.0), |(na, ma, sa), (nb, mb, sb)| {
        let n = na + nb;
        let d = mb - ma;
        (n, ma + d * nb / n, sa + sb + d * d * na * nb / n)
    });
    Ok((mean, m2 / (n - 1.0)))
}

/// Eigenvalue histogram on equal-width bins over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenHistogram {
    pub counts: Vec<u64>,
    /// Count divided by total samples and bin width.
    pub density: Vec<f64>,
}

impl EigenHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        1.0 / self.bins() as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        (bin as f64 * w, (bin + 1) as f64 * w)
    }

    /// Total probability, `sum density * width`.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }
}

/// Pooled histogram of every eigenvalue of every trial.
pub fn eigen_histogram(cfg: &McConfig, bins: usize) -> Result<EigenHistogram> {
    if bins < 2 {
        return Err(Error::Domain("need at least 2 bins".into()));
    }
    let parts = map_blocks(cfg, |range| {
        let mut counts = vec![0u64; bins];
        for t in range {
            for l in trial_eigenvalues(&cfg.dims, &mut trial_rng(cfg.seed, t)) {
                counts[((l * bins as f64) as usize).min(bins - 1)] += 1;
            }
        }
        counts
    });
    let mut counts = vec![0u64; bins];
    for block in &parts {
        for (acc, c) in counts.iter_mut().zip(block) {
            *acc += c;
        }
    }
    let total: u64 = counts.iter().sum();
    let density = counts.iter().map(|&c| c as f64 * bins as f64 / total as f64).collect();
    Ok(EigenHistogram { counts, density })
}
