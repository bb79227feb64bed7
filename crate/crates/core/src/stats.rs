//! Small statistics helpers shared by the Monte Carlo drivers.

use serde::Serialize;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    /// Number of independent units behind the estimate (trials or batches).
    pub samples: usize,
}

impl Estimate {
    /// Fraction of successes with the binomial standard error.
    pub fn proportion(successes: usize, trials: usize) -> Self {
        assert!(trials > 0, "proportion of zero trials");
        let p = successes as f64 / trials as f64;
        Estimate {
            mean: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            samples: trials,
        }
    }

    /// Mean and standard error of i.i.d. (or batch-mean) values.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "estimate of an empty sample");
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean, stderr, samples: n }
    }
}

/// Means of `batches` consecutive equal-size batches; a trailing remainder is dropped.
pub fn batch_means(series: &[f64], batches: usize) -> Vec<f64> {
    assert!(batches > 0 && series.len() >= batches, "need at least one sample per batch");
    let len = series.len() / batches;
    series
        .chunks_exact(len)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / len as f64)
        .collect()
}

/// Total-variation distance between an empirical histogram and a reference pmf.
///
/// `counts[k]` and `pmf(k)` are indexed by the same outcome; reference mass
/// outside the histogram's range is added to the distance.
pub fn total_variation(counts: &[usize], pmf: impl Fn(usize) -> f64) -> f64 {
    let total: usize = counts.iter().sum();
    assert!(total > 0, "empty histogram");
    let mut dist = 0.0;
    let mut covered = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let p = pmf(k);
        covered += p;
        dist += (c as f64 / total as f64 - p).abs();
    }
    dist += (1.0 - covered).max(0.0);
    dist / 2.0
}
