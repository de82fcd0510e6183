//! Chain statistics: running moments and blocking error analysis.

use serde::{Deserialize, Serialize};

/// Numerically stable running mean/variance accumulator.
#[derive(Debug, Clone, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

/// Result of a blocking (pairwise-averaging) error analysis of a correlated
/// series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockingResult {
    pub mean: f64,
    /// Standard error of the mean at the detected plateau (or at the deepest
    /// level when no plateau was found).
    pub stderr: f64,
    /// Integrated autocorrelation time τ_int = var_plateau / (2 var_naive),
    /// in units of the sampling interval; 1/2 for uncorrelated data.
    pub tau_int: f64,
    pub n_samples: u64,
    pub plateau_found: bool,
}

/// Blocking analysis: repeatedly average neighbor pairs; the variance of the
/// block means, divided by the number of blocks, estimates the squared error
/// of the overall mean and grows to a plateau once blocks exceed the
/// correlation time.
///
/// Plateau detection: the error estimate at level l carries relative noise
/// ≈ 1/√(2(n_l−1)); the plateau is the first level whose successor estimates
/// stay within that noise band.
pub fn blocking(series: &[f64]) -> BlockingResult {
    let n = series.len() as u64;
    if series.len() < 2 {
        return BlockingResult {
            mean: series.first().copied().unwrap_or(f64::NAN),
            stderr: 0.0,
            tau_int: 0.5,
            n_samples: n,
            plateau_found: false,
        };
    }
    let mut w = Welford::default();
    for &x in series {
        w.push(x);
    }
    let mean = w.mean();
    let var_naive_mean = w.variance() / series.len() as f64;

    // Error-of-the-mean estimates per blocking level.
    let mut level_sq = Vec::new(); // var of mean estimate
    let mut level_n = Vec::new();
    let mut cur: Vec<f64> = series.to_vec();
    loop {
        let m = cur.len();
        if m < 4 {
            break;
        }
        let mut lw = Welford::default();
        for &x in &cur {
            lw.push(x);
        }
        level_sq.push(lw.variance() / m as f64);
        level_n.push(m);
        let mut next = Vec::with_capacity(m / 2);
        for pair in cur.chunks_exact(2) {
            next.push(0.5 * (pair[0] + pair[1]));
        }
        cur = next;
    }
    if level_sq.is_empty() {
        return BlockingResult {
            mean,
            stderr: var_naive_mean.sqrt(),
            tau_int: 0.5,
            n_samples: n,
            plateau_found: false,
        };
    }

    // Plateau: the first level whose next two levels agree with it within
    // the combined noise of the pair. Requiring two confirmations stops a
    // noisy deep level (few blocks) from vacuously declaring itself flat.
    let rel_noise = |l: usize| (2.0 / (level_n[l] as f64 - 1.0)).sqrt();
    let mut plateau: Option<usize> = None;
    'levels: for l in 0..level_sq.len().saturating_sub(2) {
        let s = level_sq[l];
        for j in l + 1..=l + 2 {
            let band = (rel_noise(l) * s).hypot(rel_noise(j) * level_sq[j]);
            if (level_sq[j] - s).abs() > 2.0 * band {
                continue 'levels;
            }
        }
        plateau = Some(l);
        break;
    }
    let (idx, found) = match plateau {
        Some(l) => (l, true),
        // No plateau: report the deepest (most conservative) level.
        None => (level_sq.len() - 1, false),
    };
    let var_mean = level_sq[idx].max(0.0);
    let tau_int = if var_naive_mean > 0.0 {
        (var_mean / (2.0 * var_naive_mean)).max(0.5)
    } else {
        0.5
    };
    BlockingResult {
        mean,
        stderr: var_mean.sqrt(),
        tau_int,
        n_samples: n,
        plateau_found: found,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 2.5, -0.5, 4.0, 0.25];
        let mut w = Welford::default();
        for &x in &xs {
            w.push(x);
        }
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let var: f64 =
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((w.mean() - mean).abs() < 1e-14);
        assert!((w.variance() - var).abs() < 1e-14);
    }

    #[test]
    fn iid_series_has_small_tau() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let series: Vec<f64> = (0..4096).map(|_| rng.random::<f64>()).collect();
        let b = blocking(&series);
        assert!(b.plateau_found);
        assert!(b.tau_int < 1.0, "tau = {}", b.tau_int);
        // stderr ≈ sqrt(1/12/n)
        let expect = (1.0 / 12.0 / 4096.0f64).sqrt();
        assert!((b.stderr - expect).abs() < 0.5 * expect);
    }

    #[test]
    fn ar1_series_has_inflated_error() {
        // x_{n+1} = ρ x_n + ξ: τ_int = (1+ρ)/(2(1-ρ)) = 9.5 for ρ = 0.9.
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let rho: f64 = 0.9;
        let mut x = 0.0;
        let series: Vec<f64> = (0..1 << 16)
            .map(|_| {
                let xi: f64 = rng.random::<f64>() - 0.5;
                x = rho * x + xi;
                x
            })
            .collect();
        let b = blocking(&series);
        assert!(b.plateau_found, "no plateau");
        assert!(
            (b.tau_int - 9.5).abs() < 3.0,
            "tau = {} (expect ~9.5)",
            b.tau_int
        );
    }

    #[test]
    fn short_series_is_flagged_not_crashed() {
        let b = blocking(&[1.0, 2.0, 3.0]);
        assert!(!b.plateau_found);
        assert!(b.stderr >= 0.0);
    }
}
