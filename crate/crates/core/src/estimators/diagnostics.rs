//! Variance and confidence-interval diagnostics for the per-step
//! closed-walk observations.

use serde::{Deserialize, Serialize};

/// Welford online mean/variance, so estimators never have to store the
/// per-step sample stream.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn update(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased (n-1) sample variance; 0 for fewer than two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// 95% confidence interval for the closed-walk count estimated from one
/// walk's per-step observations.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Diagnostics {
    /// Count estimate: mean of the D-scaled per-step observations.
    pub point_estimate: f64,
    /// Variance of the D-scaled per-step observations.
    pub variance_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub sample_count: u64,
}

impl Diagnostics {
    /// Scale a Welford accumulator of raw (unscaled) observations by D_est.
    pub fn from_welford(w: &Welford, d_est: f64) -> Diagnostics {
        let point = w.mean() * d_est;
        let variance = w.sample_variance() * d_est * d_est;
        let half = if w.count() == 0 {
            0.0
        } else {
            1.96 * variance.sqrt() / (w.count() as f64).sqrt()
        };
        Diagnostics {
            point_estimate: point,
            variance_estimate: variance,
            ci_low: point - half,
            ci_high: point + half,
            sample_count: w.count(),
        }
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

/// Variance and 95% CI from a materialized per-step observation stream.
/// Each sample is scaled by `d_est` before the moments are taken.
pub fn variance_and_ci(samples: &[f64], d_est: f64) -> Diagnostics {
    let mut w = Welford::new();
    for &s in samples {
        w.update(s);
    }
    Diagnostics::from_welford(&w, d_est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_equal_samples_give_zero_width() {
        let d = variance_and_ci(&[2.0, 2.0, 2.0, 2.0], 3.0);
        assert_eq!(d.variance_estimate, 0.0);
        assert_eq!(d.point_estimate, 6.0);
        assert_eq!(d.ci_width(), 0.0);
        assert_eq!(d.sample_count, 4);
    }

    #[test]
    fn matches_direct_formulas() {
        let samples = [0.0, 4.0, 0.0, 4.0, 4.0, 0.0, 0.0, 4.0];
        let d_est = 6.0;
        let d = variance_and_ci(&samples, d_est);
        let scaled: Vec<f64> = samples.iter().map(|s| s * d_est).collect();
        let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
        let var = scaled.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
            / (scaled.len() - 1) as f64;
        assert!((d.point_estimate - mean).abs() < 1e-12);
        assert!((d.variance_estimate - var).abs() < 1e-9);
        let half = 1.96 * var.sqrt() / (scaled.len() as f64).sqrt();
        assert!((d.ci_high - (mean + half)).abs() < 1e-9);
        assert!(d.ci_low <= d.point_estimate && d.point_estimate <= d.ci_high);
    }

    #[test]
    fn welford_agrees_with_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37 + 11) % 101) as f64).collect();
        let mut w = Welford::new();
        for &x in &xs {
            w.update(x);
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((w.mean() - mean).abs() < 1e-9);
        assert!((w.sample_variance() - var).abs() < 1e-7);
    }
}
