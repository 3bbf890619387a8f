//! Sample statistics and goodness-of-fit helpers used by the ensemble
//! experiments.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (xs.len() - 1) as f64
}

/// Pearson correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / (variance(xs) * variance(ys)).sqrt()
}

/// Central sample moment of order `k` about the sample mean.
pub fn central_moment(xs: &[f64], k: i32) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(k)).sum::<f64>() / xs.len() as f64
}

/// Two-sided standard normal quantile for confidence level `level`
/// (0.99 -> 2.5758...).
pub fn normal_quantile_two_sided(level: f64) -> f64 {
    let n = Normal::standard();
    n.inverse_cdf(0.5 + level / 2.0)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` and a continuous reference CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = f - i as f64 / n;
            let hi = (i + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Critical value of the modified Anderson-Darling statistic at the 1%
/// level for normality with estimated mean and variance.
pub const ANDERSON_DARLING_CRITICAL_1PCT: f64 = 1.035;

/// Anderson-Darling normality statistic with mean and variance estimated
/// from the sample, including the small-sample correction
/// `A*² = A²(1 + 0.75/n + 2.25/n²)`.
pub fn anderson_darling_normal(samples: &[f64]) -> f64 {
    let n = samples.len();
    let m = mean(samples);
    let sd = variance(samples).sqrt();
    let mut z: Vec<f64> = samples.iter().map(|x| (x - m) / sd).collect();
    z.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let fi = normal_cdf(z[i]).clamp(1e-300, 1.0 - 1e-16);
        let fj = normal_cdf(z[n - 1 - i]).clamp(1e-300, 1.0 - 1e-16);
        s += (2.0 * i as f64 + 1.0) * (fi.ln() + (1.0 - fj).ln());
    }
    let a2 = -nf - s / nf;
    a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Normal-approximation binomial interval `p ± z·sqrt(p(1−p)/n)`.
/// Degenerates to the point `p` when `n == 0` or `p ∈ {0, 1}`.
pub fn binomial_interval(p: f64, n: u64, level: f64) -> Interval {
    if n == 0 {
        return Interval { lo: p, hi: p };
    }
    let z = normal_quantile_two_sided(level);
    let hw = z * (p * (1.0 - p) / n as f64).sqrt();
    Interval {
        lo: (p - hw).max(0.0),
        hi: (p + hw).min(1.0),
    }
}

/// Fixed-range histogram that keeps track of out-of-range samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(lo < hi && bins > 0);
        Self {
            lo,
            hi,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..=self.counts.len()).map(|i| self.lo + w * i as f64).collect()
    }

    pub fn add(&mut self, x: f64) {
        if x < self.lo {
            self.underflow += 1;
        } else if x >= self.hi {
            self.overflow += 1;
        } else {
            let last = self.counts.len() - 1;
            let i = ((x - self.lo) / self.bin_width()) as usize;
            self.counts[i.min(last)] += 1;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    /// Per-bin probability masses (fraction of all samples, including
    /// out-of-range ones in the denominator).
    pub fn masses(&self) -> Vec<f64> {
        let t = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    /// Per-bin probability densities.
    pub fn densities(&self) -> Vec<f64> {
        let w = self.bin_width();
        self.masses().into_iter().map(|m| m / w).collect()
    }

    pub fn outside_mass(&self) -> f64 {
        (self.underflow + self.overflow) as f64 / self.total().max(1) as f64
    }
}
