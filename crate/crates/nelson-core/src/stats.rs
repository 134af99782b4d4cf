//! Streaming moments, batch means and small regression helpers.

use libm::sqrt;

/// Welford accumulator with Chan's pairwise merge.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 { 0.0 } else { self.m2 / (self.n - 1) as f64 }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 { f64::NAN } else { sqrt(self.variance() / self.n as f64) }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Minimum number of batches for a batch-means error bar.
pub const MIN_BATCHES: usize = 30;

/// Mean and batch-means standard error of `values` (in index order).
///
/// Uses `max(n_batches, 30)` contiguous batches; a trailing remainder is
/// spread over the first batches so every sample counts. Fewer than 30
/// samples fall back to one sample per batch.
pub fn batch_means(values: &[f64], n_batches: usize) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let b = n_batches.max(MIN_BATCHES).min(n);
    let base = n / b;
    let extra = n % b;
    let mut stats = RunningStats::new();
    let mut start = 0;
    let mut total = 0.0;
    for k in 0..b {
        let len = base + usize::from(k < extra);
        let s: f64 = values[start..start + len].iter().sum();
        total += s;
        stats.push(s / len as f64);
        start += len;
    }
    let mean = total / n as f64;
    // unequal batch lengths differ by at most one sample; the batch SE is
    // the SE of the batch averages
    (mean, if b < 2 { f64::NAN } else { stats.std_error() })
}

/// Ordinary least-squares slope and intercept of y on x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: std::vec::Vec<f64> = (0..100).map(|i| libm::sin(i as f64) * 3.0 + i as f64 * 0.01).collect();
        let all: RunningStats = xs.iter().copied().collect();
        let mut a: RunningStats = xs[..37].iter().copied().collect();
        let b: RunningStats = xs[37..].iter().copied().collect();
        a.merge(&b);
        assert_eq!(a.n, all.n);
        assert!((a.mean - all.mean).abs() < 1e-14);
        assert!((a.variance() - all.variance()).abs() < 1e-12);
    }

    #[test]
    fn batch_means_of_iid_sample() {
        let xs: std::vec::Vec<f64> = (0..3000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let (m, se) = batch_means(&xs, 30);
        assert_eq!(m, 0.0);
        // even-length batches cancel exactly
        assert_eq!(se, 0.0);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (s, c) = linear_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14);
    }
}
