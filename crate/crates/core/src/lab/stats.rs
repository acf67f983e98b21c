//! Statistics helpers: ECDFs, Kolmogorov–Smirnov tests, isotonic
//! regression, weighted log–log slope fits and Monte Carlo summaries.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} usable points, found {found}")]
    TooFewPoints { need: usize, found: usize },
    #[error("empty sample")]
    Empty,
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Binomial standard error of a proportion.
pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Fraction of samples ≤ x for each x (samples need not be sorted).
pub fn ecdf(samples: &[f64], at: &[f64]) -> Vec<f64> {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len().max(1) as f64;
    at.iter()
        .map(|x| s.partition_point(|v| v <= x) as f64 / n)
        .collect()
}

/// c(α) in the asymptotic two-sample threshold c(α)·√((m+n)/(mn)).
pub fn ks_critical_value(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub m: usize,
    pub n: usize,
}

/// Two-sample Kolmogorov–Smirnov statistic against the level-α threshold.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (m, n) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < m && j < n {
        let v = x[i].min(y[j]);
        while i < m && x[i] <= v {
            i += 1;
        }
        while j < n && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / m as f64 - j as f64 / n as f64).abs());
    }
    let threshold = ks_critical_value(alpha) * ((m + n) as f64 / (m as f64 * n as f64)).sqrt();
    Ok(KsResult {
        statistic: d,
        threshold,
        pass: d <= threshold,
        m,
        n,
    })
}

/// One-sample KS statistic against a continuous CDF and its asymptotic p-value.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (k, x) in s.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n);
    }
    let sq = n.sqrt();
    (d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d))
}

/// P(K > λ) for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Weighted isotonic regression onto nonincreasing sequences (pool adjacent violators).
pub fn isotonic_nonincreasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    // Blocks of (mean, weight, length).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (v, wt) in y.iter().zip(w) {
        blocks.push((*v, wt.max(1e-300), 1));
        while blocks.len() > 1 {
            let k = blocks.len();
            if blocks[k - 2].0 >= blocks[k - 1].0 {
                break;
            }
            let (m2, w2, l2) = blocks.pop().expect("two blocks");
            let (m1, w1, l1) = blocks.pop().expect("two blocks");
            blocks.push(((m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, l1 + l2));
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, _, l)| std::iter::repeat(m).take(l))
        .collect()
}

/// Total upward violation of a sequence that should be nonincreasing.
pub fn monotonicity_violation(y: &[f64]) -> f64 {
    y.windows(2).map(|p| (p[1] - p[0]).max(0.0)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Weighted least squares of log y on log x with variances of log y.
/// Zero or missing variances fall back to equal weights.
pub fn loglog_fit(x: &[f64], y: &[f64], sigma: &[f64], min_points: usize) -> Result<SlopeFit, StatsError> {
    let pts: Vec<(f64, f64, f64)> = x
        .iter()
        .zip(y)
        .zip(sigma)
        .filter(|((xi, yi), _)| **xi > 0.0 && **yi > 0.0)
        .map(|((xi, yi), si)| {
            let v = (si / yi).powi(2);
            (xi.ln(), yi.ln(), v)
        })
        .collect();
    if pts.len() < min_points {
        return Err(StatsError::TooFewPoints {
            need: min_points,
            found: pts.len(),
        });
    }
    let equal = pts.iter().any(|p| !(p.2 > 0.0) || !p.2.is_finite());
    let wts: Vec<f64> = pts.iter().map(|p| if equal { 1.0 } else { 1.0 / p.2 }).collect();
    let sw: f64 = wts.iter().sum();
    let mx = pts.iter().zip(&wts).map(|(p, w)| w * p.0).sum::<f64>() / sw;
    let my = pts.iter().zip(&wts).map(|(p, w)| w * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().zip(&wts).map(|(p, w)| w * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().zip(&wts).map(|(p, w)| w * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if equal {
        let k = pts.len() as f64;
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        if k > 2.0 {
            (rss / (k - 2.0) / sxx).sqrt()
        } else {
            0.0
        }
    } else {
        (1.0 / sxx).sqrt()
    };
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
        points: pts.len(),
    })
}

/// Log-spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Evenly spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn lin_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}
