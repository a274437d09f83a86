//! Small statistics toolbox: moments, least squares, empirical CDFs and
//! Kolmogorov–Smirnov distances.

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn stderr_of_mean(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

pub fn skewness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Ordinary least squares y = slope·x + intercept.
#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals.
    pub slope_se: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Config(
            "regression needs at least three matched points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("regression abscissae are degenerate".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    let slope_se = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(LineFit {
        slope,
        intercept,
        slope_se,
    })
}

/// Two-sample Kolmogorov–Smirnov distance, ties resolved by the strict
/// convention (both step functions advance past equal values before the
/// gap is measured).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut ia = 0usize;
    let mut ib = 0usize;
    let mut d = 0.0f64;
    while ia < a.len() && ib < b.len() {
        let v = a[ia].min(b[ib]);
        while ia < a.len() && a[ia] <= v {
            ia += 1;
        }
        while ib < b.len() && b[ib] <= v {
            ib += 1;
        }
        d = d.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    d
}

/// One-sample Kolmogorov–Smirnov distance against a CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(|x, y| x.total_cmp(y));
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Kolmogorov distribution K(x) = 1 − 2 Σ (−1)^{k−1} e^{−2k²x²}.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let term = (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Quantile of the Kolmogorov distribution by bisection; multiplied by
/// sqrt((n+m)/(n·m)) this is the asymptotic two-sample critical distance.
pub fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (1e-6, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Critical two-sample KS distance at significance `alpha`.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    kolmogorov_quantile(1.0 - alpha) * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Deterministic derangement-style shuffle pairing: member i is paired with
/// member (i + offset) mod n for a fixed nontrivial offset.
pub fn shifted_pairing(n: usize) -> Vec<usize> {
    let offset = (n / 2).max(1);
    (0..n).map(|i| (i + offset) % n).collect()
}
