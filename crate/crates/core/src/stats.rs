//! Small Monte Carlo estimators: means, variances, covariances with standard
//! errors, least-squares lines, and the Kolmogorov–Smirnov test.

use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub count: usize,
}

impl Estimate {
    /// `|value - target| <= z * stderr`
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.stderr
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean with standard error `s/√R`.
pub fn mean_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len();
    let m = mean(xs);
    let var = if n > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        f64::NAN
    };
    Estimate {
        value: m,
        stderr: (var / n as f64).sqrt(),
        count: n,
    }
}

/// Unbiased sample variance; the standard error comes from the fourth
/// central moment, `sqrt((m4 - s⁴)/R)`.
pub fn variance_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len();
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
    let var = m2 * n as f64 / (n as f64 - 1.0);
    Estimate {
        value: var,
        stderr: ((m4 - m2 * m2).max(0.0) / n as f64).sqrt(),
        count: n,
    }
}

/// Sample covariance, standard error from the variance of the centred products.
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Estimate {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let (mx, my) = (mean(xs), mean(ys));
    let prods: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let e = mean_estimate(&prods);
    Estimate {
        value: e.value * n as f64 / (n as f64 - 1.0),
        stderr: e.stderr,
        count: n,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares `y ≈ a + b x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    LineFit {
        intercept,
        slope,
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        slope_stderr: (sse / (n - 2.0) / sxx).sqrt(),
    }
}

/// Trapezoid rule on a (possibly non-uniform) grid.
pub fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    ts.windows(2)
        .zip(ys.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}

pub fn normal_cdf(x: f64, sd: f64) -> f64 {
    Normal::new(0.0, sd).expect("positive sd").cdf(x)
}

#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test of `xs` against `N(0, sd²)`.
pub fn ks_test_normal(xs: &[f64], sd: f64) -> KsResult {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let f = normal_cdf(*x, sd);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let en = n.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_survival((en + 0.12 + 0.11 / en) * d),
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
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

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = linear_fit(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Tabulated: P(K > 1.36) ≈ 0.049, P(K > 1.63) ≈ 0.0098.
        assert!((kolmogorov_survival(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_survival(1.63) - 0.0098).abs() < 5e-4);
    }

    #[test]
    fn ks_accepts_normal_rejects_shifted() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(ks_test_normal(&xs, 1.0).p_value > 0.01);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.3).collect();
        assert!(ks_test_normal(&shifted, 1.0).p_value < 0.01);
    }

    #[test]
    fn variance_stderr_matches_gaussian_theory() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<f64> = (0..20000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let v = variance_estimate(&xs);
        // For Gaussian data the SE of the variance is sqrt(2/R).
        assert!((v.stderr - (2.0f64 / 20000.0).sqrt()).abs() < 1e-3);
        assert!(v.within(1.0, 4.0));
    }
}
