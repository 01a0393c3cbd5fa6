//! Normalised Hermite functions, indexed from 1.
//!
//! `G_n(u) = h_{n-1}(u)` where `h_k = (2^k k! √π)^{-1/2} H_k(u) e^{-u²/2}`.
//! Values come from the normalised three-term recurrence
//! `h_{k+1} = √(2/(k+1)) u h_k − √(k/(k+1)) h_{k-1}`, which stays in range
//! for the orders used here. Derivatives use the ladder relation
//! `h_k' = √(k/2) h_{k-1} − √((k+1)/2) h_{k+1}`.

use crate::error::{Error, Result};

pub const MAX_HERMITE_ORDER: usize = 96;

/// `h_0(u), …, h_kmax(u)` (0-based physicists' Hermite functions).
pub fn hermite_functions_0(kmax: usize, u: f64) -> Vec<f64> {
    let mut h = vec![0.0; kmax + 1];
    h[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * u * u).exp();
    if kmax >= 1 {
        h[1] = std::f64::consts::SQRT_2 * u * h[0];
    }
    for k in 1..kmax {
        let kf = k as f64;
        h[k + 1] = (2.0 / (kf + 1.0)).sqrt() * u * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
    }
    h
}

/// Coefficients of `∂^m h_k` on `h_{k-m} … h_{k+m}` (index `j` ↔ `h_{k-m+j}`,
/// entries with negative order are zero).
fn ladder_coefficients(k: usize, m: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; 2 * m + 1];
    coeffs[m] = 1.0;
    for _ in 0..m {
        let mut next = vec![0.0; 2 * m + 1];
        for (j, c) in coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let order = k as isize - m as isize + j as isize;
            if order < 0 {
                continue;
            }
            let o = order as f64;
            if order >= 1 {
                next[j - 1] += c * (o / 2.0).sqrt();
            }
            next[j + 1] -= c * ((o + 1.0) / 2.0).sqrt();
        }
        coeffs = next;
    }
    coeffs
}

/// `∂^deriv G_n(u)` with 1-based `n`.
pub fn hermite_eval(n: usize, u: f64, deriv: usize) -> Result<f64> {
    if n == 0 || n > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrder {
            order: n,
            max: MAX_HERMITE_ORDER,
        });
    }
    if deriv > 3 {
        return Err(Error::DerivativeOrder(deriv));
    }
    Ok(hermite_eval_unchecked(n, u, deriv))
}

pub(crate) fn hermite_eval_unchecked(n: usize, u: f64, deriv: usize) -> f64 {
    let k = n - 1;
    let h = hermite_functions_0(k + deriv, u);
    if deriv == 0 {
        return h[k];
    }
    let coeffs = ladder_coefficients(k, deriv);
    coeffs
        .iter()
        .enumerate()
        .filter_map(|(j, c)| {
            let order = k as isize - deriv as isize + j as isize;
            (order >= 0).then(|| c * h[order as usize])
        })
        .sum()
}

/// Hermite basis truncated at `max_order`.
#[derive(Debug, Clone, Copy)]
pub struct HermiteBasis {
    max_order: usize,
}

impl HermiteBasis {
    pub fn new(max_order: usize) -> Result<Self> {
        if max_order == 0 || max_order > MAX_HERMITE_ORDER {
            return Err(Error::HermiteOrder {
                order: max_order,
                max: MAX_HERMITE_ORDER,
            });
        }
        Ok(Self { max_order })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn eval(&self, n: usize, u: f64, deriv: usize) -> Result<f64> {
        if n == 0 || n > self.max_order {
            return Err(Error::HermiteOrder {
                order: n,
                max: self.max_order,
            });
        }
        hermite_eval(n, u, deriv)
    }

    /// `G_1(u) … G_max(u)` in one recurrence pass.
    pub fn values(&self, u: f64) -> Vec<f64> {
        hermite_functions_0(self.max_order - 1, u)
    }

    /// Radius beyond which every `G_n`, `n ≤ max`, and its first three
    /// derivatives are negligible even with a `(1+u²)` weight.
    pub fn effective_radius(n: usize) -> f64 {
        (2.0 * n as f64 + 1.0).sqrt() + 8.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_hermite_functions;

    #[test]
    fn lowest_function_is_normalised_gaussian() {
        let g0 = hermite_eval(1, 0.0, 0).unwrap();
        assert!((g0 - 0.751_125_544_464_942_5).abs() < 1e-15);
        let u = 0.7;
        let expect = std::f64::consts::PI.powf(-0.25) * (-u * u / 2.0f64).exp();
        assert!((hermite_eval(1, u, 0).unwrap() - expect).abs() < 1e-15);
        // G_1' = -u G_1, G_1'' = (u²-1) G_1, G_1''' = (3u - u³) G_1
        assert!((hermite_eval(1, u, 1).unwrap() + u * expect).abs() < 1e-14);
        assert!((hermite_eval(1, u, 2).unwrap() - (u * u - 1.0) * expect).abs() < 1e-14);
        assert!((hermite_eval(1, u, 3).unwrap() - (3.0 * u - u.powi(3)) * expect).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for n in [1, 2, 5, 12, 30] {
            for &u in &[-3.1, -0.4, 0.0, 1.3, 4.2] {
                for d in 1..=3 {
                    let fd = (hermite_eval(n, u + h, d - 1).unwrap()
                        - hermite_eval(n, u - h, d - 1).unwrap())
                        / (2.0 * h);
                    let exact = hermite_eval(n, u, d).unwrap();
                    assert!(
                        (fd - exact).abs() < 1e-6 * (1.0 + exact.abs()) * (n as f64),
                        "n={n} u={u} d={d}: {fd} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn order_errors() {
        assert!(matches!(
            hermite_eval(0, 0.0, 0),
            Err(Error::HermiteOrder { .. })
        ));
        assert!(matches!(
            hermite_eval(1, 0.0, 4),
            Err(Error::DerivativeOrder(4))
        ));
        let b = HermiteBasis::new(5).unwrap();
        assert!(b.eval(6, 0.0, 0).is_err());
    }

    #[test]
    fn orthonormal_and_derivative_norms() {
        let (x, w) = gauss_hermite_functions(64);
        for n in 1..=40 {
            for m in 1..=40 {
                let ip: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| {
                        w * hermite_eval(n, *x, 0).unwrap() * hermite_eval(m, *x, 0).unwrap()
                    })
                    .sum();
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-8, "<G{n},G{m}> = {ip}");
            }
            let d2: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * hermite_eval(n, *x, 1).unwrap().powi(2))
                .sum();
            assert!((d2 - (n as f64 - 0.5)).abs() < 1e-8, "n={n}: {d2}");
        }
    }
}
