use std::fmt;
use std::sync::Arc;

use crate::basis::hermite::hermite_eval_unchecked;
use crate::basis::norms::weighted_sup;
use crate::basis::{HermiteBasis, MAX_HERMITE_ORDER};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

type Evaluator = dyn Fn(f64, usize) -> f64 + Send + Sync;

/// Cached norms of a test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// `sup_u |(1+u²) ∂^m G(u)|`, `m = 0..=3`
    pub weighted_sup: [f64; 4],
    pub l2: f64,
    pub deriv_l2: f64,
    pub deriv_l1: f64,
}

/// A smooth, rapidly decaying function with derivatives up to order three.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: Arc<Evaluator>,
    radius: f64,
    norms: Norms,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("radius", &self.radius)
            .field("norms", &self.norms)
            .finish()
    }
}

impl TestFunction {
    /// Wrap `eval(u, m) = ∂^m G(u)` (`m ≤ 3`); `radius` bounds the region
    /// outside which `G` and its derivatives are negligible.
    pub fn from_fn<F>(name: impl Into<String>, radius: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64, usize) -> f64 + Send + Sync + 'static,
    {
        let eval: Arc<Evaluator> = Arc::new(eval);
        let mut weighted = [0.0; 4];
        for (m, w) in weighted.iter_mut().enumerate() {
            let e = eval.clone();
            *w = weighted_sup(move |u| e(u, m), radius)?;
        }
        let panel = 0.25;
        let norms = Norms {
            weighted_sup: weighted,
            l2: integrate(|u| eval(u, 0).powi(2), -radius, radius, panel).sqrt(),
            deriv_l2: integrate(|u| eval(u, 1).powi(2), -radius, radius, panel).sqrt(),
            deriv_l1: integrate(|u| eval(u, 1).abs(), -radius, radius, panel / 8.0),
        };
        Ok(Self {
            name: name.into(),
            eval,
            radius,
            norms,
        })
    }

    /// Hermite function `G_n` (1-based).
    pub fn hermite(n: usize) -> Self {
        assert!((1..=MAX_HERMITE_ORDER).contains(&n), "hermite order {n}");
        Self::from_fn(
            format!("H{n}"),
            HermiteBasis::effective_radius(n),
            move |u, m| hermite_eval_unchecked(n, u, m),
        )
        .expect("Hermite functions decay")
    }

    /// `Σ c_k G_{n_k}`
    pub fn hermite_combination(terms: &[(usize, f64)]) -> Result<Self> {
        for &(n, _) in terms {
            if n == 0 || n > MAX_HERMITE_ORDER {
                return Err(Error::HermiteOrder {
                    order: n,
                    max: MAX_HERMITE_ORDER,
                });
            }
        }
        let top = terms.iter().map(|t| t.0).max().unwrap_or(1);
        let terms = terms.to_vec();
        let name = terms
            .iter()
            .map(|(n, c)| format!("{c}*H{n}"))
            .collect::<Vec<_>>()
            .join("+");
        Self::from_fn(name, HermiteBasis::effective_radius(top), move |u, m| {
            terms
                .iter()
                .map(|&(n, c)| c * hermite_eval_unchecked(n, u, m))
                .sum()
        })
    }

    /// `exp(-u² / (2 s²))`
    pub fn gaussian(scale: f64) -> Self {
        assert!(scale > 0.0);
        Self::from_fn(format!("gauss{scale}"), 9.0 * scale + 2.0, move |u, m| {
            let v = u / scale;
            let base = (-0.5 * v * v).exp();
            // ∂^m e^{-v²/2} = (-1)^m He_m(v) e^{-v²/2}
            let he = match m {
                0 => 1.0,
                1 => -v,
                2 => v * v - 1.0,
                3 => -(v * v * v - 3.0 * v),
                _ => f64::NAN,
            };
            he * base / scale.powi(m as i32)
        })
        .expect("Gaussians decay")
    }

    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            eval: Arc::new(|_, _| 0.0),
            radius: 1.0,
            norms: Norms {
                weighted_sup: [0.0; 4],
                l2: 0.0,
                deriv_l2: 0.0,
                deriv_l1: 0.0,
            },
        }
    }

    /// `Σ a_k G_k` for already-built test functions.
    pub fn linear_combination(terms: &[(f64, &TestFunction)]) -> Result<Self> {
        let radius = terms.iter().map(|t| t.1.radius).fold(1.0, f64::max);
        let parts: Vec<(f64, Arc<Evaluator>)> =
            terms.iter().map(|(a, g)| (*a, g.eval.clone())).collect();
        let name = terms
            .iter()
            .map(|(a, g)| format!("{a}*{}", g.name))
            .collect::<Vec<_>>()
            .join("+");
        Self::from_fn(name, radius, move |u, m| {
            parts.iter().map(|(a, e)| a * e(u, m)).sum()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norms(&self) -> &Norms {
        &self.norms
    }

    pub fn value(&self, u: f64) -> f64 {
        (self.eval)(u, 0)
    }

    /// `∂^m G(u)`, `m ≤ 3`
    pub fn deriv(&self, u: f64, m: usize) -> f64 {
        debug_assert!(m <= 4);
        (self.eval)(u, m)
    }

    /// `∫_{|u| > half_width} (1+u²)|G(u)| du`
    pub fn weighted_tail_mass(&self, half_width: f64) -> f64 {
        if half_width >= self.radius {
            return 0.0;
        }
        let f = |u: f64| (1.0 + u * u) * self.value(u).abs();
        integrate(f, half_width, self.radius, 0.05) + integrate(f, -self.radius, -half_width, 0.05)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn check_fd(g: &TestFunction) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let h = 1e-4;
        for _ in 0..100 {
            let u: f64 = rng.gen_range(-3.0..3.0);
            for m in 1..=3 {
                let fd = (g.deriv(u + h, m - 1) - g.deriv(u - h, m - 1)) / (2.0 * h);
                let exact = g.deriv(u, m);
                let scale = g.norms().weighted_sup[m].max(1e-300);
                assert!(
                    (fd - exact).abs() < 1e-6 * scale,
                    "{} m={m} u={u}",
                    g.name()
                );
            }
        }
    }

    #[test]
    fn derivatives_agree_with_finite_differences() {
        check_fd(&TestFunction::hermite(3));
        check_fd(&TestFunction::gaussian(0.7));
        check_fd(&TestFunction::hermite_combination(&[(1, 0.5), (4, -1.2)]).unwrap());
    }

    #[test]
    fn hermite_norms() {
        let g = TestFunction::hermite(2);
        assert!((g.norms().l2 - 1.0).abs() < 1e-10);
        assert!((g.norms().deriv_l2 - 1.5f64.sqrt()).abs() < 1e-10);
        assert!(g
            .norms()
            .weighted_sup
            .iter()
            .all(|v| v.is_finite() && *v > 0.0));
        assert!(g.weighted_tail_mass(10.0) < 1e-8);
    }

    #[test]
    fn gaussian_shape() {
        let g = TestFunction::gaussian(1.0);
        assert!((g.norms().weighted_sup[0] - 2.0 * (-0.5f64).exp()).abs() < 1e-6);
        // ‖e^{-u²/2}‖₂² = √π
        assert!((g.norms().l2.powi(2) - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }
}
