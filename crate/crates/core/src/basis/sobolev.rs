//! The space-time basis `g_m ⊗ G_n`, its negative-order Sobolev weights, and
//! projection of sampled fields onto it.

use super::{hermite::hermite_functions_0, DirichletBasis, HermiteBasis};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Basis pairings `⟨g_m ⊗ G_n, φ⟩` keyed by `(m, n)`, both 1-based.
pub type Coefficients = BTreeMap<(usize, usize), f64>;

/// Weights `[(m³ + n³) m² n⁶]^{-1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SobolevWeights;

impl SobolevWeights {
    pub fn weight(&self, m: usize, n: usize) -> f64 {
        let (m, n) = (m as f64, n as f64);
        1.0 / ((m.powi(3) + n.powi(3)) * m * m * n.powi(6))
    }
}

/// `√(Σ weight(m,n)·coeff²)`.
pub fn neg_sobolev_norm(coefficients: &Coefficients) -> f64 {
    let w = SobolevWeights;
    coefficients
        .iter()
        .map(|(&(m, n), c)| w.weight(m, n) * c * c)
        .sum::<f64>()
        .sqrt()
}

/// A field sampled on a uniform grid over `[0, T] × [-U, U]`, time-major.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub horizon: f64,
    pub half_width: f64,
    pub t_points: usize,
    pub u_points: usize,
    pub values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn sample<F: Fn(f64, f64) -> f64>(
        horizon: f64,
        t_points: usize,
        half_width: f64,
        u_points: usize,
        f: F,
    ) -> Self {
        let mut values = Vec::with_capacity(t_points * u_points);
        for i in 0..t_points {
            let t = horizon * i as f64 / (t_points - 1) as f64;
            for j in 0..u_points {
                let u = -half_width + 2.0 * half_width * j as f64 / (u_points - 1) as f64;
                values.push(f(t, u));
            }
        }
        Self {
            horizon,
            half_width,
            t_points,
            u_points,
            values,
        }
    }

    fn dt(&self) -> f64 {
        self.horizon / (self.t_points - 1) as f64
    }

    fn du(&self) -> f64 {
        2.0 * self.half_width / (self.u_points - 1) as f64
    }

    pub fn t_at(&self, i: usize) -> f64 {
        self.dt() * i as f64
    }

    pub fn u_at(&self, j: usize) -> f64 {
        -self.half_width + self.du() * j as f64
    }

    /// Tensor trapezoid `∫∫ φ² dt du`.
    pub fn l2_norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.t_points {
            let wt = trap_weight(i, self.t_points) * self.dt();
            for j in 0..self.u_points {
                let wu = trap_weight(j, self.u_points) * self.du();
                acc += wt * wu * self.values[i * self.u_points + j].powi(2);
            }
        }
        acc
    }
}

fn trap_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5
    } else {
        1.0
    }
}

/// Tensor-trapezoid pairings `⟨g_m ⊗ G_n, φ⟩` for `m ≤ m_max`, `n ≤ n_max`.
///
/// The grid must carry at least eight time samples per half-period of
/// `g_{m_max}`, resolve `G_{n_max}` (step below `π / (2√(2 n_max + 1))`), and
/// extend past its turning point by at least six units.
pub fn project(field: &SpaceTimeField, m_max: usize, n_max: usize) -> Result<Coefficients> {
    HermiteBasis::new(n_max)?;
    if field.t_points < 8 * m_max + 1 {
        return Err(Error::Resolution(format!(
            "{} time points cannot resolve g_{m_max}",
            field.t_points
        )));
    }
    let turning = (2.0 * n_max as f64 + 1.0).sqrt();
    if field.du() > std::f64::consts::PI / (2.0 * turning) || field.half_width < turning + 6.0 {
        return Err(Error::Resolution(format!(
            "u-grid (step {:.4}, half-width {}) cannot resolve G_{n_max}",
            field.du(),
            field.half_width
        )));
    }
    let time = DirichletBasis::new(field.horizon);
    // Spatial pairings first: s[i][n] = ∫ φ(t_i, u) G_n(u) du.
    let mut spatial = vec![0.0; field.t_points * n_max];
    for j in 0..field.u_points {
        let u = field.u_at(j);
        let wu = trap_weight(j, field.u_points) * field.du();
        let h = hermite_functions_0(n_max - 1, u);
        for i in 0..field.t_points {
            let v = field.values[i * field.u_points + j] * wu;
            for n in 0..n_max {
                spatial[i * n_max + n] += v * h[n];
            }
        }
    }
    let mut out = Coefficients::new();
    for m in 1..=m_max {
        for n in 1..=n_max {
            let mut acc = 0.0;
            for i in 0..field.t_points {
                let wt = trap_weight(i, field.t_points) * field.dt();
                acc += wt * time.eval(m, field.t_at(i)) * spatial[i * n_max + n - 1];
            }
            out.insert((m, n), acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::hermite_eval;

    #[test]
    fn single_mode_norm() {
        let mut c = Coefficients::new();
        c.insert((1, 1), 1.0);
        assert!((neg_sobolev_norm(&c) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let mut c = Coefficients::new();
        c.insert((3, 2), 1.0);
        let expect = ((27.0 + 8.0) * 9.0 * 64.0f64).powf(-0.5);
        assert!((neg_sobolev_norm(&c) - expect).abs() < 1e-15);
    }

    #[test]
    fn weights_positive_and_decreasing() {
        let w = SobolevWeights;
        for m in 1..10 {
            for n in 1..10 {
                assert!(w.weight(m, n) > 0.0);
                assert!(w.weight(m + 1, n) < w.weight(m, n));
                assert!(w.weight(m, n + 1) < w.weight(m, n));
            }
        }
    }

    #[test]
    fn projection_picks_out_a_mode() {
        let t = 0.25;
        let g = DirichletBasis::new(t);
        let f = SpaceTimeField::sample(t, 129, 12.0, 1201, |s, u| {
            g.eval(2, s) * hermite_eval(3, u, 0).unwrap()
        });
        let c = project(&f, 4, 5).unwrap();
        for (&(m, n), v) in &c {
            let expect = if (m, n) == (2, 3) { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-6, "({m},{n}) = {v}");
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let f = SpaceTimeField::sample(1.0, 9, 4.0, 11, |_, _| 0.0);
        assert!(matches!(project(&f, 4, 3), Err(Error::Resolution(_))));
    }
}
