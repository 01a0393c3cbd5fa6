//! Samplers for the Gaussian limit objects: white-noise pairings and the
//! Brownian sheet with its pairing `M_t(G) = √2 ∫ B(t,u) G''(u) du`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::TestFunction;
use crate::quadrature::integrate;

fn inner(g: &TestFunction, h: &TestFunction, dg: usize, dh: usize) -> f64 {
    let r = g.radius().max(h.radius());
    integrate(|u| g.deriv(u, dg) * h.deriv(u, dh), -r, r, 0.25)
}

/// One draw of `μ(G) ~ N(0, ‖G‖₂²)`.
pub fn sample_white_pairing<R: Rng + ?Sized>(g: &TestFunction, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    g.norms().l2 * z
}

/// Joint pairings of one white-noise realisation with several test functions.
#[derive(Debug, Clone)]
pub struct WhiteNoiseMarginal {
    factor: DMatrix<f64>,
}

impl WhiteNoiseMarginal {
    /// Factorises the Gram matrix `∫G_iG_j`. Rank-deficient families are
    /// handled by an eigen-decomposition square root.
    pub fn new(tests: &[TestFunction]) -> Self {
        let k = tests.len();
        let gram = DMatrix::from_fn(k, k, |i, j| inner(&tests[i], &tests[j], 0, 0));
        let factor = match gram.clone().cholesky() {
            Some(c) => c.l(),
            None => {
                let eig = gram.symmetric_eigen();
                let sqrt = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
                &eig.eigenvectors * DMatrix::from_diagonal(&sqrt)
            }
        };
        Self { factor }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let k = self.factor.ncols();
        let z = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        (&self.factor * z).iter().copied().collect()
    }
}

/// Grid of a sheet sample: `t ∈ [0, T]` in `t_steps` cells and
/// `u ∈ [−U, U]` in `u_steps` cells on each side of zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub horizon: f64,
    pub half_width: f64,
    pub t_steps: usize,
    pub u_steps: usize,
}

impl GridSpec {
    /// `Δt = T/512`, `Δu = U/1024`.
    pub fn new(horizon: f64, half_width: f64) -> Self {
        Self {
            horizon,
            half_width,
            t_steps: 512,
            u_steps: 1024,
        }
    }

    pub fn with_steps(horizon: f64, half_width: f64, t_steps: usize, u_steps: usize) -> Self {
        Self {
            horizon,
            half_width,
            t_steps,
            u_steps,
        }
    }

    /// Smallest half-width with `∫_{|u|>U} (1+u²)|G''| < 10⁻⁸` for every `G`.
    pub fn covering(horizon: f64, tests: &[TestFunction]) -> Self {
        let mut u = 1.0f64;
        while tests.iter().any(|g| second_deriv_tail(g, u) >= 1e-8) {
            u += 0.5;
        }
        Self::new(horizon, u)
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.t_steps as f64
    }

    pub fn du(&self) -> f64 {
        self.half_width / self.u_steps as f64
    }

    pub fn u_at(&self, j: usize) -> f64 {
        (j as f64 - self.u_steps as f64) * self.du()
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.half_width > 0.0 && self.t_steps > 0 && self.u_steps > 0) {
            return Err(Error::InvalidParams(format!(
                "degenerate sheet grid {self:?}"
            )));
        }
        Ok(())
    }
}

fn second_deriv_tail(g: &TestFunction, u: f64) -> f64 {
    let outer = g.radius().max(u) + 12.0;
    if outer <= u {
        return 0.0;
    }
    integrate(
        |v| (1.0 + v * v) * (g.deriv(v, 2).abs() + g.deriv(-v, 2).abs()),
        u,
        outer,
        0.25,
    )
}

/// Brownian sheet on a grid, `B(0,·) = B(·,0) = 0`.
#[derive(Debug, Clone)]
pub struct SheetSample {
    grid: GridSpec,
    /// Row-major `(t_steps+1) × (2 u_steps + 1)`.
    values: Vec<f64>,
}

impl SheetSample {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn width(&self) -> usize {
        2 * self.grid.u_steps + 1
    }

    /// `B(t_i, u_j)` at grid indices.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.width() + j]
    }

    /// `B(t, ·)` on the u-grid, linearly interpolated in `t`.
    pub fn row(&self, t: f64) -> Vec<f64> {
        let pos = (t / self.grid.dt()).clamp(0.0, self.grid.t_steps as f64);
        let i = (pos.floor() as usize).min(self.grid.t_steps);
        let frac = pos - i as f64;
        let w = self.width();
        let lo = &self.values[i * w..(i + 1) * w];
        if frac == 0.0 || i == self.grid.t_steps {
            return lo.to_vec();
        }
        let hi = &self.values[(i + 1) * w..(i + 2) * w];
        lo.iter().zip(hi).map(|(a, b)| a + frac * (b - a)).collect()
    }
}

/// Cumulative sums of independent `N(0, ΔtΔu)` cell increments, built
/// outward from `u = 0` on each branch.
pub fn sample_sheet<R: Rng + ?Sized>(grid: GridSpec, rng: &mut R) -> Result<SheetSample> {
    grid.validate()?;
    let (n, c) = (grid.u_steps, grid.u_steps);
    let w = 2 * n + 1;
    let sd = (grid.dt() * grid.du()).sqrt();
    let mut values = vec![0.0; (grid.t_steps + 1) * w];
    let mut strip = vec![0.0; w];
    for i in 1..=grid.t_steps {
        // strip[j] = Σ of the new cell increments between 0 and u_j.
        for k in 1..=n {
            let z: f64 = rng.sample(StandardNormal);
            strip[c + k] = strip[c + k - 1] + sd * z;
        }
        for k in 1..=n {
            let z: f64 = rng.sample(StandardNormal);
            strip[c - k] = strip[c - k + 1] + sd * z;
        }
        let (prev, cur) = values.split_at_mut(i * w);
        let prev = &prev[(i - 1) * w..];
        for j in 0..w {
            cur[j] = prev[j] + strip[j];
        }
    }
    Ok(SheetSample { grid, values })
}

/// Trapezoid weights on the sheet's u-grid.
fn trapezoid_weights(grid: &GridSpec) -> Vec<f64> {
    let w = 2 * grid.u_steps + 1;
    let mut out = vec![grid.du(); w];
    out[0] *= 0.5;
    out[w - 1] *= 0.5;
    out
}

fn check_resolution(grid: &GridSpec, g: &TestFunction) -> Result<()> {
    let tail = second_deriv_tail(g, grid.half_width);
    if tail >= 1e-8 {
        return Err(Error::Resolution(format!(
            "sheet half-width {} truncates (1+u²)|G''| mass {tail:e} of {}",
            grid.half_width,
            g.name()
        )));
    }
    // Oscillation scale of G'' from ‖G'''‖/‖G''‖; demand at least 4 points per unit of it.
    let (g2, g3) = (inner(g, g, 2, 2).sqrt(), inner(g, g, 3, 3).sqrt());
    if g2 > 0.0 && grid.du() * g3 / g2 > 0.25 {
        return Err(Error::Resolution(format!(
            "u-step {} does not resolve G'' of {} (frequency {})",
            grid.du(),
            g.name(),
            g3 / g2
        )));
    }
    Ok(())
}

/// `√2 × trapezoid(B(t,·) G'')` on the sheet's u-grid.
pub fn sheet_pairing(sheet: &SheetSample, g: &TestFunction, t: f64) -> Result<f64> {
    Ok(SheetPairing::new(sheet.grid(), g)?.eval(sheet, t))
}

/// [`sheet_pairing`] with the resolution check and quadrature weights
/// computed once, for pairing many sheets on the same grid.
#[derive(Debug, Clone)]
pub struct SheetPairing {
    grid: GridSpec,
    weights: Vec<f64>,
}

impl SheetPairing {
    pub fn new(grid: &GridSpec, g: &TestFunction) -> Result<Self> {
        check_resolution(grid, g)?;
        let weights = trapezoid_weights(grid)
            .into_iter()
            .enumerate()
            .map(|(j, w)| std::f64::consts::SQRT_2 * w * g.deriv(grid.u_at(j), 2))
            .collect();
        Ok(Self {
            grid: *grid,
            weights,
        })
    }

    /// Panics if `sheet` was sampled on a different grid.
    pub fn eval(&self, sheet: &SheetSample, t: f64) -> f64 {
        assert_eq!(
            sheet.grid(),
            &self.grid,
            "sheet grid differs from the prepared pairing"
        );
        sheet
            .row(t)
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| b * w)
            .sum()
    }
}

/// Exact variance of [`sheet_pairing`] at a grid time `t`, from the sheet
/// covariance `t·min(|u|,|u'|)` on same-sign points:
/// `2t Σ_branches Σ_i Δu (Σ_{|u_k| ≥ |u_i|} w_k G''(u_k))²`.
pub fn sheet_pairing_variance(grid: &GridSpec, g: &TestFunction, t: f64) -> f64 {
    let weights = trapezoid_weights(grid);
    let c = grid.u_steps;
    let a = |j: usize| weights[j] * g.deriv(grid.u_at(j), 2);
    let mut total = 0.0;
    for side in [1i64, -1] {
        let mut tail = 0.0;
        for k in (1..=grid.u_steps).rev() {
            tail += a((c as i64 + side * k as i64) as usize);
            total += grid.du() * tail * tail;
        }
    }
    2.0 * t * total
}

/// `2 (t₁∧t₂) ∫ G₁'G₂' du`
pub fn limit_covariance(g1: &TestFunction, g2: &TestFunction, t1: f64, t2: f64) -> f64 {
    let t = t1.min(t2);
    if t <= 0.0 {
        return 0.0;
    }
    2.0 * t * inner(g1, g2, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::stats::{covariance_estimate, variance_estimate};

    #[test]
    fn white_pairing_of_zero_and_variance() {
        let mut rng = seeded(3);
        assert_eq!(sample_white_pairing(&TestFunction::zero(), &mut rng), 0.0);
        let g = TestFunction::hermite(1);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| sample_white_pairing(&g, &mut rng))
            .collect();
        let v = variance_estimate(&xs);
        assert!((v.value - 1.0).abs() < 0.02, "{v:?}");
    }

    #[test]
    fn joint_white_pairings_have_gram_covariance() {
        let tests = vec![
            TestFunction::hermite(1),
            TestFunction::hermite(2),
            TestFunction::gaussian(0.7),
        ];
        let noise = WhiteNoiseMarginal::new(&tests);
        let mut rng = seeded(9);
        let draws: Vec<Vec<f64>> = (0..40_000).map(|_| noise.sample(&mut rng)).collect();
        let col = |k: usize| draws.iter().map(|d| d[k]).collect::<Vec<_>>();
        for i in 0..3 {
            for j in 0..3 {
                let est = covariance_estimate(&col(i), &col(j));
                let target = inner(&tests[i], &tests[j], 0, 0);
                assert!(est.within(target, 4.0), "({i},{j}) {est:?} vs {target}");
            }
        }
    }

    #[test]
    fn rank_deficient_family_still_samples() {
        let g = TestFunction::hermite(2);
        let noise = WhiteNoiseMarginal::new(&[g.clone(), g]);
        let d = noise.sample(&mut seeded(1));
        assert!((d[0] - d[1]).abs() < 1e-6);
    }

    #[test]
    fn sheet_boundaries_vanish() {
        let grid = GridSpec::with_steps(1.0, 2.0, 8, 16);
        let s = sample_sheet(grid, &mut seeded(2)).unwrap();
        for j in 0..33 {
            assert_eq!(s.at(0, j), 0.0);
        }
        for i in 0..=8 {
            assert_eq!(s.at(i, 16), 0.0);
        }
        assert!(sample_sheet(GridSpec::with_steps(1.0, 2.0, 0, 4), &mut seeded(2)).is_err());
    }

    #[test]
    fn sheet_covariance_small_sample() {
        let grid = GridSpec::with_steps(1.0, 1.0, 4, 4);
        let mut rng = seeded(21);
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for _ in 0..20_000 {
            let s = sample_sheet(grid, &mut rng).unwrap();
            a.push(s.at(4, 8));
            b.push(s.at(2, 6));
            c.push(s.at(4, 0));
        }
        // Cov(B(1,1), B(0.5,0.5)) = 0.25; Cov(B(1,1), B(1,−1)) = 0.
        assert!(covariance_estimate(&a, &b).within(0.25, 4.0));
        assert!(covariance_estimate(&a, &c).within(0.0, 4.0));
        assert!(variance_estimate(&a).within(1.0, 4.0));
    }

    #[test]
    fn pairing_is_linear_and_vanishes_at_zero() {
        let grid = GridSpec::with_steps(1.0, 9.0, 16, 256);
        let s = sample_sheet(grid, &mut seeded(4)).unwrap();
        let (g1, g2) = (TestFunction::hermite(1), TestFunction::hermite(3));
        let combo = TestFunction::linear_combination(&[(2.0, &g1), (-0.5, &g2)]).unwrap();
        let lhs = sheet_pairing(&s, &combo, 0.75).unwrap();
        let rhs = 2.0 * sheet_pairing(&s, &g1, 0.75).unwrap()
            - 0.5 * sheet_pairing(&s, &g2, 0.75).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        assert_eq!(sheet_pairing(&s, &g1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pairing_rejects_unresolved_grids() {
        let coarse = GridSpec::with_steps(1.0, 9.0, 4, 8);
        let s = sample_sheet(coarse, &mut seeded(4)).unwrap();
        assert!(matches!(
            sheet_pairing(&s, &TestFunction::hermite(3), 1.0),
            Err(Error::Resolution(_))
        ));
        let narrow = GridSpec::with_steps(1.0, 2.0, 4, 64);
        let s = sample_sheet(narrow, &mut seeded(4)).unwrap();
        assert!(matches!(
            sheet_pairing(&s, &TestFunction::hermite(1), 1.0),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn grid_variance_agrees_with_integration_by_parts() {
        for n in 1..=5 {
            let g = TestFunction::hermite(n);
            let grid = GridSpec::covering(1.0, std::slice::from_ref(&g));
            let v = sheet_pairing_variance(&grid, &g, 0.5);
            let target = limit_covariance(&g, &g, 0.5, 0.5);
            assert!((v / target - 1.0).abs() < 0.01, "n={n}: {v} vs {target}");
        }
    }

    #[test]
    fn limit_covariance_cases() {
        let (g1, g2) = (TestFunction::hermite(1), TestFunction::hermite(2));
        assert!((limit_covariance(&g2, &g2, 1.0, 1.0) - 3.0).abs() < 1e-8);
        assert!(limit_covariance(&g1, &g2, 1.0, 1.0).abs() < 1e-12);
        assert_eq!(limit_covariance(&g1, &g1, 0.0, 1.0), 0.0);
    }
}
