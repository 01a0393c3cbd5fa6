//! Functionals of a single configuration: the fluctuation field, its
//! mollification, the nonlinear term and the discrete remainders.

use super::{Mollifier, TestFunction};
use crate::error::{Error, Result};
use crate::exclusion::{apply_generator_local, coordinate, SimParams, SpinState};
use crate::quadrature::simpson_refined;

/// Relative tolerance for the refinement of every spatial integral.
pub const SPACE_QUAD_TOL: f64 = 1e-8;
const MAX_REFINEMENTS: usize = 12;

fn position(site: usize, sites: usize, epsilon: f64) -> f64 {
    epsilon * coordinate(site, sites) as f64
}

/// Ring site carrying coordinate `c`, if `c` is a representative coordinate.
pub(crate) fn site_of(c: i64, sites: usize) -> Option<usize> {
    let l = sites as i64;
    let idx = c.rem_euclid(l) as usize;
    (coordinate(idx, sites) == c).then_some(idx)
}

/// `Y(G) = √ε Σ_x G(εx) ξ(x)`
pub fn eval_field(state: &SpinState, g: &TestFunction, epsilon: f64) -> f64 {
    let l = state.sites();
    let half = 0.5 * l as f64 * epsilon;
    if g.radius() > half {
        let tail = g.weighted_tail_mass(half);
        if tail > 1e-8 {
            log::warn!(
                "test function {} has weighted mass {tail:e} outside the window",
                g.name()
            );
        }
    }
    epsilon.sqrt()
        * (0..l)
            .map(|x| g.value(position(x, l, epsilon)) * state.spin(x) as f64)
            .sum::<f64>()
}

/// `(Y ⋆ J_N)(u) = √ε Σ_x J_N(u − εx) ξ(x)`
pub fn mollified_field(state: &SpinState, j: &Mollifier, n: f64, u: f64, epsilon: f64) -> f64 {
    epsilon.sqrt() * kernel_sum(state, j, n, u, epsilon, |x| state.spin(x) as f64)
}

/// `Σ_x J_N(u − εx) w(x)` over the sites within the kernel support.
fn kernel_sum<W: Fn(usize) -> f64>(
    state: &SpinState,
    j: &Mollifier,
    n: f64,
    u: f64,
    epsilon: f64,
    w: W,
) -> f64 {
    let l = state.sites();
    let r = j.support_radius(n);
    let lo = ((u - r) / epsilon).ceil() as i64;
    let hi = ((u + r) / epsilon).floor() as i64;
    let mut acc = 0.0;
    for c in lo..=hi {
        if let Some(x) = site_of(c, l) {
            acc += j.scaled(n, u - epsilon * c as f64) * w(x);
        }
    }
    acc
}

/// Default spatial step `min(ε, 1/(4N))`.
pub fn default_quad_step(epsilon: f64, n: f64) -> f64 {
    epsilon.min(0.25 / n)
}

/// Integration range covering the lattice (plus kernel support) and the
/// effective support of `G`.
fn u_range(state: &SpinState, g: &TestFunction, n: f64, epsilon: f64) -> (f64, f64) {
    let l = state.sites();
    let lo = -epsilon * ((l - 1) / 2) as f64 - 1.0 / n;
    let hi = epsilon * (l / 2) as f64 + 1.0 / n;
    (lo.max(-g.radius()), hi.min(g.radius()))
}

/// `∫ G'(u) (Y ⋆ J_N)²(u) du` by refined composite Simpson.
pub fn nonlinear_integral(
    state: &SpinState,
    g: &TestFunction,
    j: &Mollifier,
    n: f64,
    epsilon: f64,
    quad_step: f64,
) -> Result<f64> {
    let max = default_quad_step(epsilon, n);
    if quad_step > max * (1.0 + 1e-12) {
        return Err(Error::QuadratureStep {
            step: quad_step,
            max,
        });
    }
    let (a, b) = u_range(state, g, n, epsilon);
    simpson_refined(
        |u| g.deriv(u, 1) * mollified_field(state, j, n, u, epsilon).powi(2),
        a,
        b,
        quad_step,
        SPACE_QUAD_TOL,
        MAX_REFINEMENTS,
    )
}

/// `Σ_x G'(εx) ξ(x) ξ(x+1)`
pub fn discrete_pair_sum(state: &SpinState, g: &TestFunction, epsilon: f64) -> f64 {
    let l = state.sites();
    (0..l)
        .map(|x| {
            g.deriv(position(x, l, epsilon), 1)
                * (state.spin(x) * state.spin(state.right(x))) as f64
        })
        .sum()
}

/// `ε^{-3/2} Σ_x G(εx) L_ε ξ(x)`, the compensator integrand of `Y(G)`.
pub fn drift_term(state: &SpinState, g: &TestFunction, params: &SimParams) -> f64 {
    let l = state.sites();
    let eps = params.epsilon;
    eps.powf(-1.5)
        * (0..l)
            .map(|x| g.value(position(x, l, eps)) * apply_generator_local(state, x, params))
            .sum::<f64>()
}

/// Rate of the predictable quadratic variation of `M^{G,ε}` in macroscopic
/// time: `ε⁻² Σ_jumps rate · (ΔY(G))²`.
pub fn quadratic_variation_rate(state: &SpinState, g: &TestFunction, params: &SimParams) -> f64 {
    let l = state.sites();
    let eps = params.epsilon;
    let mut acc = 0.0;
    for x in 0..l {
        let y = state.right(x);
        let (sx, sy) = (state.spin(x), state.spin(y));
        if sx == sy {
            continue;
        }
        let rate = if sx == 1 {
            params.right_rate()
        } else {
            params.left_rate()
        };
        let dg = g.value(position(y, l, eps)) - g.value(position(x, l, eps));
        acc += rate * 4.0 * eps * dg * dg;
    }
    acc / (eps * eps)
}

/// `(V⁰, V¹, V², V³, V⁴)` for the configuration `state`:
///
/// * `V⁰ = (ε/2) Σ G''(εx) ξ(x)ξ(x+1)`
/// * `V¹ = Σ_x ∫ [G'(u) − G'(εx)] J_N(u−εx) Σ_x̃ ε J_N(u−εx̃) du ξ(x)ξ(x̃)`
/// * `V² = ε Σ_x G'(εx) ∫J_N² ξ(x)[ξ(x) − ξ(x+1)]`
/// * `V³ = ε Σ_{x≠x̃} G'(εx) ∫J_N(u−εx)J_N(u−εx̃)du ξ(x)[ξ(x̃) − ξ(x+1)]`
/// * `V⁴ = Σ_x G'(εx) ∫J_N(u−εx)[Σ_x̃ εJ_N(u−εx̃) − 1]du ξ(x)ξ(x+1)`
///
/// so that `V¹+V²+V³+V⁴ = ∫G'(Y⋆J_N)² − Σ G'(εx)ξ(x)ξ(x+1)`.
pub fn remainder_terms(
    state: &SpinState,
    g: &TestFunction,
    j: &Mollifier,
    n: f64,
    epsilon: f64,
) -> Result<[f64; 5]> {
    let l = state.sites();
    let eps = epsilon;
    let xi = |x: usize| state.spin(x) as f64;
    let gp = |x: usize| g.deriv(position(x, l, eps), 1);

    let v0 = 0.5
        * eps
        * (0..l)
            .map(|x| g.deriv(position(x, l, eps), 2) * xi(x) * xi(state.right(x)))
            .sum::<f64>();

    let (a, b) = u_range(state, g, n, eps);
    let v1 = simpson_refined(
        |u| {
            let outer = kernel_sum(state, j, n, u, eps, |x| (g.deriv(u, 1) - gp(x)) * xi(x));
            if outer == 0.0 {
                return 0.0;
            }
            outer * eps * kernel_sum(state, j, n, u, eps, xi)
        },
        a,
        b,
        default_quad_step(eps, n),
        SPACE_QUAD_TOL,
        MAX_REFINEMENTS,
    )?;

    let band = (2.0 / (n * eps)).ceil() as i64;
    let kernel: Vec<f64> = (0..=band).map(|d| j.overlap(n, eps * d as f64)).collect();
    let mass = j.mass(n);

    let mut v2 = 0.0;
    let mut v3 = 0.0;
    let mut v4 = 0.0;
    for x in 0..l {
        let c = coordinate(x, l);
        let right = xi(state.right(x));
        v2 += eps * gp(x) * kernel[0] * xi(x) * (xi(x) - right);
        let mut riemann = eps * kernel[0];
        for d in 1..=band {
            for cc in [c + d, c - d] {
                if let Some(y) = site_of(cc, l) {
                    let k = kernel[d as usize];
                    v3 += eps * gp(x) * k * xi(x) * (xi(y) - right);
                    riemann += eps * k;
                }
            }
        }
        v4 += gp(x) * (riemann - mass) * xi(x) * right;
    }
    Ok([v0, v1, v2, v3, v4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exclusion::sample_initial;
    use crate::rng::seeded;

    #[test]
    fn field_of_two_sites() {
        let s = SpinState::from_spins(&[1, -1]);
        let g = TestFunction::gaussian(std::f64::consts::FRAC_1_SQRT_2);
        let v = eval_field(&s, &g, 0.25);
        let expect = 0.5 * (1.0 - (-0.0625f64).exp());
        assert!((v - expect).abs() < 1e-14);
        assert!((v - 0.030_295).abs() < 5e-6);
        assert_eq!(eval_field(&s, &TestFunction::zero(), 0.25), 0.0);
    }

    #[test]
    fn mollified_field_support_and_constant_state() {
        let eps = 0.05;
        let l = 200;
        let j = Mollifier::bump();
        let n = 4.0;
        let s = SpinState::filled(l);
        // Riemann sum of ε^{-1/2} ∫ J_N.
        let v = mollified_field(&s, &j, n, 0.013, eps);
        assert!((v - eps.powf(-0.5)).abs() < 1e-3 * eps.powf(-0.5));
        // Far outside the lattice there is nothing to see.
        assert_eq!(mollified_field(&s, &j, n, 20.0, eps), 0.0);
    }

    #[test]
    fn mollified_field_reflection() {
        let eps = 0.1;
        let l = 41;
        let s = sample_initial(
            &SimParams::with_sites(eps, 1.0, l, 1.0).unwrap(),
            &mut seeded(2),
        );
        // x → -x: site with coordinate c receives the spin at coordinate -c.
        let reflected: Vec<u8> = (0..l)
            .map(|x| {
                let c = coordinate(x, l);
                s.occupation()[site_of(-c, l).unwrap()]
            })
            .collect();
        let r = SpinState::from_occupation(reflected);
        let j = Mollifier::bump();
        for &u in &[0.0, 0.33, -1.2, 1.7] {
            let a = mollified_field(&s, &j, 3.0, u, eps);
            let b = mollified_field(&r, &j, 3.0, -u, eps);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_sum_examples() {
        let eps = 0.05;
        let l = 400;
        let g = TestFunction::hermite(2);
        let all = SpinState::filled(l);
        // Σ G'(εx) ≈ ε⁻¹ ∫ G' = 0
        assert!(discrete_pair_sum(&all, &g, eps).abs() < 1e-8);
        let alt: Vec<i8> = (0..l).map(|x| if x % 2 == 0 { 1 } else { -1 }).collect();
        let alt = SpinState::from_spins(&alt);
        let sum_gp: f64 = (0..l).map(|x| g.deriv(position(x, l, eps), 1)).sum();
        assert!((discrete_pair_sum(&alt, &g, eps) + sum_gp).abs() < 1e-12);
        assert_eq!(discrete_pair_sum(&alt, &TestFunction::zero(), eps), 0.0);
    }

    #[test]
    fn drift_vanishes_on_constants_and_composes_locally() {
        let p = SimParams::with_sites(0.04, 1.0, 100, 1.0).unwrap();
        let g = TestFunction::hermite(3);
        assert_eq!(drift_term(&SpinState::filled(100), &g, &p), 0.0);
        // A single spin flip at site 5 on an all-up background.
        let mut spins = vec![1i8; 100];
        spins[5] = -1;
        let s = SpinState::from_spins(&spins);
        let expect: f64 = (4..=6)
            .map(|x| g.value(position(x, 100, 0.04)) * apply_generator_local(&s, x, &p))
            .sum::<f64>()
            * 0.04f64.powf(-1.5);
        assert!((drift_term(&s, &g, &p) - expect).abs() < 1e-9 * expect.abs().max(1.0));
    }

    #[test]
    fn nonlinear_integral_trivial_cases() {
        let eps = 0.1;
        let p = SimParams::with_sites(eps, 1.0, 64, 1.0).unwrap();
        let s = sample_initial(&p, &mut seeded(3));
        let j = Mollifier::bump();
        let v = nonlinear_integral(&s, &TestFunction::zero(), &j, 4.0, eps, 0.05).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(
            nonlinear_integral(&s, &TestFunction::hermite(1), &j, 4.0, eps, 0.2),
            Err(Error::QuadratureStep { .. })
        ));
        // Spin pattern symmetric under x → -x and G' odd: integral vanishes.
        let sym: Vec<u8> = (0..64)
            .map(|x| {
                let c = coordinate(x, 64).abs();
                u8::from(c % 3 == 0 || c == 32)
            })
            .collect();
        let s = SpinState::from_occupation(sym);
        let v = nonlinear_integral(&s, &TestFunction::gaussian(0.3), &j, 4.0, eps, 0.025).unwrap();
        assert!(v.abs() < 1e-8, "{v}");
    }

    #[test]
    fn rewrite_identity_on_random_state() {
        let eps = 0.1;
        let p = SimParams::with_sites(eps, 1.0, 64, 1.0).unwrap();
        let s = sample_initial(&p, &mut seeded(8));
        let g = TestFunction::hermite(2);
        for j in [Mollifier::bump(), Mollifier::poly_bump()] {
            let n = 4.0;
            let nl = nonlinear_integral(&s, &g, &j, n, eps, default_quad_step(eps, n)).unwrap();
            let pair = discrete_pair_sum(&s, &g, eps);
            let v = remainder_terms(&s, &g, &j, n, eps).unwrap();
            let sum: f64 = v[1..].iter().sum();
            assert!(
                (nl - pair - sum).abs() < 1e-7 * (nl.abs() + pair.abs() + 1.0),
                "{:?}: {nl} - {pair} vs {sum}",
                j.kind()
            );
        }
    }

    #[test]
    fn remainders_vanish_where_they_should() {
        let eps = 0.1;
        let l = 64;
        let j = Mollifier::bump();
        let v =
            remainder_terms(&SpinState::filled(l), &TestFunction::zero(), &j, 4.0, eps).unwrap();
        assert!(v.iter().all(|x| *x == 0.0));
        // ξ constant near supp G': the factor ξ(x) − ξ(x+1) kills V².
        let g = TestFunction::gaussian(0.2);
        let spins: Vec<i8> = (0..l)
            .map(|x| if coordinate(x, l).abs() < 25 { 1 } else { -1 })
            .collect();
        let v = remainder_terms(&SpinState::from_spins(&spins), &g, &j, 4.0, eps).unwrap();
        assert!(v[2].abs() < 1e-12, "{}", v[2]);
    }
}
