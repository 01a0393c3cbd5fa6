//! Weighted sup norms `sup_u |(1+u²) ∂^m G(u)|` and the `L²` bound that
//! controls them.

use crate::error::{Error, Result};
use crate::field::TestFunction;
use crate::quadrature::integrate;

/// `sup_u |(1+u²) f(u)|` over `[-radius, radius]`, located on a dense grid
/// and polished by golden-section search around near-maximal grid points.
/// Fails with [`Error::NonDecaying`] if widening the grid fourfold raises the
/// value by more than `1e-4` relative.
pub fn weighted_sup<F: Fn(f64) -> f64>(f: F, radius: f64) -> Result<f64> {
    let w = |u: f64| ((1.0 + u * u) * f(u)).abs();
    let inner = grid_sup(&w, radius);
    let outer_coarse = {
        let n = 4000;
        let h = 8.0 * radius / n as f64;
        (0..=n)
            .map(|i| w(-4.0 * radius + i as f64 * h))
            .fold(0.0, f64::max)
    };
    if outer_coarse > inner * (1.0 + 1e-4) && outer_coarse > 1e-300 {
        return Err(Error::NonDecaying {
            inner,
            outer: outer_coarse,
        });
    }
    Ok(inner)
}

fn grid_sup<W: Fn(f64) -> f64>(w: &W, radius: f64) -> f64 {
    let h = (radius / 2000.0).min(0.01);
    let n = (2.0 * radius / h).ceil() as usize;
    let vals: Vec<f64> = (0..=n).map(|i| w(-radius + i as f64 * h)).collect();
    let best = vals.iter().cloned().fold(0.0, f64::max);
    if best == 0.0 {
        return 0.0;
    }
    let mut sup = best;
    for i in 1..n {
        if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] > 0.5 * best {
            let u = -radius + i as f64 * h;
            sup = sup.max(golden_max(w, u - h, u + h));
        }
    }
    sup
}

fn golden_max<W: Fn(f64) -> f64>(w: &W, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (w(c), w(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = w(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = w(d);
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    fc.max(fd)
}

/// `sup_u |(1+u²) ∂^m G(u)|` for `m ≤ 3`.
pub fn weighted_sup_norm(g: &TestFunction, m: usize) -> Result<f64> {
    if m > 3 {
        return Err(Error::DerivativeOrder(m));
    }
    weighted_sup(|u| g.deriv(u, m), g.radius())
}

/// Right-hand side of the weighted `L²` control of the weighted sup norm:
/// `4‖(1+u²)H‖² + 2‖(1+u²)H‖‖(1+u²)H'‖`, with `H = ∂^m G`.
pub fn sup_by_l2_bound(g: &TestFunction, m: usize) -> f64 {
    let r = g.radius();
    let a2 = integrate(|u| ((1.0 + u * u) * g.deriv(u, m)).powi(2), -r, r, 0.25);
    let b2 = integrate(|u| ((1.0 + u * u) * g.deriv(u, m + 1)).powi(2), -r, r, 0.25);
    4.0 * a2 + 2.0 * a2.sqrt() * b2.sqrt()
}
