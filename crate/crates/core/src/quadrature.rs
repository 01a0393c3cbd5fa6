//! One-dimensional quadrature rules shared by the field and basis layers.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Composite Simpson rule with `intervals` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Composite Simpson on a step no larger than `max_step`, halving the step
/// until two successive values agree to `rel_tol` relative to the integral of
/// `|f|`. Returns the finest value.
pub fn simpson_refined<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    max_step: f64,
    rel_tol: f64,
    max_levels: usize,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut n = (((b - a) / max_step).ceil() as usize).max(2);
    n += n % 2;
    let mut prev = simpson(&f, a, b, n);
    let mut change = f64::INFINITY;
    for _ in 0..max_levels {
        n *= 2;
        let next = simpson(&f, a, b, n);
        let scale = simpson(|u| f(u).abs(), a, b, n);
        change = (next - prev).abs();
        if change <= rel_tol * scale || scale == 0.0 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergent {
        levels: max_levels,
        change,
        tol: rel_tol,
    })
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            dp = n as f64 * (z * pn - p0) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Composite 20-point Gauss–Legendre over `panels` equal panels.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gl20();
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(mid + half * xi);
        }
        acc += s * half;
    }
    acc
}

/// Integral of a smooth function over [a, b] with panels of width at most `panel_width`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panel_width: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a) / panel_width).ceil().max(1.0) as usize;
    gauss_legendre_composite(f, a, b, panels)
}

/// Gauss–Hermite rule for integrals `∫ f(u) du` of functions that decay like
/// `exp(-u²)·polynomial`. Returns nodes and the weights `w_k·exp(x_k²)`, so that
/// `Σ w̃_k f(x_k)` is exact whenever `f(u)·exp(u²)` is a polynomial of degree
/// below `2n`.
pub fn gauss_hermite_functions(n: usize) -> (Vec<f64>, Vec<f64>) {
    use nalgebra::DMatrix;
    // Jacobi matrix of the physicists' Hermite recurrence gives initial nodes.
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let mut nodes: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        // Newton polish on the normalised Hermite function h_n.
        for _ in 0..20 {
            let h = crate::basis::hermite::hermite_functions_0(n, *x);
            let dh = (2.0 * n as f64).sqrt() * h[n - 1] - *x * h[n];
            let step = h[n] / dh;
            *x -= step;
            if step.abs() < 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        let h = crate::basis::hermite::hermite_functions_0(n, *x);
        let christoffel: f64 = h[..n].iter().map(|v| v * v).sum();
        weights.push(1.0 / christoffel);
    }
    (nodes, weights)
}
