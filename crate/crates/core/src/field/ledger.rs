//! Pathwise accumulation of the martingale decomposition of `Y_t(G)`.
//!
//! Every integrand is a spin polynomial of degree at most two, constant
//! between jumps, so time integrals are accumulated exactly as
//! `value × holding time`. Jumps update the integrands by local flip deltas.
//!
//! Sign convention for the Taylor expansion of the drift:
//! `ε^{-3/2} Σ G(εx) L_ε ξ(x) = Y(G'') − γ Σ G'(εx)ξξ₊ − γ V⁰ + (Taylor residual)`
//! with `V⁰ = (ε/2) Σ G''(εx) ξ(x)ξ(x+1)`. The closing identities are
//!
//! * `M + R − γR⁰ = Y_t − Y_0 − ∫Y(G'') + γ∫Σ G'ξξ₊`
//! * `∫∫G'(Y⋆J_N)² − ∫Σ G'ξξ₊ = R¹ + R² + R³ + R⁴`
//! * `𝔐_N = M + R − γR⁰ + γ(R¹ + R² + R³ + R⁴)`

use super::forms::SpinForms;
use super::pairing::{default_quad_step, eval_field, nonlinear_integral, site_of, SPACE_QUAD_TOL};
use super::{Mollifier, TestFunction};
use crate::basis::DirichletBasis;
use crate::error::{Error, Result};
use crate::exclusion::{coordinate, JumpEvent, Observer, SimParams, SpinState, Trajectory};
use crate::quadrature::integrate;

const NEAR: usize = 6;
const Y: usize = 0;
const Y2: usize = 1;
const DRIFT: usize = 2;
const PAIR: usize = 3;
const V0: usize = 4;
const QV: usize = 5;

const WIDE: usize = 5;
const NL: usize = 0;

/// Precomputed coefficient tables for a set of test functions and
/// mollifier scales on one lattice.
#[derive(Debug, Clone)]
pub struct LedgerPlan {
    params: SimParams,
    tests: Vec<TestFunction>,
    scales: Vec<usize>,
    mollifier: Mollifier,
    modes: usize,
    near: SpinForms,
    wide: Vec<SpinForms>,
    cell_status: Vec<std::result::Result<(), String>>,
}

impl LedgerPlan {
    /// `modes > 0` additionally accumulates `∫ g_m(t) · integrand dt` for the
    /// Dirichlet modes `m = 1..=modes` on `[0, horizon]`.
    pub fn new(
        params: SimParams,
        tests: Vec<TestFunction>,
        scales: Vec<usize>,
        mollifier: Mollifier,
        modes: usize,
    ) -> Result<Self> {
        params.validate()?;
        let l = params.sites;
        let eps = params.epsilon;
        let a = params.asymmetry();
        let pos = |x: usize| eps * coordinate(x, l) as f64;
        let right = |x: usize| (x + 1) % l;
        let left = |x: usize| (x + l - 1) % l;

        let mut near = SpinForms::new(l, 1, NEAR * tests.len());
        for (gi, g) in tests.iter().enumerate() {
            let o = gi * NEAR;
            let gv: Vec<f64> = (0..l).map(|x| g.value(pos(x))).collect();
            for x in 0..l {
                let u = pos(x);
                near.add_linear(o + Y, x, eps.sqrt() * gv[x]);
                near.add_linear(o + Y2, x, eps.sqrt() * g.deriv(u, 2));
                // Σ G(x)[ξ(x−1) − 2ξ(x) + ξ(x+1)] = Σ ξ(x)[G(x−1) + G(x+1) − 2G(x)]
                near.add_linear(
                    o + DRIFT,
                    x,
                    eps.powf(-1.5) * (gv[left(x)] + gv[right(x)] - 2.0 * gv[x]),
                );
                // √εγ Σ G(x)[ξ(x)ξ(x+1) − ξ(x−1)ξ(x)] = √εγ Σ [G(x) − G(x+1)] ξ(x)ξ(x+1)
                near.add_product(
                    o + DRIFT,
                    x,
                    right(x),
                    eps.powf(-1.5) * a * (gv[x] - gv[right(x)]),
                );
                near.add_product(o + PAIR, x, right(x), g.deriv(u, 1));
                near.add_product(o + V0, x, right(x), 0.5 * eps * g.deriv(u, 2));
                // Bond (x, x+1) fires iff ξ(x) ≠ ξ(x+1), at rate 1 + √εγ ξ(x):
                // ½(1 − ξξ₊)(1 + aξ) = ½(1 + aξ(x) − aξ(x+1) − ξ(x)ξ(x+1)).
                let c = 4.0 * (gv[right(x)] - gv[x]).powi(2) / eps;
                near.add_constant(o + QV, 0.5 * c);
                near.add_linear(o + QV, x, 0.5 * a * c);
                near.add_linear(o + QV, right(x), -0.5 * a * c);
                near.add_product(o + QV, x, right(x), -0.5 * c);
            }
        }

        let mut wide = Vec::with_capacity(scales.len());
        let cell_status = Vec::with_capacity(tests.len() * scales.len());
        for &n in &scales {
            let nf = n as f64;
            let band = (2.0 / (nf * eps)).ceil() as usize;
            if 2 * band >= l {
                return Err(Error::InvalidParams(format!(
                    "mollifier scale N={n} spans {band} sites, too wide for {l} sites"
                )));
            }
            let kernel: Vec<f64> = (0..=band)
                .map(|d| mollifier.overlap(nf, eps * d as f64))
                .collect();
            let mass = mollifier.mass(nf);
            let mut forms = SpinForms::new(l, band.max(1), WIDE * tests.len());
            for (gi, g) in tests.iter().enumerate() {
                let o = gi * WIDE;
                for x in 0..l {
                    let (px, gpx) = (pos(x), g.deriv(pos(x), 1));
                    let c = coordinate(x, l);
                    // Nonlinear term: ε Σ_{x,y} ∫G' J_N(·−εx) J_N(·−εy) ξ(x)ξ(y).
                    for d in 0..=band as i64 {
                        let Some(y) = site_of(c + d, l) else { continue };
                        let py = pos(y);
                        let (lo, hi) = (py - 1.0 / nf, px + 1.0 / nf);
                        let kern =
                            |u: f64| mollifier.scaled(nf, u - px) * mollifier.scaled(nf, u - py);
                        let aij = integrate(|u| g.deriv(u, 1) * kern(u), lo, hi, 0.125 / nf);
                        let weight = if d == 0 { 1.0 } else { 2.0 };
                        forms.add_product(o + NL, x, y, weight * eps * aij);
                    }
                    // V¹ is not symmetric in (x, y): both orientations separately.
                    for d in -(band as i64)..=band as i64 {
                        let Some(y) = site_of(c + d, l) else { continue };
                        let py = pos(y);
                        let (lo, hi) = (px.max(py) - 1.0 / nf, px.min(py) + 1.0 / nf);
                        if hi <= lo {
                            continue;
                        }
                        let bij = integrate(
                            |u| {
                                (g.deriv(u, 1) - gpx)
                                    * mollifier.scaled(nf, u - px)
                                    * mollifier.scaled(nf, u - py)
                            },
                            lo,
                            hi,
                            0.125 / nf,
                        );
                        forms.add_product(o + 1, x, y, eps * bij);
                    }
                    // V²
                    forms.add_constant(o + 2, eps * gpx * kernel[0]);
                    forms.add_product(o + 2, x, right(x), -eps * gpx * kernel[0]);
                    // V³ and the Riemann sum entering V⁴.
                    let mut riemann = eps * kernel[0];
                    for d in 1..=band as i64 {
                        for y in [site_of(c + d, l), site_of(c - d, l)].into_iter().flatten() {
                            let k = kernel[d as usize];
                            forms.add_product(o + 3, x, y, eps * gpx * k);
                            forms.add_product(o + 3, x, right(x), -eps * gpx * k);
                            riemann += eps * k;
                        }
                    }
                    forms.add_product(o + 4, x, right(x), gpx * (riemann - mass));
                }
            }
            wide.push(forms);
        }

        let mut plan = Self {
            params,
            tests,
            scales,
            mollifier,
            modes,
            near,
            wide,
            cell_status,
        };
        plan.cell_status = plan.validate_cells();
        Ok(plan)
    }

    /// Compare the tabulated nonlinear term with direct refined quadrature on
    /// a fixed pseudo-random configuration; a cell whose quadrature does not
    /// converge or disagrees is marked.
    fn validate_cells(&self) -> Vec<std::result::Result<(), String>> {
        let l = self.params.sites;
        let probe = SpinState::from_occupation(
            (0..l)
                .map(|x| (((x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 61) & 1) as u8)
                .collect(),
        );
        let spins = probe.spins();
        let mut out = Vec::new();
        for (gi, g) in self.tests.iter().enumerate() {
            for (ni, &n) in self.scales.iter().enumerate() {
                let nf = n as f64;
                let mut vals = vec![0.0; self.wide[ni].outputs()];
                self.wide[ni].evaluate(&spins, &mut vals);
                let tabulated = vals[gi * WIDE + NL];
                let status = match nonlinear_integral(
                    &probe,
                    g,
                    &self.mollifier,
                    nf,
                    self.params.epsilon,
                    default_quad_step(self.params.epsilon, nf),
                ) {
                    Ok(direct) => {
                        let scale = 1.0 + direct.abs();
                        if (direct - tabulated).abs() <= 1e-6 * scale {
                            Ok(())
                        } else {
                            Err(format!("tabulated {tabulated} vs direct {direct}"))
                        }
                    }
                    Err(e) => Err(e.to_string()),
                };
                out.push(status);
            }
        }
        out
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn tests(&self) -> &[TestFunction] {
        &self.tests
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Quadrature status of cell `(test, scale)`.
    pub fn cell_status(&self, gi: usize, ni: usize) -> std::result::Result<(), &str> {
        self.cell_status[gi * self.scales.len() + ni]
            .as_ref()
            .map(|_| ())
            .map_err(|s| s.as_str())
    }

    /// Absolute coefficient mass of the spatial forms for `(test, scale)`,
    /// used to scale quadrature tolerances of time-integrated identities.
    pub fn quadrature_scale(&self, gi: usize, ni: usize) -> f64 {
        let l = self.params.sites;
        let ones = vec![1i8; l];
        let alt: Vec<i8> = (0..l).map(|x| if x % 2 == 0 { 1 } else { -1 }).collect();
        let mut acc: f64 = 0.0;
        for spins in [&ones, &alt] {
            let mut v = vec![0.0; self.wide[ni].outputs()];
            self.wide[ni].evaluate(spins, &mut v);
            acc = acc.max(v[gi * WIDE..(gi + 1) * WIDE].iter().map(|x| x.abs()).sum());
        }
        acc + self.tests[gi].norms().weighted_sup[1] / self.params.epsilon
    }

    /// Fresh accumulator positioned at `state`, time 0.
    pub fn start(&self, state: &SpinState) -> LedgerState<'_> {
        let spins = state.spins();
        let mut near_vals = vec![0.0; self.near.outputs()];
        self.near.evaluate(&spins, &mut near_vals);
        let wide_vals: Vec<Vec<f64>> = self
            .wide
            .iter()
            .map(|f| {
                let mut v = vec![0.0; f.outputs()];
                f.evaluate(&spins, &mut v);
                v
            })
            .collect();
        LedgerState {
            plan: self,
            spins,
            time: 0.0,
            near_int: vec![0.0; near_vals.len()],
            near_modes: vec![0.0; near_vals.len() * self.modes],
            wide_int: wide_vals.iter().map(|v| vec![0.0; v.len()]).collect(),
            wide_modes: wide_vals
                .iter()
                .map(|v| vec![0.0; v.len() * self.modes])
                .collect(),
            near_vals,
            wide_vals,
            basis: DirichletBasis::new(self.params.horizon),
            flips: 0,
        }
    }

    /// Pathwise decomposition of test function `gi` from sampled records.
    pub fn decompose(&self, records: &[SampleRecord], gi: usize) -> DecompositionLedger {
        let gamma = self.params.gamma;
        let o = gi * NEAR;
        let y0 = records.first().map(|r| r.near[o + Y]).unwrap_or(0.0);
        let rows = records
            .iter()
            .map(|r| {
                let y = r.near[o + Y];
                let drift = r.near_int[o + DRIFT];
                let heat = r.near_int[o + Y2];
                let pair = r.near_int[o + PAIR];
                let v0 = r.near_int[o + V0];
                let martingale = y - y0 - drift;
                let taylor = drift - (heat - gamma * pair - gamma * v0);
                let mut nonlinear = Vec::new();
                let mut remainders = Vec::new();
                let mut mollified = Vec::new();
                for wi in &r.wide_int {
                    let w = &wi[gi * WIDE..(gi + 1) * WIDE];
                    nonlinear.push(w[NL]);
                    remainders.push([v0, w[1], w[2], w[3], w[4]]);
                    mollified.push(y - y0 - heat + gamma * w[NL]);
                }
                LedgerRow {
                    t: r.t,
                    y,
                    y0,
                    drift_integral: drift,
                    heat_integral: heat,
                    pair_integral: pair,
                    v0_integral: v0,
                    qv_integral: r.near_int[o + QV],
                    martingale,
                    taylor_residual: taylor,
                    nonlinear_integral: nonlinear,
                    remainders,
                    mollified,
                    gamma,
                }
            })
            .collect();
        DecompositionLedger {
            test: self.tests[gi].name().to_string(),
            rows,
        }
    }

    /// Basis pairings `⟨g_m ⊗ G, ∂_u(Y⋆J_N)² − (∂_tY − ∂²_uY − ∂_tM)/γ⟩` for
    /// `m = 1..=modes`, from the mode integrals of the final record:
    /// `−∫ g_m(t) [∫G'(Y⋆J_N)² + (ε^{-2}L_εY(G) − Y(G''))/γ] dt`.
    pub fn sobolev_pairings(&self, last: &SampleRecord, gi: usize, ni: usize) -> Vec<f64> {
        let m = self.modes;
        let gamma = self.params.gamma;
        (0..m)
            .map(|k| {
                let nl = last.wide_modes[ni][(gi * WIDE + NL) * m + k];
                let drift = last.near_modes[(gi * NEAR + DRIFT) * m + k];
                let heat = last.near_modes[(gi * NEAR + Y2) * m + k];
                -(nl + (drift - heat) / gamma)
            })
            .collect()
    }
}

/// Running accumulator for one replica.
#[derive(Debug, Clone)]
pub struct LedgerState<'a> {
    plan: &'a LedgerPlan,
    spins: Vec<i8>,
    time: f64,
    near_vals: Vec<f64>,
    near_int: Vec<f64>,
    near_modes: Vec<f64>,
    wide_vals: Vec<Vec<f64>>,
    wide_int: Vec<Vec<f64>>,
    wide_modes: Vec<Vec<f64>>,
    basis: DirichletBasis,
    flips: u64,
}

/// Values and time integrals of every tabulated integrand at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub t: f64,
    pub near: Vec<f64>,
    pub near_int: Vec<f64>,
    pub near_modes: Vec<f64>,
    pub wide: Vec<Vec<f64>>,
    pub wide_int: Vec<Vec<f64>>,
    pub wide_modes: Vec<Vec<f64>>,
}

impl LedgerState<'_> {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn snapshot(&self) -> SampleRecord {
        SampleRecord {
            t: self.time,
            near: self.near_vals.clone(),
            near_int: self.near_int.clone(),
            near_modes: self.near_modes.clone(),
            wide: self.wide_vals.clone(),
            wide_int: self.wide_int.clone(),
            wide_modes: self.wide_modes.clone(),
        }
    }

    /// Re-evaluate every form from scratch and return the largest deviation
    /// from the incrementally maintained values.
    pub fn drift_from_fresh(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut v = vec![0.0; self.near_vals.len()];
        self.plan.near.evaluate(&self.spins, &mut v);
        for (a, b) in v.iter().zip(&self.near_vals) {
            worst = worst.max((a - b).abs());
        }
        for (f, cur) in self.plan.wide.iter().zip(&self.wide_vals) {
            let mut v = vec![0.0; cur.len()];
            f.evaluate(&self.spins, &mut v);
            for (a, b) in v.iter().zip(cur) {
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }

    fn flip(&mut self, site: usize) {
        self.plan
            .near
            .flip_delta(&self.spins, site, &mut self.near_vals);
        for (f, v) in self.plan.wide.iter().zip(self.wide_vals.iter_mut()) {
            f.flip_delta(&self.spins, site, v);
        }
        self.spins[site] = -self.spins[site];
    }

    fn refresh(&mut self) {
        self.plan.near.evaluate(&self.spins, &mut self.near_vals);
        for (f, v) in self.plan.wide.iter().zip(self.wide_vals.iter_mut()) {
            f.evaluate(&self.spins, v);
        }
    }
}

fn accumulate(vals: &[f64], int: &mut [f64], dt: f64) {
    for (i, v) in int.iter_mut().zip(vals) {
        *i += v * dt;
    }
}

fn accumulate_modes(vals: &[f64], modes: &mut [f64], weights: &[f64]) {
    let m = weights.len();
    for (k, v) in vals.iter().enumerate() {
        for (slot, w) in modes[k * m..(k + 1) * m].iter_mut().zip(weights) {
            *slot += v * w;
        }
    }
}

impl Observer for LedgerState<'_> {
    fn on_hold(&mut self, micro_dt: f64) {
        let dt = self.plan.params.to_macro(micro_dt);
        accumulate(&self.near_vals, &mut self.near_int, dt);
        for (v, i) in self.wide_vals.iter().zip(self.wide_int.iter_mut()) {
            accumulate(v, i, dt);
        }
        if self.plan.modes > 0 {
            let (t0, t1) = (self.time, self.time + dt);
            let weights: Vec<f64> = (1..=self.plan.modes)
                .map(|m| self.basis.antiderivative(m, t1) - self.basis.antiderivative(m, t0))
                .collect();
            accumulate_modes(&self.near_vals, &mut self.near_modes, &weights);
            for (v, i) in self.wide_vals.iter().zip(self.wide_modes.iter_mut()) {
                accumulate_modes(v, i, &weights);
            }
        }
        self.time += dt;
    }

    fn on_jump(&mut self, event: &JumpEvent, _state: &SpinState) {
        let l = self.spins.len();
        self.flip(event.source);
        self.flip(event.target(l));
        self.flips += 1;
        // Periodic re-evaluation keeps rounding drift of the running values bounded.
        if self.flips % 65_536 == 0 {
            self.refresh();
        }
    }
}

/// One sample time of the pathwise decomposition of `Y_t(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub y: f64,
    pub y0: f64,
    /// `∫₀ᵗ ε⁻² L_ε Y_s(G) ds`
    pub drift_integral: f64,
    /// `∫₀ᵗ Y_s(G'') ds`
    pub heat_integral: f64,
    /// `∫₀ᵗ Σ G'(εx) ξξ₊ ds`
    pub pair_integral: f64,
    /// `R⁰ = ∫₀ᵗ (ε/2) Σ G''(εx) ξξ₊ ds`
    pub v0_integral: f64,
    /// Predictable quadratic variation `⟨M^{G,ε}⟩_t`
    pub qv_integral: f64,
    /// `M^{G,ε}_t`
    pub martingale: f64,
    /// `R^G_ε(t)`
    pub taylor_residual: f64,
    /// `∫₀ᵗ∫ G'(Y_s⋆J_N)² du ds` per scale `N`
    pub nonlinear_integral: Vec<f64>,
    /// `(R⁰, R¹, R², R³, R⁴)` per scale `N`
    pub remainders: Vec<[f64; 5]>,
    /// `𝔐_N(Y)_t^G` per scale `N`
    pub mollified: Vec<f64>,
    gamma: f64,
}

impl LedgerRow {
    /// Both sides of the Taylor-expanded martingale decomposition.
    pub fn approxi_sides(&self) -> (f64, f64) {
        let lhs = self.martingale + self.taylor_residual - self.gamma * self.v0_integral;
        let rhs = self.y - self.y0 - self.heat_integral + self.gamma * self.pair_integral;
        (lhs, rhs)
    }

    /// `(∫∫G'(Y⋆J_N)² − ∫ΣG'ξξ₊, R¹+R²+R³+R⁴)` for scale index `ni`.
    pub fn rewrite_sides(&self, ni: usize) -> (f64, f64) {
        let r = &self.remainders[ni];
        (
            self.nonlinear_integral[ni] - self.pair_integral,
            r[1] + r[2] + r[3] + r[4],
        )
    }

    /// `(𝔐_N, M + R − γR⁰ + γΣR^i)` for scale index `ni`.
    pub fn mollified_sides(&self, ni: usize) -> (f64, f64) {
        let r = &self.remainders[ni];
        (
            self.mollified[ni],
            self.martingale + self.taylor_residual - self.gamma * r[0]
                + self.gamma * (r[1] + r[2] + r[3] + r[4]),
        )
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionLedger {
    pub test: String,
    pub rows: Vec<LedgerRow>,
}

/// `√ε (1/6)(2 + √ε|γ|)(π + 2ε) sup|(1+u²)G'''| · t`
pub fn taylor_bound(params: &SimParams, g: &TestFunction, t: f64) -> f64 {
    let eps = params.epsilon;
    eps.sqrt() / 6.0
        * (2.0 + params.asymmetry().abs())
        * (std::f64::consts::PI + 2.0 * eps)
        * g.norms().weighted_sup[3]
        * t
}

/// Advance `sim`-equivalent dynamics for one replica, recording the ledger
/// at each macroscopic sample time.
pub fn record_path<R: rand::Rng + ?Sized>(
    plan: &LedgerPlan,
    initial: SpinState,
    rng: &mut R,
    sample_times: &[f64],
) -> Vec<SampleRecord> {
    let params = *plan.params();
    let mut sim = crate::exclusion::Simulator::new(params, initial);
    let mut ledger = plan.start(sim.state());
    let mut out = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let dt = (params.to_micro(t) - sim.micro_time()).max(0.0);
        sim.advance(rng, dt, &mut ledger);
        out.push(ledger.snapshot());
    }
    out
}

fn replay_records(plan: &LedgerPlan, traj: &Trajectory) -> Vec<SampleRecord> {
    let mut ledger = plan.start(&traj.initial);
    let mut out = Vec::with_capacity(traj.sample_times.len());
    traj.replay(&mut ledger, |_, _, l| out.push(l.snapshot()));
    out
}

/// `M^{G,ε}_t` at every sample time of `traj`.
pub fn martingale_path(traj: &Trajectory, g: &TestFunction) -> Result<Vec<f64>> {
    let plan = LedgerPlan::new(traj.params, vec![g.clone()], vec![], Mollifier::bump(), 0)?;
    let records = replay_records(&plan, traj);
    Ok(plan
        .decompose(&records, 0)
        .rows
        .iter()
        .map(|r| r.martingale)
        .collect())
}

/// `R^G_ε(t)` at every sample time of `traj`.
pub fn taylor_residual(traj: &Trajectory, g: &TestFunction) -> Result<Vec<f64>> {
    let plan = LedgerPlan::new(traj.params, vec![g.clone()], vec![], Mollifier::bump(), 0)?;
    let records = replay_records(&plan, traj);
    Ok(plan
        .decompose(&records, 0)
        .rows
        .iter()
        .map(|r| r.taylor_residual)
        .collect())
}

/// `𝔐_N(Y^ε)_t^G` at every sample time of `traj`.
pub fn mollified_functional_path(
    traj: &Trajectory,
    g: &TestFunction,
    j: &Mollifier,
    n: usize,
) -> Result<Vec<f64>> {
    let plan = LedgerPlan::new(traj.params, vec![g.clone()], vec![n], *j, 0)?;
    if let Err(e) = plan.cell_status(0, 0) {
        log::warn!("nonlinear term for {} at N={n}: {e}", g.name());
        return Err(Error::QuadratureNonConvergent {
            levels: 0,
            change: f64::NAN,
            tol: SPACE_QUAD_TOL,
        });
    }
    let records = replay_records(&plan, traj);
    Ok(plan
        .decompose(&records, 0)
        .rows
        .iter()
        .map(|r| r.mollified[0])
        .collect())
}

/// Full decomposition of `traj` for one test function and mollifier scales.
pub fn decompose_trajectory(
    traj: &Trajectory,
    g: &TestFunction,
    j: &Mollifier,
    scales: &[usize],
) -> Result<DecompositionLedger> {
    let plan = LedgerPlan::new(traj.params, vec![g.clone()], scales.to_vec(), *j, 0)?;
    let records = replay_records(&plan, traj);
    Ok(plan.decompose(&records, 0))
}

/// Direct (non-incremental) field value, for cross-checks of the ledger.
pub fn direct_field(state: &SpinState, g: &TestFunction, params: &SimParams) -> f64 {
    eval_field(state, g, params.epsilon)
}
