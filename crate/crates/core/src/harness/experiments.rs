//! The experiments behind the CLI subcommands. Each returns a [`Report`]
//! with an estimate table and pass/fail checks.
//!
//! Conventions: "within 4 SE" compares against the mean's standard error;
//! monotonicity "within CI" uses the paired difference of consecutive cells
//! at z = 1.96.

use rand::Rng;
use rayon::prelude::*;

use super::ensemble::{field_values, pool, EnsembleSet, Layout, SOBOLEV_MODES};
use super::{ExperimentConfig, Report};
use crate::basis::{neg_sobolev_norm, Coefficients, SobolevWeights};
use crate::error::{Error, Result};
use crate::exclusion::{exact_generator_matrix, state_index, SimParams, Simulator, SpinState};
use crate::field::{taylor_bound, DecompositionLedger, Mollifier, MollifierKind, TestFunction};
use crate::gaussian::limit_covariance;
use crate::rng::replica_stream;
use crate::stats::{
    covariance_estimate, ks_test_normal, linear_fit, mean_estimate, trapezoid, variance_estimate,
    Estimate,
};

pub const Z_CI: f64 = 1.96;
pub const Z_SE: f64 = 4.0;
/// Replicas required by the distributional martingale checks.
pub const MIN_DISTRIBUTION_REPLICAS: usize = 200;

fn exact(value: f64, count: usize) -> Estimate {
    Estimate {
        value,
        stderr: 0.0,
        count,
    }
}

/// Paired check that `a` (at the smaller N) is not below `b` beyond the CI.
fn not_increasing(a: &[f64], b: &[f64]) -> (bool, Estimate) {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let e = mean_estimate(&diff);
    (e.value >= -Z_CI * e.stderr, e)
}

fn within_factor(ratio: f64, target: f64, factor: f64) -> bool {
    ratio >= target / factor && ratio <= target * factor
}

/// Index of the sample time nearest `t`.
fn nearest(times: &[f64], t: f64) -> usize {
    let mut best = 0;
    for (k, &s) in times.iter().enumerate() {
        if (s - t).abs() < (times[best] - t).abs() {
            best = k;
        }
    }
    best
}

fn configured_tests(set: &EnsembleSet) -> Vec<usize> {
    set.config
        .hermite_indices
        .iter()
        .map(|&n| set.layout.hermite(n))
        .collect()
}

fn column<F: Fn(&DecompositionLedger) -> f64>(ledgers: &[DecompositionLedger], f: F) -> Vec<f64> {
    ledgers.iter().map(f).collect()
}

/// `Y_t(G)` mean and variance at every sample time, and the stationarity checks
/// at `t ∈ {0, T/2, T}`: mean within 4 SE of 0, variance within 5% of
/// `ε Σ G(εx)²` and within 10% of `‖G‖₂²`.
fn field_statistics(
    report: &mut Report,
    params: &SimParams,
    times: &[f64],
    tests: &[(String, TestFunction)],
    values: &dyn Fn(usize, usize) -> Vec<f64>,
) {
    let eps = params.epsilon;
    let l = params.sites;
    let checked = [0, nearest(times, 0.5 * params.horizon), times.len() - 1];
    for (gi, (name, g)) in tests.iter().enumerate() {
        let lattice: f64 = eps
            * (0..l)
                .map(|x| {
                    g.value(eps * crate::exclusion::coordinate(x, l) as f64)
                        .powi(2)
                })
                .sum::<f64>();
        let l2 = g.norms().l2.powi(2);
        for (k, &t) in times.iter().enumerate() {
            let ys = values(k, gi);
            let m = mean_estimate(&ys);
            let v = variance_estimate(&ys);
            report
                .table
                .push("field_mean", name, eps, params.gamma, None, Some(t), m);
            report
                .table
                .push("field_var", name, eps, params.gamma, None, Some(t), v);
            if checked.contains(&k) {
                report.check(
                    format!("eps={eps} {name} t={t} field mean"),
                    m.within(0.0, Z_SE),
                    format!("{:.4e} ± {:.2e}", m.value, m.stderr),
                );
                report.check(
                    format!("eps={eps} {name} t={t} field variance"),
                    (v.value / lattice - 1.0).abs() <= 0.05 && (v.value / l2 - 1.0).abs() <= 0.10,
                    format!(
                        "{:.5} ± {:.1e} vs lattice {lattice:.5}, continuum {l2:.5}",
                        v.value, v.stderr
                    ),
                );
            }
        }
    }
}

/// Stationarity of the white-noise marginal using field values only.
pub fn stationarity(config: &ExperimentConfig, workers: usize) -> Result<Report> {
    let tests: Vec<(String, TestFunction)> = config
        .hermite_indices
        .iter()
        .map(|&n| (format!("H{n}"), TestFunction::hermite(n)))
        .collect();
    let plain: Vec<TestFunction> = tests.iter().map(|t| t.1.clone()).collect();
    let fields = field_values(config, &plain, workers)?;
    let mut report = Report::new("stationarity");
    for (e, &eps) in config.epsilon_list.iter().enumerate() {
        let params = config.params(eps)?;
        let data = &fields[e];
        field_statistics(
            &mut report,
            &params,
            &config.sample_times,
            &tests,
            &|k, gi| data.iter().map(|r| r[k][gi]).collect(),
        );
    }
    Ok(report)
}

/// Pathwise closing identities and the Taylor bound on every replica and
/// sample time. Returns the number of failures of each kind.
pub fn ledger_identities(set: &EnsembleSet) -> Report {
    let mut report = Report::new("identities");
    for run in &set.runs {
        let eps = run.epsilon;
        let params = *run.params();
        for gi in 0..set.layout.tests.len() {
            let g = &set.layout.tests[gi];
            let name = g.name();
            let ledgers = run.ledgers(gi);
            let (mut approxi_fail, mut rewrite_fail, mut molli_fail, mut taylor_fail) =
                (0, 0, 0, 0);
            let (mut approxi_worst, mut rewrite_worst, mut taylor_worst): (f64, f64, f64) =
                (0.0, 0.0, 0.0);
            for ledger in &ledgers {
                for row in &ledger.rows {
                    let (l, r) = row.approxi_sides();
                    let scale = [
                        row.martingale,
                        row.taylor_residual,
                        row.y - row.y0,
                        row.heat_integral,
                        params.gamma * row.pair_integral,
                        params.gamma * row.v0_integral,
                    ]
                    .iter()
                    .fold(1e-300f64, |a, b| a.max(b.abs()));
                    let rel = (l - r).abs() / scale;
                    approxi_worst = approxi_worst.max(rel);
                    if rel > 1e-6 {
                        approxi_fail += 1;
                    }
                    for ni in 0..set.layout.scales.len() {
                        let tol = rewrite_tolerance(run.plan.quadrature_scale(gi, ni), row.t);
                        let (l, r) = row.rewrite_sides(ni);
                        rewrite_worst = rewrite_worst.max((l - r).abs() / tol);
                        if (l - r).abs() > tol {
                            rewrite_fail += 1;
                        }
                        let (l, r) = row.mollified_sides(ni);
                        if (l - r).abs() > params.gamma.abs() * tol + 1e-6 * scale {
                            molli_fail += 1;
                        }
                    }
                    let bound = taylor_bound(&params, g, row.t);
                    taylor_worst = taylor_worst.max(if bound > 0.0 {
                        row.taylor_residual.abs() / bound
                    } else {
                        0.0
                    });
                    if row.taylor_residual.abs() > bound + 1e-12 {
                        taylor_fail += 1;
                    }
                }
            }
            let cells = ledgers.len() * set.config.sample_times.len();
            report.check(
                format!("eps={eps} {name} approxi identity"),
                approxi_fail == 0,
                format!(
                    "{approxi_fail} of {cells} failures, worst relative error {approxi_worst:.2e}"
                ),
            );
            if !set.layout.scales.is_empty() {
                report.check(
                    format!("eps={eps} {name} rewrite identity"),
                    rewrite_fail == 0,
                    format!(
                        "{rewrite_fail} failures over {} scales, worst residual/tolerance {rewrite_worst:.2e}",
                        set.layout.scales.len()
                    ),
                );
                report.check(
                    format!("eps={eps} {name} mollified map identity"),
                    molli_fail == 0,
                    format!("{molli_fail} failures"),
                );
            }
            report.check(
                format!("eps={eps} {name} taylor bound"),
                taylor_fail == 0,
                format!("{taylor_fail} of {cells} violations, worst |R|/bound {taylor_worst:.3e}"),
            );
            report.table.push(
                "taylor_ratio_max",
                name,
                eps,
                params.gamma,
                None,
                None,
                exact(taylor_worst, ledgers.len()),
            );
        }
    }
    report
}

/// Tolerance of the rewrite identity after time integration to `t`: the
/// spatial quadrature contract (relative 10⁻⁸) applied to the total
/// coefficient mass of the integrands, with headroom for rounding.
fn rewrite_tolerance(quadrature_scale: f64, t: f64) -> f64 {
    1e-7 * quadrature_scale * t.max(1e-300) + 1e-12
}

/// Everything about the field, the ledger and the mollified map at every
/// sample time, with the identity and stationarity checks.
pub fn simulate(set: &EnsembleSet) -> Report {
    let mut report = ledger_identities(set);
    report.experiment = "simulate".into();
    let chosen = {
        let mut v = configured_tests(set);
        v.extend(set.layout.combination_index());
        v
    };
    for run in &set.runs {
        let eps = run.epsilon;
        let gamma = run.params().gamma;
        let times = &run.sample_times;
        let per_g: Vec<(String, TestFunction)> = configured_tests(set)
            .iter()
            .map(|&gi| {
                (
                    set.layout.tests[gi].name().to_string(),
                    set.layout.tests[gi].clone(),
                )
            })
            .collect();
        let ledgers: Vec<Vec<DecompositionLedger>> = configured_tests(set)
            .iter()
            .map(|&gi| run.ledgers(gi))
            .collect();
        field_statistics(&mut report, run.params(), times, &per_g, &|k, j| {
            column(&ledgers[j], |l| l.rows[k].y)
        });
        for &gi in &chosen {
            let name = set.layout.tests[gi].name().to_string();
            let ledgers = run.ledgers(gi);
            for (k, &t) in times.iter().enumerate() {
                let m = column(&ledgers, |l| l.rows[k].martingale);
                let m2: Vec<f64> = m.iter().map(|x| x * x).collect();
                report.table.push(
                    "martingale_mean",
                    &name,
                    eps,
                    gamma,
                    None,
                    Some(t),
                    mean_estimate(&m),
                );
                report.table.push(
                    "martingale_second_moment",
                    &name,
                    eps,
                    gamma,
                    None,
                    Some(t),
                    mean_estimate(&m2),
                );
                report.table.push(
                    "qv_mean",
                    &name,
                    eps,
                    gamma,
                    None,
                    Some(t),
                    mean_estimate(&column(&ledgers, |l| l.rows[k].qv_integral)),
                );
                report.table.push(
                    "taylor_residual_mean",
                    &name,
                    eps,
                    gamma,
                    None,
                    Some(t),
                    mean_estimate(&column(&ledgers, |l| l.rows[k].taylor_residual)),
                );
                for (ni, &n) in set.layout.scales.iter().enumerate() {
                    report.table.push(
                        "nonlinear_integral_mean",
                        &name,
                        eps,
                        gamma,
                        Some(n),
                        Some(t),
                        mean_estimate(&column(&ledgers, |l| l.rows[k].nonlinear_integral[ni])),
                    );
                    report.table.push(
                        "mollified_map_mean",
                        &name,
                        eps,
                        gamma,
                        Some(n),
                        Some(t),
                        mean_estimate(&column(&ledgers, |l| l.rows[k].mollified[ni])),
                    );
                }
            }
        }
        mark_cells(&mut report, set, run);
    }
    report
}

fn mark_cells(report: &mut Report, set: &EnsembleSet, run: &super::Ensemble) {
    for gi in 0..set.layout.tests.len() {
        for (ni, &n) in set.layout.scales.iter().enumerate() {
            if let Err(e) = run.plan.cell_status(gi, ni) {
                report.marked.push(format!(
                    "eps={} {} N={n}: quadrature contract failed ({e})",
                    run.epsilon,
                    set.layout.tests[gi].name()
                ));
            }
        }
    }
}

/// `D(N) = ∫₀ᵀ E[(∫₀ᵗ∫G'((Y⋆J_Ñ)² − (Y⋆J_N)²))²] dt` with `Ñ = max N`.
pub fn cauchy_scan(set: &EnsembleSet) -> Result<Report> {
    let scales = &set.layout.scales;
    if scales.len() < 3 {
        return Err(Error::Config(format!(
            "cauchy scan needs at least 3 values in n_list, got {}",
            scales.len()
        )));
    }
    let mut order: Vec<usize> = (0..scales.len()).collect();
    order.sort_by_key(|&i| scales[i]);
    let top = *order.last().unwrap();
    let n_ref = scales[top];
    let n_min = scales[order[0]];
    let mut report = Report::new("cauchy_scan");
    for run in &set.runs {
        let eps = run.epsilon;
        let gamma = run.params().gamma;
        let times = &run.sample_times;
        mark_cells(&mut report, set, run);
        for gi in configured_tests(set) {
            let g = &set.layout.tests[gi];
            let name = g.name();
            let ledgers = run.ledgers(gi);
            let d: Vec<Vec<f64>> = order
                .iter()
                .map(|&ni| {
                    ledgers
                        .iter()
                        .map(|l| {
                            let sq: Vec<f64> = l
                                .rows
                                .iter()
                                .map(|r| {
                                    (r.nonlinear_integral[top] - r.nonlinear_integral[ni]).powi(2)
                                })
                                .collect();
                            trapezoid(times, &sq)
                        })
                        .collect()
                })
                .collect();
            let est: Vec<Estimate> = d.iter().map(|x| mean_estimate(x)).collect();
            for (k, &ni) in order.iter().enumerate() {
                let e = if scales[ni] == n_ref {
                    exact(0.0, ledgers.len())
                } else {
                    est[k]
                };
                report
                    .table
                    .push("cauchy_D", name, eps, gamma, Some(scales[ni]), None, e);
            }
            let below: Vec<usize> = (0..order.len() - 1).collect();
            let fit = linear_fit(
                &below
                    .iter()
                    .map(|&k| (scales[order[k]] as f64).ln())
                    .collect::<Vec<_>>(),
                &below.iter().map(|&k| est[k].value.ln()).collect::<Vec<_>>(),
            );
            report.table.push(
                "cauchy_slope",
                name,
                eps,
                gamma,
                None,
                None,
                Estimate {
                    value: fit.slope,
                    stderr: fit.slope_stderr,
                    count: ledgers.len(),
                },
            );
            for k in 0..order.len() - 1 {
                let next = if k + 1 == order.len() - 1 {
                    vec![0.0; ledgers.len()]
                } else {
                    d[k + 1].clone()
                };
                let (ok, diff) = not_increasing(&d[k], &next);
                report.check(
                    format!(
                        "eps={eps} {name} D(N={}) >= D(N={})",
                        scales[order[k]],
                        scales[order[k + 1]]
                    ),
                    ok,
                    format!("paired difference {:.3e} ± {:.2e}", diff.value, diff.stderr),
                );
            }
            let s: f64 = g.norms().weighted_sup.iter().map(|x| x * x).sum();
            let c_hat = est[0].value * (n_min as f64).powf(1.0 / 3.0) / s;
            report.table.push(
                "cauchy_envelope_constant",
                name,
                eps,
                gamma,
                Some(n_min),
                None,
                exact(c_hat, ledgers.len()),
            );
            for k in 1..order.len() - 1 {
                let n = scales[order[k]];
                if n < 4 {
                    continue;
                }
                let envelope = c_hat * (n as f64).powf(-1.0 / 3.0) * s;
                report.check(
                    format!("eps={eps} {name} D(N={n}) under N^(-1/3) envelope"),
                    est[k].value <= envelope + Z_CI * est[k].stderr,
                    format!(
                        "{:.3e} ± {:.2e} vs envelope {envelope:.3e}",
                        est[k].value, est[k].stderr
                    ),
                );
            }
        }
    }
    Ok(report)
}

/// `∫₀ᵀ E[R^{G',i}(t)²] dt` for `i = 0..4` against `(ε, N)`.
pub fn remainder_scan(set: &EnsembleSet) -> Result<Report> {
    let scales = &set.layout.scales;
    if set.runs.len() < 2 || scales.len() < 2 {
        return Err(Error::Config(
            "remainder scan needs at least 2 epsilons and 2 values of N".into(),
        ));
    }
    let mut report = Report::new("remainder_scan");
    // moments[e][gi][ni][i] -> per-replica values
    let mut moments: Vec<Vec<Vec<Vec<Vec<f64>>>>> = Vec::new();
    let tests = configured_tests(set);
    for run in &set.runs {
        mark_cells(&mut report, set, run);
        let times = &run.sample_times;
        let mut per_g = Vec::new();
        for &gi in &tests {
            let ledgers = run.ledgers(gi);
            let per_n: Vec<Vec<Vec<f64>>> = (0..scales.len())
                .map(|ni| {
                    (0..5)
                        .map(|i| {
                            ledgers
                                .iter()
                                .map(|l| {
                                    let sq: Vec<f64> = l
                                        .rows
                                        .iter()
                                        .map(|r| r.remainders[ni][i].powi(2))
                                        .collect();
                                    trapezoid(times, &sq)
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            for (ni, &n) in scales.iter().enumerate() {
                for i in 0..5 {
                    report.table.push(
                        &format!("remainder_R{i}"),
                        set.layout.tests[gi].name(),
                        run.epsilon,
                        run.params().gamma,
                        Some(n),
                        None,
                        mean_estimate(&per_n[ni][i]),
                    );
                }
            }
            per_g.push(per_n);
        }
        moments.push(per_g);
    }
    let mean = |v: &Vec<f64>| mean_estimate(v).value;
    let mut by_n: Vec<usize> = (0..scales.len()).collect();
    by_n.sort_by_key(|&i| scales[i]);
    let (e0, e1) = (set.runs[0].epsilon, set.runs[1].epsilon);
    for (k, &gi) in tests.iter().enumerate() {
        let name = set.layout.tests[gi].name();
        // i = 0 across ε at every N, and flatness in N.
        let target = (e0 / e1).powi(2);
        for (ni, &n) in scales.iter().enumerate() {
            let ratio = mean(&moments[0][k][ni][0]) / mean(&moments[1][k][ni][0]);
            report.check(
                format!("{name} N={n} R0 ratio eps={e0}/eps={e1}"),
                within_factor(ratio, target, 2.0),
                format!("{ratio:.3} vs {target:.3}"),
            );
        }
        for (e, run) in set.runs.iter().enumerate() {
            let eps = run.epsilon;
            let vals: Vec<f64> = (0..scales.len())
                .map(|ni| mean(&moments[e][k][ni][0]))
                .collect();
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
                / vals.iter().cloned().fold(f64::MAX, f64::min);
            report.check(
                format!("eps={eps} {name} R0 flat in N"),
                spread <= 1.5,
                format!("max/min {spread:.4}"),
            );
            // R⁴ scaling is asserted on the first pair with N ≥ 4 and tabulated for the rest.
            let first_large = by_n.windows(2).position(|w| scales[w[0]] >= 4);
            for (j, w) in by_n.windows(2).enumerate() {
                let (a, b) = (w[0], w[1]);
                let (na, nb) = (scales[a], scales[b]);
                let target = (nb as f64 / na as f64).powi(4);
                let ratio = mean(&moments[e][k][b][4]) / mean(&moments[e][k][a][4]);
                report.table.push(
                    "remainder_R4_ratio",
                    name,
                    eps,
                    run.params().gamma,
                    Some(nb),
                    None,
                    exact(ratio, set.config.replicas),
                );
                if Some(j) == first_large {
                    report.check(
                        format!("eps={eps} {name} R4 ratio N={nb}/N={na}"),
                        within_factor(ratio, target, 2.0),
                        format!("{ratio:.4e} vs {target}"),
                    );
                }
                let (ok, diff) = not_increasing(&moments[e][k][a][3], &moments[e][k][b][3]);
                report.check(
                    format!("eps={eps} {name} R3 moment N={na} >= N={nb}"),
                    ok,
                    format!("paired difference {:.3e} ± {:.2e}", diff.value, diff.stderr),
                );
            }
            // Fitted exponents against N for every remainder, for the record.
            for i in 1..5 {
                let xs: Vec<f64> = by_n.iter().map(|&ni| (scales[ni] as f64).ln()).collect();
                let ys: Vec<f64> = by_n
                    .iter()
                    .map(|&ni| mean(&moments[e][k][ni][i]).ln())
                    .collect();
                let fit = linear_fit(&xs, &ys);
                report.table.push(
                    &format!("remainder_R{i}_N_exponent"),
                    name,
                    eps,
                    run.params().gamma,
                    None,
                    None,
                    Estimate {
                        value: fit.slope,
                        stderr: fit.slope_stderr,
                        count: set.config.replicas,
                    },
                );
            }
        }
    }
    Ok(report)
}

/// Martingale properties of `M^{G,ε}`: orthogonal increments, linear
/// variance growth, Gaussian law, limit covariances, pathwise linearity.
pub fn martingale_test(set: &EnsembleSet) -> Result<Report> {
    if set.config.replicas < MIN_DISTRIBUTION_REPLICAS {
        return Err(Error::InsufficientReplicas {
            got: set.config.replicas,
            need: MIN_DISTRIBUTION_REPLICAS,
        });
    }
    let mut report = Report::new("martingale_test");
    let tests = configured_tests(set);
    let clip = |x: f64| x.clamp(-2.0, 2.0);
    for run in &set.runs {
        let eps = run.epsilon;
        let gamma = run.params().gamma;
        let times = &run.sample_times;
        let (ks, kt) = (nearest(times, 0.5 * run.params().horizon), times.len() - 1);
        let (s, t) = (times[ks], times[kt]);
        let all: Vec<Vec<DecompositionLedger>> = (0..set.layout.tests.len())
            .map(|gi| run.ledgers(gi))
            .collect();
        let (first, last) = (tests[0], *tests.last().unwrap());
        let past: Vec<(&str, Box<dyn Fn(usize, usize) -> f64 + '_>)> = vec![
            ("1", Box::new(|_, _| 1.0)),
            (
                "clip Y_s(first)",
                Box::new(|r, _| clip(all[first][r].rows[ks].y)),
            ),
            (
                "clip Y_s(last)",
                Box::new(|r, _| clip(all[last][r].rows[ks].y)),
            ),
            (
                "clip Y_0(first)",
                Box::new(|r, _| clip(all[first][r].rows[0].y)),
            ),
            (
                "clip M_s(G)",
                Box::new(|r, gi| clip(all[gi][r].rows[ks].martingale)),
            ),
            (
                "sign heat_s(G)",
                Box::new(|r, gi| all[gi][r].rows[ks].heat_integral.signum()),
            ),
        ];
        let mut ks_passed = 0;
        for &gi in &tests {
            let g = &set.layout.tests[gi];
            let name = g.name();
            let ledgers = &all[gi];
            // (a) orthogonality of increments to the past.
            for (j, (label, x)) in past.iter().enumerate() {
                let prod: Vec<f64> = (0..ledgers.len())
                    .map(|r| {
                        x(r, gi) * (ledgers[r].rows[kt].martingale - ledgers[r].rows[ks].martingale)
                    })
                    .collect();
                let e = mean_estimate(&prod);
                report.table.push(
                    &format!("martingale_increment_X{}", j + 1),
                    name,
                    eps,
                    gamma,
                    None,
                    Some(t),
                    e,
                );
                report.check(
                    format!("eps={eps} {name} E[X(M_t - M_s)] = 0, X = {label}"),
                    e.within(0.0, Z_SE),
                    format!("{:.3e} ± {:.2e}", e.value, e.stderr),
                );
            }
            // (b) variance linear in t.
            let (mut ts, mut vs) = (Vec::new(), Vec::new());
            for (k, &tk) in times.iter().enumerate().skip(1) {
                let sq: Vec<f64> = ledgers
                    .iter()
                    .map(|l| l.rows[k].martingale.powi(2))
                    .collect();
                let e = mean_estimate(&sq);
                report
                    .table
                    .push("martingale_variance", name, eps, gamma, None, Some(tk), e);
                ts.push(tk);
                vs.push(e.value);
            }
            let fit = linear_fit(&ts, &vs);
            let target = 2.0 * g.norms().deriv_l2.powi(2);
            report.table.push(
                "martingale_variance_slope",
                name,
                eps,
                gamma,
                None,
                None,
                Estimate {
                    value: fit.slope,
                    stderr: fit.slope_stderr,
                    count: ledgers.len(),
                },
            );
            report.check(
                format!("eps={eps} {name} variance linear in t"),
                fit.r_squared > 0.99,
                format!("R^2 = {:.5}", fit.r_squared),
            );
            report.check(
                format!("eps={eps} {name} variance slope vs 2|G'|^2"),
                (fit.slope / target - 1.0).abs() <= 0.15,
                format!("slope {:.4} vs {target:.4}", fit.slope),
            );
            // (c) Gaussian law at T.
            let mt: Vec<f64> = ledgers.iter().map(|l| l.rows[kt].martingale).collect();
            let ks_res = ks_test_normal(&mt, limit_covariance(g, g, t, t).sqrt());
            report.table.push(
                "martingale_ks_pvalue",
                name,
                eps,
                gamma,
                None,
                Some(t),
                exact(ks_res.p_value, mt.len()),
            );
            if ks_res.p_value >= 0.01 {
                ks_passed += 1;
            }
            report.check(
                format!("eps={eps} {name} KS vs Gaussian limit (informational)"),
                true,
                format!("D = {:.4}, p = {:.4}", ks_res.statistic, ks_res.p_value),
            );
        }
        let need = (2 * tests.len()).div_ceil(3);
        report.check(
            format!(
                "eps={eps} KS at 1% passes for at least {need} of {}",
                tests.len()
            ),
            ks_passed >= need,
            format!("{ks_passed} passed"),
        );
        // (d) cross-covariances against the limit.
        for (a, &ga) in tests.iter().enumerate() {
            for &gb in &tests[a + 1..] {
                let (g1, g2) = (&set.layout.tests[ga], &set.layout.tests[gb]);
                for (k1, k2) in [(kt, kt), (ks, kt)] {
                    let x: Vec<f64> = all[ga].iter().map(|l| l.rows[k1].martingale).collect();
                    let y: Vec<f64> = all[gb].iter().map(|l| l.rows[k2].martingale).collect();
                    let e = covariance_estimate(&x, &y);
                    let target = limit_covariance(g1, g2, times[k1], times[k2]);
                    let label = format!("{}x{}", g1.name(), g2.name());
                    report.table.push(
                        "martingale_cross_cov",
                        &label,
                        eps,
                        gamma,
                        None,
                        Some(times[k1]),
                        e,
                    );
                    report.check(
                        format!(
                            "eps={eps} Cov(M_{}({}), M_{}({}))",
                            times[k1],
                            g1.name(),
                            times[k2],
                            g2.name()
                        ),
                        e.within(target, Z_SE),
                        format!("{:.3e} ± {:.2e} vs {target:.3e}", e.value, e.stderr),
                    );
                }
            }
        }
        // (e) pathwise linearity in G.
        if let (Some(ci), Some((a1, n1, a2, n2))) =
            (set.layout.combination_index(), set.layout.combination)
        {
            let (i1, i2) = (set.layout.hermite(n1), set.layout.hermite(n2));
            let mut worst: f64 = 0.0;
            for r in 0..all[ci].len() {
                for k in 0..times.len() {
                    let m = all[ci][r].rows[k].martingale;
                    let lin =
                        a1 * all[i1][r].rows[k].martingale + a2 * all[i2][r].rows[k].martingale;
                    worst = worst.max((m - lin).abs() / (1.0 + m.abs()));
                }
            }
            report.check(
                format!("eps={eps} M linear in G pathwise"),
                worst < 1e-9,
                format!("worst relative deviation {worst:.2e}"),
            );
        }
        let _ = s;
    }
    Ok(report)
}

/// Truncated `|||·|||²` distance between `∂_u(Y⋆J_N)²` and
/// `(∂_tY − ∂²_uY − ∂_tM)/γ`, against `N`.
pub fn sobolev_report(set: &EnsembleSet) -> Result<Report> {
    let modes = set.layout.modes;
    if modes == 0 || set.layout.scales.is_empty() {
        return Err(Error::Config(
            "sobolev report needs time modes and at least one N".into(),
        ));
    }
    let n_max = set.layout.n_max;
    let scales = &set.layout.scales;
    let top = (0..scales.len()).max_by_key(|&i| scales[i]).unwrap();
    let w = SobolevWeights;
    let mut report = Report::new("sobolev_report");
    for run in &set.runs {
        let eps = run.epsilon;
        let gamma = run.params().gamma;
        mark_cells(&mut report, set, run);
        // pair[r][ni] = coefficients
        let pairs: Vec<Vec<Coefficients>> = run
            .paths
            .iter()
            .map(|p| {
                let last = p.last().expect("sample times non-empty");
                (0..scales.len())
                    .map(|ni| {
                        let mut c = Coefficients::new();
                        for n in 1..=n_max {
                            for (m, v) in run
                                .plan
                                .sobolev_pairings(last, set.layout.hermite(n), ni)
                                .into_iter()
                                .enumerate()
                            {
                                c.insert((m + 1, n), v);
                            }
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        let tail = |c: &Coefficients| -> f64 {
            c.iter()
                .filter(|(&(m, n), _)| m == modes || n == n_max)
                .map(|(&(m, n), v)| w.weight(m, n) * v * v)
                .sum()
        };
        let mut order: Vec<usize> = (0..scales.len()).collect();
        order.sort_by_key(|&i| scales[i]);
        let mut dist_by_n = Vec::new();
        for &ni in &order {
            let n = scales[ni];
            let dist: Vec<f64> = pairs
                .iter()
                .map(|p| neg_sobolev_norm(&p[ni]).powi(2))
                .collect();
            let tails: Vec<f64> = pairs.iter().map(|p| tail(&p[ni])).collect();
            let cauchy: Vec<f64> = pairs
                .iter()
                .map(|p| {
                    let diff: Coefficients =
                        p[ni].iter().map(|(k, v)| (*k, v - p[top][k])).collect();
                    neg_sobolev_norm(&diff).powi(2)
                })
                .collect();
            let d = mean_estimate(&dist);
            let fraction = mean_estimate(&tails).value / d.value;
            report
                .table
                .push("sobolev_distance", "all", eps, gamma, Some(n), None, d);
            report.table.push(
                "sobolev_distance_to_top",
                "all",
                eps,
                gamma,
                Some(n),
                None,
                mean_estimate(&cauchy),
            );
            report.table.push(
                "sobolev_tail_fraction",
                "all",
                eps,
                gamma,
                Some(n),
                None,
                exact(fraction, dist.len()),
            );
            if fraction > 0.1 {
                report.marked.push(format!(
                    "eps={eps} N={n}: {}",
                    Error::TruncationTooCoarse { fraction }
                ));
            }
            for m in 1..=modes {
                for nn in 1..=n_max {
                    let sq: Vec<f64> = pairs
                        .iter()
                        .map(|p| (p[ni][&(m, nn)] - p[top][&(m, nn)]).powi(2))
                        .collect();
                    report.table.push(
                        "sobolev_mode_cauchy",
                        &format!("m{m}n{nn}"),
                        eps,
                        gamma,
                        Some(n),
                        None,
                        mean_estimate(&sq),
                    );
                }
            }
            dist_by_n.push((n, dist, cauchy));
        }
        for win in dist_by_n.windows(2) {
            let (ok, diff) = not_increasing(&win[0].1, &win[1].1);
            report.check(
                format!(
                    "eps={eps} distance N={} >= N={} (informational)",
                    win[0].0, win[1].0
                ),
                true,
                format!(
                    "{}; paired difference {:.3e} ± {:.2e}",
                    if ok { "holds" } else { "does not hold" },
                    diff.value,
                    diff.stderr
                ),
            );
        }
        // Per-mode envelope const · m²n⁶ / N^{1/3} on the distance to the
        // top scale, const fitted at the smallest N.
        let n0 = scales[order[0]] as f64;
        let mode_sq = |ni: usize, m: usize, nn: usize| -> f64 {
            pairs
                .iter()
                .map(|p| (p[ni][&(m, nn)] - p[top][&(m, nn)]).powi(2))
                .sum::<f64>()
                / pairs.len() as f64
        };
        let mut c = 0.0f64;
        for m in 1..=modes {
            for nn in 1..=n_max {
                c = c.max(
                    mode_sq(order[0], m, nn) * n0.powf(1.0 / 3.0)
                        / ((m * m) as f64 * (nn as f64).powi(6)),
                );
            }
        }
        let mut violations = 0;
        for &ni in &order[1..] {
            for m in 1..=modes {
                for nn in 1..=n_max {
                    let env = c * (m * m) as f64 * (nn as f64).powi(6)
                        / (scales[ni] as f64).powf(1.0 / 3.0);
                    if mode_sq(ni, m, nn) > env {
                        violations += 1;
                    }
                }
            }
        }
        report.check(
            format!("eps={eps} per-mode envelope const*m^2 n^6/N^(1/3) (informational)"),
            true,
            format!("const {c:.3e}; {violations} mode cells above the envelope"),
        );
    }
    let _ = SOBOLEV_MODES;
    Ok(report)
}

/// Empirical transition frequencies of the event engine over a microscopic
/// duration against `exp(duration · Q)`, row by row from every initial state.
pub fn oracle_check(
    params: SimParams,
    micro_duration: f64,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<Report> {
    let q = exact_generator_matrix(&params)?;
    let p = (q * micro_duration).exp();
    let states = p.nrows();
    let l = params.sites;
    let counts: Vec<Vec<u64>> = pool(workers)?.install(|| {
        (0..states)
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_stream(seed, u32::MAX, i as u32);
                let init =
                    SpinState::from_occupation((0..l).map(|x| ((i >> x) & 1) as u8).collect());
                let mut c = vec![0u64; states];
                for _ in 0..samples {
                    let mut sim = Simulator::new(params, init.clone());
                    sim.advance(&mut rng, micro_duration, &mut ());
                    c[state_index(sim.state())] += 1;
                }
                c
            })
            .collect()
    });
    let mut report = Report::new("oracle_check");
    let (mut checked, mut failed, mut worst): (usize, usize, f64) = (0, 0, 0.0);
    let mut stray = 0u64;
    for i in 0..states {
        for j in 0..states {
            let pij = p[(i, j)];
            let freq = counts[i][j] as f64 / samples as f64;
            if pij > 1e-3 {
                let se = (pij * (1.0 - pij) / samples as f64).sqrt();
                let z = (freq - pij) / se;
                worst = worst.max(z.abs());
                checked += 1;
                if z.abs() > Z_SE {
                    failed += 1;
                }
                report.table.push(
                    "oracle_transition",
                    &format!("{i}->{j}"),
                    params.epsilon,
                    params.gamma,
                    None,
                    Some(params.to_macro(micro_duration)),
                    Estimate {
                        value: freq,
                        stderr: se,
                        count: samples,
                    },
                );
            } else if pij < 1e-12 {
                stray += counts[i][j];
            }
        }
    }
    report.check(
        format!("L={l} transition frequencies within 4 SE of exp(tQ)"),
        failed == 0,
        format!("{failed} of {checked} entries outside, worst |z| {worst:.2}"),
    );
    report.check(
        "no transitions outside the particle sector",
        stray == 0,
        format!("{stray} stray transitions"),
    );
    Ok(report)
}

/// The mean of the nonlinear term under the two even mollifiers at one `N`:
/// instantaneous value at the final time and its time integral.
pub fn mollifier_independence(
    config: &ExperimentConfig,
    n: usize,
    workers: usize,
) -> Result<Report> {
    let mut report = Report::new("mollifier_independence");
    let mut sets = Vec::new();
    for kind in [MollifierKind::Bump, MollifierKind::PolyBump] {
        let layout = Layout::build(config, vec![n], 0, Mollifier::new(kind))?;
        sets.push(EnsembleSet::run(config, layout, workers)?);
    }
    let wide_nl = |rec: &crate::field::SampleRecord, gi: usize| rec.wide[0][gi * 5];
    for (e, &eps) in config.epsilon_list.iter().enumerate() {
        for &idx in &config.hermite_indices {
            let gi = sets[0].layout.hermite(idx);
            let name = sets[0].layout.tests[gi].name().to_string();
            let mut est = Vec::new();
            for (set, kind) in sets.iter().zip(["bump", "polybump"]) {
                let run = &set.runs[e];
                let inst: Vec<f64> = run
                    .paths
                    .iter()
                    .map(|p| wide_nl(p.last().unwrap(), gi))
                    .collect();
                let integ: Vec<f64> = run
                    .ledgers(gi)
                    .iter()
                    .map(|l| l.rows.last().unwrap().nonlinear_integral[0])
                    .collect();
                let (a, b) = (mean_estimate(&inst), mean_estimate(&integ));
                let t = *config.sample_times.last().unwrap();
                report.table.push(
                    &format!("nonlinear_{kind}"),
                    &name,
                    eps,
                    config.gamma,
                    Some(n),
                    Some(t),
                    a,
                );
                report.table.push(
                    &format!("nonlinear_integral_{kind}"),
                    &name,
                    eps,
                    config.gamma,
                    Some(n),
                    None,
                    b,
                );
                est.push((a, b));
            }
            for (label, x, y) in [
                ("instantaneous", est[0].0, est[1].0),
                ("time-integrated", est[0].1, est[1].1),
            ] {
                let se = (x.stderr.powi(2) + y.stderr.powi(2)).sqrt();
                report.check(
                    format!("eps={eps} {name} N={n} {label} nonlinear mean mollifier-independent"),
                    (x.value - y.value).abs() < Z_SE * se,
                    format!("{:.4e} vs {:.4e}, combined SE {se:.2e}", x.value, y.value),
                );
            }
        }
    }
    Ok(report)
}

/// Fast end-to-end sanity run on a tiny configuration.
pub fn selftest(workers: usize) -> Result<Report> {
    use crate::basis::{hermite_eval, sup_by_l2_bound};
    use crate::quadrature::gauss_hermite_functions;
    let mut report = Report::new("selftest");
    let (nodes, weights) = gauss_hermite_functions(64);
    let mut worst: f64 = 0.0;
    for a in 1..=20 {
        for b in a..=20 {
            let s: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(&u, &w)| w * hermite_eval(a, u, 0).unwrap() * hermite_eval(b, u, 0).unwrap())
                .sum();
            worst = worst.max((s - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    report.check(
        "Hermite orthonormality n <= 20",
        worst < 1e-8,
        format!("worst {worst:.1e}"),
    );
    let mut rng = replica_stream(1, 0, 0);
    let mut ok = true;
    for _ in 0..10 {
        let terms: Vec<(usize, f64)> = (1..=6).map(|n| (n, rng.gen_range(-1.0..1.0))).collect();
        let g = TestFunction::hermite_combination(&terms)?;
        ok &= g.norms().weighted_sup[0].powi(2) <= sup_by_l2_bound(&g, 0) * (1.0 + 1e-6);
    }
    report.check(
        "sup-by-L2 inequality on random Hermite combinations",
        ok,
        "",
    );
    let cfg = ExperimentConfig::parse(
        "epsilon_list = 0.25\nwindow = 6\nhorizon = 0.1\nreplicas = 4\nn_list = 2\nsample_times = 5\nhermite_indices = 1,2",
    )?;
    let set = EnsembleSet::run(&cfg, Layout::full(&cfg)?, workers)?;
    let ids = ledger_identities(&set);
    report.checks.extend(ids.checks);
    let oracle = oracle_check(
        SimParams::with_sites(0.04, 1.0, 4, 1.0)?,
        0.5,
        2000,
        3,
        workers,
    )?;
    report.checks.extend(oracle.checks);
    report.table.extend(oracle.table);
    Ok(report)
}
