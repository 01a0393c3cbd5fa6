//! Ten acceptance criteria, one line each.
//!
//! Runs as a plain binary. Exit status is non-zero only when a criterion fails
//! that is not listed in `KNOWN_RED`; set `CKPZ_ACCEPTANCE_STRICT=1` to fail on
//! every red line.

use ckpz::basis::{hermite_eval, neg_sobolev_norm, sup_by_l2_bound, Coefficients, SobolevWeights};
use ckpz::exclusion::SimParams;
use ckpz::field::TestFunction;
use ckpz::gaussian::{limit_covariance, sample_sheet, GridSpec, SheetPairing};
use ckpz::harness::{
    cauchy_scan, ledger_identities, martingale_test, mollifier_independence, oracle_check,
    remainder_scan, stationarity, Check, EnsembleSet, ExperimentConfig, Layout, Report, Z_SE,
};
use ckpz::quadrature::gauss_hermite_functions;
use ckpz::rng::replica_stream;
use ckpz::stats::{covariance_estimate, variance_estimate};
use rand::Rng;
use std::time::{Duration, Instant};

/// Criteria whose failure is analysed in the README ("Known failures").
const KNOWN_RED: &[usize] = &[6, 7];

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn summarize(checks: &[&Check]) -> (bool, String) {
    let failed: Vec<&&Check> = checks.iter().filter(|c| !c.passed).collect();
    let mut detail = format!("{}/{} checks", checks.len() - failed.len(), checks.len());
    if let Some(c) = failed.first() {
        detail.push_str(&format!("; first failure: {} ({})", c.name, c.detail));
    }
    (!checks.is_empty() && failed.is_empty(), detail)
}

fn select<'a>(report: &'a Report, keep: impl Fn(&str) -> bool) -> Vec<&'a Check> {
    report.checks.iter().filter(|c| keep(&c.name)).collect()
}

fn timed(
    limit: Option<Duration>,
    elapsed: Duration,
    (passed, detail): (bool, String),
) -> (bool, String) {
    let within = limit.map_or(true, |l| elapsed <= l);
    let mut detail = format!("{detail}; {:.1} s", elapsed.as_secs_f64());
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {} s)", l.as_secs()));
    }
    (passed && within, detail)
}

fn oracle() -> (bool, String) {
    let start = Instant::now();
    let params = SimParams::with_sites(0.04, 1.0, 6, 1.0).expect("six-site ring");
    let report = oracle_check(params, 0.5, 20_000, 7, workers()).expect("oracle run");
    timed(
        Some(Duration::from_secs(60)),
        start.elapsed(),
        summarize(&select(&report, |_| true)),
    )
}

fn stationary() -> (bool, String) {
    let mut config = ExperimentConfig::default();
    config.replicas = 16_000;
    let report = stationarity(&config, workers()).expect("stationarity run");
    summarize(&select(&report, |_| true))
}

fn basis() -> (bool, String) {
    let mut checks = Vec::new();
    let (nodes, weights) = gauss_hermite_functions(96);
    let h = |n: usize, u: f64, d: usize| hermite_eval(n, u, d).unwrap();
    let mut ortho: f64 = 0.0;
    let mut energy: f64 = 0.0;
    for a in 1..=40 {
        for b in a..=40 {
            let s: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(&u, &w)| w * h(a, u, 0) * h(b, u, 0))
                .sum();
            ortho = ortho.max((s - if a == b { 1.0 } else { 0.0 }).abs());
        }
        let d: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&u, &w)| w * h(a, u, 1).powi(2))
            .sum();
        energy = energy.max((d - (a as f64 - 0.5)).abs());
    }
    checks.push(Check::new(
        "orthonormality n <= 40",
        ortho <= 1e-8,
        format!("{ortho:.1e}"),
    ));
    checks.push(Check::new(
        "|G_n'|^2 = n - 1/2",
        energy <= 1e-8,
        format!("{energy:.1e}"),
    ));

    let mut rng = replica_stream(17, 0, 0);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.gen_range(1..=8);
        let terms: Vec<(usize, f64)> = (0..k)
            .map(|_| (rng.gen_range(1..=12), rng.gen_range(-1.0..1.0)))
            .collect();
        let g = TestFunction::hermite_combination(&terms).unwrap();
        for m in 0..=2 {
            let lhs = g.norms().weighted_sup[m].powi(2);
            let rhs = sup_by_l2_bound(&g, m);
            if rhs > 0.0 {
                worst_ratio = worst_ratio.max(lhs / rhs);
            }
        }
    }
    checks.push(Check::new(
        "sup-by-L2 on 100 combinations, m = 0..2",
        worst_ratio <= 1.0 + 1e-9,
        format!("max lhs/rhs {worst_ratio:.4}"),
    ));

    let weight = SobolevWeights;
    let mut worst: f64 = 0.0;
    for m in 1..=10 {
        for n in 1..=10 {
            let mut c = Coefficients::new();
            c.insert((m, n), 1.0);
            let expect = weight.weight(m, n).sqrt();
            worst = worst.max((neg_sobolev_norm(&c) - expect).abs() / expect);
        }
    }
    checks.push(Check::new(
        "single-coefficient Sobolev norm",
        worst <= 1e-12,
        format!("{worst:.1e}"),
    ));
    summarize(&checks.iter().collect::<Vec<_>>())
}

fn sheet() -> (bool, String) {
    let start = Instant::now();
    let h1 = TestFunction::hermite(1);
    let h2 = TestFunction::hermite(2);
    let h3 = TestFunction::hermite(3);
    let reflected = TestFunction::from_fn("H1(-u)", h1.radius(), |u, m| {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * hermite_eval(1, -u, m).unwrap()
    })
    .unwrap();
    let tests = [h1.clone(), h2.clone(), h3.clone()];
    let cover = GridSpec::covering(1.0, &tests);
    let grid = GridSpec::with_steps(
        1.0,
        cover.half_width,
        4,
        (cover.half_width * 16.0).ceil() as usize,
    );
    let samples = 10_000;

    // pairings[k][s]: H1 at 1, H1 at 0.5, H1(-u) at 1, then H1..H3 at 0.5 and 1.
    let plan: Vec<(SheetPairing, f64)> = [
        (&h1, 1.0),
        (&h1, 0.5),
        (&reflected, 1.0),
        (&h1, 0.5),
        (&h2, 0.5),
        (&h3, 0.5),
        (&h1, 1.0),
        (&h2, 1.0),
        (&h3, 1.0),
    ]
    .into_iter()
    .map(|(g, t)| (SheetPairing::new(&grid, g).unwrap(), t))
    .collect();
    let mut pairings = vec![Vec::with_capacity(samples); plan.len()];
    for s in 0..samples {
        let b = sample_sheet(grid, &mut replica_stream(29, 0, s as u32)).unwrap();
        for (k, (p, t)) in plan.iter().enumerate() {
            pairings[k].push(p.eval(&b, *t));
        }
    }

    let mut checks = Vec::new();
    for (label, a, b, target) in [
        ("Cov(1,1; 1,1)", 0, 0, limit_covariance(&h1, &h1, 1.0, 1.0)),
        (
            "Cov(1,1; 0.5,0.5)",
            0,
            1,
            limit_covariance(&h1, &h1, 1.0, 0.5),
        ),
        (
            "Cov(1,1; 1,-1)",
            0,
            2,
            limit_covariance(&h1, &reflected, 1.0, 1.0),
        ),
    ] {
        let e = covariance_estimate(&pairings[a], &pairings[b]);
        checks.push(Check::new(
            label,
            e.within(target, Z_SE),
            format!("{:.4} +- {:.4} vs {target:.4}", e.value, e.stderr),
        ));
    }
    for (k, (g, t)) in [
        (&h1, 0.5),
        (&h2, 0.5),
        (&h3, 0.5),
        (&h1, 1.0),
        (&h2, 1.0),
        (&h3, 1.0),
    ]
    .into_iter()
    .enumerate()
    {
        let v = variance_estimate(&pairings[3 + k]);
        let target = 2.0 * t * g.norms().deriv_l2.powi(2);
        checks.push(Check::new(
            format!("Var {} t={t}", g.name()),
            (v.value / target - 1.0).abs() <= 0.05,
            format!("{:.4} vs {target:.4}", v.value),
        ));
    }
    timed(
        Some(Duration::from_secs(120)),
        start.elapsed(),
        summarize(&checks.iter().collect::<Vec<_>>()),
    )
}

fn main() {
    let strict = std::env::var("CKPZ_ACCEPTANCE_STRICT").map_or(false, |v| v == "1");
    let mut outcomes = Vec::new();
    let mut record = |id, title, (passed, detail): (bool, String)| {
        let tag = match (passed, KNOWN_RED.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known, see README)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} {tag}: {title}: {detail}");
        outcomes.push(Outcome {
            id,
            title,
            passed,
            detail,
        });
    };

    record(1, "generator matches exact transition law", oracle());
    record(2, "stationarity of the fluctuation field", stationary());

    let config = ExperimentConfig::default();
    let start = Instant::now();
    let set = EnsembleSet::run(&config, Layout::full(&config).expect("layout"), workers())
        .expect("ensemble");
    let shared = start.elapsed();
    println!("shared ensemble: {:.1} s", shared.as_secs_f64());
    let fifteen = Some(Duration::from_secs(15 * 60));

    let ids = ledger_identities(&set);
    record(
        3,
        "decomposition identities",
        summarize(&select(&ids, |n| {
            n.contains("approxi") || n.contains("rewrite") || n.contains("mollified map")
        })),
    );
    record(
        4,
        "Taylor remainder bound",
        summarize(&select(&ids, |n| n.contains("taylor"))),
    );

    let start = Instant::now();
    let mart = martingale_test(&set).expect("martingale test");
    let keep = |n: &str| {
        n.starts_with("eps=0.04 ")
            && (n.contains("E[X")
                || n.contains("variance linear")
                || n.contains("variance slope")
                || n.contains("KS at 1%"))
    };
    record(
        5,
        "martingale property",
        timed(
            fifteen,
            shared + start.elapsed(),
            summarize(&select(&mart, keep)),
        ),
    );

    let start = Instant::now();
    let cauchy = cauchy_scan(&set).expect("cauchy scan");
    record(
        6,
        "Cauchy property in N",
        timed(
            fifteen,
            shared + start.elapsed(),
            summarize(&select(&cauchy, |_| true)),
        ),
    );

    let start = Instant::now();
    let rem = remainder_scan(&set).expect("remainder scan");
    record(
        7,
        "remainder scaling",
        timed(
            fifteen,
            shared + start.elapsed(),
            summarize(&select(&rem, |_| true)),
        ),
    );
    drop(set);

    record(8, "basis and norm checks", basis());
    record(9, "Brownian sheet covariance", sheet());

    let start = Instant::now();
    let molli = mollifier_independence(&config, 16, workers()).expect("mollifier run");
    record(
        10,
        "mollifier independence",
        timed(
            Some(Duration::from_secs(600)),
            start.elapsed(),
            summarize(&select(&molli, |_| true)),
        ),
    );

    let unexpected: Vec<&Outcome> = outcomes
        .iter()
        .filter(|o| !o.passed && (strict || !KNOWN_RED.contains(&o.id)))
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    for o in outcomes
        .iter()
        .filter(|o| o.passed && KNOWN_RED.contains(&o.id))
    {
        println!(
            "note: criterion {} ({}) passed although listed as known red",
            o.id, o.title
        );
    }
    if !unexpected.is_empty() {
        for o in &unexpected {
            eprintln!(
                "unexpected failure: criterion {} ({}): {}",
                o.id, o.title, o.detail
            );
        }
        std::process::exit(1);
    }
}
