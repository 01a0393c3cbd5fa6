//! Replicated runs: one ensemble per `ε`, replicas on a worker pool,
//! results kept in replica order so every reduction is bit-reproducible.

use rayon::prelude::*;

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::exclusion::{sample_initial, JumpEvent, Observer, SimParams, Simulator, SpinState};
use crate::field::{
    record_path, DecompositionLedger, LedgerPlan, Mollifier, SampleRecord, TestFunction,
};
use crate::rng::replica_stream;

/// Number of time modes used by the Sobolev pairings.
pub const SOBOLEV_MODES: usize = 4;

/// Which functionals an ensemble tracks.
#[derive(Debug, Clone)]
pub struct Layout {
    /// `tests[n-1] = G_n` for `n = 1..=n_max`, optionally followed by a
    /// linear combination used for the pathwise linearity check.
    pub tests: Vec<TestFunction>,
    pub n_max: usize,
    pub combination: Option<(f64, usize, f64, usize)>,
    pub scales: Vec<usize>,
    pub mollifier: Mollifier,
    pub modes: usize,
}

impl Layout {
    /// Everything every experiment needs: Hermite functions up to the largest
    /// configured index, `2G_a − ½G_b` for the first two configured indices,
    /// all configured scales and the Sobolev time modes.
    pub fn full(config: &ExperimentConfig) -> Result<Self> {
        Self::build(
            config,
            config.n_list.clone(),
            SOBOLEV_MODES,
            Mollifier::new(config.mollifier),
        )
    }

    /// Ledger terms without mollified quantities.
    pub fn martingale_only(config: &ExperimentConfig) -> Result<Self> {
        Self::build(config, vec![], 0, Mollifier::new(config.mollifier))
    }

    pub fn build(
        config: &ExperimentConfig,
        scales: Vec<usize>,
        modes: usize,
        mollifier: Mollifier,
    ) -> Result<Self> {
        let n_max = *config
            .hermite_indices
            .iter()
            .max()
            .expect("validated non-empty");
        let mut tests: Vec<TestFunction> = (1..=n_max).map(TestFunction::hermite).collect();
        let combination = match config.hermite_indices[..] {
            [a, b, ..] if a != b => {
                let combo = TestFunction::linear_combination(&[
                    (2.0, &tests[a - 1]),
                    (-0.5, &tests[b - 1]),
                ])?;
                tests.push(combo);
                Some((2.0, a, -0.5, b))
            }
            _ => None,
        };
        Ok(Self {
            tests,
            n_max,
            combination,
            scales,
            mollifier,
            modes,
        })
    }

    /// Index into `tests` of `G_n`.
    pub fn hermite(&self, n: usize) -> usize {
        n - 1
    }

    pub fn combination_index(&self) -> Option<usize> {
        self.combination.map(|_| self.n_max)
    }
}

/// All replicas of one `ε`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub epsilon: f64,
    pub plan: LedgerPlan,
    pub sample_times: Vec<f64>,
    /// `paths[r][k]`: replica `r` at sample time `k`.
    pub paths: Vec<Vec<SampleRecord>>,
}

impl Ensemble {
    pub fn params(&self) -> &SimParams {
        self.plan.params()
    }

    pub fn replicas(&self) -> usize {
        self.paths.len()
    }

    /// Pathwise decomposition of test `gi`, one ledger per replica.
    pub fn ledgers(&self, gi: usize) -> Vec<DecompositionLedger> {
        self.paths
            .iter()
            .map(|p| self.plan.decompose(p, gi))
            .collect()
    }
}

/// Ensembles for every configured `ε`, sharing one layout.
#[derive(Debug, Clone)]
pub struct EnsembleSet {
    pub config: ExperimentConfig,
    pub layout: Layout,
    pub runs: Vec<Ensemble>,
}

impl EnsembleSet {
    pub fn run(config: &ExperimentConfig, layout: Layout, workers: usize) -> Result<Self> {
        config.validate()?;
        let pool = pool(workers)?;
        let mut runs = Vec::with_capacity(config.epsilon_list.len());
        for (block, &eps) in config.epsilon_list.iter().enumerate() {
            let params = config.params(eps)?;
            let plan = LedgerPlan::new(
                params,
                layout.tests.clone(),
                layout.scales.clone(),
                layout.mollifier,
                layout.modes,
            )?;
            let times = &config.sample_times;
            let paths: Vec<Vec<SampleRecord>> = pool.install(|| {
                (0..config.replicas)
                    .into_par_iter()
                    .map(|r| {
                        let mut rng = replica_stream(config.master_seed, block as u32, r as u32);
                        let init = sample_initial(&params, &mut rng);
                        record_path(&plan, init, &mut rng, times)
                    })
                    .collect()
            });
            runs.push(Ensemble {
                epsilon: eps,
                plan,
                sample_times: times.clone(),
                paths,
            });
        }
        Ok(Self {
            config: config.clone(),
            layout,
            runs,
        })
    }
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Tracks `Y_t(G)` for several `G` through jump deltas only.
struct FieldTracker {
    /// `√ε G(εx)` per site, per test.
    weights: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Observer for FieldTracker {
    fn on_hold(&mut self, _micro_dt: f64) {}

    fn on_jump(&mut self, e: &JumpEvent, state: &SpinState) {
        // The particle has already moved from `source` to `target`.
        let target = e.target(state.sites());
        for (v, w) in self.values.iter_mut().zip(&self.weights) {
            *v += 2.0 * (w[target] - w[e.source]);
        }
    }
}

/// `Y_t(G)` only, for every configured `ε`: `out[e][r][k][g]`.
/// Uses the same replica streams as [`EnsembleSet::run`].
pub fn field_values(
    config: &ExperimentConfig,
    tests: &[TestFunction],
    workers: usize,
) -> Result<Vec<Vec<Vec<Vec<f64>>>>> {
    config.validate()?;
    let pool = pool(workers)?;
    let mut out = Vec::new();
    for (block, &eps) in config.epsilon_list.iter().enumerate() {
        let params = config.params(eps)?;
        let l = params.sites;
        let weights: Vec<Vec<f64>> = tests
            .iter()
            .map(|g| {
                (0..l)
                    .map(|x| eps.sqrt() * g.value(eps * crate::exclusion::coordinate(x, l) as f64))
                    .collect()
            })
            .collect();
        let times = &config.sample_times;
        let per_replica: Vec<Vec<Vec<f64>>> = pool.install(|| {
            (0..config.replicas)
                .into_par_iter()
                .map(|r| {
                    let mut rng = replica_stream(config.master_seed, block as u32, r as u32);
                    let init = sample_initial(&params, &mut rng);
                    let values = weights
                        .iter()
                        .map(|w| w.iter().zip(init.spins()).map(|(a, s)| a * s as f64).sum())
                        .collect();
                    let mut tracker = FieldTracker {
                        weights: weights.clone(),
                        values,
                    };
                    let mut sim = Simulator::new(params, init);
                    times
                        .iter()
                        .map(|&t| {
                            let dt = (params.to_micro(t) - sim.micro_time()).max(0.0);
                            sim.advance(&mut rng, dt, &mut tracker);
                            tracker.values.clone()
                        })
                        .collect()
                })
                .collect()
        });
        out.push(per_replica);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::eval_field;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig::parse(
            "epsilon_list = 0.25\nwindow = 4\nhorizon = 0.1\nreplicas = 3\nn_list = 2\nsample_times = 3\nhermite_indices = 1,2",
        )
        .unwrap()
    }

    #[test]
    fn ensembles_are_independent_of_worker_count() {
        let cfg = tiny();
        let layout = Layout::full(&cfg).unwrap();
        let a = EnsembleSet::run(&cfg, layout.clone(), 1).unwrap();
        let b = EnsembleSet::run(&cfg, layout, 3).unwrap();
        assert_eq!(a.runs[0].paths, b.runs[0].paths);
        assert_eq!(a.runs[0].replicas(), 3);
        assert_eq!(a.layout.combination_index(), Some(2));
    }

    #[test]
    fn field_tracker_matches_ledger() {
        let cfg = tiny();
        let layout = Layout::full(&cfg).unwrap();
        let set = EnsembleSet::run(&cfg, layout.clone(), 1).unwrap();
        let fields = field_values(&cfg, &layout.tests, 2).unwrap();
        for (r, path) in set.runs[0].paths.iter().enumerate() {
            for (k, rec) in path.iter().enumerate() {
                for gi in 0..layout.tests.len() {
                    let ledger_y = set.runs[0].plan.decompose(path, gi).rows[k].y;
                    assert!(
                        (fields[0][r][k][gi] - ledger_y).abs() < 1e-12,
                        "{r} {k} {gi}"
                    );
                }
                let _ = rec;
            }
        }
        // Starting values agree with the direct field evaluation.
        let params = cfg.params(0.25).unwrap();
        let mut rng = replica_stream(cfg.master_seed, 0, 1);
        let init = sample_initial(&params, &mut rng);
        assert!((eval_field(&init, &layout.tests[0], 0.25) - fields[0][1][0][0]).abs() < 1e-12);
    }
}
