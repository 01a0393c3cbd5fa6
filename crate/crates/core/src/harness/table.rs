//! Estimate tables, their CSV form, and the JSON run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::ExperimentConfig;
use crate::error::Result;
use crate::stats::Estimate;

pub const CSV_HEADER: &str = "experiment,G,epsilon,gamma,N,t,estimate,stderr,replicas";

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub experiment: String,
    pub g: String,
    pub epsilon: f64,
    pub gamma: f64,
    /// Mollifier scale, absent for `N`-independent quantities.
    pub n: Option<usize>,
    /// Sample time, absent for time-integrated quantities.
    pub t: Option<f64>,
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimateTable {
    pub rows: Vec<EstimateRow>,
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

impl EstimateTable {
    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        experiment: &str,
        g: &str,
        epsilon: f64,
        gamma: f64,
        n: Option<usize>,
        t: Option<f64>,
        est: Estimate,
    ) {
        self.rows.push(EstimateRow {
            experiment: experiment.to_string(),
            g: g.to_string(),
            epsilon,
            gamma,
            n,
            t,
            estimate: est.value,
            stderr: est.stderr,
            replicas: est.count,
        });
    }

    pub fn find(
        &self,
        experiment: &str,
        g: &str,
        epsilon: f64,
        n: Option<usize>,
        t: Option<f64>,
    ) -> Option<&EstimateRow> {
        self.rows.iter().find(|r| {
            r.experiment == experiment && r.g == g && r.epsilon == epsilon && r.n == n && r.t == t
        })
    }

    pub fn extend(&mut self, other: EstimateTable) {
        self.rows.extend(other.rows);
    }

    /// CSV text; every float with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.experiment,
                r.g,
                float(r.epsilon),
                float(r.gamma),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                r.t.map(float).unwrap_or_default(),
                float(r.estimate),
                float(r.stderr),
                r.replicas
            );
        }
        out
    }
}

/// Pass/fail outcome of one property checked by an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Result of one experiment.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub experiment: String,
    pub table: EstimateTable,
    pub checks: Vec<Check>,
    /// Cells whose numerical contract failed, with the reason.
    pub marked: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ..Self::default()
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub config_sha256: String,
    pub master_seed: u64,
    pub workers: usize,
    pub versions: Versions,
    pub config: String,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
    pub marked_cells: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub ckpz: &'static str,
    pub csv_format: u32,
    pub rng: &'static str,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            ckpz: env!("CARGO_PKG_VERSION"),
            csv_format: 1,
            rng: "chacha12 (rand_chacha 0.3)",
        }
    }
}

/// Write `<experiment>.csv` and `<experiment>.manifest.json` under `dir`.
pub fn write_report(
    dir: &Path,
    report: &Report,
    config: &ExperimentConfig,
    workers: usize,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv_name = format!("{}.csv", report.experiment);
    let csv_path = dir.join(&csv_name);
    std::fs::write(&csv_path, report.table.to_csv())?;
    let manifest = RunManifest {
        experiment: report.experiment.clone(),
        config_sha256: config.hash(),
        master_seed: config.master_seed,
        workers,
        versions: Versions::default(),
        config: config.canonical(),
        outputs: vec![csv_name],
        checks: report.checks.clone(),
        marked_cells: report.marked.clone(),
    };
    let manifest_path = dir.join(format!("{}.manifest.json", report.experiment));
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| crate::error::Error::Config(format!("manifest serialisation: {e}")))?;
    std::fs::write(&manifest_path, json + "\n")?;
    Ok(vec![csv_path, manifest_path])
}
