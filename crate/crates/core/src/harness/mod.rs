//! Experiment configuration, replicated runs, estimators and result files.

pub mod config;
pub mod ensemble;
pub mod experiments;
pub mod table;

pub use config::{uniform_times, ExperimentConfig};
pub use ensemble::{field_values, Ensemble, EnsembleSet, Layout, SOBOLEV_MODES};
pub use experiments::{
    cauchy_scan, ledger_identities, martingale_test, mollifier_independence, oracle_check,
    remainder_scan, selftest, simulate, sobolev_report, stationarity, MIN_DISTRIBUTION_REPLICAS,
    Z_CI, Z_SE,
};
pub use table::{write_report, Check, EstimateRow, EstimateTable, Report, RunManifest, CSV_HEADER};
