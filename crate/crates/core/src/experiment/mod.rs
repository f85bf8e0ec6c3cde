//! Config-driven N-sweeps: generate, check homogeneity, count, fit, report.

mod config;
mod fit;
mod report;
mod sweep;

pub use config::{
    side_for, Coefficients, EngineChoice, ExperimentConfig, GeneratorSpec, HomogeneitySection,
    ScanChoice, VerifySection,
};
pub use fit::{fit_exponent, LogLogFit, ScalingFit};
pub use report::{
    energy_csv, exit_code_for, report, Report, ENERGY_COLUMNS, EXIT_FAILURE, EXIT_INVALID_CONFIG,
    EXIT_OK,
};
pub use sweep::{run_sweep, SweepOutcome, SweepRow, SweepRun, CSV_COLUMNS};
