//! Configuration-driven studies of z-pinch linear stability.
//!
//! A study builds the equilibrium, scans the pointwise criteria, solves the
//! requested `(m, k)` modes, optionally runs the wavenumber-scaling family
//! and integrates the most unstable modes in time. Each stage writes CSV
//! artifacts into the output directory, and `summary.json` collects the
//! verdicts together with the configuration that produced them.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod plot;
pub mod study;

pub use config::StudyConfig;
pub use error::{CliError, CliResult};
pub use plot::emit_plot_data;
pub use study::{run_study, Summary};

/// Size the global worker pool. Later calls (or a pool already in use) are
/// ignored.
pub fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
