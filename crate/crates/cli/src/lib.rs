//! Batch runner for the `fk-core` experiments.
//!
//! Each run reads a flat configuration (see [`config`]), executes one
//! [`Experiment`], and writes `<out>/<experiment>.jsonl` and
//! `<out>/<experiment>.csv` (see [`records`]). [`reproduce`] re-executes a
//! result file from the configuration and seed in its header.
//!
//! Seeds: every replica `r` of a run with master seed `s` draws from the
//! ChaCha8 stream `(s, r << 20 | c)`, where `c` separates the couplings
//! (`c = 0`), the Markov chain (`c = 1`) and auxiliary randomness. Results are
//! collected in replica order, so they do not depend on the worker count
//! (`FK_COARSE_WORKERS`).

pub mod config;
pub mod experiments;
pub mod records;
pub mod reproduce;

use std::path::Path;

pub use config::{ConfigError, ExperimentConfig};
pub use experiments::{execute, Experiment, RunError};
pub use records::{Artifacts, Outcome, ResultRecord};
pub use reproduce::{reproduce, ReproduceReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

pub const WORKERS_ENV: &str = "FK_COARSE_WORKERS";

/// Runs `cfg` and writes its artifacts under `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(Outcome, Artifacts), RunError> {
    let outcome = execute(cfg)?;
    let artifacts = records::write_outcome(out, cfg, &outcome)?;
    Ok((outcome, artifacts))
}

pub fn exit_code(result: &Result<Outcome, RunError>) -> i32 {
    match result {
        Ok(o) if o.violations.is_empty() => EXIT_OK,
        Ok(_) => EXIT_VIOLATION,
        Err(e) if e.is_config() => EXIT_CONFIG,
        Err(e) if e.is_invariant() => EXIT_VIOLATION,
        Err(_) => EXIT_FAILURE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let mut o = Outcome::default();
        assert_eq!(exit_code(&Ok(o.clone())), EXIT_OK);
        o.violation("broken");
        assert_eq!(exit_code(&Ok(o)), EXIT_VIOLATION);
        let e = RunError::Core(fk_core::Error::Invariant("x".into()));
        assert_eq!(exit_code(&Err(e)), EXIT_VIOLATION);
        let e = RunError::Config(config::config_error("lattice.n", "bad"));
        assert_eq!(exit_code(&Err(e)), EXIT_CONFIG);
    }
}
