use crate::error::{CliError, CliResult};
use clap::Args;
use scarot_core::{MeanOptions, MetricWeight};
use serde::Serialize;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Weight of the rotation part of the metric.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub k: f64,
    /// Outer-loop stopping threshold on the objective decrease.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub eps: f64,
    /// Gradient tolerance of the rotation mean.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Log-eigenvalue gap below which eigenvalues count as repeated.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub eps_strat: f64,
    /// Maximum number of outer iterations of the PSR mean.
    #[arg(long, global = true, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of bootstrap replicates.
    #[arg(long = "bootstrap", global = true, default_value_t = 200)]
    pub bootstrap: usize,
    /// Confidence level of the bootstrap regions.
    #[arg(long, global = true, default_value_t = 0.95)]
    pub level: f64,
}

fn bad(msg: String) -> CliError {
    CliError::Parse(msg)
}

impl RunConfig {
    pub fn weight(&self) -> CliResult<MetricWeight> {
        MetricWeight::new(self.k).map_err(|e| bad(format!("--k: {e}")))
    }

    pub fn mean_options(&self) -> CliResult<MeanOptions> {
        if !(self.eps >= 0.0) {
            return Err(bad(format!("--eps must be non-negative, got {}", self.eps)));
        }
        if !(self.tol > 0.0) {
            return Err(bad(format!("--tol must be positive, got {}", self.tol)));
        }
        if !(self.eps_strat > 0.0) {
            return Err(bad(format!("--eps-strat must be positive, got {}", self.eps_strat)));
        }
        if self.max_iter == 0 {
            return Err(bad("--max-iter must be positive".into()));
        }
        Ok(MeanOptions {
            k: self.weight()?,
            eps: self.eps,
            max_outer: self.max_iter,
            so_tol: self.tol,
            eps_strat: self.eps_strat,
            ..MeanOptions::default()
        })
    }

    pub fn check_bootstrap(&self) -> CliResult<()> {
        if self.bootstrap == 0 {
            return Err(bad("--bootstrap must be at least 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(bad(format!("--level must lie in (0, 1), got {}", self.level)));
        }
        Ok(())
    }
}
