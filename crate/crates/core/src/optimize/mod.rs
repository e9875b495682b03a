//! Variational outer loop: multistart minimization, the exhaustive oracle,
//! quality metrics and the order/sequence selection pipeline.

mod methods;
mod metrics;
mod pipeline;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use methods::{gradient_descent, simplex_free, FD_STEP};
pub use metrics::{
    approximation_ratio_maxcut, approximation_ratio_portfolio, brute_force, portfolio_ratio, success_probability,
    success_probability_from_probs, OracleResult,
};
pub use pipeline::{
    mean_sem, run_pipeline, run_repeats, write_csv, CandidateResult, Objective, PipelineConfig, PipelineResult,
    CSV_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Optimizer {
    GradientDescent,
    SimplexFree,
}

impl std::str::FromStr for Optimizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "GRADIENT_DESCENT" | "GD" => Ok(Optimizer::GradientDescent),
            "SIMPLEX_FREE" | "COBYLA" => Ok(Optimizer::SimplexFree),
            other => Err(Error::InvalidInput(format!("unknown optimizer {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationConfig {
    pub optimizer: Optimizer,
    /// Gradient descent: iterations including the initial evaluation.
    /// Simplex-free: objective evaluations.
    pub maxiter: usize,
    pub n_starts: usize,
    pub seed: u64,
    #[serde(default)]
    pub refine_maxiter: Option<usize>,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig { optimizer: Optimizer::GradientDescent, maxiter: 1000, n_starts: 10, seed: 0, refine_maxiter: None }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.maxiter == 0 {
            return Err(Error::InvalidInput("maxiter must be at least 1".into()));
        }
        if self.n_starts == 0 {
            return Err(Error::InvalidInput("n_starts must be at least 1".into()));
        }
        if self.refine_maxiter == Some(0) {
            return Err(Error::InvalidInput("refine_maxiter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a single local run.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub params: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best energy after each iteration.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartTrace {
    pub start: usize,
    pub initial: Vec<f64>,
    /// `None` when the objective returned a non-finite value.
    pub result: Option<LocalResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub params: Vec<f64>,
    pub energy: f64,
    /// Iterations of the winning start, refinement included.
    pub iterations: usize,
    pub starts: Vec<StartTrace>,
    pub refined: Option<LocalResult>,
}

impl OptimizationResult {
    pub fn iterations_per_start(&self) -> Vec<usize> {
        self.starts.iter().map(|s| s.result.as_ref().map_or(0, |r| r.iterations)).collect()
    }

    pub fn failed_starts(&self) -> usize {
        self.starts.iter().filter(|s| s.result.is_none()).count()
    }
}

/// Initial point of start `k`: uniform in `[0, 2π)`, seeded with `seed + k`.
pub fn initial_point(dim: usize, seed: u64, k: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
    (0..dim).map(|_| rng.random_range(0.0..TAU)).collect()
}

fn run_local(f: &(dyn Fn(&[f64]) -> f64 + Sync), x0: &[f64], method: Optimizer, maxiter: usize) -> Option<LocalResult> {
    match method {
        Optimizer::GradientDescent => gradient_descent(f, x0, maxiter),
        Optimizer::SimplexFree => simplex_free(f, x0, maxiter),
    }
}

/// Multistart minimization of `f` over `dim` parameters.
pub fn minimize(f: &(dyn Fn(&[f64]) -> f64 + Sync), dim: usize, cfg: &OptimizationConfig) -> Result<OptimizationResult> {
    if dim == 0 {
        return Err(Error::InvalidInput("cannot optimize zero parameters".into()));
    }
    cfg.validate()?;
    let starts: Vec<StartTrace> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|k| {
            let initial = initial_point(dim, cfg.seed, k);
            let result = run_local(f, &initial, cfg.optimizer, cfg.maxiter);
            StartTrace { start: k, initial, result }
        })
        .collect();
    let best = starts
        .iter()
        .filter_map(|s| s.result.as_ref())
        .min_by(|a, b| a.energy.total_cmp(&b.energy))
        .ok_or_else(|| Error::Degenerate("objective was non-finite at every start".into()))?;
    let (mut params, mut energy, mut iterations) = (best.params.clone(), best.energy, best.iterations);
    let refined = cfg.refine_maxiter.and_then(|m| run_local(f, &params, cfg.optimizer, m));
    if let Some(r) = &refined {
        iterations += r.iterations;
        if r.energy < energy {
            params.clone_from(&r.params);
            energy = r.energy;
        }
    }
    Ok(OptimizationResult { params, energy, iterations, starts, refined })
}

#[cfg(test)]
mod tests;
