use std::collections::BTreeSet;
use std::io::Write;

use crate::ansatz::{build_ansatz_with_order, AnsatzSpec, Problem, ProblemKind};
use crate::circuit::{cx_count, decompose_circuit, depth, identity_permutation, Circuit};
use crate::error::{Error, Result};
use crate::router::optimize_initial_order;
use crate::sim::{simulate, NoiseModel, SimOptions};

use super::{
    brute_force, minimize, portfolio_ratio, success_probability_from_probs, OptimizationConfig, OptimizationResult,
    OracleResult,
};

/// Variational objective to be minimized. MaxCut returns `−⟨cut⟩`;
/// portfolio returns `Σ p(b)·H(b)` over feasible `b` only.
#[derive(Debug, Clone)]
pub struct Objective {
    pub problem: Problem,
    pub spec: AnsatzSpec,
    pub order: Vec<usize>,
    pub noise: Option<NoiseModel>,
    pub sim: SimOptions,
    weights: Vec<f64>,
}

impl Objective {
    pub fn new(problem: &Problem, spec: &AnsatzSpec) -> Result<Objective> {
        spec.validate()?;
        let energies = problem.hamiltonian.energies()?;
        let weights = energies
            .iter()
            .enumerate()
            .map(|(b, &e)| match problem.kind {
                ProblemKind::Maxcut => -e,
                ProblemKind::Portfolio if problem.is_feasible(b) => e,
                ProblemKind::Portfolio => 0.0,
            })
            .collect();
        Ok(Objective {
            problem: problem.clone(),
            spec: spec.clone(),
            order: identity_permutation(problem.n()),
            noise: None,
            sim: SimOptions::default(),
            weights,
        })
    }

    pub fn with_order(mut self, order: Vec<usize>) -> Objective {
        self.order = order;
        self
    }

    pub fn with_noise(mut self, noise: NoiseModel, sim: SimOptions) -> Objective {
        self.noise = Some(noise);
        self.sim = sim;
        self
    }

    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        build_ansatz_with_order(&self.spec, &self.problem.hamiltonian, params, &self.order)
    }

    /// Logical outcome distribution of the ansatz.
    pub fn probabilities(&self, params: &[f64]) -> Result<Vec<f64>> {
        let c = self.circuit(params)?;
        if self.noise.is_some() {
            simulate(&decompose_circuit(&c)?, self.noise.as_ref(), &self.sim)
        } else {
            simulate(&c, None, &self.sim)
        }
    }

    pub fn value_of(&self, probs: &[f64]) -> f64 {
        probs.iter().zip(&self.weights).map(|(p, w)| p * w).sum()
    }

    pub fn value(&self, params: &[f64]) -> Result<f64> {
        Ok(self.value_of(&self.probabilities(params)?))
    }

    /// `value` with errors mapped to NaN, for the optimizers.
    pub fn call(&self, params: &[f64]) -> f64 {
        self.value(params).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub optimization: OptimizationConfig,
    /// Initial orders sampled per routed candidate (identity included).
    pub order_budget: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { optimization: OptimizationConfig::default(), order_budget: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateResult {
    pub spec: AnsatzSpec,
    pub order: Vec<usize>,
    /// CX overhead of the swap network relative to the unrouted interactions.
    pub extra_cx: usize,
    pub cx: usize,
    pub depth: usize,
    /// Objective value (minimized).
    pub energy: f64,
    /// `⟨H⟩` in the problem's own sense.
    pub expectation: f64,
    pub r: f64,
    pub success: f64,
    pub params: Vec<f64>,
    pub optimization: OptimizationResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub oracle: OracleResult,
    pub candidates: Vec<CandidateResult>,
    pub best: usize,
    pub seed: u64,
}

impl PipelineResult {
    pub fn winner(&self) -> &CandidateResult {
        &self.candidates[self.best]
    }
}

fn interaction_edges(problem: &Problem) -> BTreeSet<(usize, usize)> {
    problem.hamiltonian.zz.keys().copied().collect()
}

/// Order search per candidate, parameter optimization, then selection by
/// lowest objective value (earliest candidate on ties).
pub fn run_pipeline(problem: &Problem, specs: &[AnsatzSpec], cfg: &PipelineConfig) -> Result<PipelineResult> {
    if specs.is_empty() {
        return Err(Error::InvalidInput("no candidate ansatz".into()));
    }
    let oracle = brute_force(problem)?;
    let seed = cfg.optimization.seed;
    let n = problem.n();
    let mut candidates = Vec::with_capacity(specs.len());
    for spec in specs {
        let (order, extra_cx) = if spec.gate_mode.is_routed() {
            optimize_initial_order(&interaction_edges(problem), n, cfg.order_budget, seed)?
        } else {
            (identity_permutation(n), 0)
        };
        let obj = Objective::new(problem, spec)?.with_order(order.clone());
        let opt = minimize(&|x: &[f64]| obj.call(x), spec.n_params(), &cfg.optimization)?;
        let circuit = obj.circuit(&opt.params)?;
        let lowered = decompose_circuit(&circuit)?;
        let probs = obj.probabilities(&opt.params)?;
        let expectation = crate::sim::expectation(&probs, &problem.hamiltonian)?;
        let r = match problem.kind {
            ProblemKind::Maxcut => super::approximation_ratio_maxcut(expectation, oracle.e0)?,
            ProblemKind::Portfolio => portfolio_ratio(&probs, problem, &oracle)?,
        };
        candidates.push(CandidateResult {
            spec: spec.clone(),
            order,
            extra_cx,
            cx: cx_count(&lowered)?,
            depth: depth(&lowered),
            energy: obj.value_of(&probs),
            expectation,
            r,
            success: success_probability_from_probs(&probs, &oracle),
            params: opt.params.clone(),
            optimization: opt,
        });
    }
    let best = (0..candidates.len())
        .min_by(|&a, &b| candidates[a].energy.total_cmp(&candidates[b].energy).then(a.cmp(&b)))
        .expect("non-empty");
    Ok(PipelineResult { oracle, candidates, best, seed })
}

/// Independent repeats with seeds `seed + k`.
pub fn run_repeats(problem: &Problem, specs: &[AnsatzSpec], cfg: &PipelineConfig, repeats: usize) -> Result<Vec<PipelineResult>> {
    if repeats == 0 {
        return Err(Error::InvalidInput("repeats must be at least 1".into()));
    }
    (0..repeats)
        .map(|k| {
            let mut c = cfg.clone();
            c.optimization.seed = cfg.optimization.seed.wrapping_add(k as u64);
            run_pipeline(problem, specs, &c)
        })
        .collect()
}

/// Mean and standard error of the mean (zero SEM for one value).
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub const CSV_HEADER: &str = "problem,n,p,sequence,gate_mode,seed,energy,r,iters";

/// One row per candidate per run.
pub fn write_csv(mut w: impl Write, problem_label: &str, runs: &[PipelineResult]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for run in runs {
        for c in &run.candidates {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                problem_label,
                c.order.len(),
                c.spec.depth,
                c.spec.label(),
                c.spec.gate_mode,
                run.seed,
                c.energy,
                c.r,
                c.optimization.iterations
            )?;
        }
    }
    Ok(())
}
