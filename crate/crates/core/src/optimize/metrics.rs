use serde::Serialize;

use crate::ansatz::{Problem, ProblemKind, MAX_ENUMERATION_QUBITS};
use crate::error::{Error, Result};
use crate::sim::Counts;

const TIE_TOL: f64 = 1e-9;

/// Exhaustive reference values. `e0` is the best feasible value and `e_max`
/// the worst, both in the problem's own sense: for MaxCut `e0` is the
/// maximum cut, for portfolio the minimum cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub e0: f64,
    pub e_max: f64,
    pub optimal: Vec<usize>,
    pub feasible: Vec<usize>,
    pub kind: ProblemKind,
}

impl OracleResult {
    pub fn is_optimal(&self, bits: usize) -> bool {
        self.optimal.binary_search(&bits).is_ok()
    }

    pub fn is_feasible(&self, bits: usize) -> bool {
        self.feasible.binary_search(&bits).is_ok()
    }
}

pub fn brute_force(problem: &Problem) -> Result<OracleResult> {
    let n = problem.n();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(Error::ResourceLimit(format!("{n} qubits exceed the {MAX_ENUMERATION_QUBITS}-qubit enumeration limit")));
    }
    let energies = problem.hamiltonian.energies()?;
    let feasible: Vec<usize> = (0..energies.len()).filter(|&b| problem.is_feasible(b)).collect();
    if feasible.is_empty() {
        return Err(Error::Degenerate("no feasible bitstring".into()));
    }
    // orient so that smaller is better
    let sign = match problem.kind {
        ProblemKind::Maxcut => -1.0,
        ProblemKind::Portfolio => 1.0,
    };
    let key = |b: usize| sign * energies[b];
    let best = feasible.iter().map(|&b| key(b)).fold(f64::INFINITY, f64::min);
    let worst = feasible.iter().map(|&b| key(b)).fold(f64::NEG_INFINITY, f64::max);
    let optimal = feasible.iter().copied().filter(|&b| key(b) <= best + TIE_TOL).collect();
    Ok(OracleResult { e0: sign * best, e_max: sign * worst, optimal, feasible, kind: problem.kind })
}

/// `r = E / E₀` with both values as cut sizes.
pub fn approximation_ratio_maxcut(e: f64, e0: f64) -> Result<f64> {
    if e0 == 0.0 {
        return Err(Error::Degenerate("maximum cut is zero".into()));
    }
    Ok(e / e0)
}

/// `r = (E − E_max)/(E₀ − E_max)` on the feasibility-conditioned energy;
/// zero when the most likely outcome breaks the budget.
pub fn approximation_ratio_portfolio(e: f64, oracle: &OracleResult, most_likely_feasible: bool) -> Result<f64> {
    if oracle.e0 == oracle.e_max {
        return Err(Error::Degenerate("best and worst feasible energies coincide".into()));
    }
    if !most_likely_feasible {
        return Ok(0.0);
    }
    Ok((e - oracle.e_max) / (oracle.e0 - oracle.e_max))
}

/// Portfolio ratio straight from an outcome distribution.
pub fn portfolio_ratio(probs: &[f64], problem: &Problem, oracle: &OracleResult) -> Result<f64> {
    let (mut mass, mut weighted) = (0.0, 0.0);
    for &b in &oracle.feasible {
        mass += probs[b];
        weighted += probs[b] * problem.hamiltonian.energy(b);
    }
    let top = (0..probs.len()).max_by(|&a, &b| probs[a].total_cmp(&probs[b]).then(b.cmp(&a))).unwrap_or(0);
    if mass <= 0.0 {
        return approximation_ratio_portfolio(0.0, oracle, false);
    }
    approximation_ratio_portfolio(weighted / mass, oracle, problem.is_feasible(top))
}

/// Optimal counts over feasible counts; zero without feasible shots.
pub fn success_probability(counts: &Counts, oracle: &OracleResult) -> f64 {
    let feasible: u64 = counts.iter().filter(|(b, _)| oracle.is_feasible(**b)).map(|(_, c)| c).sum();
    let optimal: u64 = counts.iter().filter(|(b, _)| oracle.is_optimal(**b)).map(|(_, c)| c).sum();
    if feasible == 0 {
        0.0
    } else {
        optimal as f64 / feasible as f64
    }
}

pub fn success_probability_from_probs(probs: &[f64], oracle: &OracleResult) -> f64 {
    let feasible: f64 = oracle.feasible.iter().map(|&b| probs[b]).sum();
    let optimal: f64 = oracle.optimal.iter().map(|&b| probs[b]).sum();
    if feasible <= 0.0 {
        0.0
    } else {
        optimal / feasible
    }
}
