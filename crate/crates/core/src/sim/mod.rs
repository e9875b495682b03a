//! Statevector and density-matrix simulation with depolarizing and thermal
//! relaxation noise.
//!
//! States live in the wire frame. [`logical_probabilities`] maps measured
//! wire outcomes back to logical bitstrings using the circuit's exit layout.

mod density;
mod noise;
mod statevector;
mod trajectory;

use std::collections::BTreeMap;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::ProblemHamiltonian;
use crate::circuit::Circuit;
use crate::error::{Error, Result};

pub use density::{depolarize, thermal_relax, DensityMatrix};
pub use noise::{GateDurations, NoiseModel, ThermalModel};
pub use statevector::StateVector;
pub use trajectory::run_trajectories;

/// Largest register simulated exactly as a density matrix.
pub const DENSITY_MATRIX_LIMIT: usize = 6;
pub const DEFAULT_TRAJECTORIES: usize = 2000;
pub const MAX_STATEVECTOR_QUBITS: usize = 26;

/// Outcome counts keyed by classical-register index (bit `k` = classical bit `k`).
pub type Counts = BTreeMap<usize, u64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub trajectories: usize,
    pub seed: u64,
    /// Noisy circuits up to this width use the exact density-matrix path.
    pub exact_limit: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { trajectories: DEFAULT_TRAJECTORIES, seed: 0, exact_limit: DENSITY_MATRIX_LIMIT }
    }
}

/// Maps a wire-frame distribution to logical bitstrings (bit `l` = logical `l`).
pub fn logical_probabilities(c: &Circuit, wire_probs: &[f64]) -> Vec<f64> {
    let perm = c.out_permutation();
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return wire_probs.to_vec();
    }
    let mut out = vec![0.0; wire_probs.len()];
    for (w, &p) in wire_probs.iter().enumerate() {
        let mut l = 0;
        for (logical, &wire) in perm.iter().enumerate() {
            l |= ((w >> wire) & 1) << logical;
        }
        out[l] += p;
    }
    out
}

/// Reorders a logical distribution into the classical register.
pub fn classical_probabilities(c: &Circuit, logical: &[f64]) -> Vec<f64> {
    let order = c.measurement_order();
    if order.iter().enumerate().all(|(i, &p)| i == p) {
        return logical.to_vec();
    }
    let mut out = vec![0.0; logical.len()];
    for (l, &p) in logical.iter().enumerate() {
        let mut k = 0;
        for (bit, &q) in order.iter().enumerate() {
            k |= ((l >> q) & 1) << bit;
        }
        out[k] += p;
    }
    out
}

/// Final outcome distribution of `c` over logical bitstrings, starting from
/// `|0…0⟩`. Noise is simulated exactly up to `opts.exact_limit` qubits and by
/// trajectories beyond.
pub fn simulate(c: &Circuit, noise: Option<&NoiseModel>, opts: &SimOptions) -> Result<Vec<f64>> {
    let n = c.n_qubits();
    let wire = match noise.filter(|m| !m.is_noiseless()) {
        None => {
            let mut s = StateVector::zero(n)?;
            s.apply_circuit(c)?;
            s.probabilities()
        }
        Some(m) if n <= opts.exact_limit => {
            let mut rho = DensityMatrix::zero(n)?;
            rho.apply_noisy_circuit(c, m)?;
            rho.probabilities()
        }
        Some(m) => run_trajectories(c, m, opts.trajectories, opts.seed)?,
    };
    Ok(logical_probabilities(c, &wire))
}

/// `Σ_b p(b) H(b)` over logical bitstrings.
pub fn expectation(probs: &[f64], h: &ProblemHamiltonian) -> Result<f64> {
    if probs.len() != 1usize << h.n {
        return Err(Error::InvalidInput(format!(
            "distribution over {} outcomes does not match {} qubits",
            probs.len(),
            h.n
        )));
    }
    Ok(probs.iter().enumerate().map(|(b, &p)| if p == 0.0 { 0.0 } else { p * h.energy(b) }).sum())
}

/// Multinomial draw of `shots` outcomes; deterministic per seed.
pub fn sample(probs: &[f64], shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    let weights: Vec<f64> = probs.iter().map(|&p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidInput(format!("bad distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new();
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Bitstring label with classical bit 0 as the rightmost character.
pub fn bitstring(index: usize, width: usize) -> String {
    (0..width).rev().map(|k| if (index >> k) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str) -> Result<usize> {
    s.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidInput(format!("bad bitstring {s:?}"))),
    })
}
