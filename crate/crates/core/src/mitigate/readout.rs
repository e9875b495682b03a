use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::ProblemHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::sim::Counts;

/// Largest restricted system solved densely.
pub const MAX_SUBSPACE: usize = 4096;
/// Largest register for the full tensor-inverse fallback.
pub const FULL_INVERSE_LIMIT: usize = 12;

pub type QuasiDistribution = BTreeMap<usize, f64>;

/// Independent per-qubit readout errors `(P(1|0), P(0|1))`, indexed by
/// classical bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionModel {
    pub flips: Vec<(f64, f64)>,
}

impl ConfusionModel {
    pub fn new(flips: Vec<(f64, f64)>) -> Result<ConfusionModel> {
        let m = ConfusionModel { flips };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal(n: usize) -> ConfusionModel {
        ConfusionModel { flips: vec![(0.0, 0.0); n] }
    }

    pub fn n(&self) -> usize {
        self.flips.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (q, &(a, b)) in self.flips.iter().enumerate() {
            if !((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)) {
                return Err(Error::InvalidInput(format!("qubit {q}: readout probabilities outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// `M[meas][prep]` for qubit `q`; columns sum to one.
    pub fn matrix(&self, q: usize) -> [[f64; 2]; 2] {
        let (p10, p01) = self.flips[q];
        [[1.0 - p10, p01], [p10, 1.0 - p01]]
    }

    /// `P(measured | prepared)` under the tensor-product model.
    pub fn transition(&self, measured: usize, prepared: usize) -> f64 {
        (0..self.n()).map(|q| self.matrix(q)[(measured >> q) & 1][(prepared >> q) & 1]).product()
    }

    fn check_width(&self, counts: &Counts) -> Result<()> {
        match counts.keys().next_back() {
            Some(&b) if b >> self.n() != 0 => {
                Err(Error::InvalidInput(format!("bitstring {b:#b} wider than the {}-bit model", self.n())))
            }
            _ => Ok(()),
        }
    }
}

/// Passes every shot through the readout channel; deterministic per seed.
pub fn apply_confusion(counts: &Counts, model: &ConfusionModel, seed: u64) -> Result<Counts> {
    model.check_width(counts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Counts::new();
    for (&b, &c) in counts {
        for _ in 0..c {
            let mut m = b;
            for (q, &(p10, p01)) in model.flips.iter().enumerate() {
                let p = if (b >> q) & 1 == 0 { p10 } else { p01 };
                if p > 0.0 && rng.random::<f64>() < p {
                    m ^= 1 << q;
                }
            }
            *out.entry(m).or_default() += 1;
        }
    }
    Ok(out)
}

/// Readout correction on the subspace of observed bitstrings and their
/// Hamming-1 neighbours, with the restricted confusion columns renormalized.
/// Falls back to the full tensor inverse when the restricted system is
/// singular. The result sums to one and may hold negative entries.
pub fn rem_correct(counts: &Counts, model: &ConfusionModel) -> Result<QuasiDistribution> {
    model.check_width(counts)?;
    let shots: u64 = counts.values().sum();
    if shots == 0 {
        return Err(Error::InvalidInput("no shots to correct".into()));
    }
    let mut space = BTreeSet::new();
    for &b in counts.keys() {
        space.insert(b);
        for q in 0..model.n() {
            space.insert(b ^ (1 << q));
        }
    }
    let space: Vec<usize> = space.into_iter().collect();
    if space.len() <= MAX_SUBSPACE {
        let dim = space.len();
        let mut a = vec![vec![0.0; dim]; dim];
        for (j, &prep) in space.iter().enumerate() {
            let col: Vec<f64> = space.iter().map(|&meas| model.transition(meas, prep)).collect();
            let norm: f64 = col.iter().sum();
            for (i, v) in col.into_iter().enumerate() {
                a[i][j] = if norm > 0.0 { v / norm } else { 0.0 };
            }
        }
        let b: Vec<f64> = space.iter().map(|s| counts.get(s).copied().unwrap_or(0) as f64 / shots as f64).collect();
        if let Some(x) = solve_dense(a, b, 1e-12) {
            return Ok(normalized(space.into_iter().zip(x).collect()));
        }
    }
    full_inverse(counts, model, shots)
}

fn full_inverse(counts: &Counts, model: &ConfusionModel, shots: u64) -> Result<QuasiDistribution> {
    let n = model.n();
    if n > FULL_INVERSE_LIMIT {
        return Err(Error::ResourceLimit(format!("{n}-bit full readout inverse exceeds {FULL_INVERSE_LIMIT} bits")));
    }
    let mut p = vec![0.0; 1 << n];
    for (&b, &c) in counts {
        p[b] = c as f64 / shots as f64;
    }
    for q in 0..n {
        let [[a, b], [c, d]] = model.matrix(q);
        let det = a * d - b * c;
        if det.abs() < 1e-12 {
            return Err(Error::Degenerate(format!("readout matrix of qubit {q} is singular")));
        }
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let bit = 1 << q;
        for i in 0..p.len() {
            if i & bit == 0 {
                let (x0, x1) = (p[i], p[i | bit]);
                p[i] = inv[0][0] * x0 + inv[0][1] * x1;
                p[i | bit] = inv[1][0] * x0 + inv[1][1] * x1;
            }
        }
    }
    Ok(normalized(p.into_iter().enumerate().filter(|(_, v)| *v != 0.0).collect()))
}

fn normalized(mut q: QuasiDistribution) -> QuasiDistribution {
    let total: f64 = q.values().sum();
    if total != 0.0 {
        q.values_mut().for_each(|v| *v /= total);
    }
    q
}

/// Clips negative entries and renormalizes, for display.
pub fn clip_quasi(q: &QuasiDistribution) -> QuasiDistribution {
    normalized(q.iter().map(|(&b, &v)| (b, v.max(0.0))).collect())
}

/// `Σ q(b) H(b)` with classical bits read as logical qubits.
pub fn quasi_expectation(q: &QuasiDistribution, h: &ProblemHamiltonian) -> f64 {
    q.iter().map(|(&b, &v)| v * h.energy(b)).sum()
}

/// Normalized counts as a quasi-distribution.
pub fn counts_distribution(counts: &Counts) -> QuasiDistribution {
    let shots: u64 = counts.values().sum();
    counts.iter().map(|(&b, &c)| (b, c as f64 / shots.max(1) as f64)).collect()
}
