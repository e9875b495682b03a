use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE, ZERO};

use super::{NoiseModel, StateVector};

const CHUNK: usize = 32;

fn pauli(amps: &mut [C64], q: usize, which: u8) {
    let m = match which {
        0 => [[ZERO, ONE], [ONE, ZERO]],
        1 => [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]],
        _ => [[ONE, ZERO], [ZERO, -ONE]],
    };
    linalg::apply_1q(amps, q, &m);
}

fn excited_population(amps: &[C64], q: usize) -> f64 {
    amps.iter().enumerate().filter(|(i, _)| (i >> q) & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
}

fn renormalize(amps: &mut [C64]) {
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        amps.iter_mut().for_each(|a| *a /= norm);
    }
}

/// One stochastic unravelling of the channel after a gate on qubit `q`.
fn relax(amps: &mut [C64], q: usize, t1: f64, t2: f64, t: f64, rng: &mut ChaCha8Rng) {
    let gamma = 1.0 - (-t / t1).exp();
    let bit = 1usize << q;
    let p_jump = gamma * excited_population(amps, q);
    if rng.random::<f64>() < p_jump {
        for i in 0..amps.len() {
            if i & bit != 0 {
                amps[i & !bit] = amps[i];
                amps[i] = ZERO;
            }
        }
    } else {
        let damp = (1.0 - gamma).sqrt();
        amps.iter_mut().enumerate().filter(|(i, _)| i & bit != 0).for_each(|(_, a)| *a *= damp);
    }
    renormalize(amps);
    // remaining coherence loss beyond what damping already gave
    if gamma < 1.0 {
        let f = ((-t / t2).exp() / (1.0 - gamma).sqrt()).min(1.0);
        if rng.random::<f64>() < (1.0 - f) / 2.0 {
            pauli(amps, q, 2);
        }
    }
}

fn noisy_step(s: &mut StateVector, g: &Gate, noise: &NoiseModel, rng: &mut ChaCha8Rng) -> Result<()> {
    s.apply_gate(g)?;
    let eps = noise.gate_error(g);
    for &q in &g.qubits {
        if eps > 0.0 {
            let r = rng.random::<f64>();
            if r < 0.75 * eps {
                pauli(s.amplitudes_mut(), q, (r / (0.25 * eps)) as u8);
            }
        }
        if let Some((t1, t2, t)) = noise.relaxation(g, q)? {
            relax(s.amplitudes_mut(), q, t1, t2, t, rng);
        }
    }
    Ok(())
}

/// Wire-frame outcome distribution averaged over `count` trajectories.
/// Trajectory `k` uses seed `seed + k`; chunks are reduced in index order.
pub fn run_trajectories(c: &Circuit, noise: &NoiseModel, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidInput("trajectory count must be at least 1".into()));
    }
    noise.validate()?;
    let n = c.n_qubits();
    let dim = 1usize << n;
    let chunks: Vec<Vec<f64>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![0.0; dim];
            for k in chunk * CHUNK..((chunk + 1) * CHUNK).min(count) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                let mut s = StateVector::zero(n)?;
                for g in c.gates() {
                    noisy_step(&mut s, g, noise, &mut rng)?;
                }
                for (a, p) in acc.iter_mut().zip(s.probabilities()) {
                    *a += p;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0.0; dim];
    for acc in chunks {
        for (t, a) in total.iter_mut().zip(acc) {
            *t += a;
        }
    }
    total.iter_mut().for_each(|t| *t /= count as f64);
    Ok(total)
}
