use crate::circuit::{apply_gate, Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

use super::MAX_STATEVECTOR_QUBITS;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<StateVector> {
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::ResourceLimit(format!("{n}-qubit statevector")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(StateVector { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<StateVector> {
        let mut s = StateVector::zero(n)?;
        if index >= s.amps.len() {
            return Err(Error::InvalidInput(format!("basis index {index} out of range")));
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Normalizes and wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<StateVector> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.is_empty() || 1usize << n != amps.len() {
            return Err(Error::InvalidSize(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("zero or non-finite state".into()));
        }
        Ok(StateVector { n, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if let Some(&q) = g.qubits.iter().find(|&&q| q >= self.n) {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n });
        }
        apply_gate(&mut self.amps, g);
        Ok(())
    }

    /// Applies every unitary gate; barriers, delays and measurements are skipped.
    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.n_qubits() != self.n {
            return Err(Error::InvalidInput(format!(
                "{}-qubit circuit on {}-qubit state",
                c.n_qubits(),
                self.n
            )));
        }
        for g in c.gates() {
            apply_gate(&mut self.amps, g);
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}
