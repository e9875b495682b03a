use crate::circuit::{gate_matrix, Circuit, Gate, GateKind, GateMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE, ZERO};

use super::{NoiseModel, StateVector};

/// Density matrix stored as a `4^n` vector: entry `(r, c)` sits at
/// `(r << n) | c`, so row bits are wires `n..2n` and column bits wires `0..n`
/// of a doubled register. Gates act as `U` on the row copy and `conj(U)` on
/// the column copy.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero(n: usize) -> Result<DensityMatrix> {
        if n > 13 {
            return Err(Error::ResourceLimit(format!("{n}-qubit density matrix")));
        }
        let mut data = vec![ZERO; 1 << (2 * n)];
        data[0] = ONE;
        Ok(DensityMatrix { n, data })
    }

    pub fn from_pure(s: &StateVector) -> Result<DensityMatrix> {
        let n = s.n();
        let mut rho = DensityMatrix::zero(n)?;
        let a = s.amplitudes();
        for r in 0..a.len() {
            for c in 0..a.len() {
                rho.data[(r << n) | c] = a[r] * a[c].conj();
            }
        }
        Ok(rho)
    }

    pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
        let mut rho = DensityMatrix::zero(n)?;
        let dim = 1usize << n;
        rho.data[0] = ZERO;
        for i in 0..dim {
            rho.data[(i << n) | i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Ok(rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[(r << self.n) | c]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        for &q in &g.qubits {
            self.check(q)?;
        }
        let n = self.n;
        let q = &g.qubits;
        match g.kind {
            GateKind::Cx => {
                linalg::apply_cx(&mut self.data, q[0] + n, q[1] + n);
                linalg::apply_cx(&mut self.data, q[0], q[1]);
            }
            GateKind::Swap => {
                linalg::apply_swap(&mut self.data, q[0] + n, q[1] + n);
                linalg::apply_swap(&mut self.data, q[0], q[1]);
            }
            _ => match gate_matrix(g) {
                Some(GateMatrix::One(m)) => {
                    linalg::apply_1q(&mut self.data, q[0] + n, &m);
                    linalg::apply_1q(&mut self.data, q[0], &linalg::mat2_conj(&m));
                }
                Some(GateMatrix::Two(m)) => {
                    linalg::apply_2q(&mut self.data, q[0] + n, q[1] + n, &m);
                    linalg::apply_2q(&mut self.data, q[0], q[1], &linalg::mat4_conj(&m));
                }
                None => {}
            },
        }
        Ok(())
    }

    /// Visits every 2×2 block `[ρ00 ρ01; ρ10 ρ11]` of qubit `q`.
    fn for_blocks(&mut self, q: usize, mut f: impl FnMut(&mut [C64; 4])) {
        let cb = 1usize << q;
        let rb = 1usize << (q + self.n);
        for i in 0..self.data.len() {
            if i & (cb | rb) != 0 {
                continue;
            }
            let idx = [i, i | cb, i | rb, i | cb | rb];
            let mut blk = [self.data[idx[0]], self.data[idx[1]], self.data[idx[2]], self.data[idx[3]]];
            f(&mut blk);
            for (k, &j) in idx.iter().enumerate() {
                self.data[j] = blk[k];
            }
        }
    }

    /// Applies every gate followed by its noise: depolarizing on each operand,
    /// then thermal relaxation for the gate's duration.
    pub fn apply_noisy_circuit(&mut self, c: &Circuit, noise: &NoiseModel) -> Result<()> {
        noise.validate()?;
        for g in c.gates() {
            self.apply_gate(g)?;
            let eps = noise.gate_error(g);
            for &q in &g.qubits {
                if eps > 0.0 {
                    depolarize(self, q, eps)?;
                }
                if let Some((t1, t2, t)) = noise.relaxation(g, q)? {
                    thermal_relax(self, q, t1, t2, t)?;
                }
            }
        }
        Ok(())
    }
}

/// `E(ρ) = (ε/4)(XρX + YρY + ZρZ) + (1 − 3ε/4)ρ` on qubit `q`.
/// Populations move toward ½ by a factor `1 − ε/2`; coherences shrink by `1 − ε`.
pub fn depolarize(rho: &mut DensityMatrix, q: usize, eps: f64) -> Result<()> {
    rho.check(q)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidNoise(format!("depolarizing rate {eps} outside [0, 1]")));
    }
    let keep = 1.0 - eps / 2.0;
    let mix = eps / 2.0;
    rho.for_blocks(q, |b| {
        let (a, d) = (b[0], b[3]);
        b[0] = a * keep + d * mix;
        b[3] = d * keep + a * mix;
        b[1] *= 1.0 - eps;
        b[2] *= 1.0 - eps;
    });
    Ok(())
}

/// Amplitude damping with `γ = 1 − e^{−t/T1}` combined with pure dephasing so
/// coherences decay as `e^{−t/T2}`. Times share one unit.
pub fn thermal_relax(rho: &mut DensityMatrix, q: usize, t1: f64, t2: f64, t: f64) -> Result<()> {
    rho.check(q)?;
    if !(t1 > 0.0 && t2 > 0.0 && t >= 0.0) {
        return Err(Error::InvalidNoise(format!("need T1, T2 > 0 and t ≥ 0 (T1={t1}, T2={t2}, t={t})")));
    }
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(Error::InvalidNoise(format!("T2 = {t2} exceeds 2·T1 = {}", 2.0 * t1)));
    }
    let gamma = 1.0 - (-t / t1).exp();
    let coh = (-t / t2).exp();
    rho.for_blocks(q, |b| {
        b[0] += b[3] * gamma;
        b[3] *= 1.0 - gamma;
        b[1] *= coh;
        b[2] *= coh;
    });
    Ok(())
}
