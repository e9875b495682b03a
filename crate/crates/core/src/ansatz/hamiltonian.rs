use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_ENUMERATION_QUBITS: usize = 24;

/// `H = Σ w_ij Z_i Z_j + Σ w_i Z_i + w_0` over qubits `0..n`. Bit value 0
/// is the `+1` eigenstate of `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemHamiltonian {
    pub n: usize,
    pub zz: BTreeMap<(usize, usize), f64>,
    pub z: BTreeMap<usize, f64>,
    pub offset: f64,
}

impl ProblemHamiltonian {
    pub fn new(
        n: usize,
        zz: impl IntoIterator<Item = (usize, usize, f64)>,
        z: impl IntoIterator<Item = (usize, f64)>,
        offset: f64,
    ) -> Result<ProblemHamiltonian> {
        let mut h = ProblemHamiltonian { n, zz: BTreeMap::new(), z: BTreeMap::new(), offset };
        if !offset.is_finite() {
            return Err(Error::InvalidInput("offset is not finite".into()));
        }
        for (i, j, w) in zz {
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidInput(format!("bad ZZ term ({i},{j}) for {n} qubits")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!("ZZ weight on ({i},{j}) is not finite")));
            }
            if h.zz.insert((i.min(j), i.max(j)), w).is_some() {
                return Err(Error::InvalidInput(format!("duplicate ZZ term ({},{})", i.min(j), i.max(j))));
            }
        }
        for (i, w) in z {
            if i >= n || !w.is_finite() {
                return Err(Error::InvalidInput(format!("bad Z term on qubit {i}")));
            }
            if h.z.insert(i, w).is_some() {
                return Err(Error::InvalidInput(format!("duplicate Z term on qubit {i}")));
            }
        }
        Ok(h)
    }

    /// Value on the computational basis state `bits` (bit `i` = qubit `i`).
    pub fn energy(&self, bits: usize) -> f64 {
        let s = |q: usize| if (bits >> q) & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = self.offset;
        for (&(i, j), &w) in &self.zz {
            e += w * s(i) * s(j);
        }
        for (&i, &w) in &self.z {
            e += w * s(i);
        }
        e
    }

    /// `energy` for every basis state.
    pub fn energies(&self) -> Result<Vec<f64>> {
        if self.n > MAX_ENUMERATION_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{} qubits exceeds the {MAX_ENUMERATION_QUBITS}-qubit enumeration limit",
                self.n
            )));
        }
        Ok((0..1usize << self.n).map(|b| self.energy(b)).collect())
    }
}

/// `H = ½ Σ_(i,j)∈E w_ij (1 − Z_i Z_j)`, the (weighted) cut value.
pub fn maxcut_hamiltonian(g: &Graph) -> Result<ProblemHamiltonian> {
    if let Some(&(a, _, _)) = g.edges.iter().find(|(a, b, _)| a == b) {
        return Err(Error::InvalidGraph(format!("self-loop on {a}")));
    }
    let offset = g.edges.iter().map(|e| e.2 / 2.0).sum();
    ProblemHamiltonian::new(g.n, g.edges.iter().map(|&(a, b, w)| (a, b, -w / 2.0)), [], offset)
}

pub fn portfolio_hamiltonian(
    n: usize,
    w_zz: &[(usize, usize, f64)],
    w_z: &[(usize, f64)],
    w0: f64,
) -> Result<ProblemHamiltonian> {
    ProblemHamiltonian::new(n, w_zz.iter().copied(), w_z.iter().copied(), w0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Maximize `H` (cut value).
    Maxcut,
    /// Minimize `H` over bitstrings of Hamming weight `budget`.
    Portfolio,
}

/// Problem instance with its optimization sense and optional budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub hamiltonian: ProblemHamiltonian,
    pub kind: ProblemKind,
    pub budget: Option<usize>,
}

impl Problem {
    pub fn maxcut(g: &Graph) -> Result<Problem> {
        Ok(Problem { hamiltonian: maxcut_hamiltonian(g)?, kind: ProblemKind::Maxcut, budget: None })
    }

    pub fn portfolio(h: ProblemHamiltonian, budget: Option<usize>) -> Result<Problem> {
        if let Some(b) = budget {
            if b > h.n {
                return Err(Error::InvalidInput(format!("budget {b} exceeds {} assets", h.n)));
            }
        }
        Ok(Problem { hamiltonian: h, kind: ProblemKind::Portfolio, budget })
    }

    pub fn n(&self) -> usize {
        self.hamiltonian.n
    }

    pub fn is_feasible(&self, bits: usize) -> bool {
        self.budget.is_none_or(|b| bits.count_ones() as usize == b)
    }

    pub fn from_json(text: &str) -> Result<Problem> {
        let doc: InstanceDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let h = ProblemHamiltonian::new(
            doc.n,
            doc.zz.iter().map(|t| (t.0, t.1, t.2)),
            doc.z.iter().copied(),
            doc.offset,
        )?;
        let kind = doc.kind.unwrap_or(if doc.budget.is_some() { ProblemKind::Portfolio } else { ProblemKind::Maxcut });
        match kind {
            ProblemKind::Maxcut => Ok(Problem { hamiltonian: h, kind, budget: doc.budget }),
            ProblemKind::Portfolio => Problem::portfolio(h, doc.budget),
        }
    }

    pub fn to_json(&self) -> String {
        let h = &self.hamiltonian;
        let doc = InstanceDoc {
            n: h.n,
            zz: h.zz.iter().map(|(&(i, j), &w)| (i, j, w)).collect(),
            z: h.z.iter().map(|(&i, &w)| (i, w)).collect(),
            offset: h.offset,
            budget: self.budget,
            kind: Some(self.kind),
        };
        serde_json::to_string_pretty(&doc).expect("instance serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    n: usize,
    #[serde(default)]
    zz: Vec<(usize, usize, f64)>,
    #[serde(default)]
    z: Vec<(usize, f64)>,
    #[serde(default)]
    offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<ProblemKind>,
}

/// Synthetic mean-variance portfolio: minimize `q·xᵀΣx − μᵀx` over
/// `x ∈ {0,1}^n`, rewritten in spin form with `x_i = (1 − Z_i)/2`.
/// Returns are drawn from U(0, 0.2) and `Σ = AAᵀ/n` with `A_ij ~ U(−0.3, 0.3)`.
pub fn markowitz_instance(n: usize, budget: usize, risk_aversion: f64, seed: u64) -> Result<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.2)).collect();
    let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-0.3..0.3)).collect()).collect();
    let cov = |i: usize, j: usize| (0..n).map(|k| a[i][k] * a[j][k]).sum::<f64>() / n as f64;
    let mut w0 = 0.0;
    let mut wz = vec![0.0; n];
    let mut wzz = Vec::new();
    for i in 0..n {
        // linear part: (q Σ_ii − μ_i) x_i
        let c = risk_aversion * cov(i, i) - mu[i];
        w0 += c / 2.0;
        wz[i] -= c / 2.0;
        for j in i + 1..n {
            // x_i x_j = (1 − Z_i − Z_j + Z_i Z_j)/4
            let q = 2.0 * risk_aversion * cov(i, j);
            w0 += q / 4.0;
            wz[i] -= q / 4.0;
            wz[j] -= q / 4.0;
            wzz.push((i, j, q / 4.0));
        }
    }
    let h = ProblemHamiltonian::new(n, wzz, wz.into_iter().enumerate(), w0)?;
    Problem::portfolio(h, Some(budget))
}
