//! Circuit intermediate representation.
//!
//! Gates act on wires `0..n_qubits`. Qubit 0 is the least-significant bit of
//! every basis-state index used in this crate. A circuit additionally records
//! where each logical qubit sits on entry (`in_permutation`) and on exit
//! (`out_permutation`); both are the identity for unrouted circuits.

mod decompose;
mod metrics;
mod text;
mod unitary;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decompose::{decompose, decompose_circuit, fuse_two_qubit_swap, BasisGateSet};
pub use metrics::{cx_count, depth};
pub use text::{from_text, to_text};
pub(crate) use unitary::apply_gate;
pub use unitary::GateMatrix;
pub use unitary::{equal_up_to_phase, gate_matrix, permutation_matrix, unitary, MAX_UNITARY_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Cx,
    Rz,
    Rx,
    Ry,
    X,
    SqrtX,
    Swap,
    Zz,
    Zy,
    Yz,
    Barrier,
    Delay,
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::Cx,
        GateKind::Rz,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::X,
        GateKind::SqrtX,
        GateKind::Swap,
        GateKind::Zz,
        GateKind::Zy,
        GateKind::Yz,
        GateKind::Barrier,
        GateKind::Delay,
        GateKind::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Cx => "CX",
            GateKind::Rz => "RZ",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::X => "X",
            GateKind::SqrtX => "SQRT_X",
            GateKind::Swap => "SWAP",
            GateKind::Zz => "ZZ",
            GateKind::Zy => "ZY",
            GateKind::Yz => "YZ",
            GateKind::Barrier => "BARRIER",
            GateKind::Delay => "DELAY",
            GateKind::Measure => "MEASURE",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name() == s)
    }

    /// Number of operands, `None` for barriers which may span any set of wires.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cx | GateKind::Swap | GateKind::Zz | GateKind::Zy | GateKind::Yz => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::Rz
                | GateKind::Rx
                | GateKind::Ry
                | GateKind::Zz
                | GateKind::Zy
                | GateKind::Yz
                | GateKind::Delay
        )
    }

    pub fn is_two_qubit(self) -> bool {
        self.arity() == Some(2)
    }

    /// True for gates that act unitarily on the state (everything except
    /// barriers, delays and measurements).
    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::Barrier | GateKind::Delay | GateKind::Measure)
    }
}

/// A single operation. For `DELAY` the parameter is the delay length in ns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub param: Option<f64>,
    pub duration: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, param: Option<f64>) -> Result<Gate> {
        let gate = Gate { kind, qubits, param, duration: None };
        gate.validate()?;
        Ok(gate)
    }

    fn raw(kind: GateKind, qubits: Vec<usize>, param: Option<f64>) -> Gate {
        Gate { kind, qubits, param, duration: None }
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::raw(GateKind::Cx, vec![control, target], None)
    }
    pub fn rz(q: usize, theta: f64) -> Gate {
        Gate::raw(GateKind::Rz, vec![q], Some(theta))
    }
    pub fn rx(q: usize, theta: f64) -> Gate {
        Gate::raw(GateKind::Rx, vec![q], Some(theta))
    }
    pub fn ry(q: usize, theta: f64) -> Gate {
        Gate::raw(GateKind::Ry, vec![q], Some(theta))
    }
    pub fn x(q: usize) -> Gate {
        Gate::raw(GateKind::X, vec![q], None)
    }
    pub fn sqrt_x(q: usize) -> Gate {
        Gate::raw(GateKind::SqrtX, vec![q], None)
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::raw(GateKind::Swap, vec![a, b], None)
    }
    /// `exp(-i θ Z_a Z_b)`.
    pub fn zz(a: usize, b: usize, theta: f64) -> Gate {
        Gate::raw(GateKind::Zz, vec![a, b], Some(theta))
    }
    /// `exp(-i θ Z_a Y_b)`; the first operand carries the Z.
    pub fn zy(a: usize, b: usize, theta: f64) -> Gate {
        Gate::raw(GateKind::Zy, vec![a, b], Some(theta))
    }
    /// `exp(-i θ Y_a Z_b)`; the first operand carries the Y.
    pub fn yz(a: usize, b: usize, theta: f64) -> Gate {
        Gate::raw(GateKind::Yz, vec![a, b], Some(theta))
    }
    pub fn barrier(qubits: Vec<usize>) -> Gate {
        Gate::raw(GateKind::Barrier, qubits, None)
    }
    pub fn delay(q: usize, ns: f64) -> Gate {
        Gate::raw(GateKind::Delay, vec![q], Some(ns))
    }
    pub fn measure(q: usize) -> Gate {
        Gate::raw(GateKind::Measure, vec![q], None)
    }

    pub fn with_duration(mut self, ns: f64) -> Gate {
        self.duration = Some(ns);
        self
    }

    pub fn angle(&self) -> f64 {
        self.param.unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind.arity() {
            Some(k) if self.qubits.len() != k => {
                return Err(Error::InvalidGate(format!(
                    "{} expects {} operand(s), got {}",
                    self.kind.name(),
                    k,
                    self.qubits.len()
                )))
            }
            None if self.qubits.is_empty() => {
                return Err(Error::InvalidGate("barrier without operands".into()))
            }
            _ => {}
        }
        for (i, a) in self.qubits.iter().enumerate() {
            if self.qubits[i + 1..].contains(a) {
                return Err(Error::InvalidGate(format!(
                    "{} has repeated operand {}",
                    self.kind.name(),
                    a
                )));
            }
        }
        match (self.kind.is_parameterized(), self.param) {
            (true, None) => Err(Error::InvalidGate(format!("{} requires an angle", self.kind.name()))),
            (false, Some(_)) => Err(Error::InvalidGate(format!("{} takes no angle", self.kind.name()))),
            (true, Some(v)) if !v.is_finite() => {
                Err(Error::InvalidGate(format!("{} angle is not finite", self.kind.name())))
            }
            (_, _) if self.kind == GateKind::Delay && self.angle() < 0.0 => {
                Err(Error::InvalidGate("negative delay".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Returns true when `perm` is a bijection on `0..n`.
pub fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

pub fn identity_permutation(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    /// Logical qubit -> wire at circuit entry.
    in_permutation: Vec<usize>,
    /// Logical qubit -> wire at circuit exit.
    out_permutation: Vec<usize>,
    /// Classical bit -> logical qubit.
    measurement_order: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            in_permutation: identity_permutation(n_qubits),
            out_permutation: identity_permutation(n_qubits),
            measurement_order: identity_permutation(n_qubits),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn in_permutation(&self) -> &[usize] {
        &self.in_permutation
    }

    pub fn out_permutation(&self) -> &[usize] {
        &self.out_permutation
    }

    pub fn measurement_order(&self) -> &[usize] {
        &self.measurement_order
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate()?;
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    fn check_perm(&self, perm: &[usize], what: &str) -> Result<()> {
        if is_permutation(perm, self.n_qubits) {
            Ok(())
        } else {
            Err(Error::InvalidOrder(format!("{what} {perm:?} is not a permutation of 0..{}", self.n_qubits)))
        }
    }

    pub fn set_in_permutation(&mut self, perm: Vec<usize>) -> Result<()> {
        self.check_perm(&perm, "in_permutation")?;
        self.in_permutation = perm;
        Ok(())
    }

    pub fn set_out_permutation(&mut self, perm: Vec<usize>) -> Result<()> {
        self.check_perm(&perm, "out_permutation")?;
        self.out_permutation = perm;
        Ok(())
    }

    pub fn set_measurement_order(&mut self, order: Vec<usize>) -> Result<()> {
        self.check_perm(&order, "measurement_order")?;
        self.measurement_order = order;
        Ok(())
    }

    /// Appends `next` after `self`. The wire layout `self` ends in must be the
    /// layout `next` starts from.
    pub fn append(&mut self, next: &Circuit) -> Result<()> {
        if next.n_qubits != self.n_qubits {
            return Err(Error::Precondition(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                next.n_qubits, self.n_qubits
            )));
        }
        if next.in_permutation != self.out_permutation {
            return Err(Error::Precondition(
                "layout mismatch: appended circuit does not start where this one ends".into(),
            ));
        }
        self.gates.extend(next.gates.iter().cloned());
        self.out_permutation = next.out_permutation.clone();
        Ok(())
    }

    /// Same circuit with its gate list replaced; layouts are kept.
    pub fn with_gates(&self, gates: Vec<Gate>) -> Result<Circuit> {
        let mut c = Circuit { gates: Vec::with_capacity(gates.len()), ..self.clone_meta() };
        c.extend(gates)?;
        Ok(c)
    }

    fn clone_meta(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: Vec::new(),
            in_permutation: self.in_permutation.clone(),
            out_permutation: self.out_permutation.clone(),
            measurement_order: self.measurement_order.clone(),
        }
    }

    /// Wire holding the logical qubit measured into classical bit `k`.
    pub fn measured_wire(&self, k: usize) -> usize {
        self.out_permutation[self.measurement_order[k]]
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }
}
