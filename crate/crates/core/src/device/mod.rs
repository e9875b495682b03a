//! Device calibration model, linear-chain enumeration and noise-aware chain
//! selection.
//!
//! A chain maps circuit wire `k` to physical qubit `chain[k]`. Its score is
//! an estimated success probability: the product of `1 - error` over every
//! CX, one-qubit gate and measurement, times `exp(-t/T1)·exp(-t/T2)` for
//! the idle time `t` of each wire in the ALAP schedule. This is a stand-in
//! cost function, not a calibrated fidelity model.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{decompose_circuit, Circuit, GateKind};
use crate::error::{Error, Result};
use crate::mitigate::{schedule_alap, ConfusionModel};
use crate::sim::{GateDurations, NoiseModel, ThermalModel};

#[cfg(test)]
mod tests;

const PERTH: &str = include_str!("../../fixtures/perth.json");
const EHNINGEN: &str = include_str!("../../fixtures/ehningen.json");
const CAIRO: &str = include_str!("../../fixtures/cairo.json");

/// Names accepted by [`DeviceModel::bundled`].
pub const BUNDLED: [&str; 3] = ["perth", "ehningen", "cairo"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitCalibration {
    pub t1_us: f64,
    pub t2_us: f64,
    pub frequency_ghz: f64,
    pub anharmonicity_ghz: f64,
    pub prob_meas0_prep1: f64,
    pub prob_meas1_prep0: f64,
    pub readout_length_ns: f64,
    pub readout_error: f64,
    pub single_qubit_gate_error: f64,
    /// Set when the value was filled in rather than measured.
    #[serde(default, skip_serializing_if = "is_false")]
    pub estimated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeCalibration {
    pub qubits: [usize; 2],
    pub cx_error: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub estimated: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceModel {
    pub name: String,
    pub n_qubits: usize,
    #[serde(default)]
    pub basis_gates: Vec<String>,
    /// Keyed by gate name (`CX`, `X`, `SQRT_X`, ...). Kinds left out fall
    /// back to [`GateDurations::default`].
    #[serde(default)]
    pub gate_durations_ns: BTreeMap<String, f64>,
    pub qubits: Vec<QubitCalibration>,
    pub edges: Vec<EdgeCalibration>,
}

fn invalid(field: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), msg: msg.into() }
}

fn check_probability(field: String, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(field, format!("{p} is not a probability")))
    }
}

fn check_positive(field: String, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be positive")))
    }
}

impl DeviceModel {
    pub fn from_json(text: &str) -> Result<DeviceModel> {
        let d: DeviceModel =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("device model serializes");
        s.push('\n');
        s
    }

    pub fn bundled(name: &str) -> Result<DeviceModel> {
        let text = match name {
            "perth" => PERTH,
            "ehningen" => EHNINGEN,
            "cairo" => CAIRO,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown bundled device '{name}' (expected one of {})",
                    BUNDLED.join(", ")
                )))
            }
        };
        DeviceModel::from_json(text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.len() != self.n_qubits {
            return Err(invalid(
                "qubits",
                format!("{} records for n_qubits = {}", self.qubits.len(), self.n_qubits),
            ));
        }
        for (q, c) in self.qubits.iter().enumerate() {
            let f = |name: &str| format!("qubits[{q}].{name}");
            check_positive(f("t1_us"), c.t1_us)?;
            check_positive(f("t2_us"), c.t2_us)?;
            check_positive(f("readout_length_ns"), c.readout_length_ns)?;
            check_probability(f("prob_meas0_prep1"), c.prob_meas0_prep1)?;
            check_probability(f("prob_meas1_prep0"), c.prob_meas1_prep0)?;
            check_probability(f("readout_error"), c.readout_error)?;
            check_probability(f("single_qubit_gate_error"), c.single_qubit_gate_error)?;
            if !c.frequency_ghz.is_finite() || !c.anharmonicity_ghz.is_finite() {
                return Err(invalid(f("frequency_ghz"), "non-finite frequency data"));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            let [a, b] = e.qubits;
            if a >= self.n_qubits || b >= self.n_qubits {
                return Err(invalid(format!("edges[{i}].qubits"), format!("({a}, {b}) outside 0..{}", self.n_qubits)));
            }
            if a == b {
                return Err(invalid(format!("edges[{i}].qubits"), format!("self-loop on {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(invalid(format!("edges[{i}].qubits"), format!("duplicate edge ({a}, {b})")));
            }
            check_probability(format!("edges[{i}].cx_error"), e.cx_error)?;
        }
        for (name, &ns) in &self.gate_durations_ns {
            if GateKind::from_name(name).is_none() {
                return Err(invalid(format!("gate_durations_ns.{name}"), "unknown gate"));
            }
            if !(ns >= 0.0 && ns.is_finite()) {
                return Err(invalid(format!("gate_durations_ns.{name}"), format!("{ns} must be non-negative")));
            }
        }
        Ok(())
    }

    pub fn durations(&self) -> GateDurations {
        let mut d = GateDurations::default();
        for (name, &ns) in &self.gate_durations_ns {
            if let Some(k) = GateKind::from_name(name) {
                d.set(k, ns);
            }
        }
        d
    }

    pub fn cx_error(&self, a: usize, b: usize) -> Option<f64> {
        self.edges
            .iter()
            .find(|e| e.qubits == [a, b] || e.qubits == [b, a])
            .map(|e| e.cx_error)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_qubits];
        for e in &self.edges {
            let [a, b] = e.qubits;
            adj[a].push(b);
            adj[b].push(a);
        }
        for v in &mut adj {
            v.sort_unstable();
        }
        adj
    }

    fn check_chain(&self, chain: &[usize]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &q in chain {
            if q >= self.n_qubits {
                return Err(Error::ChainMismatch(format!("qubit {q} not on a {}-qubit device", self.n_qubits)));
            }
            if !seen.insert(q) {
                return Err(Error::ChainMismatch(format!("qubit {q} appears twice")));
            }
        }
        Ok(())
    }

    /// Relaxation model for the wires of `chain`. Reported T2 values above
    /// the physical bound 2·T1 are clamped to it.
    pub fn thermal_model(&self, chain: &[usize]) -> Result<ThermalModel> {
        self.check_chain(chain)?;
        let t1: Vec<f64> = chain.iter().map(|&q| self.qubits[q].t1_us).collect();
        let t2 = chain.iter().zip(&t1).map(|(&q, &t1)| self.qubits[q].t2_us.min(2.0 * t1)).collect();
        ThermalModel::new(t1, t2, self.durations())
    }

    /// Depolarizing rates averaged over the chain's qubits and its
    /// consecutive edges, plus thermal relaxation. The simulator takes one
    /// rate per gate arity, so per-qubit detail is lost.
    pub fn noise_model(&self, chain: &[usize]) -> Result<NoiseModel> {
        self.check_chain(chain)?;
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        let e1: Vec<f64> = chain.iter().map(|&q| self.qubits[q].single_qubit_gate_error).collect();
        let e2 = chain
            .windows(2)
            .map(|w| self.cx_error(w[0], w[1]).ok_or_else(|| not_coupled(w[0], w[1])))
            .collect::<Result<Vec<f64>>>()?;
        NoiseModel::depolarizing(mean(&e1), mean(&e2))?.with_thermal(self.thermal_model(chain)?)
    }

    /// Readout flips for each logical qubit of `c` placed on `chain`, read
    /// from the wire it ends on.
    pub fn confusion_model(&self, chain: &[usize], c: &Circuit) -> Result<ConfusionModel> {
        self.check_chain(chain)?;
        if chain.len() != c.n_qubits() {
            return Err(width_mismatch(chain, c));
        }
        let flips = c
            .out_permutation()
            .iter()
            .map(|&w| {
                let q = &self.qubits[chain[w]];
                (q.prob_meas1_prep0, q.prob_meas0_prep1)
            })
            .collect();
        ConfusionModel::new(flips)
    }
}

pub fn load_device(path: impl AsRef<Path>) -> Result<DeviceModel> {
    DeviceModel::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_device(device: &DeviceModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, device.to_json())?;
    Ok(())
}

fn not_coupled(a: usize, b: usize) -> Error {
    Error::ChainMismatch(format!("physical qubits {a} and {b} are not coupled"))
}

fn width_mismatch(chain: &[usize], c: &Circuit) -> Error {
    Error::ChainMismatch(format!("chain has {} qubits, circuit has {}", chain.len(), c.n_qubits()))
}

/// Simple paths on `n` qubits, one per path up to reversal. Each path is
/// listed from its smaller endpoint and the list is sorted.
pub fn find_linear_chains(device: &DeviceModel, n: usize) -> Vec<Vec<usize>> {
    if n == 0 || n > device.n_qubits {
        return Vec::new();
    }
    let adj = device.neighbors();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(n);
    let mut used = vec![false; device.n_qubits];
    fn extend(adj: &[Vec<usize>], n: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if path.len() == n {
            if path[0] <= path[n - 1] {
                out.push(path.clone());
            }
            return;
        }
        let last = *path.last().unwrap();
        for &next in &adj[last] {
            if !used[next] {
                used[next] = true;
                path.push(next);
                extend(adj, n, path, used, out);
                path.pop();
                used[next] = false;
            }
        }
    }
    for start in 0..device.n_qubits {
        used[start] = true;
        path.push(start);
        extend(&adj, n, &mut path, &mut used, &mut out);
        path.pop();
        used[start] = false;
    }
    out.sort();
    out
}

/// Chain-independent summary of a lowered circuit: operation counts per
/// wire and pair, measured wires, and ALAP idle time per wire.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProfile {
    pub n: usize,
    pub one_qubit: Vec<usize>,
    pub cx: BTreeMap<(usize, usize), usize>,
    pub measured: Vec<bool>,
    pub idle_ns: Vec<f64>,
}

impl CircuitProfile {
    /// Lowers `c` if it still holds interaction gates. Without explicit
    /// measurements every wire counts as measured once at the end.
    pub fn new(c: &Circuit, durations: &GateDurations) -> Result<CircuitProfile> {
        let lowered;
        let c = if c.gates().iter().any(|g| g.kind.is_two_qubit() && g.kind != GateKind::Cx) {
            lowered = decompose_circuit(c)?;
            &lowered
        } else {
            c
        };
        let n = c.n_qubits();
        let mut one_qubit = vec![0; n];
        let mut cx = BTreeMap::new();
        let mut measured = vec![false; n];
        for g in c.gates() {
            match g.kind {
                GateKind::Cx => *cx.entry((g.qubits[0], g.qubits[1])).or_insert(0) += 1,
                GateKind::Measure => measured[g.qubits[0]] = true,
                // virtual frame change
                GateKind::Rz | GateKind::Barrier | GateKind::Delay => {}
                _ => one_qubit[g.qubits[0]] += 1,
            }
        }
        if c.count(GateKind::Measure) == 0 {
            measured = vec![true; n];
        }
        let sc = schedule_alap(c, durations)?;
        let idle_ns = (0..n).map(|q| sc.idle_on(q)).collect();
        Ok(CircuitProfile { n, one_qubit, cx, measured, idle_ns })
    }

    pub fn score(&self, chain: &[usize], device: &DeviceModel) -> Result<f64> {
        if chain.len() != self.n {
            return Err(Error::ChainMismatch(format!("chain has {} qubits, circuit has {}", chain.len(), self.n)));
        }
        device.check_chain(chain)?;
        let mut s = 1.0;
        for (&(a, b), &count) in &self.cx {
            let e = device.cx_error(chain[a], chain[b]).ok_or_else(|| not_coupled(chain[a], chain[b]))?;
            s *= (1.0 - e).powi(count as i32);
        }
        for (w, &q) in chain.iter().enumerate() {
            let cal = &device.qubits[q];
            s *= (1.0 - cal.single_qubit_gate_error).powi(self.one_qubit[w] as i32);
            if self.measured[w] {
                s *= 1.0 - cal.readout_error;
            }
            let t = self.idle_ns[w];
            s *= (-t / (cal.t1_us * 1e3)).exp() * (-t / (cal.t2_us * 1e3)).exp();
        }
        Ok(s)
    }
}

pub fn score_chain(chain: &[usize], c: &Circuit, device: &DeviceModel) -> Result<f64> {
    if chain.len() != c.n_qubits() {
        return Err(width_mismatch(chain, c));
    }
    CircuitProfile::new(c, &device.durations())?.score(chain, device)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Oriented so that circuit wire `k` runs on `chain[k]`.
    pub chain: Vec<usize>,
    pub score: f64,
    pub candidates: usize,
}

/// Best-scoring placement over every linear chain and both orientations.
/// Ties go to the first candidate in [`find_linear_chains`] order, forward
/// orientation before reversed.
pub fn select(device: &DeviceModel, c: &Circuit) -> Result<Selection> {
    let n = c.n_qubits();
    let chains = find_linear_chains(device, n);
    if chains.is_empty() {
        return Err(Error::NoChain(n));
    }
    let profile = CircuitProfile::new(c, &device.durations())?;
    let oriented: Vec<Vec<usize>> = chains
        .iter()
        .flat_map(|ch| {
            let rev: Vec<usize> = ch.iter().rev().copied().collect();
            if rev == *ch {
                vec![ch.clone()]
            } else {
                vec![ch.clone(), rev]
            }
        })
        .collect();
    let scores = oriented.par_iter().map(|ch| profile.score(ch, device)).collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(Selection { chain: oriented[best].clone(), score: scores[best], candidates: chains.len() })
}
