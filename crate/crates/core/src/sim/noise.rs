use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateKind};
use crate::error::{Error, Result};

/// Gate durations in ns by kind. A gate's own `duration` field takes
/// precedence, and a DELAY lasts for its parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDurations(pub BTreeMap<GateKind, f64>);

impl Default for GateDurations {
    /// Typical superconducting values: 35.56 ns SX/X pulses, RX/RY as two
    /// pulses, virtual RZ, 400 ns CX, 4 µs readout.
    fn default() -> Self {
        GateDurations(
            [
                (GateKind::X, 35.56),
                (GateKind::SqrtX, 35.56),
                (GateKind::Rx, 71.12),
                (GateKind::Ry, 71.12),
                (GateKind::Rz, 0.0),
                (GateKind::Cx, 400.0),
                (GateKind::Measure, 4000.0),
                (GateKind::Barrier, 0.0),
            ]
            .into_iter()
            .collect(),
        )
    }
}

impl GateDurations {
    pub fn get(&self, kind: GateKind) -> Option<f64> {
        self.0.get(&kind).copied()
    }

    pub fn set(&mut self, kind: GateKind, ns: f64) {
        self.0.insert(kind, ns);
    }

    pub fn of(&self, g: &Gate) -> Result<f64> {
        if let Some(d) = g.duration {
            return Ok(d);
        }
        if g.kind == GateKind::Delay {
            return Ok(g.angle());
        }
        self.get(g.kind).ok_or(Error::MissingDuration(g.kind))
    }
}

/// Per-wire relaxation times (µs) and the durations that drive them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalModel {
    pub t1_us: Vec<f64>,
    pub t2_us: Vec<f64>,
    pub durations: GateDurations,
}

impl ThermalModel {
    pub fn new(t1_us: Vec<f64>, t2_us: Vec<f64>, durations: GateDurations) -> Result<ThermalModel> {
        let m = ThermalModel { t1_us, t2_us, durations };
        m.validate()?;
        Ok(m)
    }

    /// Same T1/T2 on every wire.
    pub fn uniform(n: usize, t1_us: f64, t2_us: f64, durations: GateDurations) -> Result<ThermalModel> {
        ThermalModel::new(vec![t1_us; n], vec![t2_us; n], durations)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t1_us.len() != self.t2_us.len() {
            return Err(Error::InvalidNoise("T1 and T2 lists differ in length".into()));
        }
        for (q, (&t1, &t2)) in self.t1_us.iter().zip(&self.t2_us).enumerate() {
            if !(t1 > 0.0 && t2 > 0.0 && t1.is_finite() && t2.is_finite()) {
                return Err(Error::InvalidNoise(format!("qubit {q}: T1 and T2 must be positive")));
            }
            if t2 > 2.0 * t1 {
                return Err(Error::InvalidNoise(format!("qubit {q}: T2 = {t2} exceeds 2·T1 = {}", 2.0 * t1)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub depolarizing_1q: f64,
    pub depolarizing_2q: f64,
    #[serde(default)]
    pub thermal: Option<ThermalModel>,
}

impl NoiseModel {
    pub fn noiseless() -> NoiseModel {
        NoiseModel { depolarizing_1q: 0.0, depolarizing_2q: 0.0, thermal: None }
    }

    pub fn depolarizing(eps_1q: f64, eps_2q: f64) -> Result<NoiseModel> {
        let m = NoiseModel { depolarizing_1q: eps_1q, depolarizing_2q: eps_2q, thermal: None };
        m.validate()?;
        Ok(m)
    }

    /// Single-scalar form: two-qubit gates get ten times the one-qubit rate.
    pub fn from_scalar(eps_1q: f64) -> Result<NoiseModel> {
        NoiseModel::depolarizing(eps_1q, (10.0 * eps_1q).min(1.0))
    }

    pub fn thermal_only(thermal: ThermalModel) -> Result<NoiseModel> {
        NoiseModel::noiseless().with_thermal(thermal)
    }

    pub fn with_thermal(mut self, thermal: ThermalModel) -> Result<NoiseModel> {
        self.thermal = Some(thermal);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("one-qubit", self.depolarizing_1q), ("two-qubit", self.depolarizing_2q)] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidNoise(format!("{name} depolarizing rate {e} outside [0, 1]")));
            }
        }
        if let Some(t) = &self.thermal {
            t.validate()?;
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_1q == 0.0 && self.depolarizing_2q == 0.0 && self.thermal.is_none()
    }

    /// Depolarizing rate attached to `g`, applied to each operand. RZ is a
    /// frame change and stays noiseless.
    pub fn gate_error(&self, g: &Gate) -> f64 {
        match g.kind {
            GateKind::Rz | GateKind::Barrier | GateKind::Delay | GateKind::Measure => 0.0,
            k if k.is_two_qubit() => self.depolarizing_2q,
            _ => self.depolarizing_1q,
        }
    }

    /// `(T1, T2, t)` in consistent units (ns) for relaxation after `g` on
    /// operand `q`, or `None` when no thermal noise applies.
    pub fn relaxation(&self, g: &Gate, q: usize) -> Result<Option<(f64, f64, f64)>> {
        let Some(t) = &self.thermal else { return Ok(None) };
        if matches!(g.kind, GateKind::Barrier | GateKind::Measure) {
            return Ok(None);
        }
        let dt = t.durations.of(g)?;
        if dt == 0.0 {
            return Ok(None);
        }
        let (t1, t2) = match (t.t1_us.get(q), t.t2_us.get(q)) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::InvalidNoise(format!("no T1/T2 for wire {q}"))),
        };
        Ok(Some((t1 * 1e3, t2 * 1e3, dt)))
    }
}
