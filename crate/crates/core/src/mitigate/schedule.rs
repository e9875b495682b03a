use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::sim::GateDurations;

const MIN_IDLE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledGate {
    pub gate: Gate,
    /// Position in the source circuit.
    pub index: usize,
    pub start: f64,
    pub duration: f64,
}

impl ScheduledGate {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// Time a qubit spends waiting between two operations. Explicit DELAY gates
/// count as waiting time.
#[derive(Debug, Clone, PartialEq)]
pub struct IdleWindow {
    pub qubit: usize,
    pub start: f64,
    pub duration: f64,
    /// Source index of the gate the window follows.
    pub after: usize,
}

/// ALAP timing of a lowered circuit. DELAY gates are folded into `idles`;
/// waiting before a qubit's first operation is not recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledCircuit {
    pub template: Circuit,
    pub gates: Vec<ScheduledGate>,
    pub idles: Vec<IdleWindow>,
    pub makespan: f64,
}

impl ScheduledCircuit {
    pub fn idle_on(&self, q: usize) -> f64 {
        self.idles.iter().filter(|w| w.qubit == q).map(|w| w.duration).sum()
    }
}

pub fn schedule_alap(c: &Circuit, durations: &GateDurations) -> Result<ScheduledCircuit> {
    let n = c.n_qubits();
    let gates = c.gates();
    // reverse pass with the circuit end at t = 0
    let mut latest = vec![0.0f64; n];
    let mut timed = Vec::with_capacity(gates.len());
    for (index, g) in gates.iter().enumerate().rev() {
        if g.kind.is_two_qubit() && g.kind != GateKind::Cx {
            return Err(Error::Precondition(format!("{} must be lowered before scheduling", g.kind.name())));
        }
        let duration = durations.of(g)?;
        let end = g.qubits.iter().map(|&q| latest[q]).fold(f64::INFINITY, f64::min);
        let start = end - duration;
        for &q in &g.qubits {
            latest[q] = start;
        }
        timed.push(ScheduledGate { gate: g.clone(), index, start, duration });
    }
    timed.reverse();
    let origin = timed.iter().map(|s| s.start).fold(0.0, f64::min);
    for s in &mut timed {
        s.start -= origin;
    }
    let makespan = -origin;

    let mut idles = Vec::new();
    for q in 0..n {
        // (end of last real operation, its index) and accumulated idle since
        let mut cursor: Option<(f64, usize)> = None;
        for s in timed.iter().filter(|s| s.gate.qubits.contains(&q)) {
            if s.gate.kind == GateKind::Delay || s.gate.kind == GateKind::Barrier {
                continue;
            }
            if let Some((t, after)) = cursor {
                if s.start - t > MIN_IDLE {
                    idles.push(IdleWindow { qubit: q, start: t, duration: s.start - t, after });
                }
            }
            cursor = Some((s.end(), s.index));
        }
        if let Some((t, after)) = cursor {
            if makespan - t > MIN_IDLE {
                idles.push(IdleWindow { qubit: q, start: t, duration: makespan - t, after });
            }
        }
    }
    let gates = timed.into_iter().filter(|s| s.gate.kind != GateKind::Delay).collect();
    Ok(ScheduledCircuit { template: c.with_gates(Vec::new())?, gates, idles, makespan })
}

fn emit(sc: &ScheduledCircuit, fill: impl Fn(&IdleWindow) -> Vec<Gate>) -> Result<Circuit> {
    // order key: start time, then source position, then position inside a filler
    let mut items: Vec<(f64, usize, usize, Gate)> =
        sc.gates.iter().map(|s| (s.start, s.index, 0, s.gate.clone())).collect();
    for w in &sc.idles {
        for (k, g) in fill(w).into_iter().enumerate() {
            items.push((w.start, w.after, k + 1, g));
        }
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = sc.template.with_gates(Vec::new())?;
    out.extend(items.into_iter().map(|(_, _, _, g)| g))?;
    Ok(out)
}

/// The scheduled circuit with every idle window written as a DELAY.
pub fn materialize_idles(sc: &ScheduledCircuit) -> Result<Circuit> {
    emit(sc, |w| vec![Gate::delay(w.qubit, w.duration)])
}

/// CPMG sequence `τ'/4 – X – τ'/2 – X – τ'/4` with `τ' = τ − 2·x_duration` in
/// each idle window of length `τ ≥ 2·x_duration`; shorter windows stay plain
/// delays.
pub fn insert_dd(sc: &ScheduledCircuit, x_duration: f64) -> Result<Circuit> {
    if !(x_duration > 0.0 && x_duration.is_finite()) {
        return Err(Error::InvalidInput(format!("X duration {x_duration} must be positive")));
    }
    emit(sc, |w| {
        if w.duration + MIN_IDLE < 2.0 * x_duration {
            return vec![Gate::delay(w.qubit, w.duration)];
        }
        let tau = (w.duration - 2.0 * x_duration).max(0.0);
        let x = Gate::x(w.qubit).with_duration(x_duration);
        let mut seq = Vec::with_capacity(5);
        for (i, part) in [tau / 4.0, tau / 2.0, tau / 4.0].into_iter().enumerate() {
            if part > MIN_IDLE {
                seq.push(Gate::delay(w.qubit, part));
            }
            if i < 2 {
                seq.push(x.clone());
            }
        }
        seq
    })
}
