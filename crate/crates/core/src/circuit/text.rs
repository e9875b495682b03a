//! Line-oriented circuit text format.
//!
//! ```text
//! qubits 3
//! init 0 1 2
//! RY 0 1.5707963267948966
//! CX 0,1
//! DELAY 2 400 dur=400
//! meas 0 1 2
//! perm 2 1 0
//! ```
//!
//! `init` and `meas` are written only when they differ from the identity.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{Circuit, Gate, GateKind};

fn join(v: &[usize], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn to_text(c: &Circuit) -> String {
    let n = c.n_qubits();
    let id: Vec<usize> = (0..n).collect();
    let mut s = format!("qubits {n}\n");
    if c.in_permutation() != id.as_slice() {
        let _ = writeln!(s, "init {}", join(c.in_permutation(), " "));
    }
    for g in c.gates() {
        s.push_str(g.kind.name());
        s.push(' ');
        s.push_str(&join(&g.qubits, ","));
        if let Some(p) = g.param {
            let _ = write!(s, " {p}");
        }
        if let Some(d) = g.duration {
            let _ = write!(s, " dur={d}");
        }
        s.push('\n');
    }
    if c.measurement_order() != id.as_slice() {
        let _ = writeln!(s, "meas {}", join(c.measurement_order(), " "));
    }
    let _ = writeln!(s, "perm {}", join(c.out_permutation(), " "));
    s
}

fn parse_list(line: usize, words: &[&str]) -> Result<Vec<usize>> {
    words
        .iter()
        .map(|w| w.parse().map_err(|_| Error::Parse { line, msg: format!("bad index {w:?}") }))
        .collect()
}

fn parse_f64(line: usize, w: &str) -> Result<f64> {
    w.parse().map_err(|_| Error::Parse { line, msg: format!("bad number {w:?}") })
}

pub fn from_text(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut perm: Option<Vec<usize>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = trimmed.split_whitespace().collect();
        let err = |msg: String| Error::Parse { line, msg };
        if perm.is_some() {
            return Err(err("content after perm footer".into()));
        }
        let Some(c) = circuit.as_mut() else {
            match words.as_slice() {
                ["qubits", n] => {
                    let n: usize = n.parse().map_err(|_| err(format!("bad qubit count {n:?}")))?;
                    if n == 0 {
                        return Err(err("qubit count must be positive".into()));
                    }
                    circuit = Some(Circuit::new(n));
                    continue;
                }
                _ => return Err(err("expected `qubits N` header".into())),
            }
        };
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::Parse { line, msg: other.to_string() },
        };
        match words[0] {
            "init" => c.set_in_permutation(parse_list(line, &words[1..])?).map_err(wrap)?,
            "meas" => c.set_measurement_order(parse_list(line, &words[1..])?).map_err(wrap)?,
            "perm" => perm = Some(parse_list(line, &words[1..])?),
            name => {
                let kind = GateKind::from_name(name).ok_or_else(|| err(format!("unknown gate {name:?}")))?;
                if words.len() < 2 {
                    return Err(err(format!("{name} without operands")));
                }
                let qubits = parse_list(line, &words[1].split(',').collect::<Vec<_>>())?;
                let mut param = None;
                let mut duration = None;
                for w in &words[2..] {
                    if let Some(d) = w.strip_prefix("dur=") {
                        duration = Some(parse_f64(line, d)?);
                    } else if param.is_none() {
                        param = Some(parse_f64(line, w)?);
                    } else {
                        return Err(err(format!("unexpected token {w:?}")));
                    }
                }
                c.push(Gate { kind, qubits, param, duration }).map_err(wrap)?;
            }
        }
    }
    let mut c = circuit.ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
    let perm = perm.ok_or(Error::Parse { line: 0, msg: "missing perm footer".into() })?;
    c.set_out_permutation(perm).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_round_trip() {
        let mut c = Circuit::from_gates(
            3,
            [
                Gate::ry(0, std::f64::consts::FRAC_PI_2),
                Gate::cx(0, 1),
                Gate::delay(2, 400.0).with_duration(400.0),
                Gate::barrier(vec![0, 1, 2]),
                Gate::measure(1),
            ],
        )
        .unwrap();
        c.set_out_permutation(vec![2, 1, 0]).unwrap();
        c.set_measurement_order(vec![1, 0, 2]).unwrap();
        c.set_in_permutation(vec![0, 2, 1]).unwrap();
        let t = to_text(&c);
        assert!(t.starts_with("qubits 3\n"));
        assert!(t.ends_with("perm 2 1 0\n"));
        assert_eq!(from_text(&t).unwrap(), c);
    }

    #[test]
    fn identity_layouts_are_omitted() {
        let c = Circuit::from_gates(2, [Gate::zz(0, 1, -0.25)]).unwrap();
        assert_eq!(to_text(&c), "qubits 2\nZZ 0,1 -0.25\nperm 0 1\n");
    }

    #[test]
    fn parse_errors_carry_line() {
        let e = from_text("qubits 2\nCX 0,5\nperm 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(matches!(from_text("CX 0,1"), Err(Error::Parse { line: 1, .. })));
        assert!(from_text("qubits 2\nCX 0,1\n").is_err());
        assert!(from_text("qubits 2\nFOO 0\nperm 0 1").is_err());
        assert!(from_text("qubits 2\nperm 0 0").is_err());
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        let kinds = prop::sample::select(GateKind::ALL.to_vec());
        (kinds, prop::sample::subsequence((0..n).collect::<Vec<_>>(), 2), any::<f64>(), 0.0..1e4f64, any::<bool>())
            .prop_map(|(kind, qs, angle, dur, with_dur)| {
                let arity = kind.arity().unwrap_or(2);
                let qubits = qs[..arity].to_vec();
                let param = if kind == GateKind::Delay {
                    Some(dur)
                } else if kind.is_parameterized() {
                    Some(if angle.is_finite() { angle } else { 0.5 })
                } else {
                    None
                };
                Gate { kind, qubits, param, duration: with_dur.then_some(dur) }
            })
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(gates in prop::collection::vec(arb_gate(4), 0..30), perm in Just((0..4).collect::<Vec<usize>>()).prop_shuffle()) {
            let mut c = Circuit::from_gates(4, gates).unwrap();
            c.set_out_permutation(perm).unwrap();
            prop_assert_eq!(from_text(&to_text(&c)).unwrap(), c);
        }
    }
}
