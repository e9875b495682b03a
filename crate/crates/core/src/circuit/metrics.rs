use crate::error::{Error, Result};

use super::{Circuit, GateKind};

/// Number of CX gates. The circuit must already be lowered to CX form.
pub fn cx_count(c: &Circuit) -> Result<usize> {
    if let Some(g) = c.gates().iter().find(|g| g.kind.is_two_qubit() && g.kind != GateKind::Cx) {
        return Err(Error::Precondition(format!(
            "circuit still contains {}; decompose it first",
            g.kind.name()
        )));
    }
    Ok(c.count(GateKind::Cx))
}

/// ASAP layer count. Delays are ignored, a barrier aligns the wires it spans,
/// every other gate (measurements included) occupies one layer.
pub fn depth(c: &Circuit) -> usize {
    let mut level = vec![0usize; c.n_qubits()];
    for g in c.gates() {
        match g.kind {
            GateKind::Delay => {}
            GateKind::Barrier => {
                let top = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
                g.qubits.iter().for_each(|&q| level[q] = top);
            }
            _ => {
                let l = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
                g.qubits.iter().for_each(|&q| level[q] = l);
            }
        }
    }
    level.into_iter().max().unwrap_or(0)
}
