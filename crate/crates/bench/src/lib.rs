//! Inputs shared by the benchmarks.

use aoqmap_core::ansatz::{build_ansatz, AnsatzSpec, GateMode, Problem};
use aoqmap_core::circuit::decompose_circuit;
use aoqmap_core::graph::Graph;
use aoqmap_core::Circuit;

/// Complete-graph MaxCut instance.
pub fn complete(n: usize) -> Problem {
    Problem::maxcut(&Graph::complete(n)).expect("complete graph")
}

/// ZY-ZZ-X ansatz on the complete graph, routed with AOQ-FS, before lowering.
pub fn dc_qaoa(n: usize, depth: usize) -> Circuit {
    let spec = AnsatzSpec::new("ZY-ZZ-X", GateMode::AoqFs, depth).expect("valid spec");
    let params: Vec<f64> = (0..spec.n_params()).map(|k| 0.1 + 0.07 * k as f64).collect();
    build_ansatz(&spec, &complete(n).hamiltonian, &params).expect("ansatz builds")
}

pub fn dc_qaoa_lowered(n: usize, depth: usize) -> Circuit {
    decompose_circuit(&dc_qaoa(n, depth)).expect("lowers")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_cx_counts() {
        assert_eq!(dc_qaoa_lowered(5, 1).count(aoqmap_core::GateKind::Cx), 52);
        assert_eq!(dc_qaoa_lowered(4, 2).count(aoqmap_core::GateKind::Cx), 60);
    }
}
