use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

use super::{Circuit, Gate, GateKind};

/// Kinds a decomposed circuit may contain, besides the non-unitary
/// MEASURE/BARRIER/DELAY and the fixed single-qubit X/SQRT_X pulses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisGateSet {
    pub allowed: Vec<GateKind>,
}

impl Default for BasisGateSet {
    fn default() -> Self {
        BasisGateSet { allowed: vec![GateKind::Cx, GateKind::Rz, GateKind::Rx, GateKind::Ry] }
    }
}

impl BasisGateSet {
    pub fn admits(&self, kind: GateKind) -> bool {
        self.allowed.contains(&kind)
            || matches!(
                kind,
                GateKind::Measure | GateKind::Barrier | GateKind::Delay | GateKind::X | GateKind::SqrtX
            )
    }

    pub fn is_decomposed(&self, c: &Circuit) -> bool {
        c.gates().iter().all(|g| self.admits(g.kind))
    }
}

// ZY with the Z on `z` and the Y on `y`.
fn zy_core(z: usize, y: usize, theta: f64) -> Vec<Gate> {
    vec![
        Gate::rx(y, FRAC_PI_2),
        Gate::cx(z, y),
        Gate::rz(y, 2.0 * theta),
        Gate::cx(z, y),
        Gate::rx(y, -FRAC_PI_2),
    ]
}

/// Lowers ZZ, ZY, YZ and SWAP to CX plus rotations.
pub fn decompose(gate: &Gate) -> Result<Vec<Gate>> {
    gate.validate()?;
    let q = &gate.qubits;
    let t = gate.angle();
    match gate.kind {
        GateKind::Zz => Ok(vec![Gate::cx(q[0], q[1]), Gate::rz(q[1], 2.0 * t), Gate::cx(q[0], q[1])]),
        GateKind::Zy => Ok(zy_core(q[0], q[1], t)),
        GateKind::Yz => Ok(zy_core(q[1], q[0], t)),
        GateKind::Swap => Ok(vec![Gate::cx(q[0], q[1]), Gate::cx(q[1], q[0]), Gate::cx(q[0], q[1])]),
        k => Err(Error::UnsupportedGate(k)),
    }
}

/// Fuses an interaction gate with the SWAP that immediately follows it on the
/// same pair. Two of the five CX cancel, so the pair costs 3 CX instead of 5.
pub fn fuse_two_qubit_swap(block: &[Gate]) -> Result<Vec<Gate>> {
    let [g, s] = block else {
        return Err(Error::FusionNotApplicable(format!("expected 2 gates, got {}", block.len())));
    };
    if s.kind != GateKind::Swap {
        return Err(Error::FusionNotApplicable(format!("second gate is {}, not SWAP", s.kind.name())));
    }
    g.validate()?;
    s.validate()?;
    let same_pair = (g.qubits[0] == s.qubits[0] && g.qubits[1] == s.qubits[1])
        || (g.qubits[0] == s.qubits[1] && g.qubits[1] == s.qubits[0]);
    if !same_pair {
        return Err(Error::FusionNotApplicable(format!(
            "{} on {:?} and SWAP on {:?} act on different pairs",
            g.kind.name(),
            g.qubits,
            s.qubits
        )));
    }
    let t = g.angle();
    let (a, b) = (g.qubits[0], g.qubits[1]);
    match g.kind {
        GateKind::Zz => Ok(vec![Gate::cx(a, b), Gate::rz(b, 2.0 * t), Gate::cx(b, a), Gate::cx(a, b)]),
        GateKind::Zy | GateKind::Yz => {
            let (z, y) = if g.kind == GateKind::Zy { (a, b) } else { (b, a) };
            // The trailing basis change commutes through the swap onto the other wire.
            Ok(vec![
                Gate::rx(y, FRAC_PI_2),
                Gate::cx(z, y),
                Gate::rz(y, 2.0 * t),
                Gate::cx(y, z),
                Gate::cx(z, y),
                Gate::rx(z, -FRAC_PI_2),
            ])
        }
        k => Err(Error::FusionNotApplicable(format!("{} cannot be fused with SWAP", k.name()))),
    }
}

/// Lowers every two-qubit gate to CX form. An interaction gate directly
/// followed by a SWAP on the same pair is fused.
pub fn decompose_circuit(c: &Circuit) -> Result<Circuit> {
    let gates = c.gates();
    let mut out = Vec::with_capacity(gates.len() * 3);
    let mut i = 0;
    while i < gates.len() {
        let g = &gates[i];
        match g.kind {
            GateKind::Zz | GateKind::Zy | GateKind::Yz => {
                if let Some(next) = gates.get(i + 1) {
                    if let Ok(fused) = fuse_two_qubit_swap(&gates[i..i + 2]) {
                        debug_assert_eq!(next.kind, GateKind::Swap);
                        out.extend(fused);
                        i += 2;
                        continue;
                    }
                }
                out.extend(decompose(g)?);
            }
            GateKind::Swap => out.extend(decompose(g)?),
            _ => out.push(g.clone()),
        }
        i += 1;
    }
    c.with_gates(out)
}

#[cfg(test)]
mod tests {
    use super::super::unitary::unitary;
    use super::*;
    use crate::linalg::{Matrix, C64};

    fn u_of(n: usize, gates: Vec<Gate>) -> Matrix {
        unitary(&Circuit::from_gates(n, gates).unwrap()).unwrap()
    }

    /// exp(-iθP) for a Hermitian involution P via its Taylor series.
    fn expm_pauli(p: &Matrix, theta: f64) -> Matrix {
        let dim = p.dim();
        let mut term = Matrix::identity(dim);
        let mut sum = Matrix::identity(dim);
        let x = C64::new(0.0, -theta);
        for k in 1..40 {
            let next = term.mul(p);
            term = Matrix::zeros(dim);
            for r in 0..dim {
                for c in 0..dim {
                    term.set(r, c, next.get(r, c) * x / k as f64);
                }
            }
            for r in 0..dim {
                for c in 0..dim {
                    sum.set(r, c, sum.get(r, c) + term.get(r, c));
                }
            }
        }
        sum
    }

    fn pauli(name: char) -> Matrix {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match name {
            'Z' => Matrix::from_rows(vec![vec![o, z], vec![z, -o]]),
            'Y' => Matrix::from_rows(vec![vec![z, -i], vec![i, z]]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zy_matches_matrix_exponential() {
        // qubit 0 is the low factor of the Kronecker product: Z on 0, Y on 1 is Y ⊗ Z
        let p = crate::linalg::kron(&pauli('Y'), &pauli('Z'));
        let want = expm_pauli(&p, 0.7);
        let native = u_of(2, vec![Gate::zy(0, 1, 0.7)]);
        assert!(native.max_abs_diff(&want) < 1e-12);
        let lowered = u_of(2, decompose(&Gate::zy(0, 1, 0.7)).unwrap());
        assert!(lowered.phase_normalized().max_abs_diff(&want.phase_normalized()) < 1e-12);
    }

    #[test]
    fn yz_matches_matrix_exponential() {
        let p = crate::linalg::kron(&pauli('Z'), &pauli('Y'));
        let want = expm_pauli(&p, -1.3);
        assert!(u_of(2, vec![Gate::yz(0, 1, -1.3)]).max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn zero_angle_zz_is_identity() {
        let u = u_of(2, decompose(&Gate::zz(0, 1, 0.0)).unwrap());
        assert!(u.max_abs_diff(&Matrix::identity(4)) < 1e-15);
    }

    #[test]
    fn swap_is_three_cx() {
        let d = decompose(&Gate::swap(0, 1)).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|g| g.kind == GateKind::Cx));
        assert_eq!(u_of(2, d), u_of(2, vec![Gate::swap(0, 1)]));
    }

    #[test]
    fn non_decomposable() {
        assert_eq!(decompose(&Gate::cx(0, 1)), Err(Error::UnsupportedGate(GateKind::Cx)));
    }

    #[test]
    fn zz_swap_fusion_saves_two_cx() {
        let block = [Gate::zz(0, 1, 0.3), Gate::swap(0, 1)];
        let fused = fuse_two_qubit_swap(&block).unwrap();
        assert_eq!(fused.iter().filter(|g| g.kind == GateKind::Cx).count(), 3);
        let unfused: Vec<Gate> = block.iter().flat_map(|g| decompose(g).unwrap()).collect();
        assert_eq!(unfused.iter().filter(|g| g.kind == GateKind::Cx).count(), 5);
        assert!(u_of(2, fused).max_abs_diff(&u_of(2, block.to_vec())) < 1e-12);
    }

    #[test]
    fn zero_angle_fusion_is_swap() {
        let fused = fuse_two_qubit_swap(&[Gate::zz(0, 1, 0.0), Gate::swap(1, 0)]).unwrap();
        assert!(u_of(2, fused).max_abs_diff(&u_of(2, vec![Gate::swap(0, 1)])) < 1e-12);
    }

    #[test]
    fn zy_and_yz_swap_fusion() {
        for g in [Gate::zy(0, 1, 0.9), Gate::zy(1, 0, -0.4), Gate::yz(0, 1, 2.1), Gate::yz(1, 0, 0.2)] {
            let block = [g, Gate::swap(0, 1)];
            let fused = fuse_two_qubit_swap(&block).unwrap();
            assert_eq!(fused.iter().filter(|g| g.kind == GateKind::Cx).count(), 3);
            let a = u_of(2, fused);
            let b = u_of(2, block.to_vec());
            assert!(a.phase_normalized().max_abs_diff(&b.phase_normalized()) < 1e-12);
        }
    }

    #[test]
    fn fusion_rejects_mismatched_pairs() {
        let r = fuse_two_qubit_swap(&[Gate::zz(0, 1, 0.3), Gate::swap(1, 2)]);
        assert!(matches!(r, Err(Error::FusionNotApplicable(_))));
        let r = fuse_two_qubit_swap(&[Gate::zz(0, 1, 0.3), Gate::cx(0, 1)]);
        assert!(matches!(r, Err(Error::FusionNotApplicable(_))));
    }

    #[test]
    fn circuit_decomposition_is_in_basis() {
        let c = Circuit::from_gates(
            3,
            [Gate::ry(0, 0.1), Gate::zy(0, 1, 0.5), Gate::swap(0, 1), Gate::zz(1, 2, 0.2), Gate::swap(0, 2)],
        )
        .unwrap();
        let d = decompose_circuit(&c).unwrap();
        assert!(BasisGateSet::default().is_decomposed(&d));
        assert_eq!(d.count(GateKind::Cx), 3 + 2 + 3);
        let (a, b) = (unitary(&c).unwrap(), unitary(&d).unwrap());
        assert!(a.phase_normalized().max_abs_diff(&b.phase_normalized()) < 1e-12);
    }

    #[test]
    fn decompositions_hold_for_random_angles() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        let mut worst_fused: f64 = 0.0;
        for _ in 0..1000 {
            let t: f64 = rng.random_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI);
            for g in [Gate::zz(0, 1, t), Gate::zz(1, 0, t), Gate::zy(0, 1, t), Gate::zy(1, 0, t), Gate::yz(0, 1, t), Gate::yz(1, 0, t)] {
                let d = u_of(2, decompose(&g).unwrap());
                worst = worst.max(d.max_abs_diff(&u_of(2, vec![g.clone()])));
                let block = [g, Gate::swap(0, 1)];
                let f = u_of(2, fuse_two_qubit_swap(&block).unwrap());
                worst_fused = worst_fused.max(f.max_abs_diff(&u_of(2, block.to_vec())));
            }
        }
        assert!(worst < 1e-12, "worst {worst:e}");
        assert!(worst_fused < 1e-12, "worst fused {worst_fused:e}");
    }
}
