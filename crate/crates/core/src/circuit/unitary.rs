use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Mat4, Matrix, C64, I, ONE, ZERO};

use super::{Circuit, Gate, GateKind};

pub const MAX_UNITARY_QUBITS: usize = 10;

/// Matrix of a unitary gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
}

fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

fn rz(theta: f64) -> Mat2 {
    [[C64::from_polar(1.0, -theta / 2.0), ZERO], [ZERO, C64::from_polar(1.0, theta / 2.0)]]
}

/// `exp(-i θ P)` for a two-qubit Pauli product `P` given as a signed
/// permutation: `P|k> = phase(k) |target(k)>`.
fn pauli_rotation(theta: f64, pauli: impl Fn(usize) -> (usize, C64)) -> Mat4 {
    let (s, c) = theta.sin_cos();
    let mut m = [[ZERO; 4]; 4];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = C64::new(c, 0.0);
    }
    for k in 0..4 {
        let (t, ph) = pauli(k);
        m[t][k] += -I * s * ph;
    }
    m
}

fn y_action(bit: usize) -> (usize, C64) {
    // Y|0> = i|1>, Y|1> = -i|0>
    if bit == 0 {
        (1, I)
    } else {
        (0, -I)
    }
}

fn z_sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn zz_diag(theta: f64) -> [C64; 4] {
    let m = C64::from_polar(1.0, -theta);
    let p = C64::from_polar(1.0, theta);
    [m, p, p, m]
}

/// Matrix for a unitary gate; `None` for barriers, delays and measurements.
pub fn gate_matrix(gate: &Gate) -> Option<GateMatrix> {
    let t = gate.angle();
    let m = match gate.kind {
        GateKind::Rx => GateMatrix::One(rx(t)),
        GateKind::Ry => GateMatrix::One(ry(t)),
        GateKind::Rz => GateMatrix::One(rz(t)),
        GateKind::X => GateMatrix::One([[ZERO, ONE], [ONE, ZERO]]),
        GateKind::SqrtX => {
            let a = C64::new(0.5, 0.5);
            let b = C64::new(0.5, -0.5);
            GateMatrix::One([[a, b], [b, a]])
        }
        GateKind::Cx => {
            // control = q0 (low bit), target = q1
            let mut m = [[ZERO; 4]; 4];
            m[0][0] = ONE;
            m[2][2] = ONE;
            m[3][1] = ONE;
            m[1][3] = ONE;
            GateMatrix::Two(m)
        }
        GateKind::Swap => {
            let mut m = [[ZERO; 4]; 4];
            m[0][0] = ONE;
            m[1][2] = ONE;
            m[2][1] = ONE;
            m[3][3] = ONE;
            GateMatrix::Two(m)
        }
        GateKind::Zz => {
            let d = zz_diag(t);
            let mut m = [[ZERO; 4]; 4];
            for k in 0..4 {
                m[k][k] = d[k];
            }
            GateMatrix::Two(m)
        }
        GateKind::Zy => GateMatrix::Two(pauli_rotation(t, |k| {
            let (a, b) = (k & 1, k >> 1);
            let (nb, ph) = y_action(b);
            (a | (nb << 1), ph * z_sign(a))
        })),
        GateKind::Yz => GateMatrix::Two(pauli_rotation(t, |k| {
            let (a, b) = (k & 1, k >> 1);
            let (na, ph) = y_action(a);
            (na | (b << 1), ph * z_sign(b))
        })),
        GateKind::Barrier | GateKind::Delay | GateKind::Measure => return None,
    };
    Some(m)
}

/// Applies a unitary gate to an amplitude vector. Non-unitary kinds are no-ops.
pub(crate) fn apply_gate(amps: &mut [C64], gate: &Gate) {
    match gate.kind {
        GateKind::Cx => linalg::apply_cx(amps, gate.qubits[0], gate.qubits[1]),
        GateKind::Swap => linalg::apply_swap(amps, gate.qubits[0], gate.qubits[1]),
        GateKind::Zz => linalg::apply_2q_diag(amps, gate.qubits[0], gate.qubits[1], &zz_diag(gate.angle())),
        _ => match gate_matrix(gate) {
            Some(GateMatrix::One(m)) => linalg::apply_1q(amps, gate.qubits[0], &m),
            Some(GateMatrix::Two(m)) => linalg::apply_2q(amps, gate.qubits[0], gate.qubits[1], &m),
            None => {}
        },
    }
}

/// Permutation matrix taking a logical basis state to the wire basis state in
/// which logical qubit `l` sits on wire `perm[l]`.
pub fn permutation_matrix(perm: &[usize]) -> Matrix {
    let n = perm.len();
    let dim = 1usize << n;
    let mut m = Matrix::zeros(dim);
    for x in 0..dim {
        let mut y = 0;
        for (l, &w) in perm.iter().enumerate() {
            y |= ((x >> l) & 1) << w;
        }
        m.set(y, x, ONE);
    }
    m
}

/// Full unitary of `c` in the logical frame: wire layouts on entry and exit
/// are undone so routed and unrouted circuits compare directly.
pub fn unitary(c: &Circuit) -> Result<Matrix> {
    let n = c.n_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "unitary of {n} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit limit"
        )));
    }
    if c.gates().iter().any(|g| g.kind == GateKind::Measure) {
        return Err(Error::Precondition("circuit contains measurements".into()));
    }
    let dim = 1usize << n;
    let mut u = Matrix::zeros(dim);
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        col.iter_mut().for_each(|v| *v = ZERO);
        col[j] = ONE;
        for g in c.gates() {
            apply_gate(&mut col, g);
        }
        u.set_column(j, &col);
    }
    let identity = (0..n).collect::<Vec<_>>();
    if c.in_permutation() == identity.as_slice() && c.out_permutation() == identity.as_slice() {
        return Ok(u);
    }
    let p_in = permutation_matrix(c.in_permutation());
    let p_out = permutation_matrix(c.out_permutation());
    Ok(p_out.dagger().mul(&u).mul(&p_in))
}

/// Compares two matrices up to a global phase, normalizing each so its
/// largest-magnitude entry is real and positive.
pub fn equal_up_to_phase(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    a.dim() == b.dim() && a.phase_normalized().max_abs_diff(&b.phase_normalized()) < tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_circuit() {
        let c = Circuit::new(2);
        assert_eq!(unitary(&c).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn x_on_qubit_zero_flips_lsb() {
        let c = Circuit::from_gates(2, [Gate::x(0)]).unwrap();
        let u = unitary(&c).unwrap();
        for x in 0..4 {
            assert_eq!(u.get(x ^ 1, x), ONE);
        }
    }

    #[test]
    fn rejects_measurements_and_size() {
        let c = Circuit::from_gates(1, [Gate::measure(0)]).unwrap();
        assert!(matches!(unitary(&c), Err(Error::Precondition(_))));
        assert!(matches!(unitary(&Circuit::new(11)), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn composition_order() {
        // U(c1 then c2) = U(c2) U(c1)
        let c1 = Circuit::from_gates(2, [Gate::rx(0, 0.4), Gate::cx(0, 1)]).unwrap();
        let c2 = Circuit::from_gates(2, [Gate::ry(1, 1.1), Gate::zy(1, 0, 0.3)]).unwrap();
        let mut both = c1.clone();
        both.append(&c2).unwrap();
        let lhs = unitary(&both).unwrap();
        let rhs = unitary(&c2).unwrap().mul(&unitary(&c1).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn phase_comparison_ignores_global_phase() {
        let a = Matrix::identity(2);
        let mut b = Matrix::identity(2);
        let ph = C64::from_polar(1.0, 0.7);
        b.set(0, 0, ph);
        b.set(1, 1, ph);
        assert!(equal_up_to_phase(&a, &b, 1e-12));
    }
}
