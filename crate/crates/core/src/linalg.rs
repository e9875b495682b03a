//! Small dense complex linear algebra used by the circuit and simulator code.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// 2x2 matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];
/// 4x4 matrix, row-major. Local basis index is `bit(q0) + 2 * bit(q1)`.
pub type Mat4 = [[C64; 4]; 4];

/// Applies a one-qubit matrix to wire `q` of an amplitude vector.
pub fn apply_1q(amps: &mut [C64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += stride << 1;
    }
}

/// Applies a two-qubit matrix to wires `(q0, q1)`; `q0` is the low bit of the
/// local index.
pub fn apply_2q(amps: &mut [C64], q0: usize, q1: usize, m: &Mat4) {
    let b0 = 1usize << q0;
    let b1 = 1usize << q1;
    let mask = b0 | b1;
    for i in 0..amps.len() {
        if i & mask != 0 {
            continue;
        }
        let idx = [i, i | b0, i | b1, i | b0 | b1];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &target) in idx.iter().enumerate() {
            amps[target] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
        }
    }
}

/// Multiplies amplitudes by a diagonal two-qubit phase pattern.
pub fn apply_2q_diag(amps: &mut [C64], q0: usize, q1: usize, diag: &[C64; 4]) {
    for (i, a) in amps.iter_mut().enumerate() {
        let k = ((i >> q0) & 1) | (((i >> q1) & 1) << 1);
        *a *= diag[k];
    }
}

pub fn apply_cx(amps: &mut [C64], control: usize, target: usize) {
    let c = 1usize << control;
    let t = 1usize << target;
    for i in 0..amps.len() {
        if i & c != 0 && i & t == 0 {
            amps.swap(i, i | t);
        }
    }
}

pub fn apply_swap(amps: &mut [C64], a: usize, b: usize) {
    let ba = 1usize << a;
    let bb = 1usize << b;
    for i in 0..amps.len() {
        if i & ba != 0 && i & bb == 0 {
            amps.swap(i, (i & !ba) | bb);
        }
    }
}

pub fn mat2_dagger(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn mat2_conj(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

pub fn mat4_conj(m: &Mat4) -> Mat4 {
    let mut out = *m;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = v.conj();
        }
    }
    out
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Matrix {
        Matrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Matrix {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix must be square");
            data.extend(r);
        }
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self.get(r, c)).collect()
    }

    pub fn set_column(&mut self, c: usize, col: &[C64]) {
        for (r, v) in col.iter().enumerate() {
            self.set(r, c, *v);
        }
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|k| self.data[i * n + k] * v[k]).sum())
            .collect()
    }

    pub fn dagger(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Copy rescaled by the unit phase that makes its largest-magnitude entry
    /// real and positive.
    pub fn phase_normalized(&self) -> Matrix {
        let (mut best, mut idx) = (0.0, 0);
        for (i, v) in self.data.iter().enumerate() {
            // Small slack so near-ties resolve to the first entry consistently.
            if v.norm() > best + 1e-9 {
                best = v.norm();
                idx = i;
            }
        }
        if best == 0.0 {
            return self.clone();
        }
        let phase = self.data[idx].conj() / best;
        Matrix { dim: self.dim, data: self.data.iter().map(|v| v * phase).collect() }
    }
}

/// Tensor product `a ⊗ b` where `b` occupies the low-order bits.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = Matrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let av = a.get(i, j);
            for k in 0..nb {
                for l in 0..nb {
                    out.set(i * nb + k, j * nb + l, av * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Solves the dense real system `a·x = b` by partial pivoting; `None` when a
/// pivot falls below `tol`.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < tol {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
