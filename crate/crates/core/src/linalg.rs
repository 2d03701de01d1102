//! Small dense square matrices over any [`Scalar`]. Qubit 0 is the most
//! significant bit of a basis index.

use crate::weights::Scalar;

#[derive(Clone, Debug)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Matrix { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Matrix { dim, data: rows.into_iter().flatten().collect() }
    }

    pub fn diag(entries: Vec<T>) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits, when the dimension is a power of two.
    pub fn num_qubits(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data.iter().enumerate().map(move |(i, v)| (i / self.dim, i % self.dim, v))
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| {
                (0..self.dim).fold(T::zero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() || v[j].is_zero() {
                        acc
                    } else {
                        acc.add(&a.mul(&v[j]))
                    }
                })
            })
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn kron(&self, o: &Self) -> Self {
        let (n, m) = (self.dim, o.dim);
        let mut out = Self::zeros(n * m);
        for (i, j, a) in self.entries() {
            if a.is_zero() {
                continue;
            }
            for (k, l, b) in o.entries() {
                out.set(i * m + k, j * m + l, a.mul(b));
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn scale(&self, s: &T) -> Self {
        Matrix { dim: self.dim, data: self.data.iter().map(|v| v.mul(s)).collect() }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { dim: self.dim, data: self.data.iter().map(f).collect() }
    }

    /// Replaces `self` with `G·self`, where `G` is `gate` acting on the listed
    /// qubits of an `n`-qubit register.
    pub fn apply_left(&mut self, gate: &Matrix<T>, qubits: &[usize], n: usize) {
        let k = qubits.len();
        assert_eq!(gate.dim, 1 << k);
        assert_eq!(self.dim, 1 << n);
        let masks: Vec<usize> = qubits.iter().map(|&q| 1 << (n - 1 - q)).collect();
        let all: usize = masks.iter().sum();
        let sub_index = |local: usize| -> usize {
            // local bit (k-1-j) belongs to qubits[j]
            masks
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
                .map(|(_, m)| *m)
                .sum()
        };
        let offsets: Vec<usize> = (0..1 << k).map(sub_index).collect();
        let mut buf = vec![T::zero(); 1 << k];
        for base in 0..self.dim {
            if base & all != 0 {
                continue;
            }
            for col in 0..self.dim {
                for (r, off) in offsets.iter().enumerate() {
                    buf[r] = self.get(base | off, col).clone();
                }
                for (r, off) in offsets.iter().enumerate() {
                    let mut acc = T::zero();
                    for (c, v) in buf.iter().enumerate() {
                        let g = gate.get(r, c);
                        if !g.is_zero() && !v.is_zero() {
                            acc = acc.add(&g.mul(v));
                        }
                    }
                    self.set(base | off, col, acc);
                }
            }
        }
    }
}

impl<T: Scalar + PartialEq> PartialEq for Matrix<T> {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim && self.data == o.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn apply_left_matches_kron() {
        let x = Matrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]);
        let id = Matrix::<Complex64>::identity(2);
        let mut m = Matrix::<Complex64>::identity(4);
        m.apply_left(&x, &[1], 2);
        assert_eq!(m, id.kron(&x));
        let mut m = Matrix::<Complex64>::identity(4);
        m.apply_left(&x, &[0], 2);
        assert_eq!(m, x.kron(&id));
    }

    #[test]
    fn reversed_qubit_order_swaps_roles() {
        // CX with control 1, target 0 on two qubits
        let cx = Matrix::from_rows(
            [[1., 0., 0., 0.], [0., 1., 0., 0.], [0., 0., 0., 1.], [0., 0., 1., 0.]]
                .iter()
                .map(|r| r.iter().map(|&v| c(v, 0.)).collect())
                .collect(),
        );
        let mut m = Matrix::<Complex64>::identity(4);
        m.apply_left(&cx, &[1, 0], 2);
        // |01> (q1 = 1) flips q0 -> |11>
        assert_eq!(*m.get(3, 1), c(1., 0.));
        assert_eq!(*m.get(1, 1), c(0., 0.));
    }
}
