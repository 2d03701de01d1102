//! Pauli strings and their `(x, z)` bit encoding: `x̄z̄ = I`, `xz̄ = X`,
//! `xz = Y`, `x̄z = Z`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::weights::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn matrix(self) -> Matrix<Weight> {
        let (z, o) = (Weight::zero(), Weight::one());
        match self {
            Pauli::I => Matrix::identity(2),
            Pauli::X => Matrix::from_rows(vec![vec![z.clone(), o.clone()], vec![o, z]]),
            Pauli::Y => Matrix::from_rows(vec![
                vec![z.clone(), Weight::omega_pow(-2)],
                vec![Weight::omega_pow(2), z],
            ]),
            Pauli::Z => Matrix::diag(vec![o, Weight::int(-1)]),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis; entry 0 acts on qubit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    /// `p` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.0[q] = p;
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `idx`-th of the `4^n` strings, two bits per qubit, qubit 0 most
    /// significant, each pair read as `(x, z)`.
    pub fn from_index(n: usize, idx: usize) -> Self {
        PauliString(
            (0..n)
                .map(|q| {
                    let pair = idx >> (2 * (n - 1 - q)) & 3;
                    Pauli::from_bits(pair & 2 != 0, pair & 1 != 0)
                })
                .collect(),
        )
    }

    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |i| PauliString::from_index(n, i))
    }

    /// `X_j` and `Z_j` for every qubit, in qubit order.
    pub fn generators(n: usize) -> Vec<PauliString> {
        (0..n).flat_map(|q| [Self::single(n, q, Pauli::X), Self::single(n, q, Pauli::Z)]).collect()
    }

    pub fn matrix(&self) -> Matrix<Weight> {
        self.0.iter().fold(Matrix::identity(1), |acc, p| acc.kron(&p.matrix()))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidArgument(format!("bad Pauli letter `{c}` in `{s}`"))),
            })
            .collect::<Result<_>>()
            .map(PauliString)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_mapping() {
        for p in Pauli::ALL {
            let (x, z) = p.bits();
            assert_eq!(Pauli::from_bits(x, z), p);
        }
        assert_eq!(Pauli::from_bits(false, true), Pauli::Z);
    }

    #[test]
    fn index_enumeration_is_bijective() {
        let all: Vec<_> = PauliString::all(2).collect();
        assert_eq!(all.len(), 16);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
        assert_eq!("XZ".parse::<PauliString>().unwrap().to_string(), "XZ");
    }

    #[test]
    fn y_equals_i_x_z() {
        let i = Weight::omega_pow(2);
        let xz = Pauli::X.matrix().matmul(&Pauli::Z.matrix());
        let y = xz.scale(&i);
        // iXZ = Y
        assert_eq!(y, Pauli::Y.matrix());
    }
}
