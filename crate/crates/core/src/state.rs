//! Input states with closed-form encodings.

use crate::error::{Error, Result};
use crate::weights::{ExactW, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum State {
    /// `|0…0⟩`.
    ZeroN,
    /// `|b⟩`; entry 0 is qubit 0.
    BasisState(Vec<bool>),
    /// `|+⟩^{⊗n}`.
    Plus,
    /// `|−⟩^{⊗n}`.
    Minus,
    /// `|A⟩^{⊗n}` with `|A⟩ = (|0⟩ + ω|1⟩)/√2`.
    AState,
    /// `Σ_j |j⟩|j⟩ / √2^{n/2}` pairing qubit `j` with `j + n/2`.
    MaxEntangled,
}

impl State {
    pub fn check_width(&self, n: usize) -> Result<()> {
        match self {
            State::BasisState(b) if b.len() != n => Err(Error::WidthMismatch(b.len(), n)),
            State::MaxEntangled if n % 2 != 0 => {
                Err(Error::InvalidArgument(format!("maximally entangled state needs an even width, got {n}")))
            }
            _ if n == 0 => Err(Error::InvalidArgument("states need at least one qubit".into())),
            _ => Ok(()),
        }
    }

    /// Exact amplitudes, index with qubit 0 as most significant bit.
    pub fn amplitudes(&self, n: usize) -> Result<Vec<ExactW>> {
        self.check_width(n)?;
        let dim = 1usize << n;
        let bit = |idx: usize, q: usize| idx >> (n - 1 - q) & 1 == 1;
        let ex = |w: Weight| w.as_exact().cloned().expect("exact constant");
        let amp = |idx: usize| -> ExactW {
            match self {
                State::ZeroN => if idx == 0 { ExactW::one() } else { ExactW::zero() },
                State::BasisState(b) => {
                    if (0..n).all(|q| bit(idx, q) == b[q]) {
                        ExactW::one()
                    } else {
                        ExactW::zero()
                    }
                }
                State::Plus => ExactW::inv_sqrt2_pow(n as u32),
                State::Minus => {
                    let ones = idx.count_ones() as i64;
                    &ExactW::inv_sqrt2_pow(n as u32) * &ExactW::omega_pow(4 * ones)
                }
                State::AState => {
                    let ones = idx.count_ones() as i64;
                    &ExactW::inv_sqrt2_pow(n as u32) * &ExactW::omega_pow(ones)
                }
                State::MaxEntangled => {
                    let h = n / 2;
                    if (0..h).all(|q| bit(idx, q) == bit(idx, q + h)) {
                        ex(Weight::inv_sqrt2_pow(h as u32))
                    } else {
                        ExactW::zero()
                    }
                }
            }
        };
        Ok((0..dim).map(amp).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_are_normalised() {
        let states = [
            State::ZeroN,
            State::BasisState(vec![true, false]),
            State::Plus,
            State::Minus,
            State::AState,
            State::MaxEntangled,
        ];
        for s in states {
            let amps = s.amplitudes(2).unwrap();
            let norm = amps.iter().fold(ExactW::zero(), |acc, a| &acc + &a.norm_sq());
            assert_eq!(norm, ExactW::one(), "{s:?}");
        }
        assert!(State::MaxEntangled.amplitudes(3).is_err());
        assert!(State::BasisState(vec![true]).amplitudes(2).is_err());
    }
}
