use std::fmt;

use serde::{Deserialize, Serialize};

use super::pauli::words_for;
use crate::error::{Error, Result};

/// Computational-basis outcome of `n` qubits. Qubit `l` (1-based) carries
/// weight `2^(l-1)` in the integer encoding, i.e. qubit 0 is the least
/// significant bit.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    n: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn from_u64(n: usize, value: u64) -> Result<Self> {
        if n < 64 && value >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {n} bits"
            )));
        }
        let mut b = Self::zeros(n);
        b.words[0] = value;
        Ok(b)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (q, &v) in bits.iter().enumerate() {
            b.set(q, v);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, q: usize) -> bool {
        (self.words[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn set(&mut self, q: usize, v: bool) {
        let bit = 1u64 << (q % 64);
        if v {
            self.words[q / 64] |= bit;
        } else {
            self.words[q / 64] &= !bit;
        }
    }

    /// Integer value; `None` when more than 64 qubits are set.
    pub fn to_u64(&self) -> Option<u64> {
        if self.words[1..].iter().any(|&w| w != 0) {
            None
        } else {
            Some(self.words[0])
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Display for BitString {
    /// Qubit 0 printed first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            f.write_str(if self.get(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}
