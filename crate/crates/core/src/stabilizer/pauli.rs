use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of `u64` words needed for `n` bits.
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Power of `i` multiplying a Pauli product: `0 -> +1`, `1 -> +i`, `2 -> -1`, `3 -> -i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn is_negative(self) -> bool {
        self.0 == 2
    }

}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

/// Exponent of `i` picked up by the qubit-wise product `P1 * P2` of Hermitian
/// Pauli tensors given as packed `(x, z)` words, with `Y = i X Z` per qubit.
#[inline]
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut pos = 0u32;
    let mut neg = 0u32;
    for w in 0..x1.len() {
        let (a, b, c, d) = (x1[w], z1[w], x2[w], z2[w]);
        let px = a & !b;
        let py = a & b;
        let pz = !a & b;
        let qx = c & !d;
        let qy = c & d;
        let qz = !c & d;
        pos += ((px & qy) | (py & qz) | (pz & qx)).count_ones();
        neg += ((px & qz) | (py & qx) | (pz & qy)).count_ones();
    }
    (pos + 4 * 64 * x1.len() as u32 - neg) % 4
}

#[inline]
pub(crate) fn anticommutes(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    let mut acc = 0u32;
    for w in 0..x1.len() {
        acc += ((x1[w] & z2[w]) ^ (z1[w] & x2[w])).count_ones();
    }
    acc % 2 == 1
}

/// An `n`-qubit Pauli operator `i^phase * (sigma_1 ⊗ ... ⊗ sigma_n)` with
/// each `sigma_j` one of the Hermitian `I, X, Y, Z` selected by bit `j` of
/// the `x` and `z` masks.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: Phase::PLUS_ONE,
        }
    }

    /// Build from per-qubit characters, qubit 0 first, e.g. `"XZIY"`.
    /// An optional leading `+`, `-`, `+i`, `-i` sets the phase.
    pub fn parse(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, rest)
        } else {
            (Phase::PLUS_ONE, s)
        };
        let mut p = Self::identity(body.chars().count());
        for (q, c) in body.chars().enumerate() {
            match c {
                'I' | '_' | '.' => {}
                'X' => p.set(q, true, false),
                'Y' => p.set(q, true, true),
                'Z' => p.set(q, false, true),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid Pauli character {other:?}"
                    )))
                }
            }
        }
        p.phase = phase;
        Ok(p)
    }

    /// `Z` on every qubit.
    pub fn all_z(n: usize) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            p.set(q, false, true);
        }
        p
    }

    /// `X` on every qubit.
    pub fn all_x(n: usize) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            p.set(q, true, false);
        }
        p
    }

    /// Pauli from raw little-endian masks (bit `q` of word `q / 64`).
    pub fn from_masks(n: usize, x: Vec<u64>, z: Vec<u64>, phase: Phase) -> Result<Self> {
        let w = words_for(n);
        if x.len() != w || z.len() != w {
            return Err(Error::InvalidArgument(format!(
                "mask length must be {w} words for {n} qubits"
            )));
        }
        let mut p = Self { n, x, z, phase };
        p.clear_padding();
        Ok(p)
    }

    pub(crate) fn from_parts(n: usize, x: &[u64], z: &[u64], phase: Phase) -> Self {
        Self {
            n,
            x: x.to_vec(),
            z: z.to_vec(),
            phase,
        }
    }

    fn clear_padding(&mut self) {
        let tail = self.n % 64;
        if tail != 0 {
            let last = self.x.len() - 1;
            let mask = (1u64 << tail) - 1;
            self.x[last] &= mask;
            self.z[last] &= mask;
        }
        if self.n == 0 {
            self.x[0] = 0;
            self.z[0] = 0;
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let bit = 1u64 << (q % 64);
        let w = q / 64;
        if x {
            self.x[w] |= bit;
        } else {
            self.x[w] &= !bit;
        }
        if z {
            self.z[w] |= bit;
        } else {
            self.z[w] &= !bit;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !anticommutes(&self.x, &self.z, &other.x, &other.z)
    }

    /// Operator product `self * rhs`.
    pub fn mul(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: rhs.n,
            });
        }
        let k = product_phase(&self.x, &self.z, &rhs.x, &rhs.z);
        Ok(PauliString {
            n: self.n,
            x: self.x.iter().zip(&rhs.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&rhs.z).map(|(a, b)| a ^ b).collect(),
            phase: self.phase * rhs.phase * Phase::from_exponent(k),
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase.exponent() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(sign)?;
        for q in 0..self.n {
            let c = match (self.x_bit(q), self.z_bit(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}
