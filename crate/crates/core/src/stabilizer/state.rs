use std::fmt;

use rand::Rng;

use super::bits::BitString;
use super::clifford::CliffordOp;
use super::dyadic::Dyadic;
use super::pauli::{anticommutes, PauliString};
use super::tableau::Tableau;
use crate::error::{invalid, Error, Result};

/// Pure `n`-qubit stabilizer state in destabilizer/stabilizer tableau form.
///
/// Global phase is not tracked.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabilizerState {
    tab: Tableau,
}

/// Outcome of measuring one qubit in the Z basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZOutcome {
    Deterministic(bool),
    Random(bool),
}

impl ZOutcome {
    pub fn bit(self) -> bool {
        match self {
            ZOutcome::Deterministic(b) | ZOutcome::Random(b) => b,
        }
    }
}

impl StabilizerState {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a state needs at least one qubit"));
        }
        Ok(Self {
            tab: Tableau::identity(n),
        })
    }

    /// `(|0...0> + |1...1>) / sqrt(2)`; for `n = 1` this is `|+>`.
    pub fn ghz(n: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        s.h(0);
        for q in 1..n {
            s.cx(0, q);
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.tab.n
    }

    pub fn h(&mut self, q: usize) {
        self.tab.h(q);
    }

    pub fn s(&mut self, q: usize) {
        self.tab.s(q);
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        self.tab.cx(control, target);
    }

    /// Stabilizer generators (rows `n..2n`).
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.tab.n..2 * self.tab.n).map(|r| self.tab.row_pauli(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.tab.n).map(|r| self.tab.row_pauli(r)).collect()
    }

    /// Rank over GF(2) of the full `2n x 2n` tableau matrix.
    pub fn tableau_rank(&self) -> usize {
        self.tab.binary_matrix().rank()
    }

    /// Checks every structural invariant of the tableau.
    pub fn is_valid(&self) -> bool {
        let n = self.tab.n;
        self.tab.is_symplectic()
            && (n..2 * n).all(|r| self.tab.phase[r].is_multiple_of(2))
            && self.tableau_rank() == 2 * n
    }

    /// Conjugate every row by `c`, i.e. replace the state `|s>` by `c|s>`.
    pub fn apply_clifford(&mut self, c: &CliffordOp) -> Result<()> {
        if c.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                actual: c.num_qubits(),
            });
        }
        let ct = c.tableau();
        let w = self.tab.words;
        for r in 0..self.tab.rows() {
            let (x, z, ph) = ct.conjugate_raw(self.tab.xr(r), self.tab.zr(r), self.tab.phase[r]);
            self.tab.x[r * w..(r + 1) * w].copy_from_slice(&x);
            self.tab.z[r * w..(r + 1) * w].copy_from_slice(&z);
            self.tab.phase[r] = ph;
        }
        Ok(())
    }

    /// Replace `|s>` by `p|s>` (up to global phase): stabilizers that
    /// anticommute with `p` change sign.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                actual: p.num_qubits(),
            });
        }
        for r in 0..self.tab.rows() {
            if anticommutes(self.tab.xr(r), self.tab.zr(r), p.x_words(), p.z_words()) {
                self.tab.phase[r] ^= 2;
            }
        }
        Ok(())
    }

    fn pivot(&self, q: usize) -> Option<usize> {
        let n = self.tab.n;
        (n..2 * n).find(|&r| self.tab.x_bit(r, q))
    }

    /// Outcome of a Z measurement on `q` if it is deterministic.
    fn deterministic_outcome(&self, q: usize) -> bool {
        let n = self.tab.n;
        let w = self.tab.words;
        let mut sx = vec![0u64; w];
        let mut sz = vec![0u64; w];
        let mut k = 0u32;
        for i in 0..n {
            if self.tab.x_bit(i, q) {
                let r = n + i;
                k += super::pauli::product_phase(&sx, &sz, self.tab.xr(r), self.tab.zr(r))
                    + self.tab.phase[r] as u32;
                for j in 0..w {
                    sx[j] ^= self.tab.x[r * w + j];
                    sz[j] ^= self.tab.z[r * w + j];
                }
            }
        }
        debug_assert!(k.is_multiple_of(2), "product of stabilizers must be Hermitian");
        k % 4 == 2
    }

    /// Project qubit `q` onto the outcome `bit` given that the outcome is
    /// random, with `p` the pivot row.
    fn collapse(&mut self, q: usize, p: usize, bit: bool) {
        let n = self.tab.n;
        for r in 0..2 * n {
            if r != p && self.tab.x_bit(r, q) {
                self.tab.mul_row_into(r, p);
            }
        }
        self.tab.copy_row(p - n, p);
        self.tab.set_row_z(p, q, bit);
    }

    /// Measure qubit `q` in the computational basis, collapsing the state.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> ZOutcome {
        match self.pivot(q) {
            Some(p) => {
                let bit: bool = rng.random();
                self.collapse(q, p, bit);
                ZOutcome::Random(bit)
            }
            None => ZOutcome::Deterministic(self.deterministic_outcome(q)),
        }
    }

    /// Measure every qubit and return the outcome together with its exact
    /// Born probability.
    pub fn measure_all_with_probability<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
    ) -> (BitString, Dyadic) {
        let n = self.num_qubits();
        let mut out = BitString::zeros(n);
        let mut prob = Dyadic::ONE;
        for q in 0..n {
            let o = self.measure(q, rng);
            if let ZOutcome::Random(_) = o {
                prob = prob.halve();
            }
            out.set(q, o.bit());
        }
        (out, prob)
    }

    pub fn measure_all<R: Rng + ?Sized>(&mut self, rng: &mut R) -> BitString {
        self.measure_all_with_probability(rng).0
    }

    /// Exact `|<b|s>|^2`, obtained by conditioning qubit by qubit on the
    /// bits of `b`.
    pub fn amplitude_sq(&self, b: &BitString) -> Result<Dyadic> {
        if b.len() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                actual: b.len(),
            });
        }
        let mut s = self.clone();
        let mut prob = Dyadic::ONE;
        for q in 0..s.num_qubits() {
            let bit = b.get(q);
            match s.pivot(q) {
                Some(p) => {
                    s.collapse(q, p, bit);
                    prob = prob.halve();
                }
                None => {
                    if s.deterministic_outcome(q) != bit {
                        return Ok(Dyadic::Zero);
                    }
                }
            }
        }
        Ok(prob)
    }

    /// Number of qubits whose Z outcome is random, i.e. `log2` of the
    /// support size of the computational-basis distribution.
    pub fn support_dimension(&self) -> usize {
        let mut s = self.clone();
        let mut k = 0;
        for q in 0..s.num_qubits() {
            if let Some(p) = s.pivot(q) {
                s.collapse(q, p, false);
                k += 1;
            }
        }
        k
    }

    /// Does `p` (with its sign) stabilize the state?
    pub fn is_stabilized_by(&self, p: &PauliString) -> bool {
        if p.num_qubits() != self.num_qubits() || !p.phase().is_real() {
            return false;
        }
        let n = self.tab.n;
        // p stabilizes iff it commutes with every stabilizer and equals the
        // product of the stabilizers selected by its destabilizer pattern.
        if (n..2 * n).any(|r| anticommutes(self.tab.xr(r), self.tab.zr(r), p.x_words(), p.z_words())) {
            return false;
        }
        let mut acc = PauliString::identity(n);
        for i in 0..n {
            if anticommutes(self.tab.xr(i), self.tab.zr(i), p.x_words(), p.z_words()) {
                acc = acc
                    .mul(&self.tab.row_pauli(n + i))
                    .expect("same dimension");
            }
        }
        acc == *p
    }
}

impl fmt::Debug for StabilizerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "StabilizerState(n = {})", self.num_qubits())?;
        for (i, p) in self.destabilizers().iter().enumerate() {
            writeln!(f, "  d{i}: {p}")?;
        }
        for (i, p) in self.stabilizers().iter().enumerate() {
            writeln!(f, "  s{i}: {p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng_from;

    fn b(n: usize, v: u64) -> BitString {
        BitString::from_u64(n, v).unwrap()
    }

    #[test]
    fn ghz_generators() {
        let s = StabilizerState::ghz(4).unwrap();
        assert!(s.is_valid());
        assert!(s.is_stabilized_by(&PauliString::parse("XXXX").unwrap()));
        assert!(s.is_stabilized_by(&PauliString::parse("ZZII").unwrap()));
        assert!(s.is_stabilized_by(&PauliString::parse("IIZZ").unwrap()));
        assert!(s.is_stabilized_by(&PauliString::parse("-YYXX").unwrap()));
        assert!(!s.is_stabilized_by(&PauliString::parse("-XXXX").unwrap()));
        assert!(!s.is_stabilized_by(&PauliString::parse("ZIII").unwrap()));
    }

    #[test]
    fn ghz_one_qubit_is_plus() {
        let s = StabilizerState::ghz(1).unwrap();
        assert_eq!(s.stabilizers(), vec![PauliString::parse("X").unwrap()]);
    }

    #[test]
    fn zero_qubits_rejected() {
        assert!(StabilizerState::ghz(0).is_err());
    }

    #[test]
    fn ghz_amplitudes() {
        let s = StabilizerState::ghz(3).unwrap();
        assert_eq!(s.amplitude_sq(&b(3, 0)).unwrap(), Dyadic::InversePow2(1));
        assert_eq!(s.amplitude_sq(&b(3, 7)).unwrap(), Dyadic::InversePow2(1));
        assert_eq!(s.amplitude_sq(&b(3, 0b010)).unwrap(), Dyadic::Zero);
        assert!(s.amplitude_sq(&b(2, 0)).is_err());
    }

    #[test]
    fn zero_state_measures_zero() {
        let mut rng = rng_from(1);
        for _ in 0..50 {
            let mut s = StabilizerState::zero(5).unwrap();
            assert_eq!(s.measure_all(&mut rng).to_u64(), Some(0));
        }
    }

    #[test]
    fn ghz_outcomes_are_all_equal_bits() {
        let mut rng = rng_from(2);
        let mut ones = 0;
        let shots = 100_000;
        for _ in 0..shots {
            let mut s = StabilizerState::ghz(3).unwrap();
            match s.measure_all(&mut rng).to_u64().unwrap() {
                0 => {}
                7 => ones += 1,
                other => panic!("impossible GHZ outcome {other}"),
            }
        }
        let freq = ones as f64 / shots as f64;
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn pauli_flips() {
        let mut s = StabilizerState::ghz(2).unwrap();
        let orig = s.clone();
        s.apply_pauli(&PauliString::all_z(2)).unwrap();
        assert_eq!(s.stabilizers(), orig.stabilizers());

        let mut s = StabilizerState::ghz(5).unwrap();
        s.apply_pauli(&PauliString::all_x(5)).unwrap();
        assert_eq!(s.stabilizers(), StabilizerState::ghz(5).unwrap().stabilizers());

        let mut s = StabilizerState::ghz(3).unwrap();
        s.apply_pauli(&PauliString::all_z(3)).unwrap();
        assert!(s.is_stabilized_by(&PauliString::parse("-XXX").unwrap()));
        assert_eq!(s.amplitude_sq(&b(3, 0)).unwrap(), Dyadic::InversePow2(1));
    }

    #[test]
    fn measurement_keeps_tableau_valid() {
        let mut rng = rng_from(3);
        for n in 1..8 {
            let mut s = StabilizerState::ghz(n).unwrap();
            let c = CliffordOp::random(n, &mut rng).unwrap();
            s.apply_clifford(&c).unwrap();
            assert!(s.is_valid());
            s.measure_all(&mut rng);
            assert!(s.is_valid());
        }
    }
}
