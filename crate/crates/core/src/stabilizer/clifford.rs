use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gf2::BitMatrix;
use super::pauli::{Phase, PauliString};
use super::tableau::Tableau;
use crate::error::{invalid, Error, Result};

/// An `n`-qubit Clifford unitary modulo global phase, stored as the images
/// of `X_1..X_n, Z_1..Z_n` under conjugation `P -> C P C^dagger`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "CliffordRepr", try_from = "CliffordRepr")]
pub struct CliffordOp {
    tab: Tableau,
}

/// Serialized form: generator images as signed Pauli strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CliffordRepr {
    pub x_images: Vec<String>,
    pub z_images: Vec<String>,
}

impl From<CliffordOp> for CliffordRepr {
    fn from(c: CliffordOp) -> Self {
        let n = c.num_qubits();
        CliffordRepr {
            x_images: (0..n).map(|q| c.tab.row_pauli(q).to_string()).collect(),
            z_images: (0..n).map(|q| c.tab.row_pauli(n + q).to_string()).collect(),
        }
    }
}

impl TryFrom<CliffordRepr> for CliffordOp {
    type Error = Error;

    fn try_from(r: CliffordRepr) -> Result<Self> {
        let n = r.x_images.len();
        if r.z_images.len() != n {
            return Err(invalid("x_images and z_images differ in length"));
        }
        let mut tab = Tableau::identity(n);
        for (row, s) in r.x_images.iter().chain(&r.z_images).enumerate() {
            let p = PauliString::parse(s)?;
            if p.num_qubits() != n || !p.phase().is_real() {
                return Err(invalid(format!("bad generator image {s:?}")));
            }
            tab.set_row(row, &p);
        }
        let c = CliffordOp { tab };
        if !c.is_symplectic() {
            return Err(invalid("generator images do not form a symplectic tableau"));
        }
        Ok(c)
    }
}

impl CliffordOp {
    pub fn identity(n: usize) -> Self {
        Self {
            tab: Tableau::identity(n),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.tab.n
    }

    pub(crate) fn tableau(&self) -> &Tableau {
        &self.tab
    }

    /// Append a Hadamard on `q` (applied after the current operator).
    pub fn then_h(mut self, q: usize) -> Self {
        self.tab.h(q);
        self
    }

    pub fn then_s(mut self, q: usize) -> Self {
        self.tab.s(q);
        self
    }

    pub fn then_cx(mut self, control: usize, target: usize) -> Self {
        self.tab.cx(control, target);
        self
    }

    pub fn image_x(&self, q: usize) -> PauliString {
        self.tab.row_pauli(q)
    }

    pub fn image_z(&self, q: usize) -> PauliString {
        self.tab.row_pauli(self.tab.n + q)
    }

    /// `C P C^dagger`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                actual: p.num_qubits(),
            });
        }
        let (x, z, ph) = self.tab.conjugate_raw(p.x_words(), p.z_words(), p.phase().exponent());
        PauliString::from_masks(p.num_qubits(), x, z, Phase::from_exponent(ph as u32))
    }

    /// The operator "apply `self`, then `next`".
    pub fn then(&self, next: &CliffordOp) -> Result<CliffordOp> {
        if next.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                actual: next.num_qubits(),
            });
        }
        let mut tab = self.tab.clone();
        let w = tab.words;
        for r in 0..tab.rows() {
            let (x, z, ph) = next
                .tab
                .conjugate_raw(self.tab.xr(r), self.tab.zr(r), self.tab.phase[r]);
            tab.x[r * w..(r + 1) * w].copy_from_slice(&x);
            tab.z[r * w..(r + 1) * w].copy_from_slice(&z);
            tab.phase[r] = ph;
        }
        Ok(CliffordOp { tab })
    }

    pub fn inverse(&self) -> CliffordOp {
        let n = self.tab.n;
        let s = self.tab.binary_matrix();
        let swap = |k: usize| if k < n { k + n } else { k - n };
        let mut inv = Tableau::identity(n);
        for t in 0..2 * n {
            // Bits c of the preimage Q with C Q C^dagger = ±generator t:
            // c = e_t Ω S^T Ω, so c[k] = S[swap(k)][swap(t)].
            let mut q = PauliString::identity(n);
            for k in 0..n {
                let xk = s.get(swap(k), swap(t));
                let zk = s.get(swap(n + k), swap(t));
                q.set(k, xk, zk);
            }
            let image = self.conjugate(&q).expect("same dimension");
            if image.phase().is_negative() {
                q.set_phase(Phase::MINUS_ONE);
            }
            inv.set_row(t, &q);
        }
        CliffordOp { tab: inv }
    }

    pub fn binary_matrix(&self) -> BitMatrix {
        self.tab.binary_matrix()
    }

    pub fn is_symplectic(&self) -> bool {
        self.tab.is_symplectic()
    }

    pub fn is_identity(&self) -> bool {
        self.tab == Tableau::identity(self.tab.n)
    }

    /// Uniformly random Clifford modulo global phase, sampled from the
    /// canonical form `F1 · H · S · F2` (Hadamard layer and qubit
    /// permutation drawn from the quantum Mallows distribution, Hadamard-free
    /// layers from random triangular data), followed by uniform signs.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordOp> {
        if n == 0 {
            return Err(invalid("a Clifford needs at least one qubit"));
        }
        let (had, perm) = sample_quantum_mallows(n, rng);

        let gamma1 = random_symmetric(n, rng);
        let gamma2 = random_symmetric(n, rng);
        let delta1 = random_unit_lower(n, rng);
        let delta2 = random_unit_lower(n, rng);

        let zero = BitMatrix::zeros(n, n);
        let prod1 = gamma1.mul(&delta1);
        let prod2 = gamma2.mul(&delta2);
        let inv1 = delta1.inverse_unit_lower().transpose();
        let inv2 = delta2.inverse_unit_lower().transpose();
        let table1 = BitMatrix::block2(&delta1, &zero, &prod1, &inv1);
        let table2 = BitMatrix::block2(&delta2, &zero, &prod2, &inv2);

        let mut table = BitMatrix::zeros(2 * n, 2 * n);
        for (i, &src) in perm.iter().enumerate() {
            table.copy_row_from(i, &table2, src);
            table.copy_row_from(n + i, &table2, n + src);
        }
        for (i, &h) in had.iter().enumerate() {
            if h {
                table.swap_rows(i, n + i);
            }
        }
        let symplectic = table1.mul(&table);

        let mut tab = Tableau::identity(n);
        for r in 0..2 * n {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set(q, symplectic.get(r, q), symplectic.get(r, n + q));
            }
            if rng.random::<bool>() {
                p.set_phase(Phase::MINUS_ONE);
            }
            tab.set_row(r, &p);
        }
        Ok(CliffordOp { tab })
    }
}

fn sample_quantum_mallows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let r: f64 = rng.random();
        let index = (-((r + (1.0 - r) * eps).log2().ceil()) as usize).min(2 * m - 1);
        had[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = remaining.remove(k);
    }
    (had, perm)
}

fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitMatrix {
    let mut m = BitMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, rng.random());
    }
    for i in 0..n {
        for j in 0..i {
            let v = rng.random();
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

fn random_unit_lower<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitMatrix {
    let mut m = BitMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            m.set(i, j, rng.random());
        }
    }
    m
}

impl fmt::Debug for CliffordOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.num_qubits();
        writeln!(f, "CliffordOp(n = {n})")?;
        for q in 0..n {
            writeln!(f, "  X{q} -> {}", self.image_x(q))?;
        }
        for q in 0..n {
            writeln!(f, "  Z{q} -> {}", self.image_z(q))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng_from;
    use crate::stabilizer::StabilizerState;

    #[test]
    fn gate_images() {
        let c = CliffordOp::identity(2).then_h(0).then_cx(0, 1);
        assert_eq!(c.image_x(0).to_string(), "+ZI");
        assert_eq!(c.image_z(0).to_string(), "+XX");
        assert_eq!(c.image_x(1).to_string(), "+IX");
        assert_eq!(c.image_z(1).to_string(), "+ZZ");
        let s = CliffordOp::identity(1).then_s(0);
        assert_eq!(s.image_x(0).to_string(), "+Y");
        assert_eq!(s.conjugate(&PauliString::parse("Y").unwrap()).unwrap().to_string(), "-X");
    }

    #[test]
    fn random_samples_are_symplectic() {
        let mut rng = rng_from(11);
        for n in 1..=12 {
            for _ in 0..20 {
                let c = CliffordOp::random(n, &mut rng).unwrap();
                assert!(c.is_symplectic(), "n = {n}");
                assert_eq!(c.binary_matrix().rank(), 2 * n);
            }
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = rng_from(12);
        for n in 1..=9 {
            for _ in 0..10 {
                let c = CliffordOp::random(n, &mut rng).unwrap();
                let inv = c.inverse();
                assert!(c.then(&inv).unwrap().is_identity(), "n = {n}\n{c:?}\n{inv:?}");
                assert!(inv.then(&c).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn clifford_then_inverse_restores_state() {
        let mut rng = rng_from(13);
        let ghz = StabilizerState::ghz(6).unwrap();
        for _ in 0..10 {
            let c = CliffordOp::random(6, &mut rng).unwrap();
            let mut s = ghz.clone();
            s.apply_clifford(&c).unwrap();
            s.apply_clifford(&c.inverse()).unwrap();
            for p in ghz.stabilizers() {
                assert!(s.is_stabilized_by(&p));
            }
        }
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let mut s = StabilizerState::ghz(4).unwrap();
        let before = s.clone();
        s.apply_clifford(&CliffordOp::identity(4)).unwrap();
        assert_eq!(s, before);
        assert!(s.apply_clifford(&CliffordOp::identity(3)).is_err());
    }

    #[test]
    fn zero_qubits_rejected() {
        assert!(CliffordOp::random(0, &mut rng_from(0)).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let c = CliffordOp::random(3, &mut rng_from(5)).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: CliffordOp = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"x_images":["+X"],"z_images":["+X"]}"#;
        assert!(serde_json::from_str::<CliffordOp>(bad).is_err());
    }
}
