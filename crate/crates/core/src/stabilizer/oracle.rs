//! Dense brute-force oracles for small registers. Built from the definitions
//! of Pauli operators only, independent of the tableau update rules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::clifford::CliffordOp;
use super::pauli::PauliString;
use super::state::StabilizerState;
use crate::error::{Error, Result};

pub const MAX_ORACLE_QUBITS: usize = 12;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::TooLarge {
            what: "oracle qubit count",
            value: n,
            limit: MAX_ORACLE_QUBITS,
        });
    }
    Ok(())
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `p |v>` with `p = i^k ⊗ sigma_q`, using `Y = i X Z` and
/// `X^x Z^z |j> = (-1)^{|j & z|} |j xor x>`. Basis index bit `q` is qubit `q`.
pub fn apply_pauli_dense(p: &PauliString, v: &CVector) -> CVector {
    let n = p.num_qubits();
    assert_eq!(v.len(), 1 << n);
    let xm = p.x_words()[0];
    let zm = p.z_words()[0];
    let coeff = i_pow(p.phase().exponent() as u32 + (xm & zm).count_ones());
    let mut out = CVector::zeros(v.len());
    for j in 0..v.len() {
        let sign = if ((j as u64) & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[(j as u64 ^ xm) as usize] += v[j] * coeff * sign;
    }
    out
}

pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let d = 1usize << p.num_qubits();
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        let mut e = CVector::zeros(d);
        e[j] = Complex64::new(1.0, 0.0);
        m.set_column(j, &apply_pauli_dense(p, &e));
    }
    m
}

/// Unit vector stabilized by every stabilizer row of `state`, obtained by
/// projecting a fixed generic vector with `prod_i (I + S_i) / 2`.
pub fn statevector(state: &StabilizerState) -> Result<CVector> {
    let n = state.num_qubits();
    check_size(n)?;
    let d = 1usize << n;
    let mut v = CVector::from_fn(d, |j, _| {
        let t = j as f64;
        Complex64::new(1.0 + (0.731 * t + 0.2).sin() * 0.5, (1.37 * t + 0.9).cos() * 0.5)
    });
    for s in state.stabilizers() {
        let sv = apply_pauli_dense(&s, &v);
        v = (v + sv) * Complex64::new(0.5, 0.0);
    }
    let norm = v.norm();
    if norm < 1e-9 {
        return Err(Error::InvalidArgument(
            "projection vanished; stabilizers inconsistent".into(),
        ));
    }
    Ok(v / Complex64::new(norm, 0.0))
}

pub fn ghz_vector(n: usize) -> CVector {
    let d = 1usize << n;
    let mut v = CVector::zeros(d);
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = a;
    v[d - 1] = a;
    v
}

/// Dense unitary (up to global phase) whose conjugation action matches `c`:
/// column 0 is the state stabilized by the images of `Z_j`, and column `x`
/// is `prod_j C X_j C^dagger` (over set bits of `x`) applied to column 0.
pub fn clifford_unitary(c: &CliffordOp) -> Result<CMatrix> {
    let n = c.num_qubits();
    check_size(n)?;
    let mut zero = StabilizerState::zero(n)?;
    zero.apply_clifford(c)?;
    let col0 = statevector(&zero)?;
    let d = 1usize << n;
    let mut u = CMatrix::zeros(d, d);
    for x in 0..d {
        let mut col = col0.clone();
        for q in 0..n {
            if (x >> q) & 1 == 1 {
                col = apply_pauli_dense(&c.image_x(q), &col);
            }
        }
        u.set_column(x, &col);
    }
    Ok(u)
}

/// `|<a|b>|`, insensitive to global phase.
pub fn overlap_abs(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm()
}
