//! Dense circuit-level amplitude estimation for tiny registers: explicit
//! state preparation, reflections, Grover operator, controlled powers and
//! inverse Fourier transform, followed by Born-rule readout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{QaeDistribution, QaeGrid};
use crate::error::{invalid, Error, Result};

pub const MAX_TARGET_QUBITS: usize = 3;
pub const MAX_ORACLE_ANCILLAS: u32 = 5;

type CVector = DVector<Complex64>;
type CMatrix = DMatrix<Complex64>;

/// Prepared target vector together with the single marked basis string.
#[derive(Clone, Debug)]
pub struct QaeTargetSpec {
    state: CVector,
    good: usize,
}

impl QaeTargetSpec {
    pub fn new(state: CVector, good: usize) -> Result<Self> {
        let d = state.len();
        if d < 2 || !d.is_power_of_two() {
            return Err(invalid("target vector length must be a power of two >= 2"));
        }
        let n = d.trailing_zeros() as usize;
        if n > MAX_TARGET_QUBITS {
            return Err(Error::TooLarge {
                what: "oracle target qubits",
                value: n,
                limit: MAX_TARGET_QUBITS,
            });
        }
        if (state.norm() - 1.0).abs() > 1e-10 {
            return Err(invalid("target vector must have unit norm"));
        }
        if good >= d {
            return Err(invalid(format!("marked string {good} outside 0..{d}")));
        }
        Ok(Self { state, good })
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    /// Probability of the marked string.
    pub fn amplitude(&self) -> f64 {
        self.state[self.good].norm_sqr()
    }

    /// Householder reflection taking `|0>` to the target (up to phase).
    fn preparation(&self) -> CMatrix {
        let d = self.dim();
        let lead = self.state[0];
        let phase = if lead.norm() > 0.0 { lead / lead.norm() } else { Complex64::new(1.0, 0.0) };
        let v = &self.state / phase;
        let mut u = -v;
        u[0] += Complex64::new(1.0, 0.0);
        let norm2 = u.norm_squared();
        if norm2 < 1e-24 {
            return CMatrix::identity(d, d);
        }
        CMatrix::identity(d, d) - (&u * u.adjoint()) * Complex64::new(2.0 / norm2, 0.0)
    }

    /// `Q = -A S_0 A^dag S_chi`.
    pub fn grover(&self) -> CMatrix {
        let d = self.dim();
        let a = self.preparation();
        let mut s0 = CMatrix::identity(d, d);
        s0[(0, 0)] = Complex64::new(-1.0, 0.0);
        let mut schi = CMatrix::identity(d, d);
        schi[(self.good, self.good)] = Complex64::new(-1.0, 0.0);
        -(&a * s0 * a.adjoint() * schi)
    }
}

/// Outcome distribution of the full phase-estimation circuit.
pub fn circuit_oracle_distribution(target: &QaeTargetSpec, grid: QaeGrid) -> Result<QaeDistribution<f64>> {
    if grid.ancillas() > MAX_ORACLE_ANCILLAS {
        return Err(Error::TooLarge {
            what: "oracle ancillas",
            value: grid.ancillas() as usize,
            limit: MAX_ORACLE_ANCILLAS as usize,
        });
    }
    let d = target.dim();
    let m = grid.iterations();
    let prep = target.preparation();
    let q = target.grover();

    // Register index is y * d + t. Start from |0>|A 0>, then put the
    // ancillas in uniform superposition.
    let prepared = prep.column(0).into_owned();
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    let mut reg = CVector::zeros(m * d);
    for y in 0..m {
        for t in 0..d {
            reg[y * d + t] = prepared[t] * amp;
        }
    }

    // Ancilla l (zero-based) controls Q^(2^l).
    let mut power = q;
    for l in 0..grid.ancillas() {
        for y in 0..m {
            if (y >> l) & 1 == 1 {
                let block = reg.rows(y * d, d).into_owned();
                reg.rows_mut(y * d, d).copy_from(&(&power * block));
            }
        }
        power = &power * &power;
    }

    // Inverse Fourier transform on the ancilla register.
    let mut out = CVector::zeros(m * d);
    let norm = 1.0 / (m as f64).sqrt();
    for y in 0..m {
        for j in 0..m {
            let angle = -2.0 * std::f64::consts::PI * ((j * y) % m) as f64 / m as f64;
            let w = Complex64::from_polar(norm, angle);
            for t in 0..d {
                out[y * d + t] += w * reg[j * d + t];
            }
        }
    }

    let probs = (0..m)
        .map(|y| (0..d).map(|t| out[y * d + t].norm_sqr()).sum())
        .collect();
    let a = target.amplitude().min(1.0);
    Ok(QaeDistribution {
        grid,
        a,
        theta_a: super::theta_from_amplitude(a)?,
        probs,
        truncated: false,
        kept_mass: 1.0,
        mass_floor: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qae::outcome_distribution;

    fn basis(d: usize, k: usize) -> CVector {
        let mut v = CVector::zeros(d);
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn point_mass_targets() {
        let g = QaeGrid::new(4).unwrap();
        let zero = QaeTargetSpec::new(basis(4, 1), 2).unwrap();
        let d = circuit_oracle_distribution(&zero, g).unwrap();
        assert!((d.probs[0] - 1.0).abs() < 1e-12);
        let one = QaeTargetSpec::new(basis(4, 3), 3).unwrap();
        let d = circuit_oracle_distribution(&one, g).unwrap();
        assert!((d.probs[8] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generic_target_matches_closed_form() {
        let a: f64 = 0.3;
        let mut v = CVector::zeros(4);
        v[1] = Complex64::new(a.sqrt(), 0.0);
        v[2] = Complex64::from_polar((1.0 - a).sqrt(), 0.7);
        let t = QaeTargetSpec::new(v, 1).unwrap();
        for m in 1..=5 {
            let g = QaeGrid::new(m).unwrap();
            let circuit = circuit_oracle_distribution(&t, g).unwrap();
            let closed = outcome_distribution(a, g).unwrap();
            for y in 0..g.iterations() {
                assert!((circuit.probs[y] - closed.probs[y]).abs() < 1e-9, "m={m} y={y}");
            }
        }
    }

    #[test]
    fn limits() {
        assert!(QaeTargetSpec::new(basis(16, 0), 0).is_err());
        assert!(QaeTargetSpec::new(basis(4, 0) * Complex64::new(2.0, 0.0), 0).is_err());
        assert!(QaeTargetSpec::new(basis(4, 0), 4).is_err());
        let t = QaeTargetSpec::new(basis(2, 0), 0).unwrap();
        assert!(circuit_oracle_distribution(&t, QaeGrid::new(6).unwrap()).is_err());
    }
}
