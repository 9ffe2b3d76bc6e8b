//! Noisy GHZ preparations written as classical mixtures of stabilizer
//! states.
//!
//! Global Pauli-Z noise is already such a mixture. The Clifford-twirled
//! rotation `exp(i theta Z_1)` is the depolarizing channel
//! `alpha * rho + (1 - alpha) * I / d` with
//! `alpha = (d^2 cos^2 theta - 1) / (d^2 - 1)`; writing `I / d` as the
//! uniform average of `P rho P` over all `d^2` Paulis gives weight
//! `cos^2 theta` to the clean state and `sin^2 theta / (d^2 - 1)` to each
//! non-identity Pauli applied to it.
//!
//! For even `n`, `Z^n` stabilizes GHZ, so global Pauli-Z noise leaves the
//! fidelity at 1.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{dimension, Real};
use crate::stabilizer::{random_nonidentity_pauli, PauliString, StabilizerState};

/// Largest register for which [`NoiseModel::branches`] enumerates Paulis.
pub const MAX_ENUMERATED_QUBITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum NoiseChannel<T> {
    Noiseless,
    /// `Z^n` applied with probability `p`.
    PauliZGlobal { p: T },
    /// Clifford twirl of `exp(i theta Z_1)`.
    CliffordTwirl { theta: T },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    pub qubits: usize,
    pub channel: NoiseChannel<T>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchLabel {
    Clean,
    AllZ,
    Pauli(PauliString),
}

/// One stabilizer component of the mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparationBranch<T> {
    pub label: BranchLabel,
    pub weight: T,
}

impl<T: Real> PreparationBranch<T> {
    /// GHZ state with this branch's Pauli applied.
    pub fn state(&self, n: usize) -> Result<StabilizerState> {
        let mut s = StabilizerState::ghz(n)?;
        self.apply_to(&mut s)?;
        Ok(s)
    }

    pub fn apply_to(&self, state: &mut StabilizerState) -> Result<()> {
        match &self.label {
            BranchLabel::Clean => Ok(()),
            BranchLabel::AllZ => state.apply_pauli(&PauliString::all_z(state.num_qubits())),
            BranchLabel::Pauli(p) => state.apply_pauli(p),
        }
    }
}

impl<T: Real> NoiseModel<T> {
    pub fn new(qubits: usize, channel: NoiseChannel<T>) -> Result<Self> {
        if qubits == 0 {
            return Err(invalid("noise model needs at least one qubit"));
        }
        match channel {
            NoiseChannel::Noiseless => {}
            NoiseChannel::PauliZGlobal { p } => {
                if !(p >= T::zero() && p <= T::one()) {
                    return Err(invalid(format!("Pauli-Z probability must lie in [0, 1], got {p}")));
                }
            }
            NoiseChannel::CliffordTwirl { theta } => {
                if !(theta >= T::zero() && theta < T::lit(TAU)) {
                    return Err(invalid(format!("twirl angle must lie in [0, 2pi), got {theta}")));
                }
            }
        }
        Ok(Self { qubits, channel })
    }

    pub fn noiseless(qubits: usize) -> Result<Self> {
        Self::new(qubits, NoiseChannel::Noiseless)
    }

    pub fn pauli_z(qubits: usize, p: T) -> Result<Self> {
        Self::new(qubits, NoiseChannel::PauliZGlobal { p })
    }

    pub fn twirl(qubits: usize, theta: T) -> Result<Self> {
        Self::new(qubits, NoiseChannel::CliffordTwirl { theta })
    }

    /// Depolarizing strength `alpha(theta)` of the twirl; `None` for other channels.
    pub fn alpha(&self) -> Option<T> {
        match self.channel {
            NoiseChannel::CliffordTwirl { theta } => {
                let d2 = dimension::<T>(2 * self.qubits);
                let c = theta.cos();
                Some((d2 * c * c - T::one()) / (d2 - T::one()))
            }
            _ => None,
        }
    }

    /// Weight of the unmodified GHZ branch.
    pub fn clean_weight(&self) -> T {
        match self.channel {
            NoiseChannel::Noiseless => T::one(),
            NoiseChannel::PauliZGlobal { p } => T::one() - p,
            NoiseChannel::CliffordTwirl { theta } => theta.cos().powi(2),
        }
    }

    /// Weight of each individual non-clean branch.
    pub fn corrupted_weight(&self) -> T {
        match self.channel {
            NoiseChannel::Noiseless => T::zero(),
            NoiseChannel::PauliZGlobal { p } => p,
            NoiseChannel::CliffordTwirl { theta } => {
                theta.sin().powi(2) / (dimension::<T>(2 * self.qubits) - T::one())
            }
        }
    }

    /// `<GHZ| rho |GHZ>`.
    pub fn true_fidelity(&self) -> T {
        match self.channel {
            NoiseChannel::Noiseless => T::one(),
            NoiseChannel::PauliZGlobal { p } => {
                if self.qubits.is_multiple_of(2) {
                    T::one()
                } else {
                    T::one() - p
                }
            }
            NoiseChannel::CliffordTwirl { theta } => {
                // Only the d Paulis in the GHZ stabilizer group keep the overlap.
                let d = dimension::<T>(self.qubits);
                theta.cos().powi(2) + theta.sin().powi(2) / (d + T::one())
            }
        }
    }

    pub fn sample_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> PreparationBranch<T> {
        let u = T::lit(rng.random::<f64>());
        match self.channel {
            NoiseChannel::Noiseless => PreparationBranch {
                label: BranchLabel::Clean,
                weight: T::one(),
            },
            NoiseChannel::PauliZGlobal { p } => {
                if u < p {
                    PreparationBranch {
                        label: BranchLabel::AllZ,
                        weight: p,
                    }
                } else {
                    PreparationBranch {
                        label: BranchLabel::Clean,
                        weight: T::one() - p,
                    }
                }
            }
            NoiseChannel::CliffordTwirl { .. } => {
                let clean = self.clean_weight();
                if u < clean {
                    PreparationBranch {
                        label: BranchLabel::Clean,
                        weight: clean,
                    }
                } else {
                    PreparationBranch {
                        label: BranchLabel::Pauli(random_nonidentity_pauli(self.qubits, rng)),
                        weight: self.corrupted_weight(),
                    }
                }
            }
        }
    }

    /// Every branch with its weight; the twirl enumerates all `4^n - 1` Paulis.
    pub fn branches(&self) -> Result<Vec<PreparationBranch<T>>> {
        let n = self.qubits;
        let mut out = vec![PreparationBranch {
            label: BranchLabel::Clean,
            weight: self.clean_weight(),
        }];
        match self.channel {
            NoiseChannel::Noiseless => {}
            NoiseChannel::PauliZGlobal { p } => out.push(PreparationBranch {
                label: BranchLabel::AllZ,
                weight: p,
            }),
            NoiseChannel::CliffordTwirl { .. } => {
                if n > MAX_ENUMERATED_QUBITS {
                    return Err(Error::TooLarge {
                        what: "enumerated Pauli register",
                        value: n,
                        limit: MAX_ENUMERATED_QUBITS,
                    });
                }
                let w = self.corrupted_weight();
                for code in 1u64..(1u64 << (2 * n)) {
                    let x = code & ((1 << n) - 1);
                    let z = code >> n;
                    let p = PauliString::from_masks(n, vec![x], vec![z], Default::default())?;
                    out.push(PreparationBranch {
                        label: BranchLabel::Pauli(p),
                        weight: w,
                    });
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng_from;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn validation() {
        assert!(NoiseModel::pauli_z(3, 1.2f64).is_err());
        assert!(NoiseModel::twirl(3, 7.0f64).is_err());
        assert!(NoiseModel::twirl(3, -0.1f64).is_err());
        assert!(NoiseModel::<f64>::noiseless(0).is_err());
    }

    #[test]
    fn degenerate_samples() {
        let mut rng = rng_from(5);
        let clean = NoiseModel::pauli_z(9, 0.0f64).unwrap();
        let flipped = NoiseModel::pauli_z(9, 1.0f64).unwrap();
        let still = NoiseModel::twirl(8, 0.0f64).unwrap();
        assert_eq!(still.alpha(), Some(1.0));
        for _ in 0..1000 {
            assert_eq!(clean.sample_branch(&mut rng).label, BranchLabel::Clean);
            assert_eq!(flipped.sample_branch(&mut rng).label, BranchLabel::AllZ);
            assert_eq!(still.sample_branch(&mut rng).label, BranchLabel::Clean);
        }
    }

    #[test]
    fn twirl_weights_at_quarter_turn() {
        let m = NoiseModel::twirl(8, FRAC_PI_2).unwrap();
        let d2 = 65536.0f64;
        let alpha = m.alpha().unwrap();
        assert!((alpha + 1.0 / (d2 - 1.0)).abs() < 1e-15);
        assert!(m.clean_weight() < 1e-30);
        assert!((m.corrupted_weight() - (1.0 - alpha) / d2).abs() < 1e-18);
        assert!((m.true_fidelity() - 1.0 / 257.0).abs() < 1e-15);
        let mut rng = rng_from(1);
        for _ in 0..100 {
            assert!(matches!(m.sample_branch(&mut rng).label, BranchLabel::Pauli(_)));
        }
    }

    #[test]
    fn fidelity_matches_alpha_form() {
        for n in 1..10 {
            let d = (1u64 << n) as f64;
            for k in 0..63 {
                let theta = k as f64 * 0.1;
                let m = NoiseModel::twirl(n, theta).unwrap();
                let a = m.alpha().unwrap();
                assert!((m.true_fidelity() - (a + (1.0 - a) / d)).abs() < 1e-12);
                assert!(m.clean_weight() >= 0.0 && m.corrupted_weight() >= 0.0);
            }
        }
    }

    #[test]
    fn pauli_z_fidelity() {
        assert!((NoiseModel::pauli_z(9, 0.3f64).unwrap().true_fidelity() - 0.7).abs() < 1e-15);
        assert_eq!(NoiseModel::pauli_z(8, 0.3f64).unwrap().true_fidelity(), 1.0);
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=4 {
            for &theta in &[0.0, 0.3, 1.0, FRAC_PI_2, 3.0, 5.5] {
                let m = NoiseModel::twirl(n, theta).unwrap();
                let total: f64 = m.branches().unwrap().iter().map(|b| b.weight).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
            let total: f64 = NoiseModel::pauli_z(n, 0.4).unwrap().branches().unwrap().iter().map(|b| b.weight).sum();
            assert!((total - 1.0).abs() < 1e-15);
        }
        assert!(NoiseModel::twirl(9, 1.0f64).unwrap().branches().is_err());
    }

    #[test]
    fn single_precision_model() {
        let m = NoiseModel::twirl(8, 1.5707964f32).unwrap();
        assert!((m.true_fidelity() - 1.0 / 257.0).abs() < 1e-6);
    }

    #[cfg(feature = "oracle")]
    mod dense {
        use super::*;
        use crate::stabilizer::oracle::{clifford_unitary, ghz_vector, statevector, CMatrix, CVector};
        use crate::stabilizer::CliffordOp;
        use num_complex::Complex64;

        fn projector(v: &CVector) -> CMatrix {
            v * v.adjoint()
        }

        fn mixture(model: &NoiseModel<f64>) -> CMatrix {
            let d = 1usize << model.qubits;
            let mut rho = CMatrix::zeros(d, d);
            for b in model.branches().unwrap() {
                let v = statevector(&b.state(model.qubits).unwrap()).unwrap();
                rho += projector(&v) * Complex64::new(b.weight, 0.0);
            }
            rho
        }

        fn op_norm(m: &CMatrix) -> f64 {
            m.clone()
                .symmetric_eigenvalues()
                .iter()
                .fold(0.0f64, |acc, &e| acc.max(e.abs()))
        }

        #[test]
        fn pauli_z_mixture_is_the_channel() {
            for n in 1..=4 {
                let p = 0.35;
                let model = NoiseModel::pauli_z(n, p).unwrap();
                let ghz = ghz_vector(n);
                let zall = crate::stabilizer::oracle::pauli_matrix(&PauliString::all_z(n));
                let direct = projector(&ghz) * Complex64::new(1.0 - p, 0.0)
                    + &zall * projector(&ghz) * zall.adjoint() * Complex64::new(p, 0.0);
                let rho = mixture(&model);
                assert!(op_norm(&(&rho - &direct)) < 1e-12);
                let f = (ghz.adjoint() * &rho * &ghz)[(0, 0)].re;
                assert!((f - model.true_fidelity()).abs() < 1e-12);
            }
        }

        #[test]
        fn twirl_mixture_is_depolarizing() {
            for n in 1..=4 {
                let d = 1usize << n;
                for &theta in &[0.4, 1.1, FRAC_PI_2, 2.5] {
                    let model = NoiseModel::twirl(n, theta).unwrap();
                    let a = model.alpha().unwrap();
                    let ghz = ghz_vector(n);
                    let direct = projector(&ghz) * Complex64::new(a, 0.0)
                        + CMatrix::identity(d, d) * Complex64::new((1.0 - a) / d as f64, 0.0);
                    let rho = mixture(&model);
                    assert!(op_norm(&(&rho - &direct)) < 1e-12);
                    let f = (ghz.adjoint() * &rho * &ghz)[(0, 0)].re;
                    assert!((f - model.true_fidelity()).abs() < 1e-12);
                }
            }
        }

        /// Average `C^dag U C |GHZ><GHZ| C^dag U^dag C` over sampled Cliffords,
        /// with `U = exp(i theta Z_1)` applied as a dense diagonal.
        fn monte_carlo_twirl(n: usize, theta: f64, samples: usize, seed: u64) -> CMatrix {
            let d = 1usize << n;
            let ghz = ghz_vector(n);
            let mut rng = rng_from(seed);
            let mut acc = CMatrix::zeros(d, d);
            for _ in 0..samples {
                let c = CliffordOp::random(n, &mut rng).unwrap();
                let u = clifford_unitary(&c).unwrap();
                let mut w = &u * &ghz;
                for j in 0..d {
                    let phase = if j & 1 == 0 { theta } else { -theta };
                    w[j] *= Complex64::from_polar(1.0, phase);
                }
                let w = u.adjoint() * w;
                acc += projector(&w);
            }
            acc / Complex64::new(samples as f64, 0.0)
        }

        #[test]
        fn twirl_mixture_matches_sampled_channel() {
            for &(n, theta) in &[(2usize, FRAC_PI_2), (3, 0.9), (4, FRAC_PI_2)] {
                let model = NoiseModel::twirl(n, theta).unwrap();
                let mc = monte_carlo_twirl(n, theta, 100_000, 17 + n as u64);
                let gap = op_norm(&(&mc - &mixture(&model)));
                assert!(gap <= 0.01, "n={n} theta={theta}: operator-norm gap {gap}");
            }
        }
    }
}
