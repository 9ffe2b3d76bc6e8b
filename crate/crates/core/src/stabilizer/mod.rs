//! Stabilizer-state simulation: tableau states, Clifford operators with
//! uniform sampling, exact Born probabilities, and (behind the `oracle`
//! feature) dense statevector oracles.

mod bits;
mod clifford;
mod dyadic;
pub mod gf2;
mod pauli;
mod state;
mod tableau;

#[cfg(feature = "oracle")]
pub mod oracle;

pub use bits::BitString;
pub use clifford::{CliffordOp, CliffordRepr};
pub use dyadic::Dyadic;
pub use pauli::{Phase, PauliString};
pub use state::{StabilizerState, ZOutcome};

use rand::Rng;

use crate::error::Result;

pub fn ghz_state(n: usize) -> Result<StabilizerState> {
    StabilizerState::ghz(n)
}

pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordOp> {
    CliffordOp::random(n, rng)
}

/// Uniformly random non-identity `n`-qubit Pauli (sign `+`).
pub fn random_nonidentity_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    loop {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            p.set(q, rng.random(), rng.random());
        }
        if !p.is_identity() {
            return p;
        }
    }
}
