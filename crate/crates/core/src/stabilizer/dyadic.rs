use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Exact probability of the form `0` or `2^-k`, which is every Born
/// probability a stabilizer state assigns to a basis string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dyadic {
    Zero,
    /// `2^-k`
    InversePow2(u32),
}

impl Dyadic {
    pub const ONE: Dyadic = Dyadic::InversePow2(0);

    pub fn is_zero(self) -> bool {
        matches!(self, Dyadic::Zero)
    }

    /// Exponent `k` of `2^-k`, `None` for zero.
    pub fn exponent(self) -> Option<u32> {
        match self {
            Dyadic::Zero => None,
            Dyadic::InversePow2(k) => Some(k),
        }
    }

    pub fn halve(self) -> Dyadic {
        match self {
            Dyadic::Zero => Dyadic::Zero,
            Dyadic::InversePow2(k) => Dyadic::InversePow2(k + 1),
        }
    }

    pub fn to_real<T: Real>(self) -> T {
        match self {
            Dyadic::Zero => T::zero(),
            Dyadic::InversePow2(k) => T::lit(0.5).powi(k as i32),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.to_real()
    }
}
