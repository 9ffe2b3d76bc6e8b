//! Closed-form accuracy guarantees and resource plans.
//!
//! Thresholds are rounded up to integers. A threshold that lands within a
//! few ulps of an integer (for example `72 / 0.1^2`) is snapped to that
//! integer before the ceiling is taken.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{dimension, Real};

/// Largest `delta` accepted by [`corollary_plan`].
pub const COROLLARY_DELTA_LIMIT: f64 = 0.09;

/// Failure probability `1 - 8/pi^2` of a single amplitude-estimation run.
pub fn qae_failure_bound<T: Real>() -> T {
    T::one() - T::lit(8.0) / (T::PI() * T::PI())
}

/// `8/pi^2 - 1/2`, the margin by which one run beats a coin flip.
pub fn qae_success_margin<T: Real>() -> T {
    T::lit(8.0) / (T::PI() * T::PI()) - T::lit(0.5)
}

/// `1 / (2 (8/pi^2 - 1/2)^2)`, the prefactor of the repeat count.
pub fn repeat_prefactor<T: Real>() -> T {
    let g = qae_success_margin::<T>();
    T::one() / (T::lit(2.0) * g * g)
}

/// Ceiling that first snaps values within `T::snap_tolerance()` (relative)
/// of an integer.
pub fn snapped_ceil<T: Real>(x: T) -> Result<u64> {
    if !x.is_finite() {
        return Err(invalid(format!("threshold {x} is not finite")));
    }
    let r = x.round();
    let tol = T::snap_tolerance() * x.abs().max(T::one());
    let c = if (x - r).abs() <= tol { r } else { x.ceil() };
    let c = c.max(T::one());
    c.to_u64()
        .ok_or_else(|| invalid(format!("threshold {x} exceeds the integer range")))
}

fn check_unit_open<T: Real>(name: &str, v: T) -> Result<()> {
    if !(v > T::zero() && v < T::one()) {
        return Err(invalid(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

/// `2 pi sqrt(3 (d + 1)) / (6 eps / 13)^2`.
fn iteration_threshold<T: Real>(epsilon: T, qubits: usize) -> T {
    let d = dimension::<T>(qubits);
    let s = T::lit(6.0) * epsilon / T::lit(13.0);
    T::lit(2.0) * T::PI() * (T::lit(3.0) * (d + T::one())).sqrt() / (s * s)
}

/// Thresholds for a single run with `N` snapshots, `K` repeats and `M`
/// iterations to reach accuracy `epsilon` with failure probability `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourcePlan<T> {
    pub epsilon: T,
    pub delta: T,
    pub qubits: usize,
    pub m_min: u64,
    /// Smallest power of two not below `m_min`.
    pub m_min_pow2: u64,
    pub n_min: u64,
    /// Real-valued upper limit on the snapshot count.
    pub n_max_bound: T,
    pub n_max: u64,
    pub k_min: u64,
    pub feasible: bool,
    /// Bob's state preparations, `N`.
    pub n_total_bob: u64,
    /// Alice's iterations, `N K M` (saturating).
    pub n_total_alice: u64,
    /// `N + N K M` (saturating).
    pub n_total: u64,
}

pub fn proposition4_plan<T: Real>(epsilon: T, delta: T, qubits: usize) -> Result<ResourcePlan<T>> {
    check_unit_open("epsilon", epsilon)?;
    check_unit_open("delta", delta)?;
    if qubits == 0 {
        return Err(invalid("qubit count must be at least 1"));
    }
    let m_min = snapped_ceil(iteration_threshold(epsilon, qubits))?;
    let n_min = snapped_ceil(T::lit(24.0) / (epsilon * epsilon * delta))?;
    let ratio = T::lit(13.0) / T::lit(6.0);
    let n_max_bound = ratio.powi(4) * delta / (T::lit(12.0) * epsilon.powi(4));
    let feasible = T::from_u64(n_min).expect("u64 fits") <= n_max_bound;
    let n_max = n_max_bound.floor().to_u64().unwrap_or(u64::MAX);
    let k_arg = T::lit(4.0) * T::from_u64(n_min).expect("u64 fits") / delta;
    let k_min = snapped_ceil(k_arg.ln() * repeat_prefactor::<T>())?;
    let n_total_alice = n_min.saturating_mul(k_min).saturating_mul(m_min);
    Ok(ResourcePlan {
        epsilon,
        delta,
        qubits,
        m_min,
        m_min_pow2: m_min.checked_next_power_of_two().unwrap_or(u64::MAX),
        n_min,
        n_max_bound,
        n_max,
        k_min,
        feasible,
        n_total_bob: n_min,
        n_total_alice,
        n_total: n_min.saturating_add(n_total_alice),
    })
}

/// Median-of-means plan: `P` independent runs of `N` snapshots each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryPlan<T> {
    pub epsilon: T,
    pub delta: T,
    pub qubits: usize,
    pub partitions: u64,
    pub snapshots: u64,
    pub repeats: u64,
    pub iterations: u64,
    /// Smallest power of two not below `iterations`.
    pub iterations_pow2: u64,
    /// `P N` state preparations.
    pub bob_cost: u64,
    /// `P N K M` iterations (saturating).
    pub alice_cost: u64,
}

pub fn corollary_plan<T: Real>(epsilon: T, delta: T, qubits: usize) -> Result<CorollaryPlan<T>> {
    check_unit_open("epsilon", epsilon)?;
    if !(delta > T::zero() && delta < T::lit(COROLLARY_DELTA_LIMIT)) {
        return Err(invalid(format!(
            "delta must lie in (0, {COROLLARY_DELTA_LIMIT}) for the median-of-means plan, got {delta}"
        )));
    }
    if qubits == 0 {
        return Err(invalid("qubit count must be at least 1"));
    }
    let snapshots = snapped_ceil(T::lit(72.0) / (epsilon * epsilon))?;
    let partitions = snapped_ceil(T::lit(18.0) * delta.recip().ln())?;
    let twelve_n = T::lit(12.0) * T::from_u64(snapshots).expect("u64 fits");
    let repeats = snapped_ceil(twelve_n.ln() * repeat_prefactor::<T>())?;
    let iterations = snapped_ceil(iteration_threshold(epsilon, qubits))?;
    let bob_cost = partitions.saturating_mul(snapshots);
    Ok(CorollaryPlan {
        epsilon,
        delta,
        qubits,
        partitions,
        snapshots,
        repeats,
        iterations,
        iterations_pow2: iterations.checked_next_power_of_two().unwrap_or(u64::MAX),
        bob_cost,
        alice_cost: bob_cost.saturating_mul(repeats).saturating_mul(iterations),
    })
}

/// `2 pi sqrt(a (1 - a)) / M + pi^2 / M^2`.
pub fn qae_error_radius<T: Real>(a: T, iterations: usize) -> Result<T> {
    if !(a >= T::zero() && a <= T::one()) {
        return Err(invalid(format!("amplitude must lie in [0, 1], got {a}")));
    }
    if iterations < 2 {
        return Err(invalid("iteration count must be at least 2"));
    }
    let m = T::from_usize_lossy(iterations);
    let pi = T::PI();
    Ok(T::lit(2.0) * pi * (a * (T::one() - a)).sqrt() / m + pi * pi / (m * m))
}

/// Two-sided Hoeffding bound `2 exp(-2 eps^2 / (N w^2))` on the deviation
/// of a sum of `N` independent terms with range width `w`.
pub fn hoeffding_bound<T: Real>(count: usize, epsilon: T, range_width: T) -> Result<T> {
    if count == 0 {
        return Err(invalid("Hoeffding bound needs at least one term"));
    }
    if !(epsilon > T::zero()) || !(range_width > T::zero()) {
        return Err(invalid("epsilon and range width must be positive"));
    }
    let n = T::from_usize_lossy(count);
    let e = epsilon / range_width;
    Ok(T::lit(2.0) * (-(T::lit(2.0) * e * e) / n).exp())
}

/// `exp(-2 (1/2 - delta)^2 N)`: chance that the median of `N` samples fails
/// when each fails independently with probability at most `delta`.
pub fn median_concentration_bound<T: Real>(count: usize, delta: T) -> Result<T> {
    if count == 0 {
        return Err(invalid("median bound needs at least one sample"));
    }
    if !(delta > T::zero() && delta < T::lit(0.5)) {
        return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let g = T::lit(0.5) - delta;
    Ok((-(T::lit(2.0) * g * g) * T::from_usize_lossy(count)).exp())
}
