//! Medians, per-snapshot fidelity terms, the single-run estimator and the
//! aggregation of independent runs.
//!
//! Summation is pairwise with a fixed split, so results do not depend on
//! how the inputs were produced.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{dimension, Real};

const PAIRWISE_BLOCK: usize = 16;

/// Pairwise (cascade) sum with a fixed split order.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean<T: Real>(xs: &[T]) -> Result<T> {
    if xs.is_empty() {
        return Err(invalid("mean of an empty list"));
    }
    Ok(pairwise_sum(xs) / T::from_usize_lossy(xs.len()))
}

/// Median of a scratch buffer, reordering it. Even lengths average the two
/// middle values.
pub fn median_in_place<T: Real>(values: &mut [T]) -> Result<T> {
    if values.is_empty() {
        return Err(invalid("median of an empty list"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(invalid("median input contains NaN"));
    }
    let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("no NaN");
    let len = values.len();
    let k = len / 2;
    let (left, upper, _) = values.select_nth_unstable_by(k, cmp);
    let upper = *upper;
    if len % 2 == 1 {
        return Ok(upper);
    }
    let lower = left.iter().copied().fold(T::neg_infinity(), T::max);
    Ok((lower + upper) * T::lit(0.5))
}

pub fn median<T: Real>(values: &[T]) -> Result<T> {
    median_in_place(&mut values.to_vec())
}

/// `K` amplitude estimates obtained for one shadow record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSample<T> {
    pub index: usize,
    pub estimates: Vec<T>,
    pub median_a: T,
}

impl<T: Real> AmplitudeSample<T> {
    pub fn new(index: usize, estimates: Vec<T>) -> Result<Self> {
        if let Some(bad) = estimates.iter().find(|&&v| !(v >= T::zero() && v <= T::one())) {
            return Err(invalid(format!("amplitude estimate {bad} outside [0, 1]")));
        }
        let median_a = median(&estimates)?;
        Ok(Self {
            index,
            estimates,
            median_a,
        })
    }

    pub fn repeats(&self) -> usize {
        self.estimates.len()
    }
}

/// `(2^n + 1) * median_a - 1`, the scalar left of one classical snapshot.
pub fn snapshot_term<T: Real>(n: usize, median_a: T) -> T {
    (dimension::<T>(n) + T::one()) * median_a - T::one()
}

/// Single-run fidelity estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEstimate<T> {
    pub f_hat: T,
    pub qubits: usize,
    pub snapshots: usize,
    /// QAE iteration count; `None` when exact amplitudes were used.
    pub iterations: Option<usize>,
    pub repeats: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub terms: Option<Vec<T>>,
}

/// `f_hat = (2^n + 1) * mean(median_a) - 1` over `snapshots` samples.
pub fn run_estimator<T: Real>(
    samples: &[AmplitudeSample<T>],
    qubits: usize,
    snapshots: usize,
) -> Result<RunEstimate<T>> {
    if samples.len() != snapshots {
        return Err(Error::DimensionMismatch {
            expected: snapshots,
            actual: samples.len(),
        });
    }
    let medians: Vec<T> = samples.iter().map(|s| s.median_a).collect();
    let mut est = estimate_from_medians(&medians, qubits)?;
    est.repeats = samples.iter().map(|s| s.repeats()).max().unwrap_or(0);
    Ok(est)
}

/// Same estimator from bare per-record medians.
pub fn estimate_from_medians<T: Real>(medians: &[T], qubits: usize) -> Result<RunEstimate<T>> {
    let m = mean(medians)?;
    Ok(RunEstimate {
        f_hat: snapshot_term(qubits, m),
        qubits,
        snapshots: medians.len(),
        iterations: None,
        repeats: 1,
        terms: None,
    })
}

/// How independent run estimates are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    MedianOfMeans,
    Mean,
}

impl Aggregation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregation::MedianOfMeans => "median-of-means",
            Aggregation::Mean => "mean",
        }
    }
}

impl std::str::FromStr for Aggregation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median-of-means" => Ok(Aggregation::MedianOfMeans),
            "mean" => Ok(Aggregation::Mean),
            other => Err(invalid(format!(
                "aggregation must be median-of-means or mean, got {other:?}"
            ))),
        }
    }
}

/// Median over independent run estimates.
pub fn median_of_means<T: Real>(run_estimates: &[T]) -> Result<T> {
    median(run_estimates)
}

pub fn aggregate<T: Real>(mode: Aggregation, run_estimates: &[T]) -> Result<T> {
    match mode {
        Aggregation::MedianOfMeans => median_of_means(run_estimates),
        Aggregation::Mean => mean(run_estimates),
    }
}
