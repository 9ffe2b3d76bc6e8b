//! Phase-estimation amplitude estimation, simulated through its exact
//! outcome distribution.
//!
//! With `sin^2(theta) = a` and `M = 2^m` ancilla outcomes, outcome `y` has
//! probability `½ F(d(theta/pi, y/M)) + ½ F(d(1 - theta/pi, y/M))`, where
//! `F(x) = sin^2(M pi x) / (M^2 sin^2(pi x))` is the Fejér kernel and `d` is
//! the distance on the unit circle. The estimate reported for `y` is
//! `sin^2(pi y / M)`.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Real;

#[cfg(feature = "oracle")]
pub mod oracle;

/// Default retained probability mass when truncating a distribution.
pub const DEFAULT_MASS_FLOOR: f64 = 0.999;

/// Distances below this are treated as exact grid hits (kernel value 1).
pub const SINGULAR_TOLERANCE: f64 = 1e-15;

/// Largest supported ancilla count.
pub const MAX_ANCILLAS: u32 = 30;

/// Phase-estimation grid of `M = 2^m` outcomes, `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QaeGrid {
    ancillas: u32,
}

impl QaeGrid {
    pub fn new(ancillas: u32) -> Result<Self> {
        if ancillas == 0 || ancillas > MAX_ANCILLAS {
            return Err(invalid(format!(
                "ancilla count must be in 1..={MAX_ANCILLAS}, got {ancillas}"
            )));
        }
        Ok(Self { ancillas })
    }

    /// Grid with `iterations` outcomes; `iterations` must be a power of two, at least 2.
    pub fn from_iterations(iterations: usize) -> Result<Self> {
        if iterations < 2 || !iterations.is_power_of_two() {
            return Err(invalid(format!(
                "QAE iteration count M must be a power of two >= 2, got {iterations}"
            )));
        }
        Self::new(iterations.trailing_zeros())
    }

    pub fn ancillas(&self) -> u32 {
        self.ancillas
    }

    /// `M = 2^m`.
    pub fn iterations(&self) -> usize {
        1usize << self.ancillas
    }
}

/// Principal angle `theta in [0, pi/2]` with `sin^2(theta) = a`.
pub fn theta_from_amplitude<T: Real>(a: T) -> Result<T> {
    if !(a >= T::zero() && a <= T::one()) {
        return Err(invalid(format!("amplitude must lie in [0, 1], got {a}")));
    }
    Ok(a.sqrt().asin())
}

/// `min_p |p + w1 - w2|` over integers `p`.
pub fn grid_distance<T: Real>(w1: T, w2: T) -> T {
    let r = w1 - w2;
    (r - r.round()).abs()
}

fn fejer<T: Real>(dist: T, m: T) -> T {
    if dist < T::lit(SINGULAR_TOLERANCE) {
        return T::one();
    }
    let pi = T::PI();
    let num = (m * pi * dist).sin();
    let den = m * (pi * dist).sin();
    (num * num) / (den * den)
}

/// Estimate `sin^2(pi y / M)` reported for outcome `y`.
pub fn estimate_from_outcome<T: Real>(y: usize, grid: QaeGrid) -> Result<T> {
    let m = grid.iterations();
    if y >= m {
        return Err(invalid(format!("outcome {y} outside 0..{m}")));
    }
    let folded = y.min(m - y);
    let s = (T::PI() * T::from_usize_lossy(folded) / T::from_usize_lossy(m)).sin();
    Ok(s * s)
}

/// Outcome distribution of one amplitude-estimation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaeDistribution<T> {
    pub grid: QaeGrid,
    pub a: T,
    pub theta_a: T,
    /// Probability of each outcome `y in 0..M`.
    pub probs: Vec<T>,
    pub truncated: bool,
    /// Mass of the retained support before renormalization (1 when untruncated).
    pub kept_mass: T,
    /// Floor used for truncation, if any.
    pub mass_floor: Option<T>,
}

impl<T: Real> QaeDistribution<T> {
    pub fn iterations(&self) -> usize {
        self.grid.iterations()
    }

    pub fn total_mass(&self) -> T {
        crate::estimators::pairwise_sum(&self.probs)
    }

    /// Outcomes with nonzero probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&y| self.probs[y] > T::zero()).collect()
    }

    pub fn total_variation(&self, other: &QaeDistribution<T>) -> T {
        let s: T = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(&p, &q)| (p - q).abs())
            .sum();
        s * T::lit(0.5)
    }

    /// Probability that the estimate lands within `radius` of the true amplitude.
    pub fn mass_within(&self, radius: T) -> T {
        (0..self.probs.len())
            .filter(|&y| {
                let est: T = estimate_from_outcome(y, self.grid).expect("y on grid");
                (est - self.a).abs() <= radius
            })
            .map(|y| self.probs[y])
            .sum()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["y", "prob"])?;
        for (y, p) in self.probs.iter().enumerate() {
            out.write_record([y.to_string(), p.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Full (untruncated) closed-form outcome distribution for amplitude `a`.
pub fn outcome_distribution<T: Real>(a: T, grid: QaeGrid) -> Result<QaeDistribution<T>> {
    let theta = theta_from_amplitude(a)?;
    let m = grid.iterations();
    let mf = T::from_usize_lossy(m);
    let w1 = theta / T::PI();
    let w2 = T::one() - w1;
    let half = T::lit(0.5);
    let probs = (0..m)
        .map(|y| {
            let g = T::from_usize_lossy(y) / mf;
            half * fejer(grid_distance(w1, g), mf) + half * fejer(grid_distance(w2, g), mf)
        })
        .collect();
    Ok(QaeDistribution {
        grid,
        a,
        theta_a: theta,
        probs,
        truncated: false,
        kept_mass: T::one(),
        mass_floor: None,
    })
}

/// Keep the smallest set of most likely outcomes (ties broken by smaller
/// `y`) whose mass reaches `mass_floor`, and renormalize.
pub fn truncate_distribution<T: Real>(
    dist: &QaeDistribution<T>,
    mass_floor: T,
) -> Result<QaeDistribution<T>> {
    if !(mass_floor > T::zero() && mass_floor <= T::one()) {
        return Err(invalid(format!("mass floor must lie in (0, 1], got {mass_floor}")));
    }
    if dist.truncated {
        return Err(invalid("distribution is already truncated"));
    }
    let mut order: Vec<usize> = (0..dist.probs.len()).collect();
    order.sort_by(|&i, &j| {
        dist.probs[j]
            .partial_cmp(&dist.probs[i])
            .expect("probabilities are finite")
            .then(i.cmp(&j))
    });
    let mut kept = Vec::new();
    let mut mass = T::zero();
    for &y in &order {
        if mass >= mass_floor {
            break;
        }
        kept.push(y);
        mass = mass + dist.probs[y];
    }
    let mut probs = vec![T::zero(); dist.probs.len()];
    for &y in &kept {
        probs[y] = dist.probs[y] / mass;
    }
    Ok(QaeDistribution {
        grid: dist.grid,
        a: dist.a,
        theta_a: dist.theta_a,
        probs,
        truncated: true,
        kept_mass: mass,
        mass_floor: Some(mass_floor),
    })
}

/// Inverse-CDF sampler over the support of a distribution.
#[derive(Clone, Debug)]
pub struct QaeSampler<T> {
    grid: QaeGrid,
    outcomes: Vec<usize>,
    cdf: Vec<T>,
    estimates: Vec<T>,
}

impl<T: Real> QaeSampler<T> {
    pub fn new(dist: &QaeDistribution<T>) -> Result<Self> {
        let mut outcomes = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = T::zero();
        for (y, &p) in dist.probs.iter().enumerate() {
            if p > T::zero() {
                acc = acc + p;
                outcomes.push(y);
                cdf.push(acc);
            }
        }
        if outcomes.is_empty() {
            return Err(invalid("distribution has no support"));
        }
        let estimates = outcomes
            .iter()
            .map(|&y| estimate_from_outcome(y, dist.grid))
            .collect::<Result<_>>()?;
        Ok(Self {
            grid: dist.grid,
            outcomes,
            cdf,
            estimates,
        })
    }

    /// Truncated, renormalized sampler for amplitude `a`.
    pub fn for_amplitude(a: T, grid: QaeGrid, mass_floor: T) -> Result<Self> {
        let full = outcome_distribution(a, grid)?;
        Self::new(&truncate_distribution(&full, mass_floor)?)
    }

    pub fn grid(&self) -> QaeGrid {
        self.grid
    }

    fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("nonempty");
        let u = T::lit(rng.random::<f64>()) * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.outcomes[self.draw_index(rng)]
    }

    /// Draw an outcome and return its amplitude estimate.
    pub fn sample_estimate<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        self.estimates[self.draw_index(rng)]
    }
}

/// Draw one outcome `y` with probability `dist.probs[y]`.
pub fn sample_outcome<T: Real, R: Rng + ?Sized>(dist: &QaeDistribution<T>, rng: &mut R) -> Result<usize> {
    Ok(QaeSampler::new(dist)?.sample(rng))
}
