//! Small descriptive statistics used by the experiments.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimators::{mean, pairwise_sum};
use crate::scalar::Real;

/// Sample standard deviation (divisor `len - 1`).
pub fn sample_std<T: Real>(xs: &[T]) -> Result<T> {
    if xs.len() < 2 {
        return Err(invalid("standard deviation needs at least two values"));
    }
    let m = mean(xs)?;
    let sq: Vec<T> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    Ok((pairwise_sum(&sq) / T::from_usize_lossy(xs.len() - 1)).sqrt())
}

/// Normal distribution fitted by sample moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit<T> {
    pub center: T,
    pub width: T,
}

impl<T: Real> GaussianFit<T> {
    pub fn from_samples(xs: &[T]) -> Result<Self> {
        Ok(Self {
            center: mean(xs)?,
            width: sample_std(xs)?,
        })
    }

    pub fn density(&self, x: T) -> T {
        let z = (x - self.center) / self.width;
        (-(z * z) * T::lit(0.5)).exp() / (self.width * (T::lit(2.0) * T::PI()).sqrt())
    }
}

/// Skewness and excess kurtosis (population moments).
pub fn shape_moments<T: Real>(xs: &[T]) -> Result<(T, T)> {
    let m = mean(xs)?;
    let len = T::from_usize_lossy(xs.len());
    let c2: Vec<T> = xs.iter().map(|&x| (x - m).powi(2)).collect();
    let c3: Vec<T> = xs.iter().map(|&x| (x - m).powi(3)).collect();
    let c4: Vec<T> = xs.iter().map(|&x| (x - m).powi(4)).collect();
    let m2 = pairwise_sum(&c2) / len;
    if m2 <= T::zero() {
        return Err(invalid("degenerate sample has zero variance"));
    }
    let m3 = pairwise_sum(&c3) / len;
    let m4 = pairwise_sum(&c4) / len;
    Ok((m3 / m2.powf(T::lit(1.5)), m4 / (m2 * m2) - T::lit(3.0)))
}

/// Least-squares fit `y = intercept + slope * x`.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<(T, T)> {
    if xs.len() != ys.len() {
        return Err(crate::Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(invalid("linear fit needs at least two points"));
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let sxy: Vec<T> = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).collect();
    let sxx: Vec<T> = xs.iter().map(|&x| (x - mx) * (x - mx)).collect();
    let sxx = pairwise_sum(&sxx);
    if sxx <= T::zero() {
        return Err(invalid("linear fit needs distinct abscissae"));
    }
    let slope = pairwise_sum(&sxy) / sxx;
    Ok((my - slope * mx, slope))
}

/// Power law `y = alpha * x^beta` fitted on log-log axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> PowerLawFit<T> {
    pub fn fit(xs: &[T], ys: &[T]) -> Result<Self> {
        if xs.iter().chain(ys).any(|&v| !(v > T::zero())) {
            return Err(invalid("power-law fit needs positive data"));
        }
        let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
        let (c, beta) = linear_fit(&lx, &ly)?;
        Ok(Self { alpha: c.exp(), beta })
    }

    pub fn eval(&self, x: T) -> T {
        self.alpha * x.powf(self.beta)
    }
}

/// Equal-width histogram over `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    pub lo: T,
    pub hi: T,
    pub counts: Vec<usize>,
}

impl<T: Real> Histogram<T> {
    pub fn new(xs: &[T], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(invalid("histogram needs at least one bin"));
        }
        if xs.is_empty() {
            return Err(invalid("histogram of an empty sample"));
        }
        let lo = xs.iter().copied().fold(T::infinity(), T::min);
        let mut hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
        if hi <= lo {
            hi = lo + T::one();
        }
        let mut counts = vec![0; bins];
        let width = (hi - lo) / T::from_usize_lossy(bins);
        for &x in xs {
            let b = ((x - lo) / width).floor().to_usize().unwrap_or(0).min(bins - 1);
            counts[b] += 1;
        }
        Ok(Self { lo, hi, counts })
    }

    pub fn bin_width(&self) -> T {
        (self.hi - self.lo) / T::from_usize_lossy(self.counts.len())
    }

    pub fn edges(&self, bin: usize) -> (T, T) {
        let w = self.bin_width();
        let a = self.lo + w * T::from_usize_lossy(bin);
        (a, a + w)
    }

    /// Index of the most populated bin.
    pub fn mode_bin(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best
    }

    /// Counts rise to the mode and fall after it, tolerating dips that are
    /// within `slack` Poisson standard deviations of the running extreme.
    pub fn is_unimodal(&self, slack: f64) -> bool {
        let mode = self.mode_bin();
        let within = |run: usize, c: usize| {
            let run = run as f64;
            c as f64 + slack * run.max(1.0).sqrt() >= run
        };
        let mut peak = 0;
        for &c in &self.counts[..mode] {
            peak = peak.max(c);
            if !within(peak, c) {
                return false;
            }
        }
        let mut floor = usize::MAX;
        for &c in &self.counts[mode..] {
            floor = floor.min(c);
            if c as f64 > floor as f64 + slack * (floor as f64).max(1.0).sqrt() {
                return false;
            }
        }
        true
    }
}
