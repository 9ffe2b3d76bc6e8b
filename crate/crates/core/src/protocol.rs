//! End-to-end protocol runs, ensembles, and the iteration-count scaling
//! study.
//!
//! One run: Bob draws `N` noisy GHZ preparations, rotates each by a fresh
//! uniform Clifford and measures; Alice computes the exact overlap of each
//! record with the rotated target, replaces it by the median of `K` sampled
//! amplitude-estimation outcomes (or keeps it exactly), and forms the
//! fidelity estimator. `P` such runs are aggregated.
//!
//! Seeds are derived from the master seed by index path (repetition,
//! party, partition, iteration count), so every output is a pure function
//! of the configuration and seed, independent of the worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{aggregate, estimate_from_medians, median_in_place, Aggregation, RunEstimate};
use crate::noise::{NoiseChannel, NoiseModel};
use crate::qae::{QaeGrid, QaeSampler, DEFAULT_MASS_FLOOR};
use crate::seeds::{derive, rng_at, rng_from, ALICE, BOB};
use crate::stabilizer::{BitString, CliffordOp, Dyadic, StabilizerState};
use crate::stats::{sample_std, GaussianFit, PowerLawFit};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

/// Largest register accepted by the protocol.
pub const MAX_QUBITS: usize = 512;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeMode {
    /// Sample amplitude-estimation outcomes from the exact distribution.
    #[default]
    Qae,
    /// Use the exact overlap (infinite iteration count).
    Exact,
}

impl AmplitudeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AmplitudeMode::Qae => "qae",
            AmplitudeMode::Exact => "exact",
        }
    }
}

impl std::str::FromStr for AmplitudeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qae" => Ok(AmplitudeMode::Qae),
            "exact" => Ok(AmplitudeMode::Exact),
            other => Err(invalid(format!("amplitude mode must be qae or exact, got {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub qubits: usize,
    /// Snapshots per run, `N`.
    pub snapshots: usize,
    /// Amplitude-estimation iterations, `M`.
    pub iterations: usize,
    /// Amplitude-estimation repeats per snapshot, `K`.
    pub repeats: usize,
    /// Independent runs aggregated into one estimate, `P`.
    pub partitions: usize,
    pub noise: NoiseChannel<f64>,
    pub amplitude_mode: AmplitudeMode,
    pub aggregation: Aggregation,
    pub mass_floor: f64,
    pub master_seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            qubits: 9,
            snapshots: 1000,
            iterations: 512,
            repeats: 10,
            partitions: 1,
            noise: NoiseChannel::Noiseless,
            amplitude_mode: AmplitudeMode::Qae,
            aggregation: Aggregation::MedianOfMeans,
            mass_floor: DEFAULT_MASS_FLOOR,
            master_seed: DEFAULT_SEED,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(invalid(format!("qubits must be in 1..={MAX_QUBITS}, got {}", self.qubits)));
        }
        for (name, v) in [
            ("snapshots", self.snapshots),
            ("repeats", self.repeats),
            ("partitions", self.partitions),
        ] {
            if v == 0 {
                return Err(invalid(format!("{name} must be at least 1")));
            }
        }
        if self.amplitude_mode == AmplitudeMode::Qae {
            QaeGrid::from_iterations(self.iterations)?;
        }
        if !(self.mass_floor > 0.0 && self.mass_floor <= 1.0) {
            return Err(invalid(format!("mass_floor must lie in (0, 1], got {}", self.mass_floor)));
        }
        self.noise_model()?;
        Ok(())
    }

    pub fn noise_model(&self) -> Result<NoiseModel<f64>> {
        NoiseModel::new(self.qubits, self.noise)
    }

    pub fn true_fidelity(&self) -> Result<f64> {
        Ok(self.noise_model()?.true_fidelity())
    }

    /// Iteration count as it enters seed paths (0 in exact mode).
    fn iteration_label(&self) -> u64 {
        match self.amplitude_mode {
            AmplitudeMode::Qae => self.iterations as u64,
            AmplitudeMode::Exact => 0,
        }
    }
}

/// One snapshot as sent from Bob to Alice.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowRecord {
    /// Seed from which `clifford` is regenerated.
    pub clifford_seed: u64,
    pub clifford: CliffordOp,
    pub outcome: BitString,
}

/// Serialized form of a record; the tableau is included only on request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowRecordExport {
    pub clifford_seed: u64,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clifford: Option<CliffordOp>,
}

impl ShadowRecord {
    pub fn regenerate(qubits: usize, clifford_seed: u64, outcome: BitString) -> Result<Self> {
        if outcome.len() != qubits {
            return Err(Error::DimensionMismatch {
                expected: qubits,
                actual: outcome.len(),
            });
        }
        Ok(Self {
            clifford_seed,
            clifford: CliffordOp::random(qubits, &mut rng_from(clifford_seed))?,
            outcome,
        })
    }

    pub fn export(&self, with_tableau: bool) -> ShadowRecordExport {
        ShadowRecordExport {
            clifford_seed: self.clifford_seed,
            outcome: self.outcome.to_string(),
            clifford: with_tableau.then(|| self.clifford.clone()),
        }
    }
}

/// Bob's classical shadow collection.
pub fn bob_phase<R: Rng + ?Sized>(
    noise: &NoiseModel<f64>,
    snapshots: usize,
    rng: &mut R,
) -> Result<Vec<ShadowRecord>> {
    let n = noise.qubits;
    let ghz = StabilizerState::ghz(n)?;
    let mut out = Vec::with_capacity(snapshots);
    for _ in 0..snapshots {
        let branch = noise.sample_branch(rng);
        let clifford_seed = rng.next_u64();
        let clifford = CliffordOp::random(n, &mut rng_from(clifford_seed))?;
        let mut state = ghz.clone();
        branch.apply_to(&mut state)?;
        state.apply_clifford(&clifford)?;
        let outcome = state.measure_all(rng);
        out.push(ShadowRecord {
            clifford_seed,
            clifford,
            outcome,
        });
    }
    Ok(out)
}

/// Exact overlaps `|<b|C|GHZ>|^2` for each record.
pub fn exact_amplitudes(records: &[ShadowRecord], qubits: usize) -> Result<Vec<Dyadic>> {
    let ghz = StabilizerState::ghz(qubits)?;
    records
        .iter()
        .map(|r| {
            let mut s = ghz.clone();
            s.apply_clifford(&r.clifford)?;
            s.amplitude_sq(&r.outcome)
        })
        .collect()
}

/// Samplers for every value an exact overlap can take, `0` and `2^-k`.
#[derive(Clone, Debug)]
pub struct QaeTable {
    grid: QaeGrid,
    zero: QaeSampler<f64>,
    powers: Vec<QaeSampler<f64>>,
}

impl QaeTable {
    pub fn new(qubits: usize, grid: QaeGrid, mass_floor: f64) -> Result<Self> {
        let zero = QaeSampler::for_amplitude(0.0, grid, mass_floor)?;
        let powers = (0..=qubits)
            .map(|k| QaeSampler::for_amplitude(Dyadic::InversePow2(k as u32).to_f64(), grid, mass_floor))
            .collect::<Result<_>>()?;
        Ok(Self { grid, zero, powers })
    }

    pub fn grid(&self) -> QaeGrid {
        self.grid
    }

    pub fn sampler(&self, a: Dyadic) -> Result<&QaeSampler<f64>> {
        match a {
            Dyadic::Zero => Ok(&self.zero),
            Dyadic::InversePow2(k) => self
                .powers
                .get(k as usize)
                .ok_or_else(|| invalid(format!("overlap 2^-{k} outside the table"))),
        }
    }
}

fn table_for(config: &ProtocolConfig) -> Result<Option<QaeTable>> {
    match config.amplitude_mode {
        AmplitudeMode::Exact => Ok(None),
        AmplitudeMode::Qae => Ok(Some(QaeTable::new(
            config.qubits,
            QaeGrid::from_iterations(config.iterations)?,
            config.mass_floor,
        )?)),
    }
}

/// Alice's estimator from exact overlaps: each overlap becomes the median of
/// `repeats` sampled estimates (or stays exact without a table).
pub fn estimate_from_amplitudes<R: Rng + ?Sized>(
    amplitudes: &[Dyadic],
    qubits: usize,
    repeats: usize,
    table: Option<&QaeTable>,
    rng: &mut R,
) -> Result<RunEstimate<f64>> {
    if repeats == 0 {
        return Err(invalid("repeats must be at least 1"));
    }
    let mut buf = vec![0.0f64; repeats];
    let medians = amplitudes
        .iter()
        .map(|&a| match table {
            None => Ok(a.to_f64()),
            Some(t) => {
                let s = t.sampler(a)?;
                for slot in buf.iter_mut() {
                    *slot = s.sample_estimate(rng);
                }
                median_in_place(&mut buf)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut est = estimate_from_medians(&medians, qubits)?;
    est.iterations = table.map(|t| t.grid().iterations());
    est.repeats = if table.is_some() { repeats } else { 1 };
    Ok(est)
}

/// Alice's processing of one batch of records.
pub fn alice_phase<R: Rng + ?Sized>(
    records: &[ShadowRecord],
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<RunEstimate<f64>> {
    if records.is_empty() {
        return Err(invalid("Alice needs at least one record"));
    }
    let table = table_for(config)?;
    let amps = exact_amplitudes(records, config.qubits)?;
    estimate_from_amplitudes(&amps, config.qubits, config.repeats, table.as_ref(), rng)
}

/// Aggregated estimate of one protocol execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub estimate: f64,
    pub run_estimates: Vec<f64>,
    pub aggregation: Aggregation,
    pub true_fidelity: f64,
}

fn run_seeded(config: &ProtocolConfig, seed: u64, table: Option<&QaeTable>) -> Result<FidelityEstimate> {
    let noise = config.noise_model()?;
    let runs = (0..config.partitions as u64)
        .map(|j| {
            let records = bob_phase(&noise, config.snapshots, &mut rng_at(seed, &[BOB, j]))?;
            let amps = exact_amplitudes(&records, config.qubits)?;
            let mut arng = rng_at(seed, &[ALICE, j, config.iteration_label()]);
            Ok(estimate_from_amplitudes(&amps, config.qubits, config.repeats, table, &mut arng)?.f_hat)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(FidelityEstimate {
        estimate: aggregate(config.aggregation, &runs)?,
        run_estimates: runs,
        aggregation: config.aggregation,
        true_fidelity: noise.true_fidelity(),
    })
}

/// One full protocol execution seeded by `config.master_seed`.
pub fn run_protocol(config: &ProtocolConfig) -> Result<FidelityEstimate> {
    config.validate()?;
    let table = table_for(config)?;
    run_seeded(config, config.master_seed, table.as_ref())
}

/// Seed of repetition `rep` of an ensemble.
pub fn repetition_seed(master: u64, rep: usize) -> u64 {
    derive(master, &[rep as u64])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub estimates: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// `std / sqrt(repetitions)`.
    pub sem: f64,
    pub gaussian_fit: GaussianFit<f64>,
    pub true_fidelity: f64,
    pub repetitions: usize,
    pub config: ProtocolConfig,
}

impl EnsembleResult {
    fn from_estimates(estimates: Vec<f64>, config: &ProtocolConfig) -> Result<Self> {
        let fit = GaussianFit::from_samples(&estimates)?;
        let std = sample_std(&estimates)?;
        let reps = estimates.len();
        Ok(Self {
            mean: fit.center,
            std,
            sem: std / (reps as f64).sqrt(),
            gaussian_fit: fit,
            true_fidelity: config.true_fidelity()?,
            repetitions: reps,
            estimates,
            config: config.clone(),
        })
    }
}

/// `repetitions` independently seeded protocol executions.
pub fn run_ensemble(config: &ProtocolConfig, repetitions: usize) -> Result<EnsembleResult> {
    config.validate()?;
    if repetitions < 2 {
        return Err(invalid("an ensemble needs at least 2 repetitions"));
    }
    let table = table_for(config)?;
    let estimates = (0..repetitions)
        .into_par_iter()
        .map(|r| Ok(run_seeded(config, repetition_seed(config.master_seed, r), table.as_ref())?.estimate))
        .collect::<Result<Vec<f64>>>()?;
    EnsembleResult::from_estimates(estimates, config)
}

/// Run `f` on a pool of `workers` threads (all available cores when `None`).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(invalid("worker count must be at least 1"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Width of the interval drawn around an ensemble mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorBar {
    /// Spread of single estimates.
    Std,
    /// Standard error of the ensemble mean.
    #[default]
    Sem,
}

impl ErrorBar {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorBar::Std => "std",
            ErrorBar::Sem => "sem",
        }
    }
}

impl std::str::FromStr for ErrorBar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std" => Ok(ErrorBar::Std),
            "sem" => Ok(ErrorBar::Sem),
            other => Err(invalid(format!("error bar must be std or sem, got {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    /// Template for every run; `qubits` and `iterations` are overridden.
    pub base: ProtocolConfig,
    pub qubit_values: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub accuracy: f64,
    pub error_bar: ErrorBar,
    pub repetitions: usize,
}

impl ScalingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.qubit_values.len() < 3 {
            return Err(invalid("the scaling fit needs at least 3 qubit counts"));
        }
        if self.m_grid.is_empty() {
            return Err(invalid("iteration grid is empty"));
        }
        for &m in &self.m_grid {
            QaeGrid::from_iterations(m)?;
        }
        if self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("iteration grid must be strictly ascending"));
        }
        if !(self.accuracy > 0.0) {
            return Err(invalid("accuracy must be positive"));
        }
        if self.repetitions < 2 {
            return Err(invalid("scaling ensembles need at least 2 repetitions"));
        }
        for &n in &self.qubit_values {
            let mut c = self.base.clone();
            c.qubits = n;
            c.iterations = self.m_grid[0];
            c.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub iterations: usize,
    pub mean: f64,
    pub std: f64,
    pub sem: f64,
    pub inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub qubits: usize,
    pub dimension: f64,
    pub true_fidelity: f64,
    pub selected_iterations: Option<usize>,
    pub grid: Vec<GridPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionCriterion {
    pub accuracy: f64,
    pub error_bar: ErrorBar,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub points: Vec<ScalingPoint>,
    pub fit: Option<PowerLawFit<f64>>,
    /// Every resolved qubit count selected the same iteration count.
    pub degenerate: bool,
    pub unresolved: Vec<usize>,
    pub criterion: SelectionCriterion,
    pub repetitions: usize,
}

pub const SELECTION_RULE: &str = "first grid value whose mean +/- error bar lies inside \
[F - accuracy, F + accuracy], with a strict majority of larger grid values also inside";

/// Index of the first grid value that is inside and is followed by a strict
/// majority of inside values (vacuously true at the end of the grid).
pub fn select_index(inside: &[bool]) -> Option<usize> {
    (0..inside.len()).find(|&i| {
        let later = inside.len() - i - 1;
        let ok = inside[i + 1..].iter().filter(|&&b| b).count();
        inside[i] && (later == 0 || 2 * ok > later)
    })
}

/// Per-(qubit count, repetition) estimates at every grid value. Bob's
/// records are shared across the grid; Alice's draws are seeded per value.
fn grid_estimates(base: &ProtocolConfig, m_grid: &[usize], repetitions: usize) -> Result<Vec<Vec<f64>>> {
    let noise = base.noise_model()?;
    let tables = match base.amplitude_mode {
        AmplitudeMode::Exact => None,
        AmplitudeMode::Qae => Some(
            m_grid
                .iter()
                .map(|&m| QaeTable::new(base.qubits, QaeGrid::from_iterations(m)?, base.mass_floor))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let seed = repetition_seed(base.master_seed, r);
            let amps = (0..base.partitions as u64)
                .map(|j| {
                    let records = bob_phase(&noise, base.snapshots, &mut rng_at(seed, &[BOB, j]))?;
                    exact_amplitudes(&records, base.qubits)
                })
                .collect::<Result<Vec<_>>>()?;
            let at = |m: u64, table: Option<&QaeTable>| -> Result<f64> {
                let runs = amps
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        let mut arng = rng_at(seed, &[ALICE, j as u64, m]);
                        Ok(estimate_from_amplitudes(a, base.qubits, base.repeats, table, &mut arng)?.f_hat)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                aggregate(base.aggregation, &runs)
            };
            match &tables {
                None => {
                    let v = at(0, None)?;
                    Ok(vec![v; m_grid.len()])
                }
                Some(ts) => m_grid
                    .iter()
                    .zip(ts)
                    .map(|(&m, t)| at(m as u64, Some(t)))
                    .collect(),
            }
        })
        .collect()
}

/// Iteration count needed to reach `accuracy`, for each qubit count, and a
/// power-law fit of that count against the dimension.
pub fn m_scaling_experiment(spec: &ScalingSpec) -> Result<ScalingResult> {
    spec.validate()?;
    let mut points = Vec::new();
    for &n in &spec.qubit_values {
        let mut base = spec.base.clone();
        base.qubits = n;
        base.iterations = spec.m_grid[0];
        let truth = base.true_fidelity()?;
        let per_rep = grid_estimates(&base, &spec.m_grid, spec.repetitions)?;
        let grid = spec
            .m_grid
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                let col: Vec<f64> = per_rep.iter().map(|row| row[k]).collect();
                let fit = GaussianFit::from_samples(&col)?;
                let sem = fit.width / (col.len() as f64).sqrt();
                let bar = match spec.error_bar {
                    ErrorBar::Std => fit.width,
                    ErrorBar::Sem => sem,
                };
                Ok(GridPoint {
                    iterations: m,
                    mean: fit.center,
                    std: fit.width,
                    sem,
                    inside: (fit.center - truth).abs() + bar <= spec.accuracy,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let inside: Vec<bool> = grid.iter().map(|g| g.inside).collect();
        points.push(ScalingPoint {
            qubits: n,
            dimension: (n as f64).exp2(),
            true_fidelity: truth,
            selected_iterations: select_index(&inside).map(|i| spec.m_grid[i]),
            grid,
        });
    }
    let resolved: Vec<&ScalingPoint> = points.iter().filter(|p| p.selected_iterations.is_some()).collect();
    let unresolved = points
        .iter()
        .filter(|p| p.selected_iterations.is_none())
        .map(|p| p.qubits)
        .collect();
    let fit = if resolved.len() >= 3 {
        let xs: Vec<f64> = resolved.iter().map(|p| p.dimension).collect();
        let ys: Vec<f64> = resolved
            .iter()
            .map(|p| p.selected_iterations.expect("resolved") as f64)
            .collect();
        Some(PowerLawFit::fit(&xs, &ys)?)
    } else {
        None
    };
    let degenerate = resolved
        .windows(2)
        .all(|w| w[0].selected_iterations == w[1].selected_iterations)
        && !resolved.is_empty();
    Ok(ScalingResult {
        points,
        fit,
        degenerate,
        unresolved,
        criterion: SelectionCriterion {
            accuracy: spec.accuracy,
            error_bar: spec.error_bar,
            rule: SELECTION_RULE.to_string(),
        },
        repetitions: spec.repetitions,
    })
}
