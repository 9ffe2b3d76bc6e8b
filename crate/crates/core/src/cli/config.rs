//! Flat `key = value` configuration with `[noise]` and `[experiment]`
//! sections. Section keys may also be written as `noise.p` or
//! `experiment.repetitions`, which is the form used by `--set` and by the
//! echo written into result files.
//!
//! Numbers accept products and quotients with `pi`, e.g. `pi/2` or
//! `0.25*pi`. Lists are comma separated.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use serde_json::Value;

use crate::error::{invalid, Result};
use crate::estimators::Aggregation;
use crate::noise::NoiseChannel;
use crate::protocol::{AmplitudeMode, ErrorBar, ProtocolConfig, ScalingSpec};
use crate::qae::DEFAULT_MASS_FLOOR;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    PauliZ,
    Twirl,
}

impl NoiseKind {
    fn as_str(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::PauliZ => "pauli-z",
            NoiseKind::Twirl => "twirl",
        }
    }
}

impl FromStr for NoiseKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NoiseKind::None),
            "pauli-z" => Ok(NoiseKind::PauliZ),
            "twirl" => Ok(NoiseKind::Twirl),
            other => Err(invalid(format!("noise.model must be none, pauli-z or twirl, got {other:?}"))),
        }
    }
}

/// Noise parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    P,
    Theta,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::P => "p",
            SweepParam::Theta => "theta",
        }
    }
}

impl FromStr for SweepParam {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p" => Ok(SweepParam::P),
            "theta" => Ok(SweepParam::Theta),
            other => Err(invalid(format!("experiment.sweep must be p or theta, got {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordExport {
    None,
    Seeds,
    Tableaus,
}

impl RecordExport {
    fn as_str(self) -> &'static str {
        match self {
            RecordExport::None => "none",
            RecordExport::Seeds => "seeds",
            RecordExport::Tableaus => "tableaus",
        }
    }
}

impl FromStr for RecordExport {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(RecordExport::None),
            "seeds" => Ok(RecordExport::Seeds),
            "tableaus" => Ok(RecordExport::Tableaus),
            other => Err(invalid(format!(
                "experiment.records must be none, seeds or tableaus, got {other:?}"
            ))),
        }
    }
}

/// Every tunable value of an invocation except the seed.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub qubits: usize,
    pub snapshots: usize,
    pub iterations: usize,
    pub repeats: usize,
    pub partitions: usize,
    pub amplitude_mode: AmplitudeMode,
    pub aggregation: Aggregation,
    pub mass_floor: f64,
    pub noise_model: NoiseKind,
    pub p: f64,
    pub theta: f64,
    pub repetitions: usize,
    pub sweep: SweepParam,
    pub values: Vec<f64>,
    pub qubit_values: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub accuracy: f64,
    pub error_bar: ErrorBar,
    pub bins: usize,
    pub records: RecordExport,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            qubits: 9,
            snapshots: 1000,
            iterations: 512,
            repeats: 10,
            partitions: 1,
            amplitude_mode: AmplitudeMode::Qae,
            aggregation: Aggregation::MedianOfMeans,
            mass_floor: DEFAULT_MASS_FLOOR,
            noise_model: NoiseKind::None,
            p: 0.0,
            theta: 0.0,
            repetitions: 100,
            sweep: SweepParam::P,
            values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            qubit_values: vec![4, 5, 6, 7, 8, 9],
            m_grid: (3..=12).map(|k| 1 << k).collect(),
            accuracy: 0.02,
            error_bar: ErrorBar::Sem,
            bins: 40,
            records: RecordExport::None,
        }
    }
}

/// Evaluate a number such as `0.5`, `pi`, `pi/2` or `3*pi/4`.
pub fn parse_number(text: &str) -> Result<f64> {
    let t = text.trim();
    if t.is_empty() {
        return Err(invalid("empty number"));
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = t;
    loop {
        let cut = rest.find(['*', '/']).unwrap_or(rest.len());
        let (tok, tail) = rest.split_at(cut);
        let tok = tok.trim();
        let v = match tok {
            "pi" => std::f64::consts::PI,
            "-pi" => -std::f64::consts::PI,
            _ => tok
                .parse::<f64>()
                .map_err(|_| invalid(format!("cannot parse number {text:?}")))?,
        };
        value = if op == '*' { value * v } else { value / v };
        if tail.is_empty() {
            break;
        }
        op = tail.chars().next().expect("operator");
        rest = &tail[1..];
    }
    if !value.is_finite() {
        return Err(invalid(format!("number {text:?} is not finite")));
    }
    Ok(value)
}

fn parse_count(key: &str, text: &str) -> Result<usize> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| invalid(format!("{key} must be a non-negative integer, got {text:?}")))
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(|s| item(s.trim())).collect()
}

fn join<T: Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl Settings {
    pub const KEYS: [&'static str; 20] = [
        "qubits",
        "snapshots",
        "iterations",
        "repeats",
        "partitions",
        "amplitude_mode",
        "aggregation",
        "mass_floor",
        "noise.model",
        "noise.p",
        "noise.theta",
        "experiment.repetitions",
        "experiment.sweep",
        "experiment.values",
        "experiment.qubit_values",
        "experiment.m_grid",
        "experiment.accuracy",
        "experiment.error_bar",
        "experiment.bins",
        "experiment.records",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "qubits" => self.qubits = parse_count(key, v)?,
            "snapshots" => self.snapshots = parse_count(key, v)?,
            "iterations" => self.iterations = parse_count(key, v)?,
            "repeats" => self.repeats = parse_count(key, v)?,
            "partitions" => self.partitions = parse_count(key, v)?,
            "amplitude_mode" => self.amplitude_mode = v.parse()?,
            "aggregation" => self.aggregation = v.parse()?,
            "mass_floor" => self.mass_floor = parse_number(v)?,
            "noise.model" => self.noise_model = v.parse()?,
            "noise.p" => self.p = parse_number(v)?,
            "noise.theta" => self.theta = parse_number(v)?,
            "experiment.repetitions" => self.repetitions = parse_count(key, v)?,
            "experiment.sweep" => self.sweep = v.parse()?,
            "experiment.values" => self.values = parse_list(v, parse_number)?,
            "experiment.qubit_values" => self.qubit_values = parse_list(v, |s| parse_count(key, s))?,
            "experiment.m_grid" => self.m_grid = parse_list(v, |s| parse_count(key, s))?,
            "experiment.accuracy" => self.accuracy = parse_number(v)?,
            "experiment.error_bar" => self.error_bar = v.parse()?,
            "experiment.bins" => self.bins = parse_count(key, v)?,
            "experiment.records" => self.records = v.parse()?,
            "seed" | "master_seed" => {
                return Err(invalid("the seed is set with --seed, not in the configuration"))
            }
            other => return Err(invalid(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Apply a configuration file's text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut section: Option<&str> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name.trim() {
                    "noise" => Some("noise"),
                    "experiment" => Some("experiment"),
                    other => {
                        return Err(invalid(format!("line {}: unknown section [{other}]", lineno + 1)))
                    }
                };
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key = value", lineno + 1)))?;
            let k = k.trim();
            let key = match section {
                Some(s) if !k.contains('.') => format!("{s}.{k}"),
                _ => k.to_string(),
            };
            self.set(&key, v)
                .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Apply a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| invalid(format!("override {kv:?} is not key=value")))?;
        self.set(k.trim(), v)
    }

    /// Canonical text of every key.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let vals = [
            self.qubits.to_string(),
            self.snapshots.to_string(),
            self.iterations.to_string(),
            self.repeats.to_string(),
            self.partitions.to_string(),
            self.amplitude_mode.as_str().to_string(),
            self.aggregation.as_str().to_string(),
            self.mass_floor.to_string(),
            self.noise_model.as_str().to_string(),
            self.p.to_string(),
            self.theta.to_string(),
            self.repetitions.to_string(),
            self.sweep.label().to_string(),
            join(&self.values),
            join(&self.qubit_values),
            join(&self.m_grid),
            self.accuracy.to_string(),
            self.error_bar.as_str().to_string(),
            self.bins.to_string(),
            self.records.as_str().to_string(),
        ];
        Self::KEYS.iter().map(|k| k.to_string()).zip(vals).collect()
    }

    pub fn echo_json(&self) -> Value {
        Value::Object(
            self.echo()
                .into_iter()
                .map(|(k, v)| (k, Value::String(v)))
                .collect(),
        )
    }

    /// Rebuild settings from an echo produced by [`Settings::echo_json`].
    pub fn from_echo(echo: &Value) -> Result<Self> {
        let map = echo
            .as_object()
            .ok_or_else(|| invalid("configuration echo must be a JSON object"))?;
        let mut s = Settings::default();
        for (k, v) in map {
            let text = v
                .as_str()
                .ok_or_else(|| invalid(format!("echo value for {k} must be a string")))?;
            s.set(k, text)?;
        }
        Ok(s)
    }

    pub fn channel(&self) -> NoiseChannel<f64> {
        match self.noise_model {
            NoiseKind::None => NoiseChannel::Noiseless,
            NoiseKind::PauliZ => NoiseChannel::PauliZGlobal { p: self.p },
            NoiseKind::Twirl => NoiseChannel::CliffordTwirl { theta: self.theta },
        }
    }

    pub fn protocol(&self, seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            qubits: self.qubits,
            snapshots: self.snapshots,
            iterations: self.iterations,
            repeats: self.repeats,
            partitions: self.partitions,
            noise: self.channel(),
            amplitude_mode: self.amplitude_mode,
            aggregation: self.aggregation,
            mass_floor: self.mass_floor,
            master_seed: seed,
        }
    }

    /// Protocol configuration for one sweep value.
    pub fn sweep_point(&self, value: f64, seed: u64) -> ProtocolConfig {
        let mut c = self.protocol(seed);
        c.noise = match self.sweep {
            SweepParam::P => NoiseChannel::PauliZGlobal { p: value },
            SweepParam::Theta => NoiseChannel::CliffordTwirl { theta: value },
        };
        c
    }

    pub fn scaling(&self, seed: u64) -> ScalingSpec {
        ScalingSpec {
            base: self.protocol(seed),
            qubit_values: self.qubit_values.clone(),
            m_grid: self.m_grid.clone(),
            accuracy: self.accuracy,
            error_bar: self.error_bar,
            repetitions: self.repetitions,
        }
    }
}
