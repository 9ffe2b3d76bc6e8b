//! Command-line front end.
//!
//! Subcommands `run`, `sweep`, `mscaling`, `bounds` and `histogram` write
//! JSON (and, where tabular, CSV with the fixed headers below) into the
//! output directory. Exit codes: 0 success, 1 runtime failure, 2 usage or
//! configuration error.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{corollary_plan, proposition4_plan};
use crate::error::Error;
use crate::protocol::{
    bob_phase, m_scaling_experiment, run_ensemble, run_protocol, with_workers, EnsembleResult, DEFAULT_SEED,
};
use crate::seeds::{rng_at, BOB};
use crate::stats::{Histogram, PowerLawFit};
use crate::svg::{Plot, Series};
pub use config::{parse_number, RecordExport, Settings, SweepParam};

pub const SWEEP_HEADER: [&str; 5] = ["param", "true_fidelity", "est_mean", "est_std", "reps"];
pub const MSCALING_HEADER: [&str; 3] = ["n", "d", "m_selected"];
pub const MSCALING_GRID_HEADER: [&str; 6] = ["n", "m", "mean", "std", "sem", "inside"];
pub const ESTIMATES_HEADER: [&str; 2] = ["rep", "estimate"];
pub const HISTOGRAM_HEADER: [&str; 3] = ["bin_lo", "bin_hi", "count"];

/// Smallest ensemble accepted by `histogram`.
pub const MIN_HISTOGRAM_REPETITIONS: usize = 100;

#[derive(Parser, Debug)]
#[command(name = "shadowqae", version, about = "Fidelity estimation with classical shadows and amplitude estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (flat key = value, sections [noise] and [experiment]).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. --set noise.p=0.25 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Master seed.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (defaults to all cores; never affects results).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Also write an SVG plot.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// One protocol execution.
    Run,
    /// Ensemble means across a grid of noise strengths.
    Sweep,
    /// Iteration count needed for the target accuracy, against dimension.
    Mscaling,
    /// Resource plans for a target accuracy and confidence.
    Bounds {
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        qubits: Option<usize>,
    },
    /// Distribution of single estimates over many repetitions.
    Histogram,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Sweep => "sweep",
            Command::Mscaling => "mscaling",
            Command::Bounds { .. } => "bounds",
            Command::Histogram => "histogram",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub settings: Settings,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub svg: bool,
}

impl CliConfig {
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        if let Some(path) = &cli.config {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            settings.apply_text(&text).map_err(usage)?;
        }
        for kv in &cli.overrides {
            settings.apply_override(kv).map_err(usage)?;
        }
        Ok(Self {
            command: cli.command,
            settings,
            seed: cli.seed,
            out: cli.out,
            workers: cli.workers,
            svg: cli.svg,
        })
    }

    /// Echo written into every JSON result.
    pub fn echo(&self) -> Value {
        json!({
            "command": self.command.name(),
            "seed": self.seed,
            "settings": self.settings.echo_json(),
        })
    }

    /// Settings and seed recovered from [`CliConfig::echo`].
    pub fn from_echo(echo: &Value) -> Result<(String, u64, Settings), Error> {
        let command = echo["command"]
            .as_str()
            .ok_or_else(|| crate::error::invalid("echo lacks a command"))?
            .to_string();
        let seed = echo["seed"]
            .as_u64()
            .ok_or_else(|| crate::error::invalid("echo lacks a seed"))?;
        Ok((command, seed, Settings::from_echo(&echo["settings"])?))
    }
}

/// Parse arguments and execute; returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match CliConfig::resolve(cli).and_then(|c| execute(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(cfg: &CliConfig) -> Result<(), CliError> {
    let started = Instant::now();
    match &cfg.command {
        Command::Run => cmd_run(cfg, started),
        Command::Sweep => cmd_sweep(cfg, started),
        Command::Mscaling => cmd_mscaling(cfg, started),
        Command::Bounds { epsilon, delta, qubits } => cmd_bounds(cfg, epsilon, delta, *qubits),
        Command::Histogram => cmd_histogram(cfg, started),
    }
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(runtime)?;
    fs::write(path, text + "\n").map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(runtime)?;
    w.write_record(header).map_err(runtime)?;
    for r in rows {
        w.write_record(r).map_err(runtime)?;
    }
    w.flush().map_err(runtime)
}

fn pooled<T: Send>(cfg: &CliConfig, f: impl FnOnce() -> crate::Result<T> + Send) -> Result<T, CliError> {
    with_workers(cfg.workers, f).map_err(usage)?.map_err(runtime)
}

fn cmd_run(cfg: &CliConfig, started: Instant) -> Result<(), CliError> {
    let pc = cfg.settings.protocol(cfg.seed);
    pc.validate().map_err(usage)?;
    prepare_out(&cfg.out)?;
    let est = pooled(cfg, || run_protocol(&pc))?;
    println!("estimate {} (true fidelity {})", est.estimate, est.true_fidelity);
    if cfg.settings.records != RecordExport::None {
        let tableaus = cfg.settings.records == RecordExport::Tableaus;
        let noise = pc.noise_model().map_err(usage)?;
        let all = (0..pc.partitions as u64)
            .map(|j| {
                let recs = bob_phase(&noise, pc.snapshots, &mut rng_at(pc.master_seed, &[BOB, j]))?;
                Ok(recs.iter().map(|r| r.export(tableaus)).collect::<Vec<_>>())
            })
            .collect::<crate::Result<Vec<_>>>()
            .map_err(runtime)?;
        write_json(&cfg.out.join("records.json"), &all)?;
    }
    let doc = json!({
        "estimate": est.estimate,
        "run_estimates": est.run_estimates,
        "aggregation": est.aggregation,
        "true_fidelity": est.true_fidelity,
        "config": cfg.echo(),
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&cfg.out.join("run.json"), &doc)
}

fn cmd_sweep(cfg: &CliConfig, started: Instant) -> Result<(), CliError> {
    let s = &cfg.settings;
    if s.values.is_empty() {
        return Err(usage("experiment.values is empty; the sweep needs at least one value"));
    }
    let configs: Vec<_> = s.values.iter().map(|&v| s.sweep_point(v, cfg.seed)).collect();
    for c in &configs {
        c.validate().map_err(usage)?;
    }
    if s.repetitions < 2 {
        return Err(usage("experiment.repetitions must be at least 2"));
    }
    prepare_out(&cfg.out)?;
    let results: Vec<EnsembleResult> = pooled(cfg, || {
        configs.iter().map(|c| run_ensemble(c, s.repetitions)).collect()
    })?;
    let rows: Vec<Vec<String>> = s
        .values
        .iter()
        .zip(&results)
        .map(|(v, r)| {
            vec![
                v.to_string(),
                r.true_fidelity.to_string(),
                r.mean.to_string(),
                r.std.to_string(),
                r.repetitions.to_string(),
            ]
        })
        .collect();
    write_csv(&cfg.out.join("sweep.csv"), &SWEEP_HEADER, &rows)?;
    for (v, r) in s.values.iter().zip(&results) {
        println!("{} = {v}: mean {:.4} +/- {:.4}, true {:.4}", s.sweep.label(), r.mean, r.std, r.true_fidelity);
    }
    if cfg.svg {
        let xs = s.values.clone();
        let plot = Plot {
            title: format!("Fidelity estimates, n = {}", s.qubits),
            x_label: s.sweep.label().to_string(),
            y_label: "fidelity".into(),
            series: vec![
                Series::Line {
                    xs: xs.clone(),
                    ys: results.iter().map(|r| r.true_fidelity).collect(),
                    dashed: true,
                    color: "gray",
                },
                Series::Points {
                    xs,
                    ys: results.iter().map(|r| r.mean).collect(),
                    errors: Some(results.iter().map(|r| r.std).collect()),
                    color: "black",
                },
            ],
            ..Default::default()
        };
        write_text(&cfg.out.join("sweep.svg"), &plot.render())?;
    }
    let doc = json!({
        "points": results.iter().zip(&s.values).map(|(r, v)| json!({
            "param": v,
            "true_fidelity": r.true_fidelity,
            "mean": r.mean,
            "std": r.std,
            "sem": r.sem,
            "gaussian_fit": r.gaussian_fit,
            "repetitions": r.repetitions,
        })).collect::<Vec<_>>(),
        "config": cfg.echo(),
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&cfg.out.join("sweep.json"), &doc)
}

fn cmd_mscaling(cfg: &CliConfig, started: Instant) -> Result<(), CliError> {
    let spec = cfg.settings.scaling(cfg.seed);
    spec.validate().map_err(usage)?;
    prepare_out(&cfg.out)?;
    let res = pooled(cfg, || m_scaling_experiment(&spec))?;
    let rows: Vec<Vec<String>> = res
        .points
        .iter()
        .map(|p| {
            vec![
                p.qubits.to_string(),
                p.dimension.to_string(),
                p.selected_iterations.map(|m| m.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(&cfg.out.join("mscaling.csv"), &MSCALING_HEADER, &rows)?;
    let grid_rows: Vec<Vec<String>> = res
        .points
        .iter()
        .flat_map(|p| {
            p.grid.iter().map(move |g| {
                vec![
                    p.qubits.to_string(),
                    g.iterations.to_string(),
                    g.mean.to_string(),
                    g.std.to_string(),
                    g.sem.to_string(),
                    g.inside.to_string(),
                ]
            })
        })
        .collect();
    write_csv(&cfg.out.join("mscaling_grid.csv"), &MSCALING_GRID_HEADER, &grid_rows)?;
    match &res.fit {
        Some(f) => println!(
            "fit M = {:.4} * d^{:.4}{}",
            f.alpha,
            f.beta,
            if res.degenerate { " (degenerate: all selections equal)" } else { "" }
        ),
        None => println!("fit impossible: fewer than 3 resolved qubit counts"),
    }
    if !res.unresolved.is_empty() {
        println!("unresolved qubit counts: {:?}", res.unresolved);
    }
    if cfg.svg {
        write_text(&cfg.out.join("mscaling.svg"), &scaling_plot(&res.points, res.fit.as_ref()))?;
    }
    let doc = json!({
        "result": res,
        "config": cfg.echo(),
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&cfg.out.join("mscaling.json"), &doc)?;
    if res.fit.is_none() {
        return Err(runtime("fewer than 3 qubit counts resolved; no fit possible"));
    }
    Ok(())
}

fn scaling_plot(points: &[crate::protocol::ScalingPoint], fit: Option<&PowerLawFit<f64>>) -> String {
    let resolved: Vec<_> = points.iter().filter(|p| p.selected_iterations.is_some()).collect();
    let xs: Vec<f64> = resolved.iter().map(|p| p.dimension).collect();
    let ys: Vec<f64> = resolved
        .iter()
        .map(|p| p.selected_iterations.unwrap_or(0) as f64)
        .collect();
    let mut series = vec![Series::Points {
        xs: xs.clone(),
        ys: ys.clone(),
        errors: None,
        color: "black",
    }];
    if let (Some(f), Some(&lo), Some(&hi)) = (fit, xs.first(), xs.last()) {
        series.push(Series::Line {
            xs: vec![lo, hi],
            ys: vec![f.eval(lo), f.eval(hi)],
            dashed: false,
            color: "blue",
        });
        // Reference line with slope one through the first point.
        series.push(Series::Line {
            xs: vec![lo, hi],
            ys: vec![ys[0], ys[0] * hi / lo],
            dashed: true,
            color: "red",
        });
    }
    Plot {
        title: "Iterations needed for the target accuracy".into(),
        x_label: "d".into(),
        y_label: "M".into(),
        log_x: true,
        log_y: true,
        series,
    }
    .render()
}

fn cmd_bounds(cfg: &CliConfig, epsilon: &str, delta: &str, qubits: Option<usize>) -> Result<(), CliError> {
    let eps = parse_number(epsilon).map_err(usage)?;
    let del = parse_number(delta).map_err(usage)?;
    let n = qubits.unwrap_or(cfg.settings.qubits);
    let plan = proposition4_plan(eps, del, n).map_err(usage)?;
    let corollary = corollary_plan(eps, del, n);
    println!("single-run plan (epsilon = {eps}, delta = {del}, n = {n})");
    println!("  {:<22}{}", "feasible", if plan.feasible { "yes" } else { "no" });
    println!("  {:<22}{}", "snapshots N_min", plan.n_min);
    println!("  {:<22}{:.4}", "snapshots N_max", plan.n_max_bound);
    println!("  {:<22}{}", "repeats K_min", plan.k_min);
    println!("  {:<22}{} (power of two {})", "iterations M_min", plan.m_min, plan.m_min_pow2);
    println!("  {:<22}{}", "Bob total", plan.n_total_bob);
    println!("  {:<22}{}", "Alice total", plan.n_total_alice);
    let corollary_json = match &corollary {
        Ok(c) => {
            println!("median-of-means plan");
            println!("  {:<22}{}", "partitions P", c.partitions);
            println!("  {:<22}{}", "snapshots N", c.snapshots);
            println!("  {:<22}{}", "repeats K", c.repeats);
            println!("  {:<22}{} (power of two {})", "iterations M", c.iterations, c.iterations_pow2);
            println!("  {:<22}{}", "Bob cost P*N", c.bob_cost);
            println!("  {:<22}{}", "Alice cost P*N*K*M", c.alice_cost);
            serde_json::to_value(c).map_err(runtime)?
        }
        Err(e) => {
            println!("median-of-means plan rejected: {e}");
            json!({ "rejected": e.to_string() })
        }
    };
    prepare_out(&cfg.out)?;
    let doc = json!({
        "proposition": plan,
        "median_of_means": corollary_json,
        "config": cfg.echo(),
    });
    write_json(&cfg.out.join("bounds.json"), &doc)
}

fn cmd_histogram(cfg: &CliConfig, started: Instant) -> Result<(), CliError> {
    let s = &cfg.settings;
    if s.repetitions < MIN_HISTOGRAM_REPETITIONS {
        return Err(usage(format!(
            "histogram needs experiment.repetitions >= {MIN_HISTOGRAM_REPETITIONS}, got {}",
            s.repetitions
        )));
    }
    if s.bins == 0 {
        return Err(usage("experiment.bins must be at least 1"));
    }
    let pc = s.protocol(cfg.seed);
    pc.validate().map_err(usage)?;
    prepare_out(&cfg.out)?;
    let ens = pooled(cfg, || run_ensemble(&pc, s.repetitions))?;
    let hist = Histogram::new(&ens.estimates, s.bins).map_err(runtime)?;
    let est_rows: Vec<Vec<String>> = ens
        .estimates
        .iter()
        .enumerate()
        .map(|(i, e)| vec![i.to_string(), e.to_string()])
        .collect();
    write_csv(&cfg.out.join("estimates.csv"), &ESTIMATES_HEADER, &est_rows)?;
    let hist_rows: Vec<Vec<String>> = (0..hist.counts.len())
        .map(|b| {
            let (lo, hi) = hist.edges(b);
            vec![lo.to_string(), hi.to_string(), hist.counts[b].to_string()]
        })
        .collect();
    write_csv(&cfg.out.join("histogram.csv"), &HISTOGRAM_HEADER, &hist_rows)?;
    println!(
        "gaussian fit: center {:.5}, width {:.5}; true fidelity {:.5}",
        ens.gaussian_fit.center, ens.gaussian_fit.width, ens.true_fidelity
    );
    if cfg.svg {
        let (lo, hi): (Vec<f64>, Vec<f64>) = (0..hist.counts.len()).map(|b| hist.edges(b)).unzip();
        let scale = ens.estimates.len() as f64 * hist.bin_width();
        let curve_x: Vec<f64> = (0..=100)
            .map(|i| hist.lo + (hist.hi - hist.lo) * i as f64 / 100.0)
            .collect();
        let curve_y = curve_x.iter().map(|&x| scale * ens.gaussian_fit.density(x)).collect();
        let top = hist.counts.iter().copied().max().unwrap_or(0) as f64;
        let plot = Plot {
            title: format!("{} estimates", ens.repetitions),
            x_label: "estimate".into(),
            y_label: "count".into(),
            series: vec![
                Series::Bars {
                    lo,
                    hi,
                    heights: hist.counts.iter().map(|&c| c as f64).collect(),
                    color: "steelblue",
                },
                Series::Line {
                    xs: curve_x,
                    ys: curve_y,
                    dashed: false,
                    color: "red",
                },
                Series::Line {
                    xs: vec![ens.true_fidelity, ens.true_fidelity],
                    ys: vec![0.0, top],
                    dashed: true,
                    color: "black",
                },
            ],
            ..Default::default()
        };
        write_text(&cfg.out.join("histogram.svg"), &plot.render())?;
    }
    let doc = json!({
        "gaussian_fit": ens.gaussian_fit,
        "mean": ens.mean,
        "std": ens.std,
        "true_fidelity": ens.true_fidelity,
        "repetitions": ens.repetitions,
        "bins": s.bins,
        "config": cfg.echo(),
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&cfg.out.join("histogram.json"), &doc)
}
