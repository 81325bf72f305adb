//! Run configuration and the experiment drivers behind the `rexq` binary.
//!
//! A configuration is a flat TOML table (see [`RunConfig`]); every key can be
//! overridden from the command line. Each driver writes UTF-8 CSV files with a
//! header row plus a `config.toml` echo into the output directory.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    aggregate_runs, chi_square_uniformity, diversity_extremes, RunRecord, RunSummary,
};
use crate::benchmarks::{Benchmark, Form};
use crate::gomodel::{self, GoObjective, GoTopology};
use crate::objective::ObjectiveHandle;
use crate::replica::{run_rex, run_rex_observed, run_single, RexParams, RunResult, SingleParams};
use crate::swarm::ScheduleParams;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed q values of the q-Gaussian single-swarm comparison tier.
pub const COMPARISON_Q_SET: [f64; 5] = [1.231, 1.414, 1.625, 1.866, 2.0];
pub const DEFAULT_AMPLITUDES: [f64; 5] = [0.01, 0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_K_LIST: [f64; 5] = [10.0, 1.0, 0.1, 0.01, 0.001];
pub const GO_OBJECTIVE: &str = "go12";
pub const GO_RESIDUES: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("cannot parse config: {0}")]
    Parse(String),

    #[error("{0}")]
    Core(#[from] crate::Error),

    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn config(key: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gsqpo,
    Qgsqpo,
    Rex,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gsqpo => "gsqpo",
            Algorithm::Qgsqpo => "qgsqpo",
            Algorithm::Rex => "rex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkForm {
    Published,
    Literature,
}

impl From<BenchmarkForm> for Form {
    fn from(f: BenchmarkForm) -> Form {
        match f {
            BenchmarkForm::Published => Form::Published,
            BenchmarkForm::Literature => Form::Literature,
        }
    }
}

/// Flat run configuration. Optional keys fall back to objective-dependent defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `ackley`, `griewank`, `rastrigin` or `go12`.
    pub objective: String,
    /// Search-space dimension; fixed to 36 for `go12`.
    pub dimension: Option<usize>,
    pub algorithm: Algorithm,
    pub particles: usize,
    /// Replica count; 5 for benchmarks, 6 for `go12`.
    pub replicas: Option<usize>,
    /// Fixed q for single-swarm runs.
    pub q: Option<f64>,
    pub q_max: f64,
    pub k: f64,
    pub g: f64,
    pub omega: f64,
    pub amplitude: f64,
    /// 1 for benchmarks, 10 for `go12`.
    pub exchange_interval: Option<u64>,
    /// Convergence threshold on the gap to the known optimum. `0` (and, for `go12`, leaving it unset)
    /// runs the full iteration budget.
    pub tol: Option<f64>,
    pub max_iterations: u64,
    pub seed: u64,
    pub output: PathBuf,
    pub benchmark_form: BenchmarkForm,
    pub contact_cutoff: f64,
    pub native_file: Option<PathBuf>,
    /// Number of consecutive seeds (starting at `seed`) for sweeps and comparisons.
    pub seeds: u64,
    pub k_list: Vec<f64>,
    pub d_list: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub q_set: Vec<f64>,
    /// Iteration stride of the fold scatter trace.
    pub sample_every: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            objective: "ackley".into(),
            dimension: None,
            algorithm: Algorithm::Rex,
            particles: 20,
            replicas: None,
            q: None,
            q_max: 3.0,
            k: 0.0005,
            g: 0.5,
            omega: 0.1,
            amplitude: 0.5,
            exchange_interval: None,
            tol: None,
            max_iterations: 50_000,
            seed: 1,
            output: PathBuf::from("out"),
            benchmark_form: BenchmarkForm::Published,
            contact_cutoff: gomodel::CONTACT_CUTOFF,
            native_file: None,
            seeds: 3,
            k_list: DEFAULT_K_LIST.to_vec(),
            d_list: vec![5, 10, 20, 50],
            amplitudes: DEFAULT_AMPLITUDES.to_vec(),
            q_set: COMPARISON_Q_SET.to_vec(),
            sample_every: 10,
        }
    }
}

const LIST_KEYS: [&str; 4] = ["k_list", "d_list", "amplitudes", "q_set"];

fn parse_override_value(key: &str, raw: &str) -> toml::Value {
    let raw = raw.trim();
    let text = if LIST_KEYS.contains(&key) && !raw.starts_with('[') {
        format!("[{raw}]")
    } else {
        raw.to_string()
    };
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl RunConfig {
    /// Parses TOML text and applies `key = value` overrides on top.
    pub fn from_toml_with(text: &str, overrides: &[(String, String)]) -> CliResult<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        for (key, raw) in overrides {
            let key = key.replace('-', "_");
            let value = parse_override_value(&key, raw);
            table.insert(key, value);
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        Self::from_toml_with(text, &[])
    }

    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> CliResult<Self> {
        let text = match path {
            Some(p) => fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
            None => String::new(),
        };
        Self::from_toml_with(&text, overrides)
    }

    pub fn is_go(&self) -> bool {
        self.objective == GO_OBJECTIVE
    }

    pub fn effective_dimension(&self) -> usize {
        if self.is_go() {
            3 * GO_RESIDUES
        } else {
            self.dimension.unwrap_or(10)
        }
    }

    pub fn effective_replicas(&self) -> usize {
        match self.algorithm {
            Algorithm::Rex => self.replicas.unwrap_or(if self.is_go() { 6 } else { 5 }),
            _ => 1,
        }
    }

    pub fn effective_interval(&self) -> u64 {
        self.exchange_interval
            .unwrap_or(if self.is_go() { 10 } else { 1 })
    }

    pub fn effective_tol(&self) -> Option<f64> {
        match self.tol {
            Some(t) => Some(t),
            None if self.is_go() => None,
            None => Some(1e-5),
        }
    }

    pub fn effective_q(&self) -> f64 {
        match self.algorithm {
            Algorithm::Gsqpo => 1.0,
            _ => self.q.unwrap_or(1.0),
        }
    }

    pub fn schedule(&self) -> ScheduleParams {
        ScheduleParams {
            g: self.g,
            amplitude: self.amplitude,
            omega: self.omega,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let known = Benchmark::ALL.iter().any(|b| b.name() == self.objective) || self.is_go();
        if !known {
            return Err(CliError::config(
                "objective",
                format!(
                    "unknown objective `{}` (expected ackley, griewank, rastrigin or {GO_OBJECTIVE})",
                    self.objective
                ),
            ));
        }
        match (self.is_go(), self.dimension) {
            (_, Some(0)) => return Err(CliError::config("dimension", "must be positive")),
            (true, Some(d)) if d != 3 * GO_RESIDUES => {
                return Err(CliError::config(
                    "dimension",
                    format!("{GO_OBJECTIVE} has dimension {}, got {d}", 3 * GO_RESIDUES),
                ))
            }
            _ => {}
        }
        if self.particles < 2 {
            return Err(CliError::config("particles", "need at least 2 particles"));
        }
        match self.algorithm {
            Algorithm::Rex => {
                if self.effective_replicas() < 2 {
                    return Err(CliError::config(
                        "replicas",
                        "rex needs at least 2 replicas",
                    ));
                }
                if self.q.is_some() {
                    return Err(CliError::config("q", "rex takes its q values from q_max"));
                }
            }
            Algorithm::Gsqpo | Algorithm::Qgsqpo => {
                if self.replicas.is_some_and(|m| m > 1) {
                    return Err(CliError::config(
                        "replicas",
                        "fixed-q runs use a single swarm",
                    ));
                }
                if self.algorithm == Algorithm::Gsqpo && self.q.is_some_and(|q| q != 1.0) {
                    return Err(CliError::config("q", "gsqpo runs at q = 1"));
                }
                if self.algorithm == Algorithm::Qgsqpo && self.q.is_none() {
                    return Err(CliError::config("q", "qgsqpo needs a fixed q"));
                }
                if let Some(q) = self.q {
                    crate::QParam::new(q).map_err(|e| CliError::config("q", e.to_string()))?;
                }
            }
        }
        if self.algorithm == Algorithm::Rex {
            crate::replica::build_ladder(self.effective_replicas(), self.q_max, self.k).map_err(
                |e| match e {
                    crate::Error::InvalidParameter { name, reason } => {
                        CliError::config(name, reason)
                    }
                    other => CliError::config("q_max", other.to_string()),
                },
            )?;
        }
        self.schedule()
            .validate()
            .map_err(|e| CliError::config("amplitude", e.to_string()))?;
        if self.exchange_interval == Some(0) {
            return Err(CliError::config("exchange_interval", "must be positive"));
        }
        if self.tol.is_some_and(|t| !(t >= 0.0)) {
            return Err(CliError::config("tol", "must be non-negative"));
        }
        if self.seeds == 0 {
            return Err(CliError::config("seeds", "must be positive"));
        }
        if self.sample_every == 0 {
            return Err(CliError::config("sample_every", "must be positive"));
        }
        if !(self.contact_cutoff > 0.0) {
            return Err(CliError::config("contact_cutoff", "must be positive"));
        }
        Ok(())
    }

    pub fn rex_params(&self) -> RexParams {
        RexParams {
            replicas: self.effective_replicas(),
            q_max: self.q_max,
            k: self.k,
            particles: self.particles,
            schedule: self.schedule(),
            exchange_interval: self.effective_interval(),
            tol: self.effective_tol(),
            max_iterations: self.max_iterations,
            seed: self.seed,
        }
    }

    pub fn single_params(&self) -> SingleParams {
        SingleParams {
            q: self.effective_q(),
            particles: self.particles,
            schedule: self.schedule(),
            tol: self.effective_tol(),
            max_iterations: self.max_iterations,
            seed: self.seed,
        }
    }

    /// Label used in summary and comparison rows.
    pub fn algorithm_label(&self) -> String {
        match self.algorithm {
            Algorithm::Qgsqpo => format!("qgsqpo-q{}", self.effective_q()),
            a => a.name().to_string(),
        }
    }

    /// TOML echo of the effective configuration. Published defaults are marked.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# rexq {VERSION}");
        let _ = writeln!(
            s,
            "# rng: ChaCha8 seeded from `seed`; stream_id = (index << 2) | role, role 0 = init, 1 = dynamics, 2 = exchange; index = ladder level"
        );
        let mark = |same: bool| if same { "  # published default" } else { "" };
        let f = |v: f64| toml::Value::Float(v).to_string();
        let list_f = |v: &[f64]| {
            format!(
                "[{}]",
                v.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ")
            )
        };
        let _ = writeln!(s, "objective = \"{}\"", self.objective);
        let _ = writeln!(s, "dimension = {}", self.effective_dimension());
        let _ = writeln!(s, "algorithm = \"{}\"", self.algorithm.name());
        let _ = writeln!(s, "particles = {}", self.particles);
        if self.algorithm == Algorithm::Rex {
            let _ = writeln!(s, "replicas = {}", self.effective_replicas());
        } else {
            let _ = writeln!(s, "q = {}", f(self.effective_q()));
        }
        let _ = writeln!(s, "q_max = {}{}", f(self.q_max), mark(self.q_max == 3.0));
        let _ = writeln!(s, "k = {}{}", f(self.k), mark(self.k < 0.001));
        let _ = writeln!(s, "g = {}{}", f(self.g), mark(self.g == 0.5));
        let _ = writeln!(s, "omega = {}{}", f(self.omega), mark(self.omega == 0.1));
        let _ = writeln!(s, "amplitude = {}", f(self.amplitude));
        let interval = self.effective_interval();
        let published_interval = if self.is_go() { 10 } else { 1 };
        let _ = writeln!(
            s,
            "exchange_interval = {interval}{}",
            mark(interval == published_interval)
        );
        match self.effective_tol() {
            Some(t) => {
                let _ = writeln!(s, "tol = {}{}", f(t), mark(t == 1e-5));
            }
            None => {
                let _ = writeln!(s, "# tol unset: full iteration budget");
            }
        }
        let _ = writeln!(s, "max_iterations = {}", self.max_iterations);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(
            s,
            "output = {}",
            toml::Value::String(self.output.display().to_string())
        );
        let form = match self.benchmark_form {
            BenchmarkForm::Published => "published",
            BenchmarkForm::Literature => "literature",
        };
        let _ = writeln!(s, "benchmark_form = \"{form}\"");
        let _ = writeln!(s, "contact_cutoff = {}", f(self.contact_cutoff));
        if let Some(p) = &self.native_file {
            let _ = writeln!(
                s,
                "native_file = {}",
                toml::Value::String(p.display().to_string())
            );
        }
        let _ = writeln!(s, "seeds = {}", self.seeds);
        let _ = writeln!(s, "k_list = {}", list_f(&self.k_list));
        let d_list: Vec<String> = self.d_list.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "d_list = [{}]", d_list.join(", "));
        let _ = writeln!(s, "amplitudes = {}", list_f(&self.amplitudes));
        let _ = writeln!(
            s,
            "q_set = {}{}",
            list_f(&self.q_set),
            mark(self.q_set == COMPARISON_Q_SET)
        );
        let _ = writeln!(s, "sample_every = {}", self.sample_every);
        s
    }
}

/// Builds the objective handle named by the configuration.
pub fn build_objective(cfg: &RunConfig) -> CliResult<ObjectiveHandle> {
    if cfg.is_go() {
        let top = go_topology(cfg)?;
        return Ok(GoObjective::new(Arc::new(top)).handle()?);
    }
    let b: Benchmark = cfg
        .objective
        .parse()
        .map_err(|e: crate::Error| CliError::config("objective", e.to_string()))?;
    Ok(b.handle_with(cfg.effective_dimension(), cfg.benchmark_form.into())?)
}

pub fn go_topology(cfg: &RunConfig) -> CliResult<GoTopology> {
    let native = match &cfg.native_file {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            let coords = gomodel::parse_native_coords(&text)
                .map_err(|e| CliError::config("native_file", e.to_string()))?;
            if coords.len() != GO_RESIDUES {
                return Err(CliError::config(
                    "native_file",
                    format!("expected {GO_RESIDUES} residues, found {}", coords.len()),
                ));
            }
            coords
        }
        None => gomodel::build_native_helix(GO_RESIDUES)?,
    };
    Ok(gomodel::extract_topology(&native, cfg.contact_cutoff)?)
}

/// Runs the configured algorithm once.
pub fn execute(cfg: &RunConfig, obj: &ObjectiveHandle) -> CliResult<RunResult> {
    Ok(match cfg.algorithm {
        Algorithm::Rex => run_rex(&cfg.rex_params(), obj)?,
        Algorithm::Gsqpo | Algorithm::Qgsqpo => run_single(&cfg.single_params(), obj)?,
    })
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const SUMMARY_HEADER: [&str; 16] = [
    "algorithm",
    "objective",
    "dimension",
    "q",
    "replicas",
    "particles",
    "k",
    "amplitude",
    "exchange_interval",
    "seed",
    "converged",
    "iterations",
    "evaluations",
    "best_score",
    "best_level",
    "best_q",
];

fn summary_row(cfg: &RunConfig, r: &RunResult) -> Vec<String> {
    let is_rex = cfg.algorithm == Algorithm::Rex;
    vec![
        cfg.algorithm_label(),
        cfg.objective.clone(),
        cfg.effective_dimension().to_string(),
        if is_rex {
            String::new()
        } else {
            cfg.effective_q().to_string()
        },
        r.levels.len().to_string(),
        cfg.particles.to_string(),
        if is_rex {
            cfg.k.to_string()
        } else {
            String::new()
        },
        cfg.amplitude.to_string(),
        if is_rex {
            cfg.effective_interval().to_string()
        } else {
            String::new()
        },
        cfg.seed.to_string(),
        r.converged.to_string(),
        r.iterations.to_string(),
        r.evaluations.to_string(),
        r.best_score.to_string(),
        (r.best_level + 1).to_string(),
        r.levels[r.best_level].q.to_string(),
    ]
}

/// Writes `summary.csv`, per-level traces, occupancy, exchange and round-trip tables.
pub fn write_run_artifacts(dir: &Path, cfg: &RunConfig, r: &RunResult) -> CliResult<()> {
    create_dir(dir)?;
    write_text(&dir.join("config.toml"), &cfg.echo())?;

    let mut w = csv_writer(&dir.join("summary.csv"))?;
    w.write_record(SUMMARY_HEADER)?;
    w.write_record(summary_row(cfg, r))?;
    w.flush().map_err(|e| CliError::io(dir, e))?;

    for (i, level) in r.levels.iter().enumerate() {
        let mut w = csv_writer(&dir.join(format!("trace_level_{}.csv", i + 1)))?;
        w.write_record(["iteration", "q", "global_best_score", "diversity", "gamma"])?;
        for t in 0..level.best_score.len() {
            w.write_record([
                t.to_string(),
                level.q.to_string(),
                level.best_score[t].to_string(),
                level.diversity[t].to_string(),
                level.gamma[t].to_string(),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(dir, e))?;
    }

    if let Some(occ) = &r.occupancy {
        let m = occ.replicas();
        let mut w = csv_writer(&dir.join("occupancy.csv"))?;
        let mut header = vec!["tag".to_string()];
        header.extend((1..=m).map(|l| format!("level_{l}")));
        w.write_record(&header)?;
        for tag in 0..m {
            let mut row = vec![(tag + 1).to_string()];
            row.extend(occ.row(tag).iter().map(u64::to_string));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| CliError::io(dir, e))?;

        let mut w = csv_writer(&dir.join("exchange.csv"))?;
        w.write_record([
            "lower_level",
            "upper_level",
            "q_lower",
            "q_upper",
            "attempts",
            "accepted",
            "rate",
        ])?;
        for (i, p) in r.exchange.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                (i + 2).to_string(),
                r.levels[i].q.to_string(),
                r.levels[i + 1].q.to_string(),
                p.attempts.to_string(),
                p.accepted.to_string(),
                opt(p.rate()),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(dir, e))?;

        let mut w = csv_writer(&dir.join("round_trips.csv"))?;
        w.write_record(["tag", "count", "mean_iterations"])?;
        for s in &r.round_trips {
            w.write_record([(s.tag + 1).to_string(), s.count.to_string(), opt(s.mean)])?;
        }
        w.flush().map_err(|e| CliError::io(dir, e))?;
    }
    Ok(())
}

/// `run`: one run with artifacts in `cfg.output`.
pub fn cmd_run(cfg: &RunConfig) -> CliResult<RunResult> {
    let obj = build_objective(cfg)?;
    let r = execute(cfg, &obj)?;
    write_run_artifacts(&cfg.output, cfg, &r)?;
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub objective: String,
    pub dimension: usize,
    pub seeds: u64,
    pub mean_ratio: f64,
    pub uniform: bool,
    pub uniform_seeds: u64,
}

/// χ²/χ²_c occupancy ratio of one replica-exchange run.
pub fn occupancy_ratio(cfg: &RunConfig) -> CliResult<(f64, bool)> {
    let obj = build_objective(cfg)?;
    let r = run_rex(&cfg.rex_params(), &obj)?;
    let occ = r
        .occupancy
        .ok_or_else(|| CliError::config("algorithm", "occupancy needs a rex run"))?;
    let report = chi_square_uniformity(&occ)?;
    Ok((report.mean_ratio, report.uniform))
}

/// `sweep-k`: one χ² ratio row per k, averaged over `seeds` seeds.
pub fn cmd_sweep_k(cfg: &RunConfig) -> CliResult<Vec<SweepRow>> {
    if cfg.algorithm != Algorithm::Rex {
        return Err(CliError::config("algorithm", "sweep-k needs rex"));
    }
    if cfg.k_list.is_empty() {
        return Err(CliError::config("k_list", "empty k list"));
    }
    let mut rows = Vec::new();
    for &k in &cfg.k_list {
        let mut ratios = Vec::new();
        let mut uniform_seeds = 0;
        for s in 0..cfg.seeds {
            let run_cfg = RunConfig {
                k,
                seed: cfg.seed + s,
                ..cfg.clone()
            };
            run_cfg.validate()?;
            let (ratio, uniform) = occupancy_ratio(&run_cfg)?;
            ratios.push(ratio);
            uniform_seeds += u64::from(uniform);
        }
        let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
        rows.push(SweepRow {
            k,
            objective: cfg.objective.clone(),
            dimension: cfg.effective_dimension(),
            seeds: cfg.seeds,
            mean_ratio,
            uniform: mean_ratio < 1.0,
            uniform_seeds,
        });
    }
    create_dir(&cfg.output)?;
    write_text(&cfg.output.join("config.toml"), &cfg.echo())?;
    let mut w = csv_writer(&cfg.output.join("sweep_k.csv"))?;
    w.write_record([
        "k",
        "objective",
        "dimension",
        "seeds",
        "mean_ratio",
        "uniform",
        "uniform_seeds",
    ])?;
    for r in &rows {
        w.write_record([
            r.k.to_string(),
            r.objective.clone(),
            r.dimension.to_string(),
            r.seeds.to_string(),
            r.mean_ratio.to_string(),
            r.uniform.to_string(),
            r.uniform_seeds.to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(&cfg.output, e))?;
    Ok(rows)
}

/// Configurations of every comparison tier for one dimension: q = 1, each fixed q, replica exchange.
pub fn comparison_tiers(cfg: &RunConfig, d: usize) -> Vec<RunConfig> {
    let base = RunConfig {
        dimension: Some(d),
        replicas: None,
        q: None,
        ..cfg.clone()
    };
    let mut tiers = vec![RunConfig {
        algorithm: Algorithm::Gsqpo,
        ..base.clone()
    }];
    tiers.extend(cfg.q_set.iter().map(|&q| RunConfig {
        algorithm: Algorithm::Qgsqpo,
        q: Some(q),
        ..base.clone()
    }));
    tiers.push(RunConfig {
        algorithm: Algorithm::Rex,
        replicas: cfg.replicas,
        ..base
    });
    tiers
}

/// `compare`: every tier over the amplitude list and seeds, per dimension.
pub fn cmd_compare(cfg: &RunConfig) -> CliResult<Vec<RunSummary>> {
    if cfg.is_go() {
        return Err(CliError::config(
            "objective",
            "compare runs the benchmark functions",
        ));
    }
    if cfg.d_list.is_empty() {
        return Err(CliError::config("d_list", "empty dimension list"));
    }
    if cfg.amplitudes.is_empty() {
        return Err(CliError::config("amplitudes", "empty amplitude list"));
    }
    create_dir(&cfg.output)?;
    write_text(&cfg.output.join("config.toml"), &cfg.echo())?;
    let mut runs = csv_writer(&cfg.output.join("runs.csv"))?;
    runs.write_record(SUMMARY_HEADER)?;
    let mut records = Vec::new();
    for &d in &cfg.d_list {
        for tier in comparison_tiers(cfg, d) {
            for &a in &cfg.amplitudes {
                for s in 0..cfg.seeds {
                    let run_cfg = RunConfig {
                        amplitude: a,
                        seed: cfg.seed + s,
                        ..tier.clone()
                    };
                    run_cfg.validate()?;
                    let obj = build_objective(&run_cfg)?;
                    let r = execute(&run_cfg, &obj)?;
                    runs.write_record(summary_row(&run_cfg, &r))?;
                    records.push(RunRecord {
                        algorithm: run_cfg.algorithm_label(),
                        objective: run_cfg.objective.clone(),
                        dimension: d,
                        iterations: r.iterations,
                        converged: r.converged,
                        best_score: r.best_score,
                    });
                }
            }
        }
    }
    runs.flush().map_err(|e| CliError::io(&cfg.output, e))?;
    let summaries = aggregate_runs(&records);
    let mut w = csv_writer(&cfg.output.join("compare.csv"))?;
    w.write_record([
        "algorithm",
        "objective",
        "dimension",
        "runs",
        "converged",
        "mean_iterations",
        "median_iterations",
        "mean_best_score",
        "median_best_score",
    ])?;
    for s in &summaries {
        w.write_record([
            s.algorithm.clone(),
            s.objective.clone(),
            s.dimension.to_string(),
            s.runs.to_string(),
            s.converged.to_string(),
            s.iterations.mean.to_string(),
            s.iterations.median.to_string(),
            s.best_score.mean.to_string(),
            s.best_score.median.to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(&cfg.output, e))?;
    Ok(summaries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub iteration: u64,
    /// 0-based level.
    pub level: usize,
    pub q: f64,
    pub energy: f64,
    pub rmsd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub result: RunResult,
    pub scatter: Vec<ScatterPoint>,
    /// Native structure the rmsd values refer to, flattened.
    pub reference: Vec<f64>,
}

/// Runs the Gō peptide with replica exchange, sampling (energy, rmsd) of every level's best.
pub fn fold(cfg: &RunConfig) -> CliResult<FoldOutcome> {
    if !cfg.is_go() {
        return Err(CliError::config(
            "objective",
            format!("fold needs {GO_OBJECTIVE}"),
        ));
    }
    if cfg.algorithm != Algorithm::Rex {
        return Err(CliError::config("algorithm", "fold needs rex"));
    }
    let top = Arc::new(go_topology(cfg)?);
    let obj = GoObjective::new(top.clone()).handle()?;
    let native = top.native().to_vec();
    let mut scatter = Vec::new();
    let stride = cfg.sample_every;
    let result = run_rex_observed(&cfg.rex_params(), &obj, |set, t| {
        if t % stride != 0 {
            return;
        }
        for (level, s) in set.swarms().iter().enumerate() {
            let rmsd = gomodel::rmsd(&s.global_best_position, &native).unwrap_or(f64::NAN);
            scatter.push(ScatterPoint {
                iteration: t,
                level,
                q: set.ladder().q(level),
                energy: s.global_best_score,
                rmsd,
            });
        }
    })?;
    Ok(FoldOutcome {
        result,
        scatter,
        reference: top.native_flat(),
    })
}

/// `fold`: run artifacts plus `scatter.csv` and `diversity_extremes.csv`.
pub fn cmd_fold(cfg: &RunConfig) -> CliResult<FoldOutcome> {
    let out = fold(cfg)?;
    write_run_artifacts(&cfg.output, cfg, &out.result)?;

    let mut w = csv_writer(&cfg.output.join("scatter.csv"))?;
    w.write_record(["iteration", "level", "q", "best_energy", "rmsd"])?;
    for p in &out.scatter {
        w.write_record([
            p.iteration.to_string(),
            (p.level + 1).to_string(),
            p.q.to_string(),
            p.energy.to_string(),
            p.rmsd.to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(&cfg.output, e))?;

    let ext = diversity_extremes(&out.result.diversity_traces())?;
    let qs: Vec<f64> = out.result.levels.iter().map(|l| l.q).collect();
    let mut w = csv_writer(&cfg.output.join("diversity_extremes.csv"))?;
    w.write_record(["iteration", "highest", "highest_q", "lowest", "lowest_q"])?;
    for t in 0..ext.highest.len() {
        w.write_record([
            t.to_string(),
            ext.highest[t].to_string(),
            qs[ext.highest_level[t]].to_string(),
            ext.lowest[t].to_string(),
            qs[ext.lowest_level[t]].to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(&cfg.output, e))?;
    Ok(out)
}
