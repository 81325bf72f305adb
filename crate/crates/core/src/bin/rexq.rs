use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rexq::cli::{self, RunConfig};

#[derive(Parser)]
#[command(
    name = "rexq",
    version,
    about = "Replica-exchange q-Gaussian swarm optimizer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run of the configured algorithm.
    Run(Invocation),
    /// Occupancy χ² ratio for each k in `k_list`.
    SweepK(Invocation),
    /// Iterations-to-tolerance of every tier over `d_list`, `amplitudes` and seeds.
    Compare(Invocation),
    /// Gō peptide folding run with energy/rmsd scatter output.
    Fold(Invocation),
}

#[derive(Args)]
struct Invocation {
    /// TOML configuration file.
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

/// One flag per configuration key. Lists are comma separated.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long, allow_hyphen_values = true)]
    objective: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dimension: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    algorithm: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    particles: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    replicas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    exchange_interval: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    max_iterations: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    output: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    benchmark_form: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    contact_cutoff: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    native_file: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seeds: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k_list: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d_list: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    amplitudes: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q_set: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sample_every: Option<String>,
}

const STRING_KEYS: [&str; 5] = [
    "objective",
    "algorithm",
    "output",
    "benchmark_form",
    "native_file",
];

impl Overrides {
    fn pairs(self) -> Vec<(String, String)> {
        let fields = [
            ("objective", self.objective),
            ("dimension", self.dimension),
            ("algorithm", self.algorithm),
            ("particles", self.particles),
            ("replicas", self.replicas),
            ("q", self.q),
            ("q_max", self.q_max),
            ("k", self.k),
            ("g", self.g),
            ("omega", self.omega),
            ("amplitude", self.amplitude),
            ("exchange_interval", self.exchange_interval),
            ("tol", self.tol),
            ("max_iterations", self.max_iterations),
            ("seed", self.seed),
            ("output", self.output),
            ("benchmark_form", self.benchmark_form),
            ("contact_cutoff", self.contact_cutoff),
            ("native_file", self.native_file),
            ("seeds", self.seeds),
            ("k_list", self.k_list),
            ("d_list", self.d_list),
            ("amplitudes", self.amplitudes),
            ("q_set", self.q_set),
            ("sample_every", self.sample_every),
        ];
        fields
            .into_iter()
            .filter_map(|(key, v)| {
                v.map(|v| {
                    let v = if STRING_KEYS.contains(&key) {
                        toml::Value::String(v).to_string()
                    } else {
                        v
                    };
                    (key.to_string(), v)
                })
            })
            .collect()
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let (inv, which) = match args.command {
        Command::Run(i) => (i, "run"),
        Command::SweepK(i) => (i, "sweep-k"),
        Command::Compare(i) => (i, "compare"),
        Command::Fold(i) => (i, "fold"),
    };
    let outcome = RunConfig::load(inv.config.as_deref(), &inv.overrides.pairs()).and_then(|cfg| {
        match which {
            "run" => cli::cmd_run(&cfg).map(|r| {
                println!(
                    "{} {} d={}: converged={} iterations={} best_score={}",
                    cfg.algorithm_label(),
                    cfg.objective,
                    cfg.effective_dimension(),
                    r.converged,
                    r.iterations,
                    r.best_score
                )
            }),
            "sweep-k" => cli::cmd_sweep_k(&cfg).map(|rows| {
                for r in rows {
                    println!(
                        "k={} mean_ratio={} uniform={}",
                        r.k, r.mean_ratio, r.uniform
                    );
                }
            }),
            "compare" => cli::cmd_compare(&cfg).map(|rows| {
                for s in rows {
                    println!(
                        "{} {} d={}: mean_iterations={} converged={}/{}",
                        s.algorithm,
                        s.objective,
                        s.dimension,
                        s.iterations.mean,
                        s.converged,
                        s.runs
                    );
                }
            }),
            _ => cli::cmd_fold(&cfg).map(|out| {
                println!(
                    "fold: best_energy={} level={} iterations={}",
                    out.result.best_score,
                    out.result.best_level + 1,
                    out.result.iterations
                )
            }),
        }
        .map(|()| cfg.output)
    });
    match outcome {
        Ok(dir) => {
            println!("output written to {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
