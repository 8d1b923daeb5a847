//! `gpat`: command-line front end for the experiment pipelines.

use clap::{Args, Parser, Subcommand};
use gpat_core::harness::{parse_pairs, run, ExperimentConfig};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gpat", version, about = "Gowers norms of multiplicative functions in progressions")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for cached sieve tables.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// key = value file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the function and check the squarefree-count identity.
    Sieve(Params),
    /// Gowers norms of f(q·+a) on [1, X/q].
    Gowers(Params),
    /// Bombieri–Vinogradov style scan over moduli in [Q, 2Q).
    BvScan(Params),
    /// Ramaré identity, Σ partition and Cauchy–Schwarz checks.
    RamareCheck(Params),
    /// Type-II bilinear sum for a collection of progressions.
    Type2(Params),
    /// Total equidistribution defect of a polynomial phase.
    Equidist(Params),
    /// Least-common-multiple multiplicity statistics.
    LcmStats(Params),
    /// Average Gowers norm in progressions against X.
    Decay(Params),
    /// Fixed small-scale checks across every module.
    Accept(Params),
}

/// Pipeline parameters; each maps to the config key of the same name.
#[derive(Args, Default)]
struct Params {
    /// mobius, liouville, unit or custom:<multspec file>
    #[arg(long)]
    function: Option<String>,
    #[arg(long = "X")]
    x: Option<String>,
    #[arg(long = "Q")]
    q_base: Option<String>,
    /// Comma-separated degrees.
    #[arg(long = "k")]
    k: Option<String>,
    #[arg(long = "q")]
    q: Option<String>,
    #[arg(long = "a")]
    a: Option<String>,
    #[arg(long)]
    all_residues: bool,
    /// auto, naive, recursive_fft or u1_mean
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// 0 scans plain discrepancies.
    #[arg(long)]
    phase_degree: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    #[arg(long)]
    full_range: bool,
    /// Prime window `Y,Z`.
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    fspec: Option<PathBuf>,
    #[arg(long)]
    fspec_count: Option<String>,
    #[arg(long = "K")]
    big_k: Option<String>,
    #[arg(long = "L")]
    big_l: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    delta_exponent: Option<String>,
    /// Comma-separated α_1, …, α_s.
    #[arg(long)]
    alphas: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "R")]
    r: Option<String>,
    #[arg(long)]
    m0_grid: Option<String>,
    #[arg(long = "X-grid")]
    x_grid: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Record wall-clock seconds in CSVs (true/false).
    #[arg(long)]
    timings: Option<String>,
}

impl Params {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        put("function", &self.function);
        put("X", &self.x);
        put("Q", &self.q_base);
        put("k", &self.k);
        put("q", &self.q);
        put("a", &self.a);
        put("strategy", &self.strategy);
        put("epsilon", &self.epsilon);
        put("phase_degree", &self.phase_degree);
        put("restarts", &self.restarts);
        put("window", &self.window);
        put("fspec_count", &self.fspec_count);
        put("K", &self.big_k);
        put("L", &self.big_l);
        put("delta", &self.delta);
        put("delta_exponent", &self.delta_exponent);
        put("alphas", &self.alphas);
        put("N", &self.n);
        put("R", &self.r);
        put("m0_grid", &self.m0_grid);
        put("X_grid", &self.x_grid);
        put("theta", &self.theta);
        put("timings", &self.timings);
        put("fspec", &self.fspec.as_ref().map(|p| p.display().to_string()));
        if self.all_residues {
            out.push(("all_residues", "true".into()));
        }
        if self.full_range {
            out.push(("full_range", "true".into()));
        }
        out
    }
}

fn build_config(cli: &Cli) -> gpat_core::Result<ExperimentConfig> {
    let (name, params) = match &cli.command {
        Command::Sieve(p) => ("sieve", p),
        Command::Gowers(p) => ("gowers", p),
        Command::BvScan(p) => ("bv-scan", p),
        Command::RamareCheck(p) => ("ramare-check", p),
        Command::Type2(p) => ("type2", p),
        Command::Equidist(p) => ("equidist", p),
        Command::LcmStats(p) => ("lcm-stats", p),
        Command::Decay(p) => ("decay", p),
        Command::Accept(p) => ("accept", p),
    };
    let mut map: BTreeMap<String, String> = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                gpat_core::Error::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_pairs(&text)?
        }
        None => BTreeMap::new(),
    };
    map.insert("pipeline".into(), name.into());
    if name == "accept" {
        map.entry("timings".into()).or_insert_with(|| "false".into());
    }
    if name == "equidist" {
        map.entry("alphas".into()).or_insert_with(|| "0.6180339887498949".into());
    }
    if name == "decay" {
        map.entry("X_grid".into()).or_insert_with(|| "10000,100000,1000000".into());
    }
    for (k, v) in params.pairs() {
        map.insert(k.into(), v);
    }
    if let Some(t) = cli.threads {
        map.insert("threads".into(), t.to_string());
    }
    if let Some(s) = cli.seed {
        map.insert("seed".into(), s.to_string());
    }
    if let Some(d) = &cli.cache_dir {
        map.insert("cache_dir".into(), d.display().to_string());
    }
    if let Some(d) = &cli.out_dir {
        map.insert("out_dir".into(), d.display().to_string());
    }
    ExperimentConfig::from_map(map)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("gpat: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(manifest) => {
            for (file, digest) in &manifest.outputs {
                println!("wrote {} ({})", cfg.out_dir.join(file).display(), &digest[..12]);
            }
            for a in &manifest.assertions {
                println!("{} {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.detail);
            }
            if manifest.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("gpat: {e}");
            ExitCode::from(2)
        }
    }
}
