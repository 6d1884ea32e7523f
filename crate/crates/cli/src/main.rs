use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use ginfield::experiments::{run, ExperimentConfig, ExperimentName, THREADS_ENV};

#[derive(Parser)]
#[command(name = "ginfield", version, about = "Seeded experiments on the log-characteristic polynomial of Ginibre matrices")]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Subcommand)]
enum Experiment {
    /// Ψ_N on a grid, with heatmaps
    FieldSample(Flags),
    /// growth of the field maximum with N
    MaxScan(Flags),
    /// area of the β-thick points against N
    ThickPoints(Flags),
    /// free energy against β
    Freezing(Flags),
    /// E[Ψ(z0)Ψ(z0 + x)] against log 1/|x|
    Covariance(Flags),
    /// variance of the mollified linear statistic
    Clt(Flags),
    /// chaos measure total mass across N
    Gmc(Flags),
    /// exact joint moments against Monte Carlo
    MomentsCheck(Flags),
    /// E|p_N(z)|^γ against its large-N asymptotics
    WwScan(Flags),
    /// tail of the spectral radius from radii-only samples
    KostlanTail(Flags),
    /// loop-equation residual under the tilted measure
    Ward(Flags),
    /// perturbed-kernel identities and the local gap constant
    KernelGap(Flags),
}

impl Experiment {
    fn split(self) -> (ExperimentName, Flags) {
        use Experiment::*;
        match self {
            FieldSample(f) => (ExperimentName::FieldSample, f),
            MaxScan(f) => (ExperimentName::MaxScan, f),
            ThickPoints(f) => (ExperimentName::ThickPoints, f),
            Freezing(f) => (ExperimentName::Freezing, f),
            Covariance(f) => (ExperimentName::Covariance, f),
            Clt(f) => (ExperimentName::Clt, f),
            Gmc(f) => (ExperimentName::Gmc, f),
            MomentsCheck(f) => (ExperimentName::MomentsCheck, f),
            WwScan(f) => (ExperimentName::WwScan, f),
            KostlanTail(f) => (ExperimentName::KostlanTail, f),
            Ward(f) => (ExperimentName::Ward, f),
            KernelGap(f) => (ExperimentName::KernelGap, f),
        }
    }
}

#[derive(Args)]
struct Flags {
    /// matrix sizes, comma separated
    #[arg(long = "n", value_delimiter = ',')]
    n_list: Vec<usize>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// output directory
    #[arg(long = "out")]
    out_dir: Option<PathBuf>,
    /// grid covers [-h, h]²
    #[arg(long)]
    grid_half: Option<f64>,
    /// grid nodes per side
    #[arg(long)]
    grid_side: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    beta_list: Vec<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps0: Option<f64>,
    /// fixed smoothing scale; otherwise N^(alpha - 1/2)
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    t_list: Vec<f64>,
    /// a point RE,IM; repeat for several
    #[arg(long = "point", value_parser = parse_point)]
    points: Vec<[f64; 2]>,
    /// matrix-eig, hessenberg-model, dpp-kernel or kostlan-radii
    #[arg(long)]
    backend: Option<String>,
    /// empirical or gaussian-prediction
    #[arg(long)]
    normalizer: Option<String>,
    /// grayscale, viridis or levels
    #[arg(long)]
    palette: Option<String>,
    /// write PNG heatmaps
    #[arg(long)]
    heatmaps: Option<bool>,
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    /// cache directory for eigenvalue samples
    #[arg(long = "cache")]
    cache_dir: Option<PathBuf>,
    /// JSON config; its keys override the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig1, fig2 or fig3 (field-sample only)
    #[arg(long)]
    preset: Option<String>,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([num(re)?, num(im)?])
}

impl Flags {
    fn overrides(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        if !self.n_list.is_empty() {
            put("n-list", json!(self.n_list));
        }
        if !self.beta_list.is_empty() {
            put("beta-list", json!(self.beta_list));
        }
        if !self.t_list.is_empty() {
            put("t-list", json!(self.t_list));
        }
        if !self.points.is_empty() {
            put("points", json!(self.points));
        }
        let mut grid = Map::new();
        if let Some(h) = self.grid_half {
            grid.insert("half".into(), json!(h));
        }
        if let Some(s) = self.grid_side {
            grid.insert("side".into(), json!(s));
        }
        if !grid.is_empty() {
            put("grid", Value::Object(grid));
        }
        let scalars = [
            ("replicas", self.replicas.map(|v| json!(v))),
            ("seed", self.seed.map(|v| json!(v))),
            ("out-dir", self.out_dir.as_ref().map(|v| json!(v))),
            ("r", self.r.map(|v| json!(v))),
            ("beta", self.beta.map(|v| json!(v))),
            ("gamma", self.gamma.map(|v| json!(v))),
            ("alpha", self.alpha.map(|v| json!(v))),
            ("eps0", self.eps0.map(|v| json!(v))),
            ("eps", self.eps.map(|v| json!(v))),
            ("delta", self.delta.map(|v| json!(v))),
            ("backend", self.backend.as_ref().map(|v| json!(v))),
            ("normalizer", self.normalizer.as_ref().map(|v| json!(v))),
            ("palette", self.palette.as_ref().map(|v| json!(v))),
            ("heatmaps", self.heatmaps.map(|v| json!(v))),
            ("threads", self.threads.map(|v| json!(v))),
            ("cache-dir", self.cache_dir.as_ref().map(|v| json!(v))),
        ];
        for (k, v) in scalars {
            if let Some(v) = v {
                put(k, v);
            }
        }
        m
    }
}

fn config(name: ExperimentName, flags: &Flags) -> anyhow::Result<ExperimentConfig> {
    let base = match &flags.preset {
        Some(tag) if name == ExperimentName::FieldSample => ExperimentConfig::figure(tag)?,
        Some(_) => bail!("--preset applies to field-sample only"),
        None => ExperimentConfig::preset(name),
    };
    let mut layer = Value::Object(flags.overrides());
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let Value::Object(file) = file else { bail!("{}: expected a JSON object", path.display()) };
        if let Some(other) = file.get("name").and_then(Value::as_str) {
            if other != name.as_str() {
                bail!("{}: config is for {other:?}, not {:?}", path.display(), name.as_str());
            }
        }
        for (k, v) in file {
            layer[k.as_str()] = v;
        }
    }
    layer["name"] = json!(name.as_str());
    Ok(ExperimentConfig::merged(&base, &layer)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let (name, flags) = Cli::parse().experiment.split();
    let cfg = match config(name, &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            for c in &report.checks {
                let observed = c.observed.map_or("-".to_string(), |v| format!("{v:.6}"));
                println!("{:<4} {:<28} {observed:>14}  target {}", if c.pass { "ok" } else { "FAIL" }, c.id, c.target);
            }
            println!("report: {}", cfg.out_dir.join("report.json").display());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
