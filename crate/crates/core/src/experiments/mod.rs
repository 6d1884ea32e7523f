//! Named, seeded experiments that compose the library and write their
//! artifacts (`report.json`, `table.csv`, field blobs, heatmaps) to one
//! directory.

mod cache;
mod chaos;
mod config;
mod fields;
mod moments;
mod report;
mod schema;
mod spectral;

pub use cache::SampleSource;
pub use config::{ExperimentConfig, ExperimentName, GridSpec};
pub use fields::covariance_offsets;
pub use report::{cell, ArtifactWriter, Check, ExperimentReport, Table};
pub use schema::{validate, validate_report, REPORT_SCHEMA};

use serde_json::Value;
use std::time::Instant;

use crate::error::{Error, Result};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "GINFIELD_THREADS";

struct Outcome {
    results: Vec<Value>,
    checks: Vec<Check>,
    table: Table,
}

/// Worker count: the config, else `GINFIELD_THREADS`, else rayon's default.
pub fn worker_count(config: &ExperimentConfig) -> Result<Option<usize>> {
    if config.threads.is_some() {
        return Ok(config.threads);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::Config(format!("{THREADS_ENV}: expected a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn dispatch(cfg: &ExperimentConfig, src: &SampleSource, out: &mut ArtifactWriter) -> Result<Outcome> {
    use ExperimentName::*;
    match cfg.name {
        FieldSample => fields::field_sample(cfg, src, out),
        MaxScan => fields::max_scan(cfg, src, out),
        ThickPoints => fields::thick_points_run(cfg, src, out),
        Freezing => fields::freezing(cfg, src, out),
        Covariance => fields::covariance(cfg, src, out),
        Clt => chaos::clt(cfg, out),
        Gmc => chaos::gmc(cfg, out),
        MomentsCheck => moments::moments_check(cfg, src, out),
        WwScan => moments::ww_scan(cfg, src, out),
        KostlanTail => spectral::kostlan_tail(cfg, src, out),
        Ward => moments::ward(cfg, src, out),
        KernelGap => spectral::kernel_gap(cfg, out),
    }
}

/// Runs `config`. An invalid config is an error and writes nothing; a
/// failure during the run still writes a report, with a failed `run` check.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let threads = worker_count(config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut out = ArtifactWriter::new(&config.out_dir)?;
    let src = SampleSource::new(config.cache_dir.as_deref());
    let start = Instant::now();
    let outcome = pool.install(|| dispatch(config, &src, &mut out));
    log::info!("{} finished in {:.1} s", config.name.as_str(), start.elapsed().as_secs_f64());
    let Outcome { results, checks, table } = match outcome {
        Ok(o) => o,
        Err(e) => {
            log::error!("{} failed: {e}", config.name.as_str());
            Outcome {
                results: Vec::new(),
                checks: vec![Check::new("run", format!("run aborted: {e}"), f64::NAN, "completes", false)],
                table: Table::new(&["error"]),
            }
        }
    };
    out.table("table.csv", &table)?;
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    let mut report = ExperimentReport {
        tool: "ginfield".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: config.name,
        config: config.echo()?,
        results,
        checks,
        artifacts: Vec::new(),
        pass,
    };
    out.report(&mut report)?;
    Ok(report)
}
