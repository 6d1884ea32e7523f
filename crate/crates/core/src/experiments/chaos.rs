use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::report::{cell, ArtifactWriter, Check, Table};
use super::{ExperimentConfig, Outcome};
use crate::error::Result;
use crate::field::{radial_variance_exact, sigma_variance, FieldMeta, FieldSample, Grid, Quantity};
use crate::gmc::{g_field_disk, g_field_nodes, gmc_measure, RadialMollifier};
use crate::rng::SeedStream;
use crate::sampler::sample_disk_restricted;
use crate::stats::{ks_statistic, mean_stderr, variance, Estimate};

type C = Complex64;

/// Sample variance with the standard error from the fourth central moment.
fn variance_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let v = variance(xs);
    let m = xs.iter().sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    Estimate::with_stderr(v, ((m4 - v * v).max(0.0) / n).sqrt())
}

pub(super) fn clt(cfg: &ExperimentConfig, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let m = RadialMollifier::new(cfg.eps0)?;
    let z = cfg.points[0];
    let radius = z.norm() + cfg.eps0;
    let grid = Grid::square(cfg.grid.half, cfg.grid.side)?;
    let mut table = Table::new(&["n", "eps", "mean", "mean_stderr", "variance", "variance_stderr", "sigma_sq", "variance_finite_n"]);
    let mut results = Vec::new();
    let mut checks = Vec::new();
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let eps = cfg.smoothing_scale(n);
        let vals: Vec<f64> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| g_field_disk(&sample_disk_restricted(n, radius, SeedStream::new(cfg.seed, r))?, &m, eps, z))
            .collect::<Result<_>>()?;
        let mean = mean_stderr(&vals);
        let var = variance_estimate(&vals);
        let a = cfg.eps0;
        let f = |x: C| {
            let d = (x - z).norm();
            if d < a {
                m.psi(eps, d) - m.psi(1.0, d)
            } else {
                0.0
            }
        };
        let sigma_sq = sigma_variance(&grid, &grid.nodes().into_iter().map(f).collect::<Vec<_>>())?;
        let sigma_sq_radial = m.sigma_sq_difference(eps, 1.0);
        // the radial reduction needs a test function centred at the origin
        let finite_n = if z.norm() == 0.0 {
            Some(radial_variance_exact(n, &|r| if r < a { m.psi(eps, r) - m.psi(1.0, r) } else { 0.0 }, a)?)
        } else {
            None
        };
        table.push(vec![
            n.to_string(),
            cell(eps),
            cell(mean.value),
            cell(mean.stderr.unwrap_or(f64::NAN)),
            cell(var.value),
            cell(var.stderr.unwrap_or(f64::NAN)),
            cell(sigma_sq),
            cell(finite_n.unwrap_or(f64::NAN)),
        ]);
        results.push(json!({"n": n, "eps": eps, "mean": mean, "variance": var, "sigma_sq_grid": sigma_sq,
                            "sigma_sq_radial": sigma_sq_radial, "variance_finite_n": finite_n}));
        if i + 1 == cfg.n_list.len() {
            let ratio = var.value / sigma_sq;
            checks.push(
                Check::new("clt-variance", "empirical variance over the limiting variance", ratio, "[0.85, 1.15]", (ratio - 1.0).abs() <= 0.15)
                    .with_stderr(var.stderr.map(|s| s / sigma_sq)),
            );
            let se = mean.stderr.unwrap_or(f64::NAN);
            checks.push(
                Check::new("clt-mean", "empirical mean of the centred statistic", mean.value, "|x| <= 3 stderr", mean.value.abs() <= 3.0 * se)
                    .with_stderr(mean.stderr),
            );
            if let Some(exact) = finite_n {
                let ratio = var.value / exact;
                let se = var.stderr.unwrap_or(f64::NAN) / exact;
                checks.push(
                    Check::new(
                        "clt-variance-finite-n",
                        "empirical variance over the exact variance at this N",
                        ratio,
                        "|x - 1| <= 3 stderr",
                        (ratio - 1.0).abs() <= 3.0 * se,
                    )
                    .with_stderr(Some(se)),
                );
            }
        }
    }
    Ok(Outcome { results, checks, table })
}

pub(super) fn gmc(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<Outcome> {
    let m = RadialMollifier::new(cfg.eps0)?;
    let grid = Grid::square(cfg.grid.half, cfg.grid.side)?;
    let inside = grid.in_disk(cfg.eps0);
    let nodes: Vec<C> = inside.iter().map(|&k| grid.at(k)).collect();
    // nodes lie in D(0, eps0) and each sees points within eps0 of itself
    let radius = 2.0 * cfg.eps0;
    let mut table = Table::new(&["n", "replica", "total_mass"]);
    let mut results = Vec::new();
    let mut masses: Vec<Vec<f64>> = Vec::new();
    for &n in &cfg.n_list {
        let eps = cfg.smoothing_scale(n);
        let fields: Vec<Vec<f64>> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| sample_disk_restricted(n, radius, SeedStream::new(cfg.seed, r)).map(|s| g_field_nodes(&s.points, n, &m, eps, &nodes)))
            .collect::<Result<_>>()?;
        let sigma_sq = m.sigma_sq_difference(eps, 1.0);
        let meas = gmc_measure(&fields, &nodes, cfg.eps0, grid.cell_area(), cfg.gamma, cfg.normalizer, sigma_sq)?;
        for (k, mass) in meas.total_mass.iter().enumerate() {
            table.push(vec![n.to_string(), k.to_string(), cell(*mass)]);
        }
        if cfg.heatmaps {
            let mut values = vec![0.0; grid.len()];
            for (slot, d) in inside.iter().zip(&meas.densities[0]) {
                values[*slot] = *d;
            }
            let fs = FieldSample {
                grid,
                values,
                meta: FieldMeta { n, seed: SeedStream::new(cfg.seed, 0), quantity: Quantity::GmcDensity, clamp_count: 0 },
            };
            let stem = format!("gmc-n{n}-r0");
            out.field(&stem, &fs)?;
            out.heatmap(&format!("{stem}.png"), &fs, cfg.palette)?;
        }
        results.push(json!({"n": n, "eps": eps, "sigma_sq": sigma_sq, "supercritical": meas.supercritical,
                            "total_mass": mean_stderr(&meas.total_mass)}));
        masses.push(meas.total_mass);
    }
    let mut checks = Vec::new();
    if masses.len() >= 2 {
        let ks = ks_statistic(&masses[0], &masses[masses.len() - 1]);
        checks.push(Check::new("gmc-mass-ks", "KS distance between total-mass samples at the smallest and largest N", ks, "< 0.15", ks < 0.15));
    }
    Ok(Outcome { results, checks, table })
}
