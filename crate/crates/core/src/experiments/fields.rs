use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::report::{cell, ArtifactWriter, Check, Table};
use super::{ExperimentConfig, Outcome, SampleSource};
use crate::error::Result;
use crate::field::{
    covariance_from_values, evaluate_field, field_max, free_energy, freezing_prediction, psi_at, thick_points, FieldSample, Grid,
    Palette, Quantity,
};
use crate::gmc::{smoothed_max_scan, RadialMollifier};
use crate::moments::ww_prediction_log;
use crate::stats::{linear_fit, mean_stderr, Estimate};

type C = Complex64;

const SMOOTHED_SCAN_SIDE: usize = 65;
const MIN_OFFSET: f64 = 0.05;
const OFFSET_COUNT: usize = 11;

fn grid_of(cfg: &ExperimentConfig) -> Result<Grid> {
    Grid::square(cfg.grid.half, cfg.grid.side)
}

pub(super) fn field_sample(cfg: &ExperimentConfig, src: &SampleSource, out: &mut ArtifactWriter) -> Result<Outcome> {
    let grid = grid_of(cfg)?;
    let mut table = Table::new(&["n", "replica", "max", "max_over_log_n", "argmax_re", "argmax_im", "min", "clamped"]);
    let mut results = Vec::new();
    let mut all_finite = true;
    for &n in &cfg.n_list {
        let samples = src.replicas(n, cfg.seed, cfg.replicas, cfg.backend)?;
        let log_n = (n as f64).ln();
        let mut ratios = Vec::new();
        for (k, s) in samples.iter().enumerate() {
            let fs = evaluate_field(s, &grid)?;
            all_finite &= fs.values.iter().all(|v| v.is_finite());
            let stem = format!("psi-n{n}-r{k}");
            out.field(&stem, &fs)?;
            let (arg, max) = field_max(&fs, s, cfg.r.min(cfg.grid.half))?;
            let min = fs.values.iter().cloned().fold(f64::INFINITY, f64::min);
            if cfg.heatmaps {
                out.heatmap(&format!("{stem}.png"), &fs, cfg.palette)?;
                // |p_N|^γ / E|p_N|^γ, with the bulk asymptotics as the mean
                let shift = ww_prediction_log(cfg.gamma, n)?;
                let chaos = FieldSample {
                    grid,
                    values: fs.values.iter().map(|v| (cfg.gamma * v - shift).exp()).collect(),
                    meta: crate::field::FieldMeta { quantity: Quantity::GmcDensity, ..fs.meta },
                };
                let cstem = format!("charpoly-n{n}-r{k}");
                out.field(&cstem, &chaos)?;
                let palette = if cfg.palette == Palette::Levels { Palette::Grayscale } else { cfg.palette };
                out.heatmap(&format!("{cstem}.png"), &chaos, palette)?;
            }
            ratios.push(max / log_n);
            table.push(vec![
                n.to_string(),
                k.to_string(),
                cell(max),
                cell(max / log_n),
                cell(arg.re),
                cell(arg.im),
                cell(min),
                fs.meta.clamp_count.to_string(),
            ]);
        }
        results.push(json!({"n": n, "replicas": samples.len(), "max_over_log_n": mean_stderr(&ratios)}));
    }
    let checks = vec![Check::new("finite-field", "every grid value is finite", if all_finite { 1.0 } else { 0.0 }, "1", all_finite)];
    Ok(Outcome { results, checks, table })
}

pub(super) fn max_scan(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let grid = grid_of(cfg)?;
    let m = RadialMollifier::new(cfg.eps0)?;
    let sgrid = Grid::square(cfg.eps0, SMOOTHED_SCAN_SIDE)?;
    let snodes: Vec<C> = sgrid.in_disk(cfg.eps0).into_iter().map(|k| sgrid.at(k)).collect();
    let mut table = Table::new(&["n", "replica", "max", "max_over_log_n", "argmax_re", "argmax_im", "smoothed_max"]);
    let mut results = Vec::new();
    let mut means: Vec<Estimate> = Vec::new();
    let mut ratios_last = Estimate::exact(f64::NAN);
    let mut smoothed_last = f64::NAN;
    for &n in &cfg.n_list {
        let samples = src.replicas(n, cfg.seed, cfg.replicas, cfg.backend)?;
        let log_n = (n as f64).ln();
        let mut maxima = Vec::with_capacity(samples.len());
        let mut args = Vec::with_capacity(samples.len());
        for s in &samples {
            let fs = evaluate_field(s, &grid)?;
            let (arg, max) = field_max(&fs, s, cfg.r)?;
            maxima.push(max);
            args.push(arg);
        }
        let scan = smoothed_max_scan(&samples, &m, cfg.alpha, cfg.delta, &snodes)?;
        for k in 0..samples.len() {
            table.push(vec![
                n.to_string(),
                k.to_string(),
                cell(maxima[k]),
                cell(maxima[k] / log_n),
                cell(args[k].re),
                cell(args[k].im),
                cell(scan.maxima[k]),
            ]);
        }
        let ratios: Vec<f64> = maxima.iter().map(|v| v / log_n).collect();
        let mean = mean_stderr(&maxima);
        ratios_last = mean_stderr(&ratios);
        smoothed_last = scan.pass_fraction;
        means.push(mean);
        results.push(json!({
            "n": n,
            "max": mean,
            "max_over_log_n": ratios_last,
            "smoothed": {"eps": scan.eps, "threshold": scan.threshold, "pass_fraction": scan.pass_fraction,
                         "mean_max": mean_stderr(&scan.maxima)},
        }));
    }
    let mut checks = vec![Check::within("max-ratio", "mean of max Ψ / log N at the largest N", ratios_last, 0.45, 0.75)];
    if means.len() >= 2 {
        let (step, se) = means
            .windows(2)
            .map(|w| (w[1].value - w[0].value, w[1].stderr.unwrap_or(0.0).hypot(w[0].stderr.unwrap_or(0.0))))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        checks.push(Check::new("max-growth", "smallest increase of the mean max between successive N", step, "> 0", step > 0.0).with_stderr(Some(se)));
    }
    checks.push(Check::new(
        "smoothed-max",
        "fraction of replicas whose smoothed max clears the threshold at the largest N",
        smoothed_last,
        ">= 0.9",
        smoothed_last >= 0.9,
    ));
    Ok(Outcome { results, checks, table })
}

pub(super) fn thick_points_run(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let grid = grid_of(cfg)?;
    let mut table = Table::new(&["n", "replica", "threshold", "area"]);
    let mut results = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &n in &cfg.n_list {
        let samples = src.replicas(n, cfg.seed, cfg.replicas, cfg.backend)?;
        let mut areas = Vec::with_capacity(samples.len());
        let mut threshold = f64::NAN;
        for (k, s) in samples.iter().enumerate() {
            let rep = thick_points(&evaluate_field(s, &grid)?, cfg.beta, cfg.r)?;
            threshold = rep.threshold;
            table.push(vec![n.to_string(), k.to_string(), cell(rep.threshold), cell(rep.area)]);
            areas.push(rep.area);
        }
        let mean = mean_stderr(&areas);
        if mean.value > 0.0 {
            xs.push((n as f64).ln());
            ys.push(mean.value.ln());
        }
        results.push(json!({"n": n, "threshold": threshold, "area": mean}));
    }
    let target = -2.0 * cfg.beta * cfg.beta;
    let check = if xs.len() == cfg.n_list.len() {
        let (slope, _, se) = linear_fit(&xs, &ys);
        Check::within("thick-decay", "slope of log mean thick-point area against log N", Estimate::with_stderr(slope, se), target - 0.2, target + 0.2)
    } else {
        Check::new("thick-decay", "some N had no thick points", f64::NAN, format!("[{}, {}]", target - 0.2, target + 0.2), false)
    };
    Ok(Outcome { results, checks: vec![check], table })
}

pub(super) fn freezing(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let grid = grid_of(cfg)?;
    let mut table = Table::new(&["n", "beta", "free_energy", "stderr", "prediction"]);
    let mut results = Vec::new();
    let mut last: Vec<Estimate> = Vec::new();
    for &n in &cfg.n_list {
        let samples = src.replicas(n, cfg.seed, cfg.replicas, cfg.backend)?;
        let mut per_beta = vec![Vec::with_capacity(samples.len()); cfg.beta_list.len()];
        for s in &samples {
            let fs = evaluate_field(s, &grid)?;
            for (i, &b) in cfg.beta_list.iter().enumerate() {
                per_beta[i].push(free_energy(&fs, b, cfg.r)?);
            }
        }
        last = per_beta.iter().map(|v| mean_stderr(v)).collect();
        let mut rows = Vec::new();
        for (&b, e) in cfg.beta_list.iter().zip(&last) {
            let pred = freezing_prediction(b);
            table.push(vec![n.to_string(), cell(b), cell(e.value), cell(e.stderr.unwrap_or(f64::NAN)), cell(pred)]);
            rows.push(json!({"beta": b, "free_energy": e, "prediction": pred}));
        }
        results.push(json!({"n": n, "curve": rows}));
    }
    let mut checks = Vec::new();
    for (&b, e) in cfg.beta_list.iter().zip(&last) {
        let pred = freezing_prediction(b);
        let dev = e.value - pred;
        checks.push(
            Check::new(&format!("freezing-beta-{b:.4}"), format!("free energy minus prediction at beta = {b}"), dev, "|x| <= 0.15", dev.abs() <= 0.15)
                .with_stderr(e.stderr),
        );
    }
    let frozen: Vec<f64> = cfg.beta_list.iter().zip(&last).filter(|(b, _)| **b >= 8f64.sqrt() - 1e-9).map(|(_, e)| e.value).collect();
    if frozen.len() >= 2 {
        let range = frozen.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - frozen.iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(Check::new("freezing-flat", "range of the free energy over beta >= sqrt(8)", range, "<= 0.1", range <= 0.1));
    }
    Ok(Outcome { results, checks, table })
}

/// Offsets `MIN_OFFSET..=r`, evenly spaced in log scale along the real axis.
pub fn covariance_offsets(r: f64) -> Vec<C> {
    let (a, b) = (MIN_OFFSET.ln(), r.ln());
    (0..OFFSET_COUNT).map(|k| C::new((a + (b - a) * k as f64 / (OFFSET_COUNT - 1) as f64).exp(), 0.0)).collect()
}

pub(super) fn covariance(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let z0 = cfg.points[0];
    let offsets = covariance_offsets(cfg.r);
    let mut table = Table::new(&["n", "offset", "covariance", "stderr", "prediction"]);
    let mut results = Vec::new();
    let mut last = None;
    for &n in &cfg.n_list {
        let samples = src.replicas(n, cfg.seed, cfg.replicas, cfg.backend)?;
        let vals: Vec<(f64, Vec<f64>)> = samples
            .par_iter()
            .map(|s| (psi_at(&s.points, n, z0).0, offsets.iter().map(|x| psi_at(&s.points, n, z0 + x).0).collect()))
            .collect();
        let base: Vec<f64> = vals.iter().map(|v| v.0).collect();
        let others: Vec<Vec<f64>> = (0..offsets.len()).map(|k| vals.iter().map(|v| v.1[k]).collect()).collect();
        let scan = covariance_from_values(n, z0, &base, &offsets, &others)?;
        for p in &scan.points {
            table.push(vec![n.to_string(), cell(p.offset.norm()), cell(p.covariance), cell(p.stderr), cell(-0.5 * p.offset.norm().ln())]);
        }
        results.push(json!({"n": n, "slope": Estimate::with_stderr(scan.slope, scan.slope_stderr), "intercept": scan.intercept,
                            "points": scan.points}));
        last = Some(scan);
    }
    let scan = last.expect("n-list is non-empty");
    let check = Check::within(
        "covariance-slope",
        "slope of Cov(Ψ(z0), Ψ(z0 + x)) against log 1/|x|",
        Estimate::with_stderr(scan.slope, scan.slope_stderr),
        0.35,
        0.65,
    );
    Ok(Outcome { results, checks: vec![check], table })
}
