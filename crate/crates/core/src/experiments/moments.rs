use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::report::{cell, ArtifactWriter, Check, Table};
use super::{ExperimentConfig, Outcome, SampleSource};
use crate::error::{Error, Result};
use crate::gmc::RadialMollifier;
use crate::kernel::{orthonormalize_perturbed, Perturbation, QuadratureSpec};
use crate::moments::{
    heine_moment_general, joint_even_moment_exact, log_mean_jackknife, log_product_sq, ward_estimate, ward_integrand, ww_convergence_report,
    CompactBump, MomentSpec,
};
use crate::rng::SeedStream;

type C = Complex64;

/// Largest N for which the weighted-polynomial route is also evaluated.
const HEINE_MAX_N: usize = 48;
const MAX_POINTS: usize = 8;

pub(super) fn moments_check(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let pts = &cfg.points;
    let kmax = pts.len();
    let mut table = Table::new(&["n", "points", "exact", "monte_carlo", "mc_stderr", "heine", "closed_form"]);
    let mut results = Vec::new();
    let mut checks = Vec::new();
    for &n in &cfg.n_list {
        let pctx = if n <= HEINE_MAX_N {
            let g = Perturbation::zero(RadialMollifier::new(0.25)?);
            Some(orthonormalize_perturbed(n, n + kmax, &g, 0.0, QuadratureSpec::default())?)
        } else {
            None
        };
        let logs: Vec<[f64; MAX_POINTS]> = if cfg.replicas >= 2 {
            (0..cfg.replicas as u64)
                .into_par_iter()
                .map(|r| {
                    let s = src.eigen(n, SeedStream::new(cfg.seed, r), cfg.backend)?;
                    let mut row = [0.0; MAX_POINTS];
                    for (k, z) in pts.iter().enumerate() {
                        row[k] = log_product_sq(&s.points, &[*z]);
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let mut rows = Vec::new();
        for k in 1..=kmax {
            let spec = MomentSpec::new(n, pts[..k].to_vec())?;
            let exact = joint_even_moment_exact(&spec)?;
            let mc = if logs.is_empty() {
                None
            } else {
                let vals: Vec<f64> = logs.iter().map(|row| row[..k].iter().sum()).collect();
                Some(log_mean_jackknife(&vals)?)
            };
            let heine = pctx.as_ref().map(|p| heine_moment_general(p, &spec)).transpose()?;
            let closed = (n == 1 && k == 1).then(|| (1.0 + pts[0].norm_sqr()).ln());
            table.push(vec![
                n.to_string(),
                k.to_string(),
                cell(exact),
                cell(mc.map_or(f64::NAN, |e| e.value)),
                cell(mc.and_then(|e| e.stderr).unwrap_or(f64::NAN)),
                cell(heine.unwrap_or(f64::NAN)),
                cell(closed.unwrap_or(f64::NAN)),
            ]);
            if let Some(e) = mc {
                let diff = exact - e.value;
                let se = e.stderr.unwrap_or(f64::NAN);
                checks.push(
                    Check::new(
                        &format!("exact-vs-mc-n{n}-k{k}"),
                        format!("log moment, exact minus Monte Carlo, N = {n}, {k} point(s)"),
                        diff,
                        "|x| <= 3 stderr",
                        diff.abs() <= 3.0 * se,
                    )
                    .with_stderr(e.stderr),
                );
            }
            if let Some(h) = heine {
                let rel = (h - exact).exp_m1().abs();
                checks.push(Check::new(
                    &format!("heine-bridge-n{n}-k{k}"),
                    format!("relative gap between the two exact routes, N = {n}, {k} point(s)"),
                    rel,
                    "<= 1e-7",
                    rel <= 1e-7,
                ));
            }
            if let Some(c) = closed {
                let gap = (exact.exp() - c.exp()).abs();
                checks.push(Check::new("closed-form-n1", "|exact - (1 + |z|²)| for N = 1", gap, "<= 1e-12", gap <= 1e-12));
            }
            rows.push(json!({"points": k, "exact": exact, "monte_carlo": mc, "heine": heine, "closed_form": closed}));
        }
        results.push(json!({"n": n, "moments": rows}));
    }
    Ok(Outcome { results, checks, table })
}

pub(super) fn ww_scan(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let z = cfg.points[0];
    let mut draw = |n: usize| src.replicas(n, cfg.seed, cfg.replicas, cfg.backend);
    let rep = ww_convergence_report(&cfg.n_list, cfg.gamma, z, Some(&mut draw))?;
    let mut table = Table::new(&["n", "gamma", "log_moment", "log_prediction", "ratio", "stderr"]);
    let mut results = Vec::new();
    for r in &rep.rows {
        table.push(vec![
            r.n.to_string(),
            cell(r.gamma),
            cell(r.log_moment),
            cell(r.log_prediction),
            cell(r.ratio),
            cell(r.stderr.unwrap_or(f64::NAN)),
        ]);
        results.push(serde_json::to_value(r)?);
    }
    let first = &rep.rows[0];
    let last = &rep.rows[rep.rows.len() - 1];
    let mut checks = vec![Check::new("ww-ratio", "moment over prediction at the largest N", last.ratio, "[0.9, 1.1]", (last.ratio - 1.0).abs() <= 0.1)
        .with_stderr(last.stderr)];
    if rep.rows.len() >= 2 {
        let (a, b) = ((first.ratio - 1.0).abs(), (last.ratio - 1.0).abs());
        checks.push(Check::new("ww-approach", "|ratio - 1| at the largest N minus at the smallest", b - a, "<= 0", b <= a));
    }
    Ok(Outcome { results, checks, table })
}

pub(super) fn ward(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let m = RadialMollifier::new(cfg.eps0)?;
    let g = Perturbation::single(m, cfg.eps.unwrap_or(0.5), C::new(0.0, 0.0))?.scaled(cfg.gamma);
    let h = CompactBump { center: cfg.points[0], radius: cfg.r, amplitude: C::new(1.0, 0.0) };
    let mut table = Table::new(&["n", "t", "residual_re", "residual_im", "stderr", "effective_sample_size"]);
    let mut results = Vec::new();
    let mut checks = Vec::new();
    for &n in &cfg.n_list {
        // per replica: Σ g(λ_j) and the integrand at each t
        let per: Vec<(f64, Vec<C>)> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| {
                let s = src.eigen(n, SeedStream::new(cfg.seed, r), cfg.backend)?;
                let sum_g: f64 = s.points.iter().map(|x| g.value(*x)).sum();
                Ok((sum_g, cfg.t_list.iter().map(|&t| ward_integrand(&s.points, n, &g, t, &h)).collect()))
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::new();
        for (i, &t) in cfg.t_list.iter().enumerate() {
            let vals: Vec<C> = per.iter().map(|p| p.1[i]).collect();
            let logw: Vec<f64> = per.iter().map(|p| t * p.0).collect();
            let id = format!("ward-n{n}-t{t}");
            match ward_estimate(&vals, &logw) {
                Ok(est) => {
                    let size = est.residual.norm();
                    table.push(vec![
                        n.to_string(),
                        cell(t),
                        cell(est.residual.re),
                        cell(est.residual.im),
                        cell(est.stderr),
                        cell(est.effective_sample_size),
                    ]);
                    checks.push(
                        Check::new(&id, format!("|residual| of the loop equation, N = {n}, t = {t}"), size, "<= 3 stderr", size <= 3.0 * est.stderr)
                            .with_stderr(Some(est.stderr)),
                    );
                    rows.push(json!({"t": t, "estimate": est}));
                }
                Err(Error::Statistics(msg)) => {
                    checks.push(Check::new(&id, msg.clone(), f64::NAN, "effective sample size >= 50", false));
                    rows.push(json!({"t": t, "error": msg}));
                }
                Err(e) => return Err(e),
            }
        }
        results.push(json!({"n": n, "rows": rows}));
    }
    Ok(Outcome { results, checks, table })
}
