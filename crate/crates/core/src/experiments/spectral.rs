use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::report::{cell, ArtifactWriter, Check, Table};
use super::{ExperimentConfig, Outcome, SampleSource};
use crate::error::Result;
use crate::gmc::RadialMollifier;
use crate::kernel::{default_ell, gap_pairs, kernel_gap_report, orthonormalize_perturbed, Perturbation, QuadratureSpec};
use crate::rng::SeedStream;
use crate::sampler::{tail_bound_report, EigenSample};
use crate::stats::clopper_pearson;

type C = Complex64;

/// Independent rule for the identity checks, coarser than the build rule.
const CHECK_QUADRATURE: QuadratureSpec = QuadratureSpec { radial_nodes: 300, angular_nodes: 256 };

pub(super) fn kostlan_tail(cfg: &ExperimentConfig, src: &SampleSource, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let mut table = Table::new(&["n", "delta", "replicas", "exceedances", "frequency", "ci_low", "ci_high", "bound"]);
    let mut results = Vec::new();
    let mut checks = Vec::new();
    // with no exceedance the interval still reaches this high
    let (_, zero_count) = clopper_pearson(0, cfg.replicas as u64, 0.95);
    for &n in &cfg.n_list {
        let samples: Vec<EigenSample> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| src.eigen(n, SeedStream::new(cfg.seed, r), cfg.backend))
            .collect::<Result<_>>()?;
        let rep = tail_bound_report(&samples, cfg.delta)?;
        table.push(vec![
            n.to_string(),
            cell(cfg.delta),
            rep.replicas.to_string(),
            rep.exceedances.to_string(),
            cell(rep.frequency),
            cell(rep.ci_low),
            cell(rep.ci_high),
            cell(rep.bound),
        ]);
        let limit = rep.bound + zero_count;
        checks.push(Check::new(
            &format!("tail-bound-n{n}"),
            format!("95% upper confidence limit of P(max |λ| >= 1 + {})", cfg.delta),
            rep.ci_high,
            format!("<= {limit:.4e}"),
            rep.ci_high <= limit,
        ));
        results.push(serde_json::to_value(&rep)?);
    }
    Ok(Outcome { results, checks, table })
}

pub(super) fn kernel_gap(cfg: &ExperimentConfig, _out: &mut ArtifactWriter) -> Result<Outcome> {
    let m = RadialMollifier::new(cfg.eps0)?;
    let eps = cfg.eps.unwrap_or(0.3);
    let g = Perturbation::single(m, eps, C::new(0.0, 0.0))?.scaled(cfg.gamma);
    let t = cfg.t_list[0];
    let mut table = Table::new(&["n", "ell", "delta", "constant", "orthonormality", "mass_error", "reproducing"]);
    let mut results = Vec::new();
    let mut checks = Vec::new();
    let mut constants = Vec::new();
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let pctx = orthonormalize_perturbed(n, n, &g, t, QuadratureSpec::default())?;
        let ell = default_ell(n, cfg.beta, eps);
        let pairs = gap_pairs(n, cfg.beta, &g, cfg.replicas, cfg.seed)?;
        let rep = kernel_gap_report(&pctx, ell, cfg.beta, &pairs)?;
        constants.push(rep.constant);
        let (mut ortho, mut mass_err, mut repro) = (f64::NAN, f64::NAN, f64::NAN);
        if i == 0 {
            ortho = pctx.orthonormality_residual(Some(CHECK_QUADRATURE));
            mass_err = (pctx.mass(CHECK_QUADRATURE) - n as f64).abs();
            let probes = [
                (C::new(0.0, 0.0), C::new(0.0, 0.0)),
                (C::new(0.2, 0.0), C::new(0.0, 0.1)),
                (C::new(0.1, -0.05), C::new(-0.3, 0.2)),
            ];
            repro = probes.iter().map(|(x, z)| pctx.reproducing_residual(*x, *z, CHECK_QUADRATURE)).fold(0.0, f64::max);
            checks.push(Check::new("kernel-orthonormality", format!("max |Gram - I| at N = {n}"), ortho, "<= 1e-8", ortho <= 1e-8));
            checks.push(Check::new("kernel-mass", format!("|∫ K*(x, x) d²x - N| at N = {n}"), mass_err, "<= 1e-6", mass_err <= 1e-6));
            checks.push(Check::new("kernel-reproducing", format!("reproducing-property residual at N = {n}"), repro, "<= 1e-6", repro <= 1e-6));
        }
        table.push(vec![n.to_string(), ell.to_string(), cell(rep.delta), cell(rep.constant), cell(ortho), cell(mass_err), cell(repro)]);
        results.push(json!({"n": n, "gap": rep, "orthonormality": ortho, "mass_error": mass_err, "reproducing": repro}));
    }
    if constants.len() >= 2 {
        let hi = constants.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = constants.iter().cloned().fold(f64::INFINITY, f64::min);
        let ratio = hi / lo;
        checks.push(Check::new("kernel-gap-ratio", "largest over smallest gap constant across N", ratio, "<= 3", ratio <= 3.0));
    }
    Ok(Outcome { results, checks, table })
}
