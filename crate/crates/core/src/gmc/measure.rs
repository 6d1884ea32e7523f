use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{smoothed_field_points, RadialMollifier};
use crate::error::{domain, invalid, Result};
use crate::sampler::EigenSample;
use crate::stats::logsumexp;

type C = Complex64;

/// `√8`; chaos with larger `gamma` degenerates.
pub const SUBCRITICAL_LIMIT: f64 = 2.828_427_124_746_190_3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    /// Cross-replica mean of `exp(gamma X)` at each node.
    Empirical,
    /// `exp(gamma² Σ² / 2)`.
    GaussianPrediction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmcMeasure {
    pub gamma: f64,
    pub normalizer: Normalizer,
    pub supercritical: bool,
    pub cell_area: f64,
    /// Per replica, density against Lebesgue measure at each node.
    pub densities: Vec<Vec<f64>>,
    pub total_mass: Vec<f64>,
}

/// Normalized `exp(gamma X(g^z))` times the circular-law density, from
/// per-replica g-field values at the nodes.
pub fn gmc_measure(
    fields: &[Vec<f64>],
    nodes: &[C],
    eps0: f64,
    cell_area: f64,
    gamma: f64,
    normalizer: Normalizer,
    sigma_sq: f64,
) -> Result<GmcMeasure> {
    if fields.is_empty() {
        return Err(invalid("no replicas"));
    }
    if fields.iter().any(|f| f.len() != nodes.len()) {
        return Err(invalid("every replica needs one value per node"));
    }
    if let Some(z) = nodes.iter().find(|z| z.norm() > eps0 + 1e-12) {
        return Err(domain(format!("node {z} lies outside D(0, {eps0})")));
    }
    if !(gamma > 0.0) {
        return Err(invalid("gamma must be positive"));
    }
    let supercritical = gamma >= SUBCRITICAL_LIMIT;
    if supercritical {
        log::warn!("gamma = {gamma} is not below sqrt(8); the measure is not expected to converge");
    }
    let r = fields.len() as f64;
    let log_norm: Vec<f64> = match normalizer {
        Normalizer::Empirical => (0..nodes.len())
            .map(|k| {
                let col: Vec<f64> = fields.iter().map(|f| gamma * f[k]).collect();
                logsumexp(&col) - r.ln()
            })
            .collect(),
        Normalizer::GaussianPrediction => vec![0.5 * gamma * gamma * sigma_sq; nodes.len()],
    };
    let inv_pi = 1.0 / std::f64::consts::PI;
    let densities: Vec<Vec<f64>> = fields
        .iter()
        .map(|f| f.iter().zip(&log_norm).map(|(v, l)| (gamma * v - l).exp() * inv_pi).collect())
        .collect();
    let total_mass = densities.iter().map(|d| d.iter().sum::<f64>() * cell_area).collect();
    Ok(GmcMeasure { gamma, normalizer, supercritical, cell_area, densities, total_mass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxScanReport {
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub eps: f64,
    /// `(1 - delta) (√8/2) log(1/eps)`.
    pub threshold: f64,
    pub maxima: Vec<f64>,
    pub pass_fraction: f64,
}

/// Per replica, the largest field value smoothed at `eps = N^{-1/2+alpha}`
/// over the nodes, and how often it clears the threshold.
pub fn smoothed_max_scan(samples: &[EigenSample], m: &RadialMollifier, alpha: f64, delta: f64, nodes: &[C]) -> Result<MaxScanReport> {
    let first = samples.first().ok_or_else(|| invalid("no replicas"))?;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    if nodes.is_empty() {
        return Err(invalid("no nodes"));
    }
    let n = first.n;
    if samples.iter().any(|s| s.n != n || !s.angles_valid()) {
        return Err(invalid("replicas must share N and carry angles"));
    }
    let eps = (n as f64).powf(alpha - 0.5);
    let threshold = (1.0 - delta) * 0.5 * SUBCRITICAL_LIMIT * (1.0 / eps).ln();
    let maxima: Vec<f64> = samples
        .par_iter()
        .map(|s| {
            nodes
                .iter()
                .map(|z| smoothed_field_points(&s.points, n, m, eps, *z))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let pass = maxima.iter().filter(|&&v| v >= threshold).count();
    Ok(MaxScanReport { n, alpha, delta, eps, threshold, pass_fraction: pass as f64 / samples.len() as f64, maxima })
}
