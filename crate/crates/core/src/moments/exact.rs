use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::barnes_g_log;
use crate::error::{domain, invalid, Error, Result};
use crate::field::equilibrium_potential;
use crate::kernel::{KernelContext, Normalization, PerturbedKernelContext};
use crate::linalg::{hermitian_logdet, ComplexMatrix};
use crate::sampler::EigenSample;
use crate::stats::{logsumexp, Estimate};

type C = Complex64;

const MIN_SEPARATION: f64 = 1e-8;

/// Matrix size `n` and the points at which `Π_j |z_i - λ_j|²` is taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    pub n: usize,
    pub points: Vec<C>,
}

impl MomentSpec {
    pub fn new(n: usize, points: Vec<C>) -> Result<Self> {
        let s = MomentSpec { n, points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.points.is_empty() {
            return Err(invalid("moment spec needs n >= 1 and at least one point"));
        }
        if self.points.len() > 8 {
            return Err(invalid("at most 8 points are supported"));
        }
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[..i] {
                if (a - b).norm() < MIN_SEPARATION {
                    return Err(Error::Conditioning(format!("points {a} and {b} nearly coincide")));
                }
            }
        }
        Ok(())
    }

    fn log_vandermonde_sq(&self) -> f64 {
        let mut s = 0.0;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[..i] {
                s += (a - b).norm_sqr().ln();
            }
        }
        s
    }
}

fn log_det_of(n: usize, entry: impl Fn(usize, usize) -> C) -> Result<f64> {
    let m = ComplexMatrix::from_fn(n, n, entry);
    let d = hermitian_logdet(&m)?;
    if d.sign <= 0.0 || !d.log_abs.is_finite() {
        return Err(Error::Conditioning("kernel matrix is numerically singular".into()));
    }
    Ok(d.log_abs)
}

/// `log E Π_i Π_j |z_i - λ_j|²` in closed form through the kernel of size
/// `N + n` with weight `N`.
pub fn joint_even_moment_exact(spec: &MomentSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    let k = spec.points.len();
    let ctx = KernelContext::new(n, n + k, Normalization::PerLebesgue)?;
    let mut entries = vec![C::new(0.0, 0.0); k * k];
    for i in 0..k {
        for j in 0..k {
            entries[i * k + j] = ctx.kernel_eval(spec.points[i], spec.points[j])?;
        }
    }
    let logdet = log_det_of(k, |i, j| entries[i * k + j])?;
    let nf = n as f64;
    let kf = k as f64;
    let lg: f64 = (n..n + k).map(|m| libm::lgamma(m as f64 + 1.0)).sum();
    let quad: f64 = spec.points.iter().map(|z| z.norm_sqr()).sum();
    Ok(kf * PI.ln() + lg - (nf * kf + kf * (kf + 1.0) / 2.0) * nf.ln() + logdet - spec.log_vandermonde_sq() + nf * quad)
}

/// The same moment under the weight of `pctx`, from its leading
/// coefficients and kernel.
pub fn heine_moment_general(pctx: &PerturbedKernelContext, spec: &MomentSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    let k = spec.points.len();
    if pctx.n_weight() != n {
        return Err(invalid(format!("context has weight {} but the spec has N = {n}", pctx.n_weight())));
    }
    if pctx.degree() < n + k {
        return Err(Error::Config(format!("polynomial table has degree {}, need {}", pctx.degree(), n + k)));
    }
    let mut log_ratio = 0.0;
    for m in n..n + k {
        log_ratio -= 2.0 * pctx.log_kappa(m)?;
    }
    let logdet = log_det_of(k, |i, j| pctx.eval_terms(spec.points[i], spec.points[j], n + k))?;
    let pot: f64 = spec.points.iter().map(|z| 2.0 * pctx.weighted_potential(*z)).sum();
    Ok(log_ratio + logdet - spec.log_vandermonde_sq() + pot)
}

/// `log mean exp(values)` with a jackknife standard error.
pub fn log_mean_jackknife(values: &[f64]) -> Result<Estimate> {
    let r = values.len();
    if r < 2 {
        return Err(domain("need at least two replicas"));
    }
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let terms: Vec<f64> = values.iter().map(|v| (v - top).exp()).collect();
    let total: f64 = terms.iter().sum();
    let full = top + (total / r as f64).ln();
    let rf = r as f64;
    let mut leave: Vec<f64> = Vec::with_capacity(r);
    for (i, t) in terms.iter().enumerate() {
        let rest = total - t;
        let v = if rest > 1e-12 * total {
            top + (rest / (rf - 1.0)).ln()
        } else {
            let others: Vec<f64> = values.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| *v).collect();
            logsumexp(&others) - (rf - 1.0).ln()
        };
        leave.push(v);
    }
    let mean = leave.iter().sum::<f64>() / rf;
    let var = leave.iter().map(|v| (v - mean).powi(2)).sum::<f64>() * (rf - 1.0) / rf;
    Ok(Estimate::with_stderr(full, var.sqrt()))
}

/// `Σ_i Σ_j 2 log|z_i - λ_j|` for one replica.
pub fn log_product_sq(points: &[C], at: &[C]) -> f64 {
    at.iter().map(|z| points.iter().map(|p| (z - p).norm_sqr().ln()).sum::<f64>()).sum()
}

/// Monte Carlo counterpart of [`joint_even_moment_exact`].
pub fn joint_even_moment_mc(replicas: &[EigenSample], spec: &MomentSpec) -> Result<Estimate> {
    spec.validate()?;
    if replicas.is_empty() {
        return Err(domain("no replicas"));
    }
    if replicas.iter().any(|s| s.n != spec.n || !s.angles_valid()) {
        return Err(invalid("replicas must have N = spec.n and carry angles"));
    }
    let vals: Vec<f64> = replicas.iter().map(|s| log_product_sq(&s.points, &spec.points)).collect();
    log_mean_jackknife(&vals)
}

/// `log[(2π)^{γ/4} N^{γ²/8} / G(1 + γ/2)]`.
pub fn ww_prediction_log(gamma: f64, n: usize) -> Result<f64> {
    if !(gamma > -2.0) {
        return Err(domain(format!("gamma must exceed -2, got {gamma}")));
    }
    Ok(0.25 * gamma * (2.0 * PI).ln() + gamma * gamma / 8.0 * (n as f64).ln() - barnes_g_log(1.0 + gamma / 2.0)?)
}

pub fn ww_prediction(gamma: f64, n: usize) -> Result<f64> {
    Ok(ww_prediction_log(gamma, n)?.exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WwRow {
    pub n: usize,
    pub gamma: f64,
    /// `log E e^{γ Ψ_N(z)}`.
    pub log_moment: f64,
    pub log_prediction: f64,
    pub ratio: f64,
    /// Standard error of the ratio; `None` when the moment is exact.
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WwReport {
    pub gamma: f64,
    pub z: C,
    pub rows: Vec<WwRow>,
    /// Last ratio within 10% of 1 and closer to 1 than the first.
    pub pass: bool,
}

/// `E e^{γ Ψ_N(z)}` against its large-N prediction. At `γ = 2` the moment
/// is exact; otherwise `mc` supplies the replicas for each `N`.
pub fn ww_convergence_report(
    ns: &[usize],
    gamma: f64,
    z: C,
    mut mc: Option<&mut dyn FnMut(usize) -> Result<Vec<EigenSample>>>,
) -> Result<WwReport> {
    if ns.is_empty() {
        return Err(invalid("no N values"));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let shift = gamma * n as f64 * equilibrium_potential(z);
        let pred = ww_prediction_log(gamma, n)?;
        let (log_moment, stderr) = if gamma == 0.0 {
            (0.0, None)
        } else if gamma == 2.0 {
            (joint_even_moment_exact(&MomentSpec::new(n, vec![z])?)? - shift, None)
        } else {
            let sampler = mc.as_mut().ok_or_else(|| Error::Config("gamma != 2 needs Monte Carlo replicas".into()))?;
            let reps = sampler(n)?;
            let vals: Vec<f64> = reps.iter().map(|s| 0.5 * gamma * log_product_sq(&s.points, &[z])).collect();
            let est = log_mean_jackknife(&vals)?;
            (est.value - shift, est.stderr)
        };
        let ratio = (log_moment - pred).exp();
        rows.push(WwRow { n, gamma, log_moment, log_prediction: pred, ratio, stderr: stderr.map(|s| s * ratio) });
    }
    let first = (rows[0].ratio - 1.0).abs();
    let last = (rows[rows.len() - 1].ratio - 1.0).abs();
    let pass = last <= 0.1 && (rows.len() == 1 || last <= first);
    Ok(WwReport { gamma, z, rows, pass })
}
