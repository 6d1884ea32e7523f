use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::perturbed::{Perturbation, PerturbedKernelContext};
use crate::error::{domain, invalid, Result};
use crate::rng::SeedStream;

type C = Complex64;

const MAX_ELL: usize = 6;

/// Local surrogate `K#(x, w)` for the perturbed kernel, built from the
/// order-`ell` expansion of `g` around `w`.
pub fn bergman_approx_eval(n_weight: usize, g: &Perturbation, ell: usize, t: f64, x: C, w: C) -> Result<C> {
    let u = x - w;
    if u.norm() > 0.5 {
        return Err(domain(format!("|x - w| = {} exceeds 0.5", u.norm())));
    }
    if ell > 12 {
        return Err(invalid("expansion order above 12 is not supported"));
    }
    let n = n_weight as f64;
    let gw = g.value(w);
    let mut upsilon = C::new(gw, 0.0);
    if ell > 0 && !g.is_zero() {
        let d = g.derivatives(w, ell);
        let mut pow = C::new(1.0, 0.0);
        for (i, di) in d.iter().enumerate() {
            pow *= u;
            upsilon += pow * di / (i + 1) as f64;
        }
    }
    let expo = n * x * w.conj() - t * upsilon - 0.5 * n * (x.norm_sqr() + w.norm_sqr())
        + C::new(0.5 * t * (g.value(x) + gw), 0.0);
    Ok((n / PI) * expo.exp())
}

/// `sqrt((log N)^β / N)`.
pub fn gap_scale(n_weight: usize, beta: f64) -> f64 {
    let n = n_weight as f64;
    (n.ln().powf(beta) / n).sqrt()
}

/// Smallest `ell` with `(delta/eps)^ell <= 1/N`. When no order up to 6
/// achieves that the pairs reach past the bump and higher Taylor terms only
/// grow, so the linear expansion is used.
pub fn default_ell(n_weight: usize, beta: f64, eps: f64) -> usize {
    let eta = gap_scale(n_weight, beta) / eps;
    if eta >= 1.0 {
        return 1;
    }
    let need = ((n_weight as f64).ln() / -eta.ln()).ceil() as usize;
    if need > MAX_ELL {
        1
    } else {
        need.max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPair {
    pub z: C,
    pub w: C,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelGapReport {
    pub n_weight: usize,
    pub beta: f64,
    pub delta: f64,
    pub ell: usize,
    pub pairs: usize,
    pub constant: f64,
    pub worst: GapPair,
}

/// Random admissible pairs: half concentrated on the perturbation, half
/// spread over `D_{1-2δ}`.
pub fn gap_pairs(n_weight: usize, beta: f64, g: &Perturbation, count: usize, seed: u64) -> Result<Vec<GapPair>> {
    let delta = gap_scale(n_weight, beta);
    let bulk = 1.0 - 2.0 * delta;
    if bulk <= 0.0 {
        return Err(domain(format!("D(1 - 2 delta) is empty for N = {n_weight}, beta = {beta}")));
    }
    let mut rng = SeedStream::new(seed, 0).with_salt(0x6170).rng();
    let centers: Vec<(C, f64)> = g.terms().iter().map(|t| (t.center, t.eps)).collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let focus = !centers.is_empty() && out.len() % 2 == 0;
        let (c, r) = if focus {
            let (c, e) = centers[out.len() / 2 % centers.len()];
            (c, e.min(bulk))
        } else {
            (C::new(0.0, 0.0), bulk)
        };
        let z = c + C::from_polar(r * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
        if z.norm() > bulk {
            continue;
        }
        let w = z + C::from_polar(delta * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
        out.push(GapPair { z, w });
    }
    Ok(out)
}

/// Largest `|K*(w, z) - K#(w, z)| / (θ(z) + 1)` over the pairs.
pub fn kernel_gap_report(pctx: &PerturbedKernelContext, ell: usize, beta: f64, pairs: &[GapPair]) -> Result<KernelGapReport> {
    if pairs.is_empty() {
        return Err(invalid("no trial pairs"));
    }
    let n = pctx.n_weight();
    let delta = gap_scale(n, beta);
    let bulk = 1.0 - 2.0 * delta;
    let g = pctx.perturbation();
    let mut constant = -1.0;
    let mut worst = pairs[0];
    for p in pairs {
        if p.z.norm() > bulk + 1e-12 || (p.w - p.z).norm() > delta + 1e-12 {
            return Err(domain(format!("pair {p:?} outside the admissible region (delta {delta})")));
        }
        let exact = pctx.eval(p.w, p.z);
        let approx = bergman_approx_eval(n, g, ell, pctx.t(), p.w, p.z)?;
        let gap = (exact - approx).norm() / (g.theta(p.z) + 1.0);
        if gap > constant {
            constant = gap;
            worst = *p;
        }
    }
    Ok(KernelGapReport { n_weight: n, beta, delta, ell, pairs: pairs.len(), constant, worst })
}
