use num_complex::Complex64;
use rand::Rng;
use statrs::function::gamma::gamma_ur;

use crate::error::{invalid, Error, Result};
use crate::rng::SeedStream;

use super::complex_normal;

pub(crate) const DPP_MAX_N: usize = 512;
const PROPOSAL_RADIUS: f64 = 1.2;
const UNIFORM_WEIGHT: f64 = 0.9;
const STALL_LIMIT: u64 = 10_000_000;

/// Orthonormal Ginibre basis functions at `x`: entry `j` is
/// `sqrt(N^(j+1) / (pi j!)) x^j exp(-N|x|^2/2)`.
pub(crate) fn ginibre_features(x: Complex64, n: usize, out: &mut Vec<Complex64>) {
    out.clear();
    let nf = n as f64;
    let mut v = Complex64::new((nf / std::f64::consts::PI).sqrt() * (-0.5 * nf * x.norm_sqr()).exp(), 0.0);
    for j in 0..n {
        out.push(v);
        v *= x * (nf / (j + 1) as f64).sqrt();
    }
}

fn proposal_density(r2: f64) -> f64 {
    let uniform = if r2 < PROPOSAL_RADIUS * PROPOSAL_RADIUS {
        UNIFORM_WEIGHT / (std::f64::consts::PI * PROPOSAL_RADIUS * PROPOSAL_RADIUS)
    } else {
        0.0
    };
    uniform + (1.0 - UNIFORM_WEIGHT) * (-r2).exp() / std::f64::consts::PI
}

fn propose<R: Rng>(rng: &mut R) -> Complex64 {
    if rng.gen::<f64>() < UNIFORM_WEIGHT {
        let r = PROPOSAL_RADIUS * rng.gen::<f64>().sqrt();
        Complex64::from_polar(r, std::f64::consts::TAU * rng.gen::<f64>())
    } else {
        complex_normal(rng, std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// Sup over the plane of the one-point intensity divided by the proposal
/// density, with a safety margin.
fn envelope_constant(n: usize) -> f64 {
    let nf = n as f64;
    let mut best = 0.0f64;
    for i in 0..=6000 {
        let r = 6.0 * i as f64 / 6000.0;
        let r2 = r * r;
        let intensity = nf / std::f64::consts::PI * if r2 == 0.0 { 1.0 } else { gamma_ur(nf, nf * r2) };
        best = best.max(intensity / proposal_density(r2));
    }
    best * 1.05
}

/// Sequential sampling of the Ginibre determinantal process by rejection
/// against a fixed proposal, with Gram–Schmidt updates of the conditional
/// intensity.
pub fn sample_dpp_kernel(n: usize, seed: SeedStream) -> Result<Vec<Complex64>> {
    if n == 0 || n > DPP_MAX_N {
        return Err(invalid(format!("dpp-kernel backend supports 1 <= n <= {DPP_MAX_N}, got {n}")));
    }
    let mut rng = seed.rng();
    let bound = envelope_constant(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut coeff = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..n {
        let mut rejections = 0u64;
        loop {
            let x = propose(&mut rng);
            ginibre_features(x, n, &mut v);
            let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let mut proj = 0.0;
            for (m, e) in basis.iter().enumerate() {
                let c: Complex64 = e.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                coeff[m] = c;
                proj += c.norm_sqr();
            }
            let resid = (total - proj).max(0.0);
            let u: f64 = rng.gen();
            if u * bound * proposal_density(x.norm_sqr()) < resid {
                let mut w = v.clone();
                for _pass in 0..2 {
                    for e in basis.iter() {
                        let c: Complex64 = e.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                        for (wi, ei) in w.iter_mut().zip(e) {
                            *wi -= c * ei;
                        }
                    }
                }
                let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 || !norm.is_finite() {
                    rejections += 1;
                    continue;
                }
                for wi in &mut w {
                    *wi /= norm;
                }
                basis.push(w);
                points.push(x);
                break;
            }
            rejections += 1;
            if rejections > STALL_LIMIT {
                return Err(Error::Sampling(format!(
                    "dpp-kernel acceptance below 1e-6 after {} points",
                    points.len()
                )));
            }
        }
    }
    Ok(points)
}
