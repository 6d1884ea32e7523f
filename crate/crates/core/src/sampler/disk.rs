use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::error::{invalid, Error, Result};
use crate::rng::SeedStream;

const STALL_LIMIT: u64 = 10_000_000;

/// The Ginibre eigenvalues (of an N x N matrix) that fall in the closed disk
/// of the given radius about the origin, sampled exactly without drawing
/// the points outside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSample {
    pub n: usize,
    pub radius: f64,
    pub seed: SeedStream,
    pub points: Vec<Complex64>,
}

/// The restriction of the Ginibre process to a centred disk keeps the
/// monomials orthogonal, so it is a mixture of projection processes: index
/// `j` is kept independently with probability `P(Gamma(j+1) <= N r^2)` and
/// the kept indices span the projection that is then sampled sequentially.
pub fn sample_disk_restricted(n: usize, radius: f64, seed: SeedStream) -> Result<DiskSample> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    let mut rng = seed.rng();
    let nf = n as f64;
    let edge = nf * radius * radius;

    let mut kept: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let q = if edge > 0.0 { gamma_lr(j as f64 + 1.0, edge) } else { 0.0 };
        if rng.gen::<f64>() < q {
            kept.push((j, q));
        }
    }
    let k = kept.len();
    let ln_pi = std::f64::consts::PI.ln();
    let log_scale: Vec<f64> = kept
        .iter()
        .map(|&(j, q)| 0.5 * ((j as f64 + 1.0) * nf.ln() - libm::lgamma(j as f64 + 1.0) - ln_pi - q.ln()))
        .collect();

    // Columns 0..m of the k x k row-major `coef` hold the coefficient vectors
    // of an orthonormal basis of the remaining projection.
    let mut coef = vec![Complex64::new(0.0, 0.0); k * k];
    for i in 0..k {
        coef[i * k + i] = Complex64::new(1.0, 0.0);
    }
    let mut feat = vec![Complex64::new(0.0, 0.0); k];
    let mut w = vec![Complex64::new(0.0, 0.0); k];
    let mut points = Vec::with_capacity(k);

    for m in (1..=k).rev() {
        let mut rejections = 0u64;
        loop {
            let (j, q) = kept[rng.gen_range(0..k)];
            let s = truncated_gamma(&mut rng, j, q, edge)?;
            let x = Complex64::from_polar((s / nf).sqrt(), std::f64::consts::TAU * rng.gen::<f64>());
            let lr = x.norm().ln();
            let theta = x.arg();
            let mut total = 0.0;
            for (idx, &(jj, _)) in kept.iter().enumerate() {
                let lm = log_scale[idx] + if jj == 0 { 0.0 } else { jj as f64 * lr } - 0.5 * nf * x.norm_sqr();
                feat[idx] = Complex64::from_polar(lm.exp(), jj as f64 * theta);
                total += feat[idx].norm_sqr();
            }
            for wr in &mut w[..m] {
                *wr = Complex64::new(0.0, 0.0);
            }
            for (row, f) in coef.chunks_exact(k).zip(&feat) {
                for (wr, c) in w[..m].iter_mut().zip(&row[..m]) {
                    *wr += c * f;
                }
            }
            let resid: f64 = w[..m].iter().map(|z| z.norm_sqr()).sum();
            if rng.gen::<f64>() * total < resid {
                remove_direction(&mut coef, k, m, &w[..m]);
                points.push(x);
                break;
            }
            rejections += 1;
            if rejections > STALL_LIMIT {
                return Err(Error::Sampling("disk sampler acceptance below 1e-6".into()));
            }
        }
    }
    Ok(DiskSample { n, radius, seed, points })
}

/// Replaces the basis in columns `0..m` by a basis of its subspace orthogonal
/// to the function whose coordinates are `conj(w)`, stored in columns `0..m-1`.
fn remove_direction(coef: &mut [Complex64], k: usize, m: usize, w: &[Complex64]) {
    let a: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let last = a[m - 1];
    let phase = if last.norm() > 0.0 { last / last.norm() } else { Complex64::new(1.0, 0.0) };
    let mut u = a;
    u[m - 1] += phase * norm;
    let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    if unorm2 == 0.0 {
        return;
    }
    let scale = 2.0 / unorm2;
    for row in coef.chunks_exact_mut(k) {
        let t: Complex64 = row[..m].iter().zip(&u).map(|(c, ui)| c * ui).sum();
        let t = t * scale;
        for (c, ui) in row[..m].iter_mut().zip(&u) {
            *c -= t * ui.conj();
        }
    }
}

/// Draws `s ~ Gamma(j+1, 1)` conditioned on `s <= edge`.
fn truncated_gamma<R: Rng>(rng: &mut R, j: usize, q: f64, edge: f64) -> Result<f64> {
    let shape = j as f64 + 1.0;
    if q >= 0.05 || (j as f64) <= edge {
        let g = Gamma::new(shape, 1.0).map_err(|e| Error::Sampling(e.to_string()))?;
        for _ in 0..STALL_LIMIT {
            let s: f64 = g.sample(rng);
            if s <= edge {
                return Ok(s);
            }
        }
        return Err(Error::Sampling("truncated gamma stalled".into()));
    }
    // Density increasing on [0, edge]; exponential proposal in the distance
    // from the edge dominates it.
    let jf = j as f64;
    let rate = jf / edge - 1.0;
    let span = 1.0 - (-rate * edge).exp();
    for _ in 0..STALL_LIMIT {
        let u: f64 = rng.gen();
        let d = -(1.0 - u * span).ln() / rate;
        let d = d.min(edge);
        let log_accept = jf * (1.0 - d / edge).ln() + jf * d / edge;
        if rng.gen::<f64>().ln() < log_accept {
            return Ok(edge - d);
        }
    }
    Err(Error::Sampling("truncated gamma stalled".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_inside_disk_with_expected_count() {
        let n = 256;
        let r = 0.5;
        let reps = 200;
        let mut total = 0usize;
        for rep in 0..reps {
            let s = sample_disk_restricted(n, r, SeedStream::new(11, rep)).unwrap();
            assert!(s.points.iter().all(|z| z.norm() <= r + 1e-12));
            total += s.points.len();
        }
        // E count = sum_j P(Gamma(j+1) <= N r^2) = N r^2 up to exponentially small terms.
        let mean = total as f64 / reps as f64;
        assert!((mean - 64.0).abs() < 1.0, "{mean}");
    }

    #[test]
    fn truncated_gamma_respects_edge_and_mean() {
        let mut rng = SeedStream::new(1, 0).rng();
        let edge = 50.0;
        let j = 70;
        let q = gamma_lr(71.0, edge);
        let xs: Vec<f64> = (0..20_000).map(|_| truncated_gamma(&mut rng, j, q, edge).unwrap()).collect();
        assert!(xs.iter().all(|&s| (0.0..=edge).contains(&s)));
        // E[s | s <= a] = (j+1) P(j+2, a) / P(j+1, a)
        let want = 71.0 * gamma_lr(72.0, edge) / q;
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - want).abs() < 0.05, "{mean} vs {want}");
    }
}
