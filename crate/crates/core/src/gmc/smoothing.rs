use num_complex::Complex64;
use std::f64::consts::PI;

use super::RadialMollifier;
use crate::error::{invalid, Result};
use crate::field::equilibrium_potential;
use crate::quadrature::{gauss_legendre_on, integrate};
use crate::sampler::{DiskSample, EigenSample};

type C = Complex64;

pub fn psi_eps(m: &RadialMollifier, eps: f64, z: C) -> f64 {
    m.psi(eps, z.norm())
}

/// Mean of the equilibrium potential over the circle `|y - z| = rho`.
fn circle_mean_eq(c: f64, rho: f64) -> f64 {
    let a = c * c + rho * rho;
    let b = 2.0 * c * rho;
    if b == 0.0 {
        return equilibrium_potential(C::new(c.max(rho), 0.0));
    }
    let cos0 = (a - 1.0) / b;
    if cos0 >= 1.0 {
        return c.max(rho).ln();
    }
    if cos0 <= -1.0 {
        return 0.5 * (a - 1.0);
    }
    // |z - y| < 1 exactly on |theta| < theta0, where the potential is quadratic
    let theta0 = cos0.acos();
    let inner = (a - 1.0) * theta0 - b * theta0.sin();
    let mid = 0.5 * (theta0 + PI);
    let (x1, w1) = gauss_legendre_on(24, theta0, mid);
    let (x2, w2) = gauss_legendre_on(24, mid, PI);
    let outer: f64 = x1
        .iter()
        .chain(&x2)
        .zip(w1.iter().chain(&w2))
        .map(|(t, w)| w * (a - b * t.cos()).ln())
        .sum();
    (inner + outer) / (2.0 * PI)
}

/// `∫ phi_eq(z - y) phi_eps(y) d²y`.
pub fn conv_eq(m: &RadialMollifier, eps: f64, z: C) -> f64 {
    let a = m.support(eps);
    let c = z.norm();
    if c + a <= 1.0 {
        return equilibrium_potential(z) + 0.5 * eps * eps * m.second_moment();
    }
    if c >= 1.0 + a {
        return c.ln();
    }
    // radial integral in u = (rho/a)², split where arcs of |z - y| = 1 appear
    let mut cuts = vec![0.0, 1.0];
    for rho in [(1.0 - c).abs(), 1.0 + c] {
        let u = (rho / a).powi(2);
        if u > 0.0 && u < 1.0 {
            cuts.push(u);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| integrate(|u| m.mass_density_u(u) * circle_mean_eq(c, a * u.sqrt()), w[0], w[1], 6, 24))
        .sum()
}

/// `Σ_j psi_eps(z - λ_j) - N conv_eq(z)` over an explicit point set.
pub fn smoothed_field_points(points: &[C], n: usize, m: &RadialMollifier, eps: f64, z: C) -> f64 {
    let a = m.support(eps);
    let mut s = 0.0;
    for p in points {
        let r = (z - p).norm();
        s += if r >= a { r.ln() } else { m.psi(eps, r) };
    }
    s - n as f64 * conv_eq(m, eps, z)
}

/// The field smoothed at scale `eps` about `z`.
pub fn smoothed_field_at(sample: &EigenSample, m: &RadialMollifier, eps: f64, z: C) -> Result<f64> {
    check_angles(sample)?;
    Ok(smoothed_field_points(&sample.points, sample.n, m, eps, z))
}

fn check_angles(sample: &EigenSample) -> Result<()> {
    if !sample.angles_valid() {
        return Err(invalid("kostlan-radii samples carry no angles"));
    }
    Ok(())
}

/// `X(psi_eps(· - z) - psi(· - z))`; only points within `eps0` of `z`
/// contribute.
pub fn g_field_points(points: &[C], n: usize, m: &RadialMollifier, eps: f64, z: C) -> f64 {
    if eps == 1.0 {
        return 0.0;
    }
    let a = m.eps0();
    let mut s = 0.0;
    for p in points {
        let r = (z - p).norm();
        if r < a {
            s += m.psi(eps, r) - m.psi(1.0, r);
        }
    }
    s - n as f64 * (conv_eq(m, eps, z) - conv_eq(m, 1.0, z))
}

pub fn g_field_at(sample: &EigenSample, m: &RadialMollifier, eps: f64, z: C) -> Result<f64> {
    check_angles(sample)?;
    Ok(g_field_points(&sample.points, sample.n, m, eps, z))
}

/// Same as [`g_field_at`] from a disk-restricted sample, which must cover
/// `D(z, eps0)`.
pub fn g_field_disk(sample: &DiskSample, m: &RadialMollifier, eps: f64, z: C) -> Result<f64> {
    if z.norm() + m.eps0() > sample.radius {
        return Err(invalid(format!("D({z}, {}) is not inside the sampled disk of radius {}", m.eps0(), sample.radius)));
    }
    Ok(g_field_points(&sample.points, sample.n, m, eps, z))
}

/// Bucketed point set for evaluating the g-field at many nodes.
pub struct LocalIndex<'a> {
    points: &'a [C],
    origin: C,
    cell: f64,
    cols: usize,
    rows: usize,
    start: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> LocalIndex<'a> {
    pub fn new(points: &'a [C], cell: f64) -> Self {
        let (mut lo, mut hi) = (C::new(f64::MAX, f64::MAX), C::new(f64::MIN, f64::MIN));
        for p in points {
            lo = C::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        if points.is_empty() {
            lo = C::new(0.0, 0.0);
            hi = lo;
        }
        let cols = ((hi.re - lo.re) / cell).floor() as usize + 1;
        let rows = ((hi.im - lo.im) / cell).floor() as usize + 1;
        let key = |p: &C| {
            let i = (((p.re - lo.re) / cell) as usize).min(cols - 1);
            let j = (((p.im - lo.im) / cell) as usize).min(rows - 1);
            j * cols + i
        };
        let mut count = vec![0usize; cols * rows + 1];
        for p in points {
            count[key(p) + 1] += 1;
        }
        for k in 1..count.len() {
            count[k] += count[k - 1];
        }
        let mut fill = count.clone();
        let mut order = vec![0; points.len()];
        for (idx, p) in points.iter().enumerate() {
            let k = key(p);
            order[fill[k]] = idx;
            fill[k] += 1;
        }
        LocalIndex { points, origin: lo, cell, cols, rows, start: count, order }
    }

    /// Calls `f` on every point within `radius <= cell` of `z` (and possibly
    /// a few more).
    pub fn near(&self, z: C, mut f: impl FnMut(C)) {
        let fi = ((z.re - self.origin.re) / self.cell).floor() as i64;
        let fj = ((z.im - self.origin.im) / self.cell).floor() as i64;
        for j in fj - 1..=fj + 1 {
            if j < 0 || j >= self.rows as i64 {
                continue;
            }
            for i in fi - 1..=fi + 1 {
                if i < 0 || i >= self.cols as i64 {
                    continue;
                }
                let k = j as usize * self.cols + i as usize;
                for &idx in &self.order[self.start[k]..self.start[k + 1]] {
                    f(self.points[idx]);
                }
            }
        }
    }
}

/// g-field at many nodes; agrees with [`g_field_points`] up to rounding.
pub fn g_field_nodes(points: &[C], n: usize, m: &RadialMollifier, eps: f64, nodes: &[C]) -> Vec<f64> {
    let a = m.eps0();
    let index = LocalIndex::new(points, a);
    let nf = n as f64;
    nodes
        .iter()
        .map(|&z| {
            let mut s = 0.0;
            index.near(z, |p| {
                let r = (z - p).norm();
                if r < a {
                    s += m.psi(eps, r) - m.psi(1.0, r);
                }
            });
            s - nf * (conv_eq(m, eps, z) - conv_eq(m, 1.0, z))
        })
        .collect()
}

/// `-½ ∫ psi_eps_b(d - y) phi_eps_s(y) d²y` with the larger scale as `eps_b`.
fn covariance_quadrature(m: &RadialMollifier, eps_s: f64, eps_b: f64, d: C, radial: usize, angular: usize) -> f64 {
    let a = m.support(eps_s);
    let (ux, uw) = gauss_legendre_on(radial, 0.0, 1.0);
    let mut total = 0.0;
    for (u, wu) in ux.iter().zip(&uw) {
        let rho = a * u.sqrt();
        let mut ring = 0.0;
        for k in 0..angular {
            let th = 2.0 * PI * (k as f64 + 0.5) / angular as f64;
            ring += m.psi(eps_b, (d - C::from_polar(rho, th)).norm());
        }
        total += wu * m.mass_density_u(*u) * ring / angular as f64;
    }
    -0.5 * total
}

/// Limiting covariance of the fields smoothed at `(eps1, z1)` and `(eps2, z2)`.
pub fn covariance_prediction(m: &RadialMollifier, eps1: f64, eps2: f64, z1: C, z2: C) -> Result<f64> {
    for e in [eps1, eps2] {
        if !(e > 0.0 && e <= 1.0) {
            return Err(invalid(format!("scale must lie in (0, 1], got {e}")));
        }
    }
    let d = z1 - z2;
    if d.norm() >= m.support(eps1) + m.support(eps2) {
        return Ok(-0.5 * d.norm().ln());
    }
    let (small, big) = if eps1 <= eps2 { (eps1, eps2) } else { (eps2, eps1) };
    Ok(covariance_quadrature(m, small, big, d, 64, 256))
}
