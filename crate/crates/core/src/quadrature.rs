//! Gauss–Legendre rules and polar tensor quadrature on disks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|t| h * t).collect())
}

/// Integral of `f` over `[a, b]` by a composite Gauss–Legendre rule.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(lo + 0.5 * h * (xi + 1.0));
        }
        total += 0.5 * h * s;
    }
    total
}

/// Polar tensor rule on a disk centred at the origin: Gauss–Legendre in the
/// radius and the trapezoid rule in the angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskQuadrature {
    pub radius: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl DiskQuadrature {
    /// Nodes and Lebesgue weights, radius-major.
    pub fn nodes(&self) -> (Vec<Complex64>, Vec<f64>) {
        let (r, wr) = gauss_legendre_on(self.radial_nodes, 0.0, self.radius);
        let dtheta = std::f64::consts::TAU / self.angular_nodes as f64;
        let mut pts = Vec::with_capacity(self.radial_nodes * self.angular_nodes);
        let mut wts = Vec::with_capacity(pts.capacity());
        for (ri, wi) in r.iter().zip(&wr) {
            for m in 0..self.angular_nodes {
                pts.push(Complex64::from_polar(*ri, m as f64 * dtheta));
                wts.push(wi * ri * dtheta);
            }
        }
        (pts, wts)
    }

    pub fn len(&self) -> usize {
        self.radial_nodes * self.angular_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
