//! Ginibre correlation kernels: the exact kernel, its extension to more
//! terms, the kernel of a perturbed weight and a local Bergman surrogate.

mod bergman;
mod perturbed;

pub use bergman::{bergman_approx_eval, default_ell, gap_pairs, gap_scale, kernel_gap_report, GapPair, KernelGapReport};
pub use perturbed::{orthonormalize_perturbed, MollifierTerm, Perturbation, PerturbedKernelContext, QuadratureSpec};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, invalid, Error, Result};
use crate::quadrature::DiskQuadrature;
use crate::stats::Estimate;

type C = Complex64;

/// Largest modulus accepted by kernel evaluation.
pub const MAX_ARGUMENT: f64 = 10.0;

/// Reference measure the kernel is normalised against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Determinants integrate against `d^2x / π`.
    Bare,
    /// Determinants integrate against Lebesgue measure (bare kernel over π).
    PerLebesgue,
}

/// Parameters of `K(x, z) = Σ_{j<n_terms} (x z̄)^j/j! N^{j+1} e^{-N(|x|²+|z|²)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelContext {
    pub n_weight: usize,
    pub n_terms: usize,
    pub normalization: Normalization,
}

impl KernelContext {
    pub fn new(n_weight: usize, n_terms: usize, normalization: Normalization) -> Result<Self> {
        if n_weight == 0 || n_terms == 0 {
            return Err(invalid("kernel needs n_weight >= 1 and n_terms >= 1"));
        }
        Ok(KernelContext { n_weight, n_terms, normalization })
    }

    /// The Ginibre kernel of dimension `n`.
    pub fn ginibre(n: usize) -> Result<Self> {
        Self::new(n, n, Normalization::Bare)
    }

    pub fn kernel_eval(&self, x: C, z: C) -> Result<C> {
        if !(x.norm() <= MAX_ARGUMENT && z.norm() <= MAX_ARGUMENT) {
            return Err(domain(format!("kernel arguments must have modulus <= {MAX_ARGUMENT}")));
        }
        // Evaluate in a canonical order and conjugate so that Hermitian
        // symmetry holds bit for bit.
        let swap = (z.re, z.im) < (x.re, x.im);
        let (a, b) = if swap { (z, x) } else { (x, z) };
        let mut v = weighted_partial_exp(self.n_weight as f64, self.n_terms, a, b);
        if self.normalization == Normalization::PerLebesgue {
            v /= PI;
        }
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Range(format!("kernel value overflow at x={x}, z={z}")));
        }
        Ok(if swap { v.conj() } else { v })
    }

    /// Density of points with respect to Lebesgue measure.
    pub fn one_point_intensity(&self, z: C) -> Result<f64> {
        if self.normalization != Normalization::Bare {
            return Err(invalid("one_point_intensity expects a bare-normalised kernel"));
        }
        Ok(self.kernel_eval(z, z)?.re.max(0.0) / PI)
    }

    /// Integral of the one-point density over the plane.
    ///
    /// Polar quadrature with `resolution` radial and angular nodes on the
    /// disk of radius `1 + 6/sqrt N` (widened to cover `sqrt(n_terms/N)`);
    /// the exact mass outside is added to the error estimate, together with
    /// the change from a half-resolution rule.
    pub fn kernel_mass(&self, resolution: usize) -> Result<Estimate> {
        if resolution < 8 {
            return Err(invalid("kernel_mass resolution must be at least 8"));
        }
        let n = self.n_weight as f64;
        let radius = (self.n_terms as f64 / n).sqrt().max(1.0) + 6.0 / n.sqrt();
        let integrate = |res: usize| -> Result<f64> {
            let q = DiskQuadrature { radius, radial_nodes: res, angular_nodes: res };
            let (pts, w) = q.nodes();
            let mut s = 0.0;
            for (p, wi) in pts.iter().zip(&w) {
                s += wi * self.density_at(*p)?;
            }
            Ok(s)
        };
        let fine = integrate(resolution)?;
        let coarse = integrate(resolution / 2)?;
        // Mass beyond the truncation radius, term by term: Σ_j Q(j+1, N R²).
        let tail: f64 = (0..self.n_terms)
            .map(|j| statrs::function::gamma::gamma_ur((j + 1) as f64, n * radius * radius))
            .sum();
        Ok(Estimate::with_stderr(fine, (fine - coarse).abs() + tail))
    }

    fn density_at(&self, z: C) -> Result<f64> {
        let k = self.kernel_eval(z, z)?.re;
        Ok(match self.normalization {
            Normalization::Bare => k / PI,
            Normalization::PerLebesgue => k,
        })
    }
}

/// `N e^{-N(|a|²+|b|²)/2} Σ_{j<n} (N a b̄)^j / j!`.
fn weighted_partial_exp(n: f64, terms: usize, a: C, b: C) -> C {
    let w = a * b.conj() * n;
    let half = 0.5 * n * (a.norm_sqr() + b.norm_sqr());
    let aw = w.norm();
    let nt = terms as f64;

    // Crude upper bound on log|result| decides the underflow shortcut.
    let log_bound = if aw <= nt {
        aw - half
    } else {
        nt.ln() + (nt - 1.0) * aw.ln() - libm::lgamma(nt) - half
    };
    if log_bound + n.ln() < -745.0 {
        return C::new(0.0, 0.0);
    }
    if aw == 0.0 {
        return C::new(n * (-half).exp(), 0.0);
    }

    let sum = if aw <= nt - 4.0 * nt.sqrt() - 4.0 {
        // Complement: e^w minus the tail Σ_{j>=n} w^j/j!.
        let head = (w - half).exp();
        let log_first = nt * aw.ln() - libm::lgamma(nt + 1.0) - half;
        let phase = C::from_polar(1.0, nt * w.arg());
        let mut term = phase;
        let mut acc = KahanC::default();
        let mut j = nt;
        loop {
            acc.add(term);
            j += 1.0;
            term *= w / j;
            if term.norm() < 1e-18 * acc.sum.norm().max(1e-300) {
                break;
            }
        }
        head - acc.total() * log_first.exp()
    } else {
        // Direct sum scaled by the largest term.
        let peak = (aw.floor() as usize).min(terms - 1);
        let pk = peak as f64;
        let log_peak = pk * aw.ln() - libm::lgamma(pk + 1.0) - half;
        let start = C::from_polar(1.0, pk * w.arg());
        let mut acc = KahanC::default();
        acc.add(start);
        let mut term = start;
        for j in peak + 1..terms {
            term *= w / j as f64;
            acc.add(term);
            if term.norm() < 1e-18 {
                break;
            }
        }
        let mut term = start;
        for j in (1..=peak).rev() {
            term *= j as f64 / w;
            acc.add(term);
            if term.norm() < 1e-18 {
                break;
            }
        }
        acc.total() * log_peak.exp()
    };
    sum * n
}

/// Kahan–Neumaier compensated complex sum.
#[derive(Default)]
struct KahanC {
    sum: C,
    comp: C,
}

impl KahanC {
    fn add(&mut self, x: C) {
        let (s, c) = neumaier(self.sum.re, self.comp.re, x.re);
        let (si, ci) = neumaier(self.sum.im, self.comp.im, x.im);
        self.sum = C::new(s, si);
        self.comp = C::new(c, ci);
    }

    fn total(&self) -> C {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, comp: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { comp + ((sum - t) + x) } else { comp + ((x - t) + sum) };
    (t, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Naive summation in plain floating point for small N.
    fn naive(n: usize, terms: usize, x: C, z: C) -> C {
        let nf = n as f64;
        let w = x * z.conj();
        let mut s = C::new(0.0, 0.0);
        let mut t = C::new(1.0, 0.0);
        for j in 0..terms {
            if j > 0 {
                t *= w / j as f64;
            }
            s += t * nf.powi(j as i32 + 1);
        }
        s * (-0.5 * nf * (x.norm_sqr() + z.norm_sqr())).exp()
    }

    #[test]
    fn origin_value_is_n() {
        let k = KernelContext::ginibre(7).unwrap();
        assert!((k.kernel_eval(C::new(0.0, 0.0), C::new(0.0, 0.0)).unwrap() - 7.0).norm() < 1e-12);
    }

    #[test]
    fn matches_naive_sum_small_n() {
        let k = KernelContext::ginibre(4).unwrap();
        let x = C::new(0.5, 0.0);
        let v = k.kernel_eval(x, x).unwrap();
        let e = naive(4, 4, x, x);
        assert!((v - e).norm() < 1e-12 * e.norm());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..30);
            let terms = n + rng.gen_range(0..3);
            let x = C::new(rng.gen_range(-1.3..1.3), rng.gen_range(-1.3..1.3));
            let z = C::new(rng.gen_range(-1.3..1.3), rng.gen_range(-1.3..1.3));
            let k = KernelContext::new(n, terms, Normalization::Bare).unwrap();
            let v = k.kernel_eval(x, z).unwrap();
            let e = naive(n, terms, x, z);
            let scale = (k.kernel_eval(x, x).unwrap().re * k.kernel_eval(z, z).unwrap().re).sqrt();
            assert!((v - e).norm() <= 1e-11 * scale.max(e.norm()), "n={n} x={x} z={z}: {v} vs {e}");
        }
    }

    #[test]
    fn hermitian_exactly() {
        let k = KernelContext::ginibre(300).unwrap();
        let x = C::new(0.3, -0.2);
        let z = C::new(-0.1, 0.45);
        assert_eq!(k.kernel_eval(x, z).unwrap(), k.kernel_eval(z, x).unwrap().conj());
    }

    #[test]
    fn diagonal_matches_incomplete_gamma() {
        // K(z,z) = N Q(n, N|z|²)
        for &(n, r) in &[(64usize, 0.5), (1024, 0.5), (1024, 0.99), (1024, 1.02), (5000, 0.7), (10000, 1.01)] {
            let k = KernelContext::ginibre(n).unwrap();
            let z = C::from_polar(r, 0.7);
            let v = k.kernel_eval(z, z).unwrap();
            let nf = n as f64;
            let e = nf * statrs::function::gamma::gamma_ur(nf, nf * r * r);
            assert!((v.re - e).abs() <= 1e-9 * e, "n={n} r={r}: {} vs {e}", v.re);
            assert!(v.im.abs() <= 1e-12 * e);
        }
    }

    #[test]
    fn off_diagonal_far_inside_is_exponential() {
        // Deep inside the bulk K ≈ N e^{N x z̄ - N(|x|²+|z|²)/2}.
        let n = 2000;
        let k = KernelContext::ginibre(n).unwrap();
        let x = C::new(0.1, 0.05);
        let z = C::new(0.12, 0.02);
        let nf = n as f64;
        let e = (x * z.conj() * nf - 0.5 * nf * (x.norm_sqr() + z.norm_sqr())).exp() * nf;
        let v = k.kernel_eval(x, z).unwrap();
        assert!((v - e).norm() < 1e-9 * e.norm());
    }

    #[test]
    fn intensity_plateau_and_decay() {
        let k = KernelContext::ginibre(1024).unwrap();
        let plateau = 1024.0 / PI;
        assert!((k.one_point_intensity(C::new(0.0, 0.0)).unwrap() - plateau).abs() < 1e-9 * plateau);
        assert!((k.one_point_intensity(C::new(0.5, 0.0)).unwrap() / plateau - 1.0).abs() < 0.01);
        assert!(k.one_point_intensity(C::new(1.5, 0.0)).unwrap() < 1e-6 * plateau);
    }

    #[test]
    fn masses() {
        for &(n, terms, tol) in &[(1usize, 1usize, 1e-6), (16, 16, 1e-3), (16, 18, 1e-2), (64, 64, 1e-3), (4, 4, 1e-6)] {
            let k = KernelContext::new(n, terms, Normalization::Bare).unwrap();
            let m = k.kernel_mass(256).unwrap();
            assert!((m.value - terms as f64).abs() <= tol, "n={n}: {m:?}");
            assert!(m.stderr.unwrap() < tol);
        }
    }

    #[test]
    fn domain_guard() {
        let k = KernelContext::ginibre(5).unwrap();
        assert!(matches!(k.kernel_eval(C::new(11.0, 0.0), C::new(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn far_outside_pairs_underflow_to_zero_only_when_tiny() {
        let k = KernelContext::ginibre(100).unwrap();
        // Antipodal points outside the disk: tiny but not below the guard.
        let v = k.kernel_eval(C::new(2.0, 0.0), C::new(-2.0, 0.0)).unwrap();
        assert!(v.norm() > 0.0 && v.norm() < 1e-60);
        let v = k.kernel_eval(C::new(9.0, 0.0), C::new(-9.0, 0.0)).unwrap();
        assert_eq!(v, C::new(0.0, 0.0));
    }
}
