use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::psi_at;
use crate::error::{domain, invalid, Result};
use crate::gmc::{conv_eq, RadialMollifier};
use crate::quadrature::{gauss_legendre_on, integrate};
use crate::rng::SeedStream;
use crate::sampler::EigenSample;

type C = Complex64;

/// `scale * (psi_small(· - center) - psi_large(· - center))`: harmonic
/// outside `D(center, large * eps0)` and vanishing there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierBumpDifference {
    pub center: C,
    pub small: f64,
    pub large: f64,
    pub scale: f64,
}

impl MollifierBumpDifference {
    pub fn eval(&self, m: &RadialMollifier, z: C) -> f64 {
        let r = (z - self.center).norm();
        self.scale * (m.psi(self.small, r) - m.psi(self.large, r))
    }

    /// `(1/π) ∫ |Δf| = 2 scale ∫ |phi_small - phi_large|`.
    pub fn laplacian_mass(&self, m: &RadialMollifier) -> f64 {
        let a = m.support(self.small.max(self.large));
        let b = m.support(self.small.min(self.large));
        let f = |r: f64| (m.density(self.small, r) - m.density(self.large, r)).abs() * 2.0 * PI * r;
        2.0 * self.scale.abs() * (integrate(f, 0.0, b, 16, 16) + integrate(f, b, a, 16, 16))
    }

    /// `Σ f(λ) - N ∫ f dσ`, using only the points inside the support.
    pub fn statistic(&self, m: &RadialMollifier, points: &[C], n: usize) -> f64 {
        let a = m.support(self.small.max(self.large));
        let mut s = 0.0;
        for p in points {
            if (p - self.center).norm() < a {
                s += self.eval(m, *p);
            }
        }
        s - self.scale * n as f64 * (conv_eq(m, self.small, self.center) - conv_eq(m, self.large, self.center))
    }

    /// The same statistic as `(1/2π) ∫ Δf Ψ_N` by polar quadrature about the
    /// centre.
    pub fn statistic_via_laplacian(&self, m: &RadialMollifier, points: &[C], n: usize, radial: usize, angular: usize) -> f64 {
        let a = m.support(self.small.max(self.large));
        let b = m.support(self.small.min(self.large));
        let mut total = 0.0;
        for (lo, hi) in [(0.0, b), (b, a)] {
            if hi <= lo {
                continue;
            }
            let (rs, ws) = gauss_legendre_on(radial, lo, hi);
            for (r, w) in rs.iter().zip(&ws) {
                let weight = m.density(self.small, *r) - m.density(self.large, *r);
                let mut ring = 0.0;
                for k in 0..angular {
                    let z = self.center + C::from_polar(*r, 2.0 * PI * (k as f64 + 0.5) / angular as f64);
                    ring += psi_at(points, n, z).0;
                }
                total += w * r * weight * ring * 2.0 * PI / angular as f64;
            }
        }
        self.scale * total
    }
}

/// `count` bump differences centred in `D_{r - eps0}` with unit Laplacian
/// mass.
pub fn mollifier_family(m: &RadialMollifier, r: f64, count: usize, seed: u64) -> Result<Vec<MollifierBumpDifference>> {
    let room = r - m.eps0();
    if room <= 0.0 {
        return Err(domain(format!("r = {r} leaves no room for a bump of radius {}", m.eps0())));
    }
    let mut rng = SeedStream::new(seed, 0).with_salt(0xc0c0).rng();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let center = C::from_polar(room * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
        let small = rng.gen_range(0.1..0.5);
        let mut f = MollifierBumpDifference { center, small, large: 1.0, scale: 1.0 };
        f.scale = 1.0 / f.laplacian_mass(m);
        out.push(f);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub replicas: usize,
    pub functions: usize,
    pub epsilon: f64,
    /// `(log N)^{1+epsilon}`.
    pub threshold: f64,
    pub exceedances: usize,
    pub max_abs: f64,
    /// `exp(-(log N)^{1+epsilon} / 2)`.
    pub bound: f64,
}

/// Counts replicas in which some member of the family has
/// `|X(f)| >= (log N)^{1+epsilon}`.
pub fn concentration_check(
    samples: &[EigenSample],
    m: &RadialMollifier,
    family: &[MollifierBumpDifference],
    r: f64,
    epsilon: f64,
) -> Result<ConcentrationReport> {
    let first = samples.first().ok_or_else(|| invalid("no replicas"))?;
    for f in family {
        if f.laplacian_mass(m) > 1.0 + 1e-9 {
            return Err(domain(format!("test function at {} has Laplacian mass above 1", f.center)));
        }
        if f.center.norm() + m.support(f.small.max(f.large)) > r + 1e-12 {
            return Err(domain(format!("test function at {} is not harmonic outside D_{r}", f.center)));
        }
    }
    let n = first.n;
    let threshold = (n as f64).ln().powf(1.0 + epsilon);
    let mut exceedances = 0;
    let mut max_abs: f64 = 0.0;
    for s in samples {
        if !s.angles_valid() || s.n != n {
            return Err(invalid("replicas must share N and carry angles"));
        }
        let worst = family.iter().map(|f| f.statistic(m, &s.points, n).abs()).fold(0.0, f64::max);
        max_abs = max_abs.max(worst);
        if worst >= threshold {
            exceedances += 1;
        }
    }
    Ok(ConcentrationReport {
        n,
        replicas: samples.len(),
        functions: family.len(),
        epsilon,
        threshold,
        exceedances,
        max_abs,
        bound: (-threshold / 2.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample_eigenvalues, Backend};

    #[test]
    fn family_is_normalized_and_two_routes_agree() {
        let m = RadialMollifier::new(0.25).unwrap();
        let fam = mollifier_family(&m, 0.6, 3, 11).unwrap();
        for f in &fam {
            assert!((f.laplacian_mass(&m) - 1.0).abs() < 1e-9);
            assert!(f.center.norm() < 0.35 + 1e-12);
        }
        let s = sample_eigenvalues(120, SeedStream::new(8, 0), Backend::DppKernel).unwrap();
        for f in &fam {
            let a = f.statistic(&m, &s.points, 120);
            let b = f.statistic_via_laplacian(&m, &s.points, 120, 48, 96);
            assert!((a - b).abs() <= 0.01 * a.abs().max(0.05), "{a} vs {b}");
        }
        let zero = MollifierBumpDifference { center: C::new(0.0, 0.0), small: 0.5, large: 0.5, scale: 1.0 };
        assert_eq!(zero.statistic(&m, &s.points, 120), 0.0);
        let rep = concentration_check(&[s], &m, &fam, 0.6, 0.1).unwrap();
        assert_eq!(rep.replicas, 1);
        assert!(rep.threshold > 0.0 && rep.bound < 1.0);
    }

    #[test]
    fn unnormalized_family_rejected() {
        let m = RadialMollifier::new(0.25).unwrap();
        let mut fam = mollifier_family(&m, 0.6, 1, 1).unwrap();
        fam[0].scale *= 2.0;
        let s = sample_eigenvalues(10, SeedStream::new(1, 0), Backend::DppKernel).unwrap();
        assert!(concentration_check(&[s], &m, &fam, 0.6, 0.1).is_err());
    }
}
