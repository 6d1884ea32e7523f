//! Radial bump mollifier and its logarithmic potential.
//!
//! Everything is expressed in the variable `u = (r / eps0)^2`, in which the
//! bump reads `exp(-1 / (1 - u))` and the cumulative mass `m(u)` does not
//! depend on `eps0`. The potential of the unit-scale mollifier is
//! `psi_1(r) = log eps0 + G(u) / 2` with `G' = m / u` and `G(u) = log u` for
//! `u >= 1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::{gauss_legendre, integrate};

const TABLE_POINTS: usize = 4096;
const CELL_ORDER: usize = 16;

/// `exp(-1/(1-u))` on `[0, 1)`, zero beyond.
pub fn bump(u: f64) -> f64 {
    if u < 1.0 {
        (-1.0 / (1.0 - u)).exp()
    } else {
        0.0
    }
}

/// Coefficients of `P_j` where `d^j/du^j bump(u) = P_j(v) bump(u)`, `v = 1/(1-u)`.
fn bump_derivative_polys(max: usize) -> Vec<Vec<f64>> {
    let mut polys = vec![vec![1.0]];
    for j in 0..max {
        let p = &polys[j];
        // v^2 (P' - P)
        let mut next = vec![0.0; p.len() + 2];
        for (k, &c) in p.iter().enumerate() {
            next[k + 2] -= c;
            if k > 0 {
                next[k + 1] += k as f64 * c;
            }
        }
        polys.push(next);
    }
    polys
}

fn eval_poly(c: &[f64], v: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * v + a)
}

/// Radial mollifier supported in the disk of radius `eps0`, with its mass
/// and potential tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialMollifier {
    eps0: f64,
    /// `B(1) = ∫_0^1 bump`.
    norm_const: f64,
    /// `∫ |y|^2 phi(y) d^2y` for the unit-scale mollifier.
    second_moment: f64,
    step: f64,
    cum_mass: Vec<f64>,
    mass_slope: Vec<f64>,
    potential: Vec<f64>,
    potential_slope: Vec<f64>,
    polys: Vec<Vec<f64>>,
}

impl RadialMollifier {
    pub fn new(eps0: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 <= 0.25) {
            return Err(invalid(format!("eps0 must lie in (0, 1/4], got {eps0}")));
        }
        let n = TABLE_POINTS;
        let step = 1.0 / (n - 1) as f64;
        let (gx, gw) = gauss_legendre(CELL_ORDER);
        let cell = |f: &dyn Fn(f64) -> f64, a: f64| -> f64 {
            let mut s = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                s += w * f(a + 0.5 * step * (x + 1.0));
            }
            0.5 * step * s
        };

        // Running integrals of bump and bump*log on the u-grid.
        let mut b = vec![0.0; n];
        let mut l = vec![0.0; n];
        let b0 = bump(0.0);
        for i in 0..n - 1 {
            let a = i as f64 * step;
            b[i + 1] = b[i] + cell(&bump, a);
            l[i + 1] = l[i]
                + if i == 0 {
                    // split off the integrable log singularity at 0
                    cell(&|v: f64| (bump(v) - b0) * v.ln(), a) + b0 * step * (step.ln() - 1.0)
                } else {
                    cell(&|v: f64| bump(v) * v.ln(), a)
                };
        }
        let norm_const = b[n - 1];
        let l_total = l[n - 1];

        let mut cum_mass = vec![0.0; n];
        let mut mass_slope = vec![0.0; n];
        let mut potential = vec![0.0; n];
        let mut potential_slope = vec![0.0; n];
        for i in 0..n {
            let u = i as f64 * step;
            let m = (b[i] / norm_const).min(1.0);
            cum_mass[i] = m;
            mass_slope[i] = bump(u) / norm_const;
            let tail = (l_total - l[i]) / norm_const;
            potential[i] = if i == 0 { tail } else { m * u.ln() + tail };
            potential_slope[i] = if i == 0 { mass_slope[0] } else { m / u };
        }
        cum_mass[n - 1] = 1.0;
        potential[n - 1] = 0.0;
        potential_slope[n - 1] = 1.0;

        let second_moment = eps0 * eps0 * integrate(|u| u * bump(u), 0.0, 1.0, 64, 16) / norm_const;
        Ok(RadialMollifier {
            eps0,
            norm_const,
            second_moment,
            step,
            cum_mass,
            mass_slope,
            potential,
            potential_slope,
            polys: bump_derivative_polys(12),
        })
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// `∫ |y|^2 phi(y) d^2y` at unit scale.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    /// Support radius of `phi_eps`.
    pub fn support(&self, eps: f64) -> f64 {
        eps * self.eps0
    }

    /// Density of `phi_eps` with respect to Lebesgue measure at distance `r`.
    pub fn density(&self, eps: f64, r: f64) -> f64 {
        let a = eps * self.eps0;
        bump((r / a).powi(2)) / (self.norm_const * std::f64::consts::PI * a * a)
    }

    fn hermite(&self, vals: &[f64], slopes: &[f64], u: f64) -> f64 {
        let x = u / self.step;
        let i = (x.floor() as usize).min(vals.len() - 2);
        let t = x - i as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * vals[i] + h10 * self.step * slopes[i] + h01 * vals[i + 1] + h11 * self.step * slopes[i + 1]
    }

    /// Cumulative mass `m(u)`.
    pub fn mass_u(&self, u: f64) -> f64 {
        if u >= 1.0 {
            1.0
        } else if u <= 0.0 {
            0.0
        } else {
            self.hermite(&self.cum_mass, &self.mass_slope, u)
        }
    }

    /// `dm/du`, the radial mass density in the variable `u`.
    pub fn mass_density_u(&self, u: f64) -> f64 {
        bump(u) / self.norm_const
    }

    /// Mass of `phi_eps` inside the disk of radius `r`.
    pub fn mass_within(&self, eps: f64, r: f64) -> f64 {
        self.mass_u((r / (eps * self.eps0)).powi(2))
    }

    /// `G(u)`; equals `log u` for `u >= 1`.
    pub fn potential_u(&self, u: f64) -> f64 {
        if u >= 1.0 {
            u.ln()
        } else {
            self.hermite(&self.potential, &self.potential_slope, u.max(0.0))
        }
    }

    /// `psi_eps` at distance `r` from the centre.
    pub fn psi(&self, eps: f64, r: f64) -> f64 {
        let a = eps * self.eps0;
        if r >= a {
            r.ln()
        } else {
            a.ln() + 0.5 * self.potential_u((r / a).powi(2))
        }
    }

    /// `d^k m / du^k` for `k >= 1`.
    fn mass_derivative(&self, k: usize, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        let v = 1.0 / (1.0 - u);
        eval_poly(&self.polys[k - 1], v) * (-v).exp() / self.norm_const
    }

    /// `G^{(k)}(u)` for `k = 1..=kmax`; `kmax <= 12`.
    pub fn potential_derivatives(&self, u: f64, kmax: usize) -> Vec<f64> {
        assert!(kmax <= 12, "derivative order too high");
        if u >= 1.0 {
            let mut out = Vec::with_capacity(kmax);
            let mut fact = 1.0;
            for k in 1..=kmax {
                if k > 1 {
                    fact *= (k - 1) as f64;
                }
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                out.push(sign * fact / u.powi(k as i32));
            }
            return out;
        }
        // G' = m(u)/u = ∫_0^1 m'(u t) dt, differentiated under the integral.
        (1..=kmax)
            .map(|k| {
                let j = k - 1;
                integrate(|t| t.powi(j as i32) * self.mass_derivative(j + 1, u * t), 0.0, 1.0, 8, 24)
            })
            .collect()
    }

    /// Derivatives in `s = r^2` of `psi_eps(sqrt s)`, orders `1..=kmax`.
    pub fn psi_s_derivatives(&self, eps: f64, s: f64, kmax: usize) -> Vec<f64> {
        let a2 = (eps * self.eps0).powi(2);
        self.potential_derivatives(s / a2, kmax)
            .into_iter()
            .enumerate()
            .map(|(i, d)| 0.5 * d / a2.powi(i as i32 + 1))
            .collect()
    }

    /// `Σ²(psi_eps1 - psi_eps2) = ½ ∫ (m_eps1(r) - m_eps2(r))^2 / r dr`.
    pub fn sigma_sq_difference(&self, eps1: f64, eps2: f64) -> f64 {
        let top = eps1.max(eps2) * self.eps0;
        if eps1 == eps2 {
            return 0.0;
        }
        let bottom = eps1.min(eps2) * self.eps0;
        let f = |r: f64| (self.mass_within(eps1, r) - self.mass_within(eps2, r)).powi(2) / r;
        // beyond the smaller support one mass is 1; split there for accuracy
        0.5 * (integrate(f, 0.0, bottom, 32, 16) + integrate(f, bottom, top, 64, 16))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::DiskQuadrature;

    fn moll() -> RadialMollifier {
        RadialMollifier::new(0.25).unwrap()
    }

    #[test]
    fn unit_mass_and_monotone_table() {
        let m = moll();
        let mass = integrate(|r| m.density(1.0, r) * std::f64::consts::TAU * r, 0.0, 0.25, 64, 16);
        assert!((mass - 1.0).abs() < 1e-10, "{mass}");
        assert!(m.cum_mass.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(m.mass_u(2.0), 1.0);
        assert_eq!(m.density(1.0, 0.25), 0.0);
    }

    #[test]
    fn psi_is_log_outside_support() {
        let m = moll();
        for &(eps, r) in &[(1.0, 1.0), (0.5, 0.2), (0.1, 0.025), (0.1, 0.9)] {
            assert!((m.psi(eps, r) - f64::ln(r)).abs() < 1e-12);
        }
        // continuity at the support edge
        let a = 0.3 * 0.25;
        assert!((m.psi(0.3, a * (1.0 - 1e-9)) - a.ln()).abs() < 1e-8);
    }

    #[test]
    fn psi_at_origin_matches_plane_quadrature() {
        let m = moll();
        let eps = 0.4;
        let q = DiskQuadrature { radius: eps * 0.25, radial_nodes: 400, angular_nodes: 4 };
        let (pts, w) = q.nodes();
        let brute: f64 = pts.iter().zip(&w).map(|(p, wi)| wi * p.norm().ln() * m.density(eps, p.norm())).sum();
        assert!((m.psi(eps, 0.0) - brute).abs() < 1e-6, "{} vs {brute}", m.psi(eps, 0.0));
    }

    #[test]
    fn psi_inside_matches_newton_integral() {
        let m = moll();
        let eps = 1.0;
        for &r in &[0.01, 0.1, 0.2, 0.24] {
            // log r * m(r) + ∫_r^a log s dm(s)
            let a = 0.25;
            let tail = integrate(
                |s| s.ln() * m.density(eps, s) * std::f64::consts::TAU * s,
                r,
                a,
                64,
                16,
            );
            let expect = r.ln() * m.mass_within(eps, r) + tail;
            assert!((m.psi(eps, r) - expect).abs() < 1e-9, "r={r}: {} vs {expect}", m.psi(eps, r));
        }
    }

    #[test]
    fn scaling_covariance() {
        let m = moll();
        for &w in &[0.0, 0.05, 0.13, 0.2] {
            let a = m.psi(0.5, 0.5 * w) - 0.5f64.ln();
            let b = m.psi(0.07, 0.07 * w) - 0.07f64.ln();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn derivative_polys_match_finite_differences() {
        let m = moll();
        for &u in &[0.1, 0.45, 0.8] {
            let h = 1e-5;
            let fd = (bump(u + h) - bump(u - h)) / (2.0 * h) / m.norm_const;
            assert!((m.mass_derivative(2, u) - fd).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn potential_derivatives_match_table() {
        let m = moll();
        for &u in &[0.05, 0.3, 0.7, 0.95, 1.5] {
            let d = m.potential_derivatives(u, 3);
            let h = 1e-4;
            let fd1 = (m.potential_u(u + h) - m.potential_u(u - h)) / (2.0 * h);
            assert!((d[0] - fd1).abs() < 1e-7, "u={u}: {} vs {fd1}", d[0]);
            let g1 = |x: f64| m.potential_derivatives(x, 1)[0];
            let fd2 = (g1(u + h) - g1(u - h)) / (2.0 * h);
            assert!((d[1] - fd2).abs() < 1e-6 * fd2.abs().max(1.0), "u={u}: {} vs {fd2}", d[1]);
            let g2 = |x: f64| m.potential_derivatives(x, 2)[1];
            let fd3 = (g2(u + h) - g2(u - h)) / (2.0 * h);
            assert!((d[2] - fd3).abs() < 1e-5 * fd3.abs().max(1.0), "u={u}: {} vs {fd3}", d[2]);
        }
    }

    #[test]
    fn sigma_of_scale_difference_grows_like_half_log() {
        let m = moll();
        let s1 = m.sigma_sq_difference(0.02, 1.0);
        let s2 = m.sigma_sq_difference(0.01, 1.0);
        assert!(((s2 - s1) - 0.5 * 2f64.ln()).abs() < 1e-3);
        let s1 = m.sigma_sq_difference(0.1, 1.0);
        let direct = 0.5 * integrate(|r| (m.mass_within(0.1, r) - m.mass_within(1.0, r)).powi(2) / r, 1e-12, 0.25, 2000, 8);
        assert!((s1 - direct).abs() < 1e-6);
    }
}
