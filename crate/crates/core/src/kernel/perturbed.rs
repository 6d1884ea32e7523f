use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gmc::RadialMollifier;
use crate::quadrature::DiskQuadrature;

type C = Complex64;

/// One summand `gamma * (psi_eps(· - center) - psi_1(· - center))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierTerm {
    pub gamma: f64,
    pub eps: f64,
    pub center: C,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PerturbationSpec {
    eps0: f64,
    terms: Vec<MollifierTerm>,
}

/// A sum of mollifier differences; smooth, real and compactly supported.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PerturbationSpec", into = "PerturbationSpec")]
pub struct Perturbation {
    mollifier: RadialMollifier,
    terms: Vec<MollifierTerm>,
}

impl TryFrom<PerturbationSpec> for Perturbation {
    type Error = Error;
    fn try_from(spec: PerturbationSpec) -> Result<Self> {
        Perturbation::new(RadialMollifier::new(spec.eps0)?, spec.terms)
    }
}

impl From<Perturbation> for PerturbationSpec {
    fn from(p: Perturbation) -> Self {
        PerturbationSpec { eps0: p.mollifier.eps0(), terms: p.terms }
    }
}

impl Perturbation {
    pub fn new(mollifier: RadialMollifier, terms: Vec<MollifierTerm>) -> Result<Self> {
        for t in &terms {
            if !(t.eps > 0.0 && t.eps <= 1.0) || !t.gamma.is_finite() {
                return Err(invalid(format!("bad mollifier term {t:?}")));
            }
            if t.center.norm() > mollifier.eps0() {
                return Err(invalid(format!("term centre {} lies outside D(0, eps0)", t.center)));
            }
        }
        Ok(Perturbation { mollifier, terms })
    }

    pub fn zero(mollifier: RadialMollifier) -> Self {
        Perturbation { mollifier, terms: Vec::new() }
    }

    /// `psi_eps(· - center) - psi(· - center)`.
    pub fn single(mollifier: RadialMollifier, eps: f64, center: C) -> Result<Self> {
        Self::new(mollifier, vec![MollifierTerm { gamma: 1.0, eps, center }])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.gamma == 0.0 || t.eps == 1.0)
    }

    pub fn terms(&self) -> &[MollifierTerm] {
        &self.terms
    }

    pub fn mollifier(&self) -> &RadialMollifier {
        &self.mollifier
    }

    /// Same terms with every `gamma` scaled.
    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self.terms.iter().map(|t| MollifierTerm { gamma: t.gamma * factor, ..*t }).collect();
        Perturbation { mollifier: self.mollifier.clone(), terms }
    }

    pub fn value(&self, x: C) -> f64 {
        let a = self.mollifier.eps0();
        self.terms
            .iter()
            .map(|t| {
                let r = (x - t.center).norm();
                if r >= a {
                    0.0
                } else {
                    t.gamma * (self.mollifier.psi(t.eps, r) - self.mollifier.psi(1.0, r))
                }
            })
            .sum()
    }

    /// `∂g(x)` with `∂ = (∂_x - i ∂_y)/2`.
    pub fn d1(&self, x: C) -> C {
        let a = self.mollifier.eps0();
        let mut out = C::new(0.0, 0.0);
        for t in &self.terms {
            let d = x - t.center;
            let s = d.norm_sqr();
            if s >= a * a {
                continue;
            }
            let h1 = self.psi_s_slope(t.eps, s) - self.psi_s_slope(1.0, s);
            out += d.conj() * (t.gamma * h1);
        }
        out
    }

    /// First derivative in `s` of `psi_eps(sqrt s)`, from the mass table.
    fn psi_s_slope(&self, eps: f64, s: f64) -> f64 {
        let a2 = (eps * self.mollifier.eps0()).powi(2);
        let u = s / a2;
        let g1 = if u >= 1.0 {
            1.0 / u
        } else if u >= 1e-3 {
            self.mollifier.mass_u(u) / u
        } else {
            self.mollifier.potential_derivatives(u, 1)[0]
        };
        0.5 * g1 / a2
    }

    /// `∂^i g(x)` for `i = 1..=order`.
    pub fn derivatives(&self, x: C, order: usize) -> Vec<C> {
        let a = self.mollifier.eps0();
        let mut out = vec![C::new(0.0, 0.0); order];
        for t in &self.terms {
            let d = x - t.center;
            let s = d.norm_sqr();
            if s >= a * a {
                continue;
            }
            let he = self.mollifier.psi_s_derivatives(t.eps, s, order);
            let h1 = self.mollifier.psi_s_derivatives(1.0, s, order);
            let dc = d.conj();
            let mut pow = C::new(1.0, 0.0);
            for i in 0..order {
                pow *= dc;
                out[i] += pow * (t.gamma * (he[i] - h1[i]));
            }
        }
        out
    }

    /// `Σ_k eps_k^{-2} 1{|z - z_k| < eps_k}`.
    pub fn theta(&self, z: C) -> f64 {
        self.terms.iter().filter(|t| (z - t.center).norm() < t.eps).map(|t| t.eps.powi(-2)).sum()
    }
}

/// Polar rule used for the weighted inner products.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { radial_nodes: 400, angular_nodes: 512 }
    }
}

/// Orthonormal polynomials for the weight `exp(-N|x|² + t g(x))` and the
/// resulting correlation kernel.
///
/// The basis is generated by the recurrence `x p_{k-1} = Σ_{j<=k} h_{j,k-1} p_j`,
/// which is what gets stored; the leading coefficients follow from the
/// subdiagonal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbedKernelContext {
    n_weight: usize,
    degree: usize,
    t: f64,
    perturbation: Perturbation,
    quadrature: DiskQuadrature,
    p0: f64,
    recurrence: Vec<Vec<C>>,
    log_kappa: Vec<f64>,
}

/// Builds the orthonormal basis `p_0, …, p_{degree-1}` under `e^{-2N Q*}`,
/// `Q* = |x|²/2 - t g/(2N)`.
pub fn orthonormalize_perturbed(
    n_weight: usize,
    degree: usize,
    g: &Perturbation,
    t: f64,
    quad: QuadratureSpec,
) -> Result<PerturbedKernelContext> {
    if n_weight == 0 || degree == 0 {
        return Err(invalid("orthonormalisation needs n_weight >= 1 and degree >= 1"));
    }
    if degree > 128 {
        return Err(invalid(format!("degree {degree} exceeds the conditioning guard of 128")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("t must lie in [0, 1], got {t}")));
    }
    if quad.radial_nodes < 8 || quad.angular_nodes < 2 * degree + 2 {
        return Err(invalid("quadrature too coarse for the requested degree"));
    }
    let n = n_weight as f64;
    let radius = (degree as f64 / n).sqrt().max(1.0) + 8.0 / n.sqrt();
    let quadrature = DiskQuadrature { radius, radial_nodes: quad.radial_nodes, angular_nodes: quad.angular_nodes };
    let (nodes, weights) = quadrature.nodes();

    // Columns hold sqrt(weight) e^{-NQ*} p_k at the nodes.
    let root_weight: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(x, w)| w.sqrt() * (-0.5 * n * x.norm_sqr() + 0.5 * t * g.value(*x)).exp())
        .collect();
    let norm0 = root_weight.iter().map(|v| v * v).sum::<f64>().sqrt();
    let p0 = 1.0 / norm0;
    let mut basis: Vec<Vec<C>> = Vec::with_capacity(degree);
    basis.push(root_weight.iter().map(|v| C::new(v * p0, 0.0)).collect());
    let mut recurrence = Vec::with_capacity(degree.saturating_sub(1));
    let mut log_kappa = vec![p0.ln()];

    for k in 1..degree {
        let prev = &basis[k - 1];
        let mut u: Vec<C> = nodes.iter().zip(prev).map(|(x, v)| x * v).collect();
        let start_norm = norm(&u);
        let mut h = vec![C::new(0.0, 0.0); k + 1];
        for _pass in 0..2 {
            for (j, v) in basis.iter().enumerate() {
                let c = dot(&u, v);
                axpy(&mut u, -c, v);
                h[j] += c;
            }
        }
        let hk = norm(&u);
        if !(hk > 1e-13 * start_norm) {
            return Err(Error::Conditioning(format!(
                "weighted Gram matrix singular at degree {k}; lower the degree or refine the quadrature"
            )));
        }
        h[k] = C::new(hk, 0.0);
        for x in u.iter_mut() {
            *x /= hk;
        }
        log_kappa.push(log_kappa[k - 1] - hk.ln());
        basis.push(u);
        recurrence.push(h);
    }

    Ok(PerturbedKernelContext {
        n_weight,
        degree,
        t,
        perturbation: g.clone(),
        quadrature,
        p0,
        recurrence,
        log_kappa,
    })
}

fn dot(a: &[C], b: &[C]) -> C {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.im * y.re - x.re * y.im;
    }
    C::new(re, im)
}

fn axpy(a: &mut [C], c: C, b: &[C]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += c * y;
    }
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl PerturbedKernelContext {
    pub fn n_weight(&self) -> usize {
        self.n_weight
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }

    pub fn quadrature(&self) -> DiskQuadrature {
        self.quadrature
    }

    /// `log κ_k`, the log of the leading coefficient of `p_k`.
    pub fn log_kappa(&self, k: usize) -> Result<f64> {
        self.log_kappa
            .get(k)
            .copied()
            .ok_or_else(|| Error::Config(format!("polynomial table has degree {}, need index {k}", self.degree)))
    }

    /// `N Q*(x) = N|x|²/2 - t g(x)/2`.
    pub fn weighted_potential(&self, x: C) -> f64 {
        0.5 * self.n_weight as f64 * x.norm_sqr() - 0.5 * self.t * self.perturbation.value(x)
    }

    /// `p_k(x) e^{-N Q*(x)}` for all `k < degree`.
    pub fn weighted_basis(&self, x: C) -> Vec<C> {
        let mut q = Vec::with_capacity(self.degree);
        q.push(C::new(self.p0 * (-self.weighted_potential(x)).exp(), 0.0));
        for (k, h) in self.recurrence.iter().enumerate() {
            let mut v = x * q[k];
            for (j, hj) in h[..=k].iter().enumerate() {
                v -= hj * q[j];
            }
            q.push(v / h[k + 1].re);
        }
        q
    }

    /// `K*(x, z) = Σ_k p_k(x) conj(p_k(z)) e^{-NQ*(x) - NQ*(z)}`.
    pub fn eval(&self, x: C, z: C) -> C {
        self.eval_terms(x, z, self.degree)
    }

    /// The kernel built from the first `terms` polynomials only.
    pub fn eval_terms(&self, x: C, z: C, terms: usize) -> C {
        let terms = terms.min(self.degree);
        let swap = (z.re, z.im) < (x.re, x.im);
        let (a, b) = if swap { (z, x) } else { (x, z) };
        let qa = self.weighted_basis(a);
        let v = if a == b {
            C::new(qa[..terms].iter().map(|q| q.norm_sqr()).sum(), 0.0)
        } else {
            let qb = self.weighted_basis(b);
            qa[..terms].iter().zip(&qb).map(|(p, q)| p * q.conj()).sum()
        };
        if swap {
            v.conj()
        } else {
            v
        }
    }

    /// Largest deviation of the Gram matrix from the identity, with the basis
    /// evaluated through the recurrence at the nodes of `quad`.
    pub fn orthonormality_residual(&self, quad: Option<QuadratureSpec>) -> f64 {
        let q = quad.map_or(self.quadrature, |s| DiskQuadrature {
            radius: self.quadrature.radius,
            radial_nodes: s.radial_nodes,
            angular_nodes: s.angular_nodes,
        });
        let (nodes, weights) = q.nodes();
        let d = self.degree;
        let mut gram = vec![C::new(0.0, 0.0); d * d];
        for (x, w) in nodes.iter().zip(&weights) {
            let b = self.weighted_basis(*x);
            for j in 0..d {
                let bj = b[j] * *w;
                for k in j..d {
                    gram[j * d + k] += bj * b[k].conj();
                }
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for k in j..d {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((gram[j * d + k] - target).norm());
            }
        }
        worst
    }

    /// `∫ K*(z, z) d²z` on an independent polar rule.
    pub fn mass(&self, quad: QuadratureSpec) -> f64 {
        let q = DiskQuadrature { radius: self.quadrature.radius, radial_nodes: quad.radial_nodes, angular_nodes: quad.angular_nodes };
        let (nodes, weights) = q.nodes();
        nodes.iter().zip(&weights).map(|(x, w)| w * self.eval(*x, *x).re).sum()
    }

    /// `|∫ K*(x, w) K*(w, z) d²w - K*(x, z)|` on an independent polar rule.
    pub fn reproducing_residual(&self, x: C, z: C, quad: QuadratureSpec) -> f64 {
        let q = DiskQuadrature { radius: self.quadrature.radius, radial_nodes: quad.radial_nodes, angular_nodes: quad.angular_nodes };
        let (nodes, weights) = q.nodes();
        let qx = self.weighted_basis(x);
        let qz = self.weighted_basis(z);
        let mut acc = C::new(0.0, 0.0);
        for (w, wt) in nodes.iter().zip(&weights) {
            let qw = self.weighted_basis(*w);
            let kxw: C = qx.iter().zip(&qw).map(|(a, b)| a * b.conj()).sum();
            let kwz: C = qw.iter().zip(&qz).map(|(a, b)| a * b.conj()).sum();
            acc += kxw * kwz * *wt;
        }
        (acc - self.eval(x, z)).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{KernelContext, Normalization};

    fn moll() -> RadialMollifier {
        RadialMollifier::new(0.25).unwrap()
    }

    fn small_quad() -> QuadratureSpec {
        QuadratureSpec { radial_nodes: 120, angular_nodes: 96 }
    }

    #[test]
    fn unperturbed_recovers_ginibre_normalisation() {
        let n = 24;
        let ctx = orthonormalize_perturbed(n, 22, &Perturbation::zero(moll()), 0.5, small_quad()).unwrap();
        for k in 0..22 {
            // κ_k² = N^{k+1}/(π k!)
            let expect = 0.5 * ((k + 1) as f64 * (n as f64).ln() - std::f64::consts::PI.ln() - libm::lgamma(k as f64 + 1.0));
            let got = ctx.log_kappa(k).unwrap();
            assert!((got - expect).abs() < 1e-8, "k={k}: {got} vs {expect}");
        }
        let k = KernelContext::new(n, 22, Normalization::PerLebesgue).unwrap();
        for &(x, z) in &[(C::new(0.1, 0.2), C::new(-0.3, 0.1)), (C::new(0.7, -0.4), C::new(0.75, -0.3))] {
            let a = ctx.eval(x, z);
            let b = k.kernel_eval(x, z).unwrap();
            assert!((a - b).norm() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn zero_t_ignores_perturbation() {
        let g = Perturbation::single(moll(), 0.3, C::new(0.1, 0.0)).unwrap();
        let a = orthonormalize_perturbed(16, 12, &g, 0.0, small_quad()).unwrap();
        let b = orthonormalize_perturbed(16, 12, &Perturbation::zero(moll()), 0.0, small_quad()).unwrap();
        let x = C::new(0.2, 0.1);
        assert!((a.eval(x, x) - b.eval(x, x)).norm() < 1e-12);
    }

    #[test]
    fn perturbed_basis_is_orthonormal_and_reproducing() {
        let g = Perturbation::single(moll(), 0.3, C::new(0.05, 0.02)).unwrap();
        let build = QuadratureSpec { radial_nodes: 240, angular_nodes: 192 };
        let ctx = orthonormalize_perturbed(20, 20, &g, 1.0, build).unwrap();
        let other = QuadratureSpec { radial_nodes: 300, angular_nodes: 256 };
        assert!(ctx.orthonormality_residual(Some(other)) < 1e-8);
        assert!((ctx.mass(other) - 20.0).abs() < 1e-6);
        let r = ctx.reproducing_residual(C::new(0.1, -0.05), C::new(0.0, 0.08), other);
        assert!(r < 1e-6, "{r}");
        let x = C::new(0.3, 0.2);
        let z = C::new(-0.1, 0.1);
        assert_eq!(ctx.eval(x, z), ctx.eval(z, x).conj());
        // the perturbation changes the kernel where g lives
        let plain = orthonormalize_perturbed(20, 20, &Perturbation::zero(moll()), 1.0, build).unwrap();
        let c = C::new(0.05, 0.02);
        assert!((ctx.eval(c, c) - plain.eval(c, c)).norm() > 1e-3);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let g = Perturbation::single(moll(), 0.3, C::new(0.05, -0.1)).unwrap();
        let x = C::new(0.1, -0.05);
        let h = 1e-5;
        let dx = (g.value(x + h) - g.value(x - h)) / (2.0 * h);
        let dy = (g.value(x + C::new(0.0, h)) - g.value(x - C::new(0.0, h))) / (2.0 * h);
        let fd = C::new(dx, -dy) * 0.5;
        let d = g.derivatives(x, 2);
        assert!((d[0] - fd).norm() < 1e-6, "{} vs {fd}", d[0]);
        assert!((g.d1(x) - d[0]).norm() < 1e-9);
        // second holomorphic derivative from differences of the first
        let d1 = |p: C| g.derivatives(p, 1)[0];
        let ddx = (d1(x + h) - d1(x - h)) / (2.0 * h);
        let ddy = (d1(x + C::new(0.0, h)) - d1(x - C::new(0.0, h))) / (2.0 * h);
        let fd2 = (ddx - C::new(0.0, 1.0) * ddy) * 0.5;
        assert!((d[1] - fd2).norm() < 1e-5 * fd2.norm().max(1.0), "{} vs {fd2}", d[1]);
    }

    #[test]
    fn guards() {
        let z = Perturbation::zero(moll());
        assert!(orthonormalize_perturbed(10, 129, &z, 1.0, QuadratureSpec::default()).is_err());
        assert!(orthonormalize_perturbed(10, 5, &z, 1.5, small_quad()).is_err());
        assert!(Perturbation::single(moll(), 0.3, C::new(0.5, 0.0)).is_err());
        let ctx = orthonormalize_perturbed(10, 5, &z, 1.0, small_quad()).unwrap();
        assert!(matches!(ctx.log_kappa(5), Err(Error::Config(_))));
    }

    #[test]
    fn json_roundtrip() {
        let g = Perturbation::single(moll(), 0.3, C::new(0.05, 0.0)).unwrap();
        let ctx = orthonormalize_perturbed(8, 6, &g, 1.0, small_quad()).unwrap();
        let s = serde_json::to_string(&ctx).unwrap();
        let back: PerturbedKernelContext = serde_json::from_str(&s).unwrap();
        let x = C::new(0.1, 0.1);
        assert!((back.eval(x, x) - ctx.eval(x, x)).norm() < 1e-12);
    }
}
