//! The centred log-modulus of the characteristic polynomial on grids, and
//! the statistics read off it.

mod concentration;
mod io;

pub use concentration::{concentration_check, mollifier_family, ConcentrationReport, MollifierBumpDifference};
pub use io::{heatmap_png, read_field, write_field, Palette};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::quadrature::integrate;
use crate::rng::SeedStream;
use crate::sampler::EigenSample;
use crate::stats::{linear_fit, logsumexp, mean_stderr};

type C = Complex64;

const CLAMP: f64 = 1e-300;

/// `log|z|` outside the unit disk, `(|z|² - 1)/2` inside.
pub fn equilibrium_potential(z: C) -> f64 {
    let s = z.norm_sqr();
    if s <= 1.0 {
        0.5 * (s - 1.0)
    } else {
        0.5 * s.ln()
    }
}

/// Rectangular lattice of nodes `(x0 + i dx, y0 + j dy)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(x0: f64, y0: f64, dx: f64, dy: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = Grid { x0, y0, dx, dy, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// `side x side` nodes covering `[-half, half]²`.
    pub fn square(half: f64, side: usize) -> Result<Self> {
        if side < 2 {
            return Err(invalid("grid needs at least two nodes per side"));
        }
        let h = 2.0 * half / (side - 1) as f64;
        Grid::new(-half, -half, h, h, side, side)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(invalid("grid needs nx, ny >= 2"));
        }
        if !(self.dx > 0.0 && self.dy > 0.0) {
            return Err(invalid("grid spacings must be positive"));
        }
        let far = [self.x0, self.y0, self.x0 + self.dx * self.nx as f64, self.y0 + self.dy * self.ny as f64];
        if far.iter().any(|v| !v.is_finite()) {
            return Err(invalid("grid extends to non-finite coordinates"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, i: usize, j: usize) -> C {
        C::new(self.x0 + i as f64 * self.dx, self.y0 + j as f64 * self.dy)
    }

    /// Node at flat row-major index `k`.
    pub fn at(&self, k: usize) -> C {
        self.node(k % self.nx, k / self.nx)
    }

    pub fn nodes(&self) -> Vec<C> {
        (0..self.len()).map(|k| self.at(k)).collect()
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Flat indices of nodes with `|z| <= r`.
    pub fn in_disk(&self, r: f64) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.at(k).norm() <= r).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Psi,
    SmoothedPsi,
    GField,
    GmcDensity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub n: usize,
    pub seed: SeedStream,
    pub quantity: Quantity,
    pub clamp_count: usize,
}

/// Values on a grid, row-major with `x` varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub meta: FieldMeta,
}

impl FieldSample {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    /// Bilinear interpolation; exact at nodes.
    pub fn interpolate(&self, z: C) -> Result<f64> {
        let g = &self.grid;
        let fx = (z.re - g.x0) / g.dx;
        let fy = (z.im - g.y0) / g.dy;
        let tol = 1e-9;
        if fx < -tol || fy < -tol || fx > (g.nx - 1) as f64 + tol || fy > (g.ny - 1) as f64 + tol {
            return Err(domain(format!("{z} lies outside the grid")));
        }
        let i = (fx.max(0.0).floor() as usize).min(g.nx - 2);
        let j = (fy.max(0.0).floor() as usize).min(g.ny - 2);
        let tx = (fx - i as f64).clamp(0.0, 1.0);
        let ty = (fy - j as f64).clamp(0.0, 1.0);
        let v = |a, b| self.value(a, b);
        Ok((1.0 - ty) * ((1.0 - tx) * v(i, j) + tx * v(i + 1, j)) + ty * ((1.0 - tx) * v(i, j + 1) + tx * v(i + 1, j + 1)))
    }
}

/// `Σ log|z - λ| - N phi_eq(z)` and the number of clamped factors.
pub fn psi_at(points: &[C], n: usize, z: C) -> (f64, usize) {
    // product of squared moduli, renormalized before it can leave range
    let mut prod = 1.0f64;
    let mut logs = 0.0;
    let mut clamped = 0;
    for p in points {
        let d = (z - p).norm_sqr();
        if d < 1e-200 {
            // too small for the running product; CLAMP² is not representable
            let mut r = (z - p).norm();
            if r < CLAMP {
                r = CLAMP;
                clamped += 1;
            }
            logs += 2.0 * r.ln();
            continue;
        }
        prod *= d;
        if !(1e-200..=1e200).contains(&prod) {
            logs += prod.ln();
            prod = 1.0;
        }
    }
    (0.5 * (logs + prod.ln()) - n as f64 * equilibrium_potential(z), clamped)
}

fn require_angles(sample: &EigenSample) -> Result<()> {
    if sample.angles_valid() {
        Ok(())
    } else {
        Err(invalid("kostlan-radii samples carry no angles"))
    }
}

/// `Ψ_N` at every node of `grid`.
pub fn evaluate_field(sample: &EigenSample, grid: &Grid) -> Result<FieldSample> {
    require_angles(sample)?;
    grid.validate()?;
    let rows: Vec<(Vec<f64>, usize)> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let mut clamps = 0;
            let vals = (0..grid.nx)
                .map(|i| {
                    let (v, c) = psi_at(&sample.points, sample.n, grid.node(i, j));
                    clamps += c;
                    v
                })
                .collect();
            (vals, clamps)
        })
        .collect();
    let clamp_count = rows.iter().map(|r| r.1).sum();
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(FieldSample {
        grid: *grid,
        values,
        meta: FieldMeta { n: sample.n, seed: sample.seed, quantity: Quantity::Psi, clamp_count },
    })
}

/// Largest value over nodes in `D_r`, refined on a 9x9 patch at spacing
/// `dx/8` around the best node.
pub fn field_max(fs: &FieldSample, sample: &EigenSample, r: f64) -> Result<(C, f64)> {
    require_angles(sample)?;
    let idx = fs.grid.in_disk(r);
    let best = idx
        .iter()
        .copied()
        .max_by(|&a, &b| fs.values[a].total_cmp(&fs.values[b]))
        .ok_or_else(|| domain(format!("no grid node inside D_{r}")))?;
    let recommended = 0.25 / (sample.n as f64).sqrt();
    if fs.grid.dx.max(fs.grid.dy) > recommended {
        log::warn!("grid spacing {} coarser than 1/(4 sqrt N) = {recommended}", fs.grid.dx.max(fs.grid.dy));
    }
    let c = fs.grid.at(best);
    let mut arg = c;
    let mut val = fs.values[best];
    for a in -4i32..=4 {
        for b in -4i32..=4 {
            let z = c + C::new(a as f64 * fs.grid.dx / 8.0, b as f64 * fs.grid.dy / 8.0);
            if z.norm() > r {
                continue;
            }
            let (v, _) = psi_at(&sample.points, sample.n, z);
            if v > val {
                val = v;
                arg = z;
            }
        }
    }
    Ok((arg, val))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThickPointReport {
    pub beta: f64,
    pub r: f64,
    pub threshold: f64,
    pub area: f64,
    /// `log(area)/log N`; `None` when no node qualifies.
    pub exponent: Option<f64>,
    pub n: usize,
}

/// Area of `{z in D_r : Ψ_N(z) >= β log N}` by node counting.
pub fn thick_points(fs: &FieldSample, beta: f64, r: f64) -> Result<ThickPointReport> {
    if !(beta >= 0.0) || !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("need beta >= 0 and r in (0, 1), got {beta}, {r}")));
    }
    let n = fs.meta.n;
    let threshold = beta * (n as f64).ln();
    let count = fs.grid.in_disk(r).into_iter().filter(|&k| fs.values[k] >= threshold).count();
    let area = count as f64 * fs.grid.cell_area();
    let exponent = (area > 0.0).then(|| area.ln() / (n as f64).ln());
    Ok(ThickPointReport { beta, r, threshold, area, exponent, n })
}

/// `log( N dx dy/π Σ_{D_r} e^{β Ψ} ) / (β log N)`.
pub fn free_energy(fs: &FieldSample, beta: f64, r: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(invalid("beta must be positive"));
    }
    let terms: Vec<f64> = fs.grid.in_disk(r).into_iter().map(|k| beta * fs.values[k]).collect();
    if terms.is_empty() {
        return Err(domain(format!("no grid node inside D_{r}")));
    }
    let n = fs.meta.n as f64;
    let log_z = logsumexp(&terms) + (n * fs.grid.cell_area() / std::f64::consts::PI).ln();
    Ok(log_z / (beta * n.ln()))
}

/// `1/β + β/8` below `√8`, `1/√2` above.
pub fn freezing_prediction(beta: f64) -> f64 {
    if beta <= 8f64.sqrt() {
        1.0 / beta + beta / 8.0
    } else {
        std::f64::consts::FRAC_1_SQRT_2
    }
}

/// A test function together with its integral against the circular law.
pub struct TestFunction<'a> {
    pub f: &'a (dyn Fn(C) -> f64 + Sync),
    pub circular_integral: Option<f64>,
}

/// `Σ f(λ_j) - N ∫ f dσ`. Kostlan samples are accepted: their points are
/// the moduli, which is all a radial `f` needs.
pub fn linear_statistic(sample: &EigenSample, f: &TestFunction) -> Result<f64> {
    let integral = f
        .circular_integral
        .ok_or_else(|| Error::Config("the circular-law integral of the test function is required".into()))?;
    let s: f64 = sample.points.iter().map(|z| (f.f)(*z)).sum();
    Ok(s - sample.n as f64 * integral)
}

/// Exact variance of `Σ f(|λ_j|)` for a radial `f` vanishing beyond
/// `r_max`: the moduli `N|λ_j|²` are independent `Gamma(k, 1)`, `k = 1..=N`.
pub fn radial_variance_exact(n: usize, f: &dyn Fn(f64) -> f64, r_max: f64) -> Result<f64> {
    if n == 0 || !(r_max > 0.0) {
        return Err(invalid("need n >= 1 and r_max > 0"));
    }
    let nf = n as f64;
    let u_max = nf * r_max * r_max;
    let mut var = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        let lo = (kf - 14.0 * kf.sqrt() - 20.0).max(0.0);
        if lo >= u_max {
            break;
        }
        let hi = (kf + 14.0 * kf.sqrt() + 20.0).min(u_max);
        let lg = libm::lgamma(kf);
        let pdf = |u: f64| if u > 0.0 { ((kf - 1.0) * u.ln() - u - lg).exp() } else if k == 1 { 1.0 } else { 0.0 };
        let m1 = integrate(|u| pdf(u) * f((u / nf).sqrt()), lo, hi, 32, 16);
        let m2 = integrate(|u| pdf(u) * f((u / nf).sqrt()).powi(2), lo, hi, 32, 16);
        var += m2 - m1 * m1;
    }
    Ok(var)
}

/// `(1/4π) ∫ |∇f|²` of a grid-backed function vanishing near the unit circle.
pub fn sigma_variance(grid: &Grid, values: &[f64]) -> Result<f64> {
    grid.validate()?;
    if values.len() != grid.len() {
        return Err(invalid("value count does not match the grid"));
    }
    let guard = 1.0 - 1.5 * grid.dx.max(grid.dy);
    for k in 0..grid.len() {
        let z = grid.at(k);
        let (i, j) = (k % grid.nx, k / grid.nx);
        let edge = i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1;
        if (z.norm() >= guard || edge) && values[k].abs() >= 1e-12 {
            return Err(domain(format!("test function does not vanish at {z}")));
        }
    }
    let v = |i: usize, j: usize| values[j * grid.nx + i];
    let mut acc = 0.0;
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let fx = (v(i + 1, j) - v(i - 1, j)) / (2.0 * grid.dx);
            let fy = (v(i, j + 1) - v(i, j - 1)) / (2.0 * grid.dy);
            acc += fx * fx + fy * fy;
        }
    }
    Ok(acc * grid.cell_area() / (4.0 * std::f64::consts::PI))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovariancePoint {
    pub offset: C,
    pub covariance: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceScan {
    pub z0: C,
    pub replicas: usize,
    pub points: Vec<CovariancePoint>,
    pub slope: f64,
    /// Least-squares standard error of the slope (ignores the correlation
    /// between offsets).
    pub slope_stderr: f64,
    pub intercept: f64,
}

/// Empirical `Cov(Ψ(z0), Ψ(z0 + x))` per offset, and its fit against
/// `log min(√N, 1/|x|)`.
pub fn covariance_scan(replicas: &[FieldSample], z0: C, offsets: &[C]) -> Result<CovarianceScan> {
    let first = replicas.first().ok_or_else(|| invalid("no replicas"))?;
    let grid = first.grid;
    if replicas.iter().any(|r| r.grid != grid) {
        return Err(invalid("replicas must share one grid"));
    }
    let base = replicas.iter().map(|r| r.interpolate(z0)).collect::<Result<Vec<_>>>()?;
    let others = offsets
        .iter()
        .map(|x| replicas.iter().map(|r| r.interpolate(z0 + x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    covariance_from_values(first.meta.n, z0, &base, offsets, &others)
}

/// [`covariance_scan`] from values already taken at `z0` (`base[replica]`)
/// and at `z0 + offsets[k]` (`others[k][replica]`).
pub fn covariance_from_values(n: usize, z0: C, base: &[f64], offsets: &[C], others: &[Vec<f64>]) -> Result<CovarianceScan> {
    if base.len() < 2 {
        return Err(invalid("covariance needs at least two replicas"));
    }
    if offsets.is_empty() {
        return Err(invalid("no offsets"));
    }
    if others.len() != offsets.len() || others.iter().any(|o| o.len() != base.len()) {
        return Err(invalid("one value per replica and offset is required"));
    }
    let nf = n as f64;
    let base_mean = base.iter().sum::<f64>() / base.len() as f64;
    let mut points = Vec::with_capacity(offsets.len());
    for (&x, other) in offsets.iter().zip(others) {
        let other_mean = other.iter().sum::<f64>() / other.len() as f64;
        let prods: Vec<f64> = base.iter().zip(other).map(|(a, b)| (a - base_mean) * (b - other_mean)).collect();
        let est = mean_stderr(&prods);
        let k = prods.len() as f64;
        let se = est.stderr.unwrap_or(f64::NAN);
        points.push(CovariancePoint { offset: x, covariance: est.value * k / (k - 1.0), stderr: se * k / (k - 1.0) });
    }
    let xs: Vec<f64> = points
        .iter()
        .map(|p| if p.offset.norm() == 0.0 { 0.5 * nf.ln() } else { (1.0 / p.offset.norm()).min(nf.sqrt()).ln() })
        .collect();
    let ys: Vec<f64> = points.iter().map(|p| p.covariance).collect();
    let (slope, intercept, slope_stderr) = if points.len() >= 2 {
        linear_fit(&xs, &ys)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(CovarianceScan { z0, replicas: base.len(), points, slope, slope_stderr, intercept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample_eigenvalues, Backend};

    fn single(lam: C) -> EigenSample {
        EigenSample { n: 1, seed: SeedStream::new(0, 0), backend: Backend::MatrixEig, points: vec![lam] }
    }

    #[test]
    fn equilibrium_values() {
        assert_eq!(equilibrium_potential(C::new(0.0, 0.0)), -0.5);
        assert_eq!(equilibrium_potential(C::new(0.0, 1.0)), 0.0);
        assert!((equilibrium_potential(C::new(2.0, 0.0)) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn radial_variance_oracles() {
        // Var Σ|λ|² = Σ_k k / N² = (N + 1)/(2N)
        for n in [1usize, 7, 50] {
            let v = radial_variance_exact(n, &|r| r * r, 8.0).unwrap();
            assert!((v - (n as f64 + 1.0) / (2.0 * n as f64)).abs() < 1e-10, "{n}: {v}");
        }
        let bump = |r: f64| if r < 0.4 { (1.0 - (r / 0.4).powi(2)).powi(3) } else { 0.0 };
        let exact = radial_variance_exact(200, &bump, 0.4).unwrap();
        let vals: Vec<f64> = (0..4000)
            .map(|r| {
                let s = crate::sampler::sample_eigenvalues(200, SeedStream::new(31, r), Backend::KostlanRadii).unwrap();
                s.points.iter().map(|p| bump(p.re)).sum::<f64>()
            })
            .collect();
        let emp = crate::stats::variance(&vals);
        // relative stderr of a sample variance is about sqrt(2/R)
        assert!((emp / exact - 1.0).abs() < 4.0 * (2.0f64 / 4000.0).sqrt(), "{emp} vs {exact}");
    }

    #[test]
    fn one_point_fields() {
        let s = single(C::new(0.0, 0.0));
        assert!(psi_at(&s.points, 1, C::new(2.0, 0.0)).0.abs() < 1e-15);
        let (v, _) = psi_at(&s.points, 1, C::new(0.5, 0.0));
        assert!((v - (0.5f64.ln() + 0.375)).abs() < 1e-15);
        let g = Grid::square(0.5, 41).unwrap();
        let fs = evaluate_field(&s, &g).unwrap();
        assert_eq!(fs.meta.clamp_count, 1);
        assert!(fs.values.iter().all(|v| v.is_finite()));
        let (arg, m) = field_max(&fs, &s, 0.5).unwrap();
        assert!((m - (0.5f64.ln() + 0.375)).abs() < 1e-12, "{m}");
        assert!((arg.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_matches_log_sum() {
        let s = sample_eigenvalues(300, SeedStream::new(2, 0), Backend::DppKernel).unwrap();
        for z in [C::new(0.1, 0.2), C::new(-0.7, 0.5), C::new(1.5, 0.0)] {
            let direct: f64 = s.points.iter().map(|p| (z - p).norm().ln()).sum::<f64>() - 300.0 * equilibrium_potential(z);
            assert!((psi_at(&s.points, 300, z).0 - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn translated_grid_agrees() {
        let s = sample_eigenvalues(50, SeedStream::new(3, 0), Backend::DppKernel).unwrap();
        let g1 = Grid::new(-0.5, -0.5, 0.05, 0.05, 11, 11).unwrap();
        let g2 = Grid::new(-0.25, -0.5, 0.05, 0.05, 11, 11).unwrap();
        let a = evaluate_field(&s, &g1).unwrap();
        let b = evaluate_field(&s, &g2).unwrap();
        // g2 column i sits on g1 column i + 5
        for j in 0..11 {
            for i in 0..6 {
                assert!((a.value(i + 5, j) - b.value(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_field_statistics() {
        let g = Grid::square(1.0, 21).unwrap();
        let fs = FieldSample {
            grid: g,
            values: vec![0.3; g.len()],
            meta: FieldMeta { n: 100, seed: SeedStream::new(0, 0), quantity: Quantity::Psi, clamp_count: 0 },
        };
        let t = thick_points(&fs, 0.0, 0.5).unwrap();
        assert_eq!(t.area, g.in_disk(0.5).len() as f64 * g.cell_area());
        let t = thick_points(&fs, 1.0, 0.5).unwrap();
        assert_eq!(t.area, 0.0);
        assert!(t.exponent.is_none());
        // F = (log(N area/π) + β c)/(β log N)
        let area = g.in_disk(0.5).len() as f64 * g.cell_area();
        let f = free_energy(&fs, 2.0, 0.5).unwrap();
        let expect = ((100.0 * area / std::f64::consts::PI).ln() + 0.6) / (2.0 * 100f64.ln());
        assert!((f - expect).abs() < 1e-12);
        assert!(matches!(field_max(&fs, &single(C::new(5.0, 0.0)), 0.0001), Err(Error::Domain(_)) | Ok(_)));
        assert!(thick_points(&fs, 0.3, 1.0).is_err());
    }

    #[test]
    fn freezing_branches_meet() {
        assert!((freezing_prediction(8f64.sqrt()) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((freezing_prediction(2.0) - 0.75).abs() < 1e-15);
        assert_eq!(freezing_prediction(4.0), std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn linear_statistic_constants_cancel() {
        let s = sample_eigenvalues(40, SeedStream::new(5, 0), Backend::KostlanRadii).unwrap();
        let one = |_z: C| 1.0;
        assert_eq!(linear_statistic(&s, &TestFunction { f: &one, circular_integral: Some(1.0) }).unwrap(), 0.0);
        assert!(matches!(linear_statistic(&s, &TestFunction { f: &one, circular_integral: None }), Err(Error::Config(_))));
    }

    #[test]
    fn sigma_of_radial_function() {
        // f = (1 - 4r²)^3 on r < 1/2: ½∫ f'(r)² r dr = ½ ∫ (24 r (1-4r²)²)² r dr
        let g = Grid::square(1.0, 801).unwrap();
        let f = |z: C| {
            let s = 4.0 * z.norm_sqr();
            if s < 1.0 {
                (1.0 - s).powi(3)
            } else {
                0.0
            }
        };
        let vals: Vec<f64> = g.nodes().into_iter().map(f).collect();
        let got = sigma_variance(&g, &vals).unwrap();
        let want = 0.5 * integrate(|r| (24.0 * r * (1.0 - 4.0 * r * r).powi(2)).powi(2) * r, 0.0, 0.5, 8, 16);
        assert!((got / want - 1.0).abs() < 1e-4, "{got} vs {want}");
        assert_eq!(sigma_variance(&g, &vec![0.0; g.len()]).unwrap(), 0.0);
        let bad: Vec<f64> = g.nodes().into_iter().map(|z| z.re).collect();
        assert!(sigma_variance(&g, &bad).is_err());
    }

    #[test]
    fn interpolation_and_scan_guards() {
        let g = Grid::square(1.0, 5).unwrap();
        let fs = FieldSample {
            grid: g,
            values: g.nodes().iter().map(|z| 2.0 * z.re - z.im).collect(),
            meta: FieldMeta { n: 4, seed: SeedStream::new(0, 0), quantity: Quantity::Psi, clamp_count: 0 },
        };
        let z = C::new(0.3, -0.2);
        assert!((fs.interpolate(z).unwrap() - 0.8).abs() < 1e-12);
        assert!(fs.interpolate(C::new(1.5, 0.0)).is_err());
        let reps = vec![fs.clone(), fs];
        assert!(covariance_scan(&reps, C::new(0.0, 0.0), &[C::new(2.0, 0.0)]).is_err());
    }
}
