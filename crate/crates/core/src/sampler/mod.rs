//! Exact samplers for complex Ginibre eigenvalues and their moduli.

mod disk;
mod dpp;
mod io;

pub use disk::{sample_disk_restricted, DiskSample};
pub use dpp::sample_dpp_kernel;
pub use io::{read_eig, write_eig};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{eigenvalues, eigenvalues_hessenberg, ComplexMatrix, EigenOptions};
use crate::rng::SeedStream;
use crate::stats::{clopper_pearson, mean_stderr, Estimate};

/// How an [`EigenSample`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Dense Gaussian matrix, Hessenberg reduction, shifted QR.
    MatrixEig,
    /// Random Hessenberg matrix with the same eigenvalue law, then shifted QR.
    HessenbergModel,
    /// Sequential sampling of the determinantal point process (n <= 512).
    DppKernel,
    /// Moduli only, from independent Gamma variables; angles are meaningless.
    KostlanRadii,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::MatrixEig => "matrix-eig",
            Backend::HessenbergModel => "hessenberg-model",
            Backend::DppKernel => "dpp-kernel",
            Backend::KostlanRadii => "kostlan-radii",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix-eig" => Ok(Backend::MatrixEig),
            "hessenberg-model" => Ok(Backend::HessenbergModel),
            "dpp-kernel" => Ok(Backend::DppKernel),
            "kostlan-radii" => Ok(Backend::KostlanRadii),
            other => Err(invalid(format!("unknown backend {other:?}"))),
        }
    }
}

/// One replica of N Ginibre eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSample {
    pub n: usize,
    pub seed: SeedStream,
    pub backend: Backend,
    pub points: Vec<Complex64>,
}

impl EigenSample {
    /// False for Kostlan samples, whose points carry moduli on the real axis.
    pub fn angles_valid(&self) -> bool {
        self.backend != Backend::KostlanRadii
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * sd, im * sd)
}

/// Dense n x n matrix with iid complex Gaussian entries, real and imaginary
/// parts each N(0, 1/(2n)).
pub fn sample_matrix(n: usize, seed: SeedStream) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(invalid("matrix size must be positive"));
    }
    let mut rng = seed.rng();
    let sd = (0.5 / n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng, sd)))
}

/// Random upper Hessenberg matrix whose eigenvalues have the Ginibre law:
/// entries on and above the diagonal are complex Gaussian with variance 1/n,
/// and subdiagonal entry `j` is `sqrt(Gamma(n-1-j, 1) / n)`.
pub fn sample_hessenberg_model(n: usize, seed: SeedStream) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(invalid("matrix size must be positive"));
    }
    let mut rng = seed.rng();
    let sd = (0.5 / n as f64).sqrt();
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            h[(i, j)] = complex_normal(&mut rng, sd);
        }
    }
    for j in 0..n - 1 {
        let shape = (n - 1 - j) as f64;
        let g: f64 = Gamma::new(shape, 1.0).map_err(|e| Error::Sampling(e.to_string()))?.sample(&mut rng);
        h[(j + 1, j)] = Complex64::new((g / n as f64).sqrt(), 0.0);
    }
    Ok(h)
}

/// Moduli of Ginibre eigenvalues: `sqrt(g_k / n)` with `g_k ~ Gamma(k, 1)`,
/// `k = 1..=n`, independent.
pub fn sample_radii_kostlan(n: usize, seed: SeedStream) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut rng = seed.rng();
    (1..=n)
        .map(|k| {
            let g: f64 = Gamma::new(k as f64, 1.0).map_err(|e| Error::Sampling(e.to_string()))?.sample(&mut rng);
            Ok((g / n as f64).sqrt())
        })
        .collect()
}

/// Draws one replica of N eigenvalues with the requested backend.
pub fn sample_eigenvalues(n: usize, seed: SeedStream, backend: Backend) -> Result<EigenSample> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let points = match backend {
        Backend::MatrixEig => eigenvalues(&sample_matrix(n, seed)?, EigenOptions::default())?,
        Backend::HessenbergModel => eigenvalues_hessenberg(sample_hessenberg_model(n, seed)?, EigenOptions::default())?,
        Backend::DppKernel => sample_dpp_kernel(n, seed)?,
        Backend::KostlanRadii => sample_radii_kostlan(n, seed)?.into_iter().map(|r| Complex64::new(r, 0.0)).collect(),
    };
    Ok(EigenSample { n, seed, backend, points })
}

/// Replica mean of `(1/N) Σ_j |λ_j|^p`.
pub fn radial_moment(samples: &[EigenSample], p: f64) -> Result<Estimate> {
    if samples.len() < 2 {
        return Err(invalid("need at least two replicas"));
    }
    let vals: Vec<f64> = samples.iter().map(|s| s.points.iter().map(|z| z.norm().powf(p)).sum::<f64>() / s.n as f64).collect();
    Ok(mean_stderr(&vals))
}

/// `E (1/N) Σ_j |λ_j|^p = (1/N) Σ_k Γ(k + p/2) / (Γ(k) N^{p/2})`.
pub fn radial_moment_exact(n: usize, p: f64) -> Result<f64> {
    if n == 0 || !(p > -2.0) {
        return Err(invalid("need n >= 1 and p > -2"));
    }
    let nf = n as f64;
    let s: f64 = (1..=n)
        .map(|k| (libm::lgamma(k as f64 + p / 2.0) - libm::lgamma(k as f64) - 0.5 * p * nf.ln()).exp())
        .sum();
    Ok(s / nf)
}

/// Empirical exceedance frequency of `max |lambda| >= 1 + delta` against the
/// bound `sqrt(N) / delta * exp(-N delta^2 / 4)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBoundReport {
    pub n: usize,
    pub delta: f64,
    pub replicas: usize,
    pub exceedances: usize,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
    pub passed: bool,
}

pub fn tail_bound(n: usize, delta: f64) -> f64 {
    (n as f64).sqrt() / delta * (-(n as f64) * delta * delta / 4.0).exp()
}

pub fn tail_bound_report(samples: &[EigenSample], delta: f64) -> Result<TailBoundReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    let first = samples.first().ok_or_else(|| invalid("no samples"))?;
    let n = first.n;
    if samples.iter().any(|s| s.n != n) {
        return Err(invalid("samples have mixed N"));
    }
    let exceedances = samples.iter().filter(|s| s.max_modulus() >= 1.0 + delta).count();
    let replicas = samples.len();
    let (ci_low, ci_high) = clopper_pearson(exceedances as u64, replicas as u64, 0.95);
    let bound = tail_bound(n, delta);
    Ok(TailBoundReport {
        n,
        delta,
        replicas,
        exceedances,
        frequency: exceedances as f64 / replicas as f64,
        ci_low,
        ci_high,
        bound,
        passed: ci_low <= bound,
    })
}
