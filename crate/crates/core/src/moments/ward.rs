use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::Perturbation;
use crate::sampler::EigenSample;

type C = Complex64;

const MIN_ESS: f64 = 50.0;

/// `amplitude (1 - |x - center|²/radius²)³` inside the disk, zero outside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactBump {
    pub center: C,
    pub radius: f64,
    pub amplitude: C,
}

impl CompactBump {
    pub fn value(&self, x: C) -> C {
        let s = (x - self.center).norm_sqr() / (self.radius * self.radius);
        if s >= 1.0 {
            C::new(0.0, 0.0)
        } else {
            self.amplitude * (1.0 - s).powi(3)
        }
    }

    /// `∂ = (∂_x - i ∂_y)/2`.
    pub fn d(&self, x: C) -> C {
        let r2 = self.radius * self.radius;
        let d = x - self.center;
        let s = d.norm_sqr() / r2;
        if s >= 1.0 {
            C::new(0.0, 0.0)
        } else {
            self.amplitude * d.conj() * (-3.0 * (1.0 - s).powi(2) / r2)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WardEstimate {
    pub residual: C,
    /// Combined standard error of the real and imaginary parts.
    pub stderr: f64,
    pub effective_sample_size: f64,
    pub replicas: usize,
}

/// The loop-equation integrand for one configuration.
pub fn ward_integrand(points: &[C], n: usize, g: &Perturbation, t: f64, h: &CompactBump) -> C {
    let nf = n as f64;
    let mut acc = C::new(0.0, 0.0);
    for (j, x) in points.iter().enumerate() {
        let hx = h.value(*x);
        if hx == C::new(0.0, 0.0) {
            continue;
        }
        let mut pair = C::new(0.0, 0.0);
        for (k, y) in points.iter().enumerate() {
            if k != j {
                pair += (x - y).inv();
            }
        }
        let drift = nf * x.conj() - t * g.d1(*x);
        acc += hx * pair + h.d(*x) - hx * drift;
    }
    acc
}

/// Log importance weight `t Σ_j g(λ_j)` of one configuration; the centring
/// constant of `X(g)` cancels once the weights are normalized.
pub fn ward_log_weight(points: &[C], g: &Perturbation, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t * points.iter().map(|x| g.value(*x)).sum::<f64>()
}

/// Self-normalized weighted mean of per-replica integrand values.
pub fn ward_estimate(values: &[C], log_weights: &[f64]) -> Result<WardEstimate> {
    if values.is_empty() {
        return Err(invalid("no replicas"));
    }
    if values.len() != log_weights.len() {
        return Err(invalid("one log weight per value is required"));
    }
    let top = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_weights.iter().map(|l| (l - top).exp()).collect();
    let sw: f64 = w.iter().sum();
    let sw2: f64 = w.iter().map(|x| x * x).sum();
    let ess = sw * sw / sw2;
    if !(ess >= MIN_ESS) {
        return Err(Error::Statistics(format!("importance weights degenerate: effective sample size {ess:.1} < {MIN_ESS}")));
    }
    let mean: C = w.iter().zip(values).map(|(a, v)| v * *a).sum::<C>() / sw;
    let var: f64 = w.iter().zip(values).map(|(a, v)| a * a * (v - mean).norm_sqr()).sum::<f64>() / (sw * sw);
    Ok(WardEstimate { residual: mean, stderr: var.sqrt(), effective_sample_size: ess, replicas: values.len() })
}

/// Estimates the expectation of [`ward_integrand`] under the law tilted by
/// `exp(t X(g))`, from replicas of the plain ensemble. The exact value is 0.
pub fn ward_residual(replicas: &[EigenSample], g: &Perturbation, t: f64, h: &CompactBump) -> Result<WardEstimate> {
    if replicas.iter().any(|s| !s.angles_valid()) {
        return Err(invalid("replicas must carry angles"));
    }
    let vals: Vec<C> = replicas.iter().map(|s| ward_integrand(&s.points, s.n, g, t, h)).collect();
    let logw: Vec<f64> = replicas.iter().map(|s| ward_log_weight(&s.points, g, t)).collect();
    ward_estimate(&vals, &logw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmc::RadialMollifier;
    use crate::rng::SeedStream;
    use crate::sampler::{sample_eigenvalues, Backend};

    fn bump() -> CompactBump {
        CompactBump { center: C::new(0.1, -0.05), radius: 0.4, amplitude: C::new(1.0, 0.5) }
    }

    #[test]
    fn bump_derivative_matches_differences() {
        let h = bump();
        let x = C::new(0.2, 0.1);
        let e = 1e-6;
        let dx = (h.value(x + e) - h.value(x - e)) / (2.0 * e);
        let dy = (h.value(x + C::new(0.0, e)) - h.value(x - C::new(0.0, e))) / (2.0 * e);
        let fd = (dx - C::new(0.0, 1.0) * dy) * 0.5;
        assert!((h.d(x) - fd).norm() < 1e-8);
    }

    #[test]
    fn zero_test_function_gives_zero() {
        let g = Perturbation::zero(RadialMollifier::new(0.25).unwrap());
        let h = CompactBump { amplitude: C::new(0.0, 0.0), ..bump() };
        let reps: Vec<EigenSample> = (0..60).map(|r| sample_eigenvalues(8, SeedStream::new(2, r), Backend::DppKernel).unwrap()).collect();
        let est = ward_residual(&reps, &g, 0.0, &h).unwrap();
        assert_eq!(est.residual, C::new(0.0, 0.0));
    }

    #[test]
    fn identity_holds_on_average() {
        let g = Perturbation::zero(RadialMollifier::new(0.25).unwrap());
        let reps: Vec<EigenSample> = (0..4000).map(|r| sample_eigenvalues(8, SeedStream::new(5, r), Backend::MatrixEig).unwrap()).collect();
        let est = ward_residual(&reps, &g, 0.0, &bump()).unwrap();
        assert!(est.residual.norm() <= 4.0 * est.stderr, "{:?}", est);
        assert!(est.stderr < 0.5);
    }

    #[test]
    fn degenerate_weights_rejected() {
        let g = Perturbation::single(RadialMollifier::new(0.25).unwrap(), 0.01, C::new(0.0, 0.0)).unwrap().scaled(200.0);
        let reps: Vec<EigenSample> = (0..60).map(|r| sample_eigenvalues(16, SeedStream::new(3, r), Backend::DppKernel).unwrap()).collect();
        assert!(matches!(ward_residual(&reps, &g, 1.0, &bump()), Err(Error::Statistics(_))));
    }

    #[test]
    fn constant_shift_of_weights_is_invisible() {
        let vals: Vec<C> = (0..100).map(|k| C::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let logw: Vec<f64> = (0..100).map(|k| 0.01 * k as f64).collect();
        let shifted: Vec<f64> = logw.iter().map(|l| l + 7.5).collect();
        let a = ward_estimate(&vals, &logw).unwrap();
        let b = ward_estimate(&vals, &shifted).unwrap();
        assert!((a.residual - b.residual).norm() < 1e-12);
        assert!((a.stderr - b.stderr).abs() < 1e-12);
    }
}
