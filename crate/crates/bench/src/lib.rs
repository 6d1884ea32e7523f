//! Fixtures shared by the benches.

use ginfield::sampler::{sample_eigenvalues, Backend};
use ginfield::{EigenSample, SeedStream};

/// A seeded eigenvalue sample of size `n`.
pub fn spectrum(n: usize) -> EigenSample {
    sample_eigenvalues(n, SeedStream::new(7, 0), Backend::HessenbergModel).expect("sampling a fixture")
}
