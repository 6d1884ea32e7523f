use rayon::prelude::*;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::rng::SeedStream;
use crate::sampler::{read_eig, sample_eigenvalues, write_eig, Backend, EigenSample};

/// Samples smaller than this are cheaper to redraw than to read back.
const CACHE_MIN_N: usize = 256;

/// Draws replicas, optionally through a directory of `.eig` files keyed by
/// `(backend, N, seed, replica)`. A cached replica is bit-identical to a
/// fresh draw, so the cache never changes results.
#[derive(Clone, Debug, Default)]
pub struct SampleSource {
    cache: Option<PathBuf>,
}

impl SampleSource {
    pub fn new(cache: Option<&Path>) -> Self {
        SampleSource { cache: cache.map(Path::to_path_buf) }
    }

    fn path(&self, n: usize, seed: SeedStream, backend: Backend) -> Option<PathBuf> {
        let dir = self.cache.as_ref()?;
        if n < CACHE_MIN_N || backend == Backend::KostlanRadii {
            return None;
        }
        Some(dir.join(format!("{}-n{}-s{}-r{}.eig", backend.name(), n, seed.master_seed, seed.replica_index)))
    }

    pub fn eigen(&self, n: usize, seed: SeedStream, backend: Backend) -> Result<EigenSample> {
        let Some(path) = self.path(n, seed, backend) else {
            return sample_eigenvalues(n, seed, backend);
        };
        if let Ok(s) = read_eig(&path) {
            if s.n == n && s.seed == seed && s.backend == backend {
                return Ok(s);
            }
            log::warn!("ignoring mismatched cache entry {}", path.display());
        }
        let s = sample_eigenvalues(n, seed, backend)?;
        std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
        // write then rename so an interrupted run leaves no torn file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        write_eig(&tmp, &s)?;
        std::fs::rename(&tmp, &path)?;
        Ok(s)
    }

    /// Replicas `0..count` of size `n` under `master_seed`, drawn in
    /// parallel and returned in replica order.
    pub fn replicas(&self, n: usize, master_seed: u64, count: usize, backend: Backend) -> Result<Vec<EigenSample>> {
        (0..count as u64)
            .into_par_iter()
            .map(|r| self.eigen(n, SeedStream::new(master_seed, r), backend))
            .collect()
    }
}
