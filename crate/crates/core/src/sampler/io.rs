use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Backend, EigenSample};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

#[derive(Serialize, Deserialize)]
struct Header {
    n: usize,
    seed: SeedStream,
    backend: Backend,
}

/// Writes a `.eig` file: one JSON header line, then the points as
/// little-endian f64 pairs (re, im).
pub fn write_eig(path: &Path, sample: &EigenSample) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header = Header { n: sample.n, seed: sample.seed, backend: sample.backend };
    serde_json::to_writer(&mut f, &header)?;
    f.write_all(b"\n")?;
    for z in &sample.points {
        f.write_all(&z.re.to_le_bytes())?;
        f.write_all(&z.im.to_le_bytes())?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_eig(path: &Path) -> Result<EigenSample> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: Header = serde_json::from_str(line.trim_end())?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != header.n * 16 {
        return Err(Error::Format(format!(
            "expected {} bytes of points, found {}",
            header.n * 16,
            bytes.len()
        )));
    }
    let points = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok(EigenSample { n: header.n, seed: header.seed, backend: header.backend, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::sample_eigenvalues;

    #[test]
    fn roundtrip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.eig");
        let s = sample_eigenvalues(17, SeedStream::new(4, 1), Backend::MatrixEig).unwrap();
        write_eig(&p, &s).unwrap();
        let back = read_eig(&p).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.eig");
        std::fs::write(&p, b"{\"n\":2,\"seed\":{\"master_seed\":1,\"replica_index\":0},\"backend\":\"matrix-eig\"}\n12345").unwrap();
        assert!(matches!(read_eig(&p), Err(Error::Format(_))));
    }
}
