use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use super::{FieldMeta, FieldSample, Grid};
use crate::error::{invalid, Error, Result};
use crate::stats::quantile;

#[derive(Serialize, Deserialize)]
struct Sidecar {
    grid: Grid,
    meta: FieldMeta,
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes `<stem>.json` and the raw little-endian `<stem>.f64`.
pub fn write_field(stem: &Path, fs_: &FieldSample) -> Result<()> {
    let side = Sidecar { grid: fs_.grid, meta: fs_.meta };
    fs::write(with_ext(stem, "json"), serde_json::to_string_pretty(&side)?)?;
    let mut blob = Vec::with_capacity(8 * fs_.values.len());
    for v in &fs_.values {
        blob.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(with_ext(stem, "f64"), blob)?;
    Ok(())
}

pub fn read_field(stem: &Path) -> Result<FieldSample> {
    let side: Sidecar = serde_json::from_str(&fs::read_to_string(with_ext(stem, "json"))?)?;
    side.grid.validate()?;
    let blob = fs::read(with_ext(stem, "f64"))?;
    if blob.len() != 8 * side.grid.len() {
        return Err(Error::Format(format!("expected {} values, blob holds {} bytes", side.grid.len(), blob.len())));
    }
    let values = blob.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(FieldSample { grid: side.grid, values, meta: side.meta })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Palette {
    Grayscale,
    Viridis,
    /// Eight grey bands, for level sets.
    Levels,
}

const VIRIDIS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

fn color(p: Palette, t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    match p {
        Palette::Grayscale => {
            let v = (t * 255.0).round() as u8;
            [v, v, v]
        }
        Palette::Levels => {
            let band = ((t * 8.0).floor() as u32).min(7);
            let v = (band as f64 * 255.0 / 7.0).round() as u8;
            [v, v, v]
        }
        Palette::Viridis => {
            let x = t * (VIRIDIS.len() - 1) as f64;
            let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
            let f = x - i as f64;
            let mut out = [0u8; 3];
            for c in 0..3 {
                let a = VIRIDIS[i][c] as f64;
                let b = VIRIDIS[i + 1][c] as f64;
                out[c] = (a + f * (b - a)).round() as u8;
            }
            out
        }
    }
}

/// RGB PNG with one pixel per node, top row = largest `y`, colours scaled
/// linearly between the `lo` and `hi` value quantiles.
pub fn heatmap_png(fs_: &FieldSample, palette: Palette, lo: f64, hi: f64) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(invalid("quantiles must satisfy 0 <= lo <= hi <= 1"));
    }
    if fs_.values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("heatmap needs finite values"));
    }
    let mut sorted = fs_.values.clone();
    sorted.sort_by(f64::total_cmp);
    let (a, b) = (quantile(&sorted, lo), quantile(&sorted, hi));
    let span = b - a;
    if !(span > 0.0) {
        log::warn!("degenerate value range; writing a flat image");
    }
    let (nx, ny) = (fs_.grid.nx, fs_.grid.ny);
    let mut pixels = Vec::with_capacity(3 * nx * ny);
    for row in 0..ny {
        let j = ny - 1 - row;
        for i in 0..nx {
            let t = if span > 0.0 { (fs_.value(i, j) - a) / span } else { 0.5 };
            pixels.extend_from_slice(&color(palette, t));
        }
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, nx as u32, ny as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(|e| Error::Format(e.to_string()))?;
        w.write_image_data(&pixels).map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{evaluate_field, Quantity};
    use crate::rng::SeedStream;
    use crate::sampler::{sample_eigenvalues, Backend};

    fn decode(bytes: &[u8]) -> (usize, usize, Vec<u8>) {
        let dec = png::Decoder::new(bytes);
        let mut r = dec.read_info().unwrap();
        let mut buf = vec![0; r.output_buffer_size()];
        let info = r.next_frame(&mut buf).unwrap();
        buf.truncate(info.buffer_size());
        (info.width as usize, info.height as usize, buf)
    }

    fn field(grid: Grid, values: Vec<f64>) -> FieldSample {
        FieldSample { grid, values, meta: FieldMeta { n: 1, seed: SeedStream::new(0, 0), quantity: Quantity::Psi, clamp_count: 0 } }
    }

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(-1.0, 0.5, 0.1, 0.2, 3, 4).unwrap();
        let fs_ = field(g, (0..12).map(|k| k as f64 * 0.37 - 1.0).collect());
        let stem = dir.path().join("psi");
        write_field(&stem, &fs_).unwrap();
        assert_eq!(read_field(&stem).unwrap(), fs_);
        std::fs::write(dir.path().join("psi.f64"), [0u8; 5]).unwrap();
        assert!(matches!(read_field(&stem), Err(Error::Format(_))));
    }

    #[test]
    fn flat_and_ramp_images() {
        let g = Grid::square(1.0, 2).unwrap();
        let (_, _, px) = decode(&heatmap_png(&field(g, vec![1.0; 4]), Palette::Viridis, 0.01, 0.99).unwrap());
        assert!(px.chunks(3).all(|c| c == &px[0..3]));
        let (_, _, px) = decode(&heatmap_png(&field(g, vec![0.0, 1.0, 2.0, 3.0]), Palette::Grayscale, 0.0, 1.0).unwrap());
        // top row is j = 1: values 2, 3; bottom row values 0, 1
        let grey: Vec<u8> = px.chunks(3).map(|c| c[0]).collect();
        assert_eq!(grey, vec![170, 255, 0, 85]);
        let (_, _, px) = decode(&heatmap_png(&field(g, vec![0.0, 1.0, 2.0, 3.0]), Palette::Levels, 0.0, 1.0).unwrap());
        let bands: Vec<u8> = px.chunks(3).map(|c| c[0]).collect();
        assert_eq!(bands, vec![182, 255, 0, 73]);
    }

    #[test]
    fn eigenvalues_show_as_dark_spots() {
        let s = sample_eigenvalues(100, SeedStream::new(6, 0), Backend::DppKernel).unwrap();
        let side = 241;
        let g = Grid::square(1.2, side).unwrap();
        let fs_ = evaluate_field(&s, &g).unwrap();
        let (w, h, px) = decode(&heatmap_png(&fs_, Palette::Grayscale, 0.01, 0.99).unwrap());
        assert_eq!((w, h), (side, side));
        for lam in &s.points {
            let i = ((lam.re - g.x0) / g.dx).round() as i64;
            let j = ((lam.im - g.y0) / g.dy).round() as i64;
            // the darkest pixel of the surrounding 7x7 patch sits next to λ
            let mut darkest = (u8::MAX, 9i64, 9i64);
            for dj in -3..=3 {
                for di in -3..=3 {
                    let (ii, jj) = (i + di, j + dj);
                    if ii < 0 || jj < 0 || ii >= side as i64 || jj >= side as i64 {
                        continue;
                    }
                    let row = side - 1 - jj as usize;
                    let v = px[3 * (row * side + ii as usize)];
                    // ties (clipped pixels) go to the one nearest the centre
                    if (v, di * di + dj * dj) < (darkest.0, darkest.1 * darkest.1 + darkest.2 * darkest.2) {
                        darkest = (v, di, dj);
                    }
                }
            }
            assert!(darkest.1.abs() <= 1 && darkest.2.abs() <= 1, "minimum {darkest:?} away from {lam}");
        }
    }
}
