use num_complex::Complex64 as C;
use proptest::prelude::*;

use ginfield::experiments::{ExperimentConfig, ExperimentName};
use ginfield::field::{equilibrium_potential, heatmap_png, psi_at, FieldMeta, FieldSample, Grid, Palette, Quantity};
use ginfield::gmc::RadialMollifier;
use ginfield::kernel::KernelContext;
use ginfield::linalg::{eigenvalues, ComplexMatrix, EigenOptions};
use ginfield::moments::{joint_even_moment_exact, MomentSpec};
use ginfield::sampler::{read_eig, sample_eigenvalues, sample_matrix, sample_radii_kostlan, write_eig, Backend};
use ginfield::stats::clopper_pearson;
use ginfield::SeedStream;

fn point(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(a, b)| C::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_sum_to_trace(n in 2usize..24, seed in any::<u64>()) {
        let a = sample_matrix(n, SeedStream::new(seed, 0)).unwrap();
        let ev = eigenvalues(&a, EigenOptions::default()).unwrap();
        prop_assert_eq!(ev.len(), n);
        let sum: C = ev.iter().sum();
        prop_assert!((sum - a.trace()).norm() <= 1e-10 * (1.0 + a.frobenius_norm()) * n as f64);
    }

    #[test]
    fn triangular_spectrum_is_the_diagonal(diag in prop::collection::vec(point(2.0), 2..12), fill in point(1.0)) {
        let n = diag.len();
        let a = ComplexMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else if j > i { fill * (i + 2 * j) as f64 } else { C::new(0.0, 0.0) });
        let ev = eigenvalues(&a, EigenOptions::default()).unwrap();
        for d in &diag {
            let nearest = ev.iter().map(|e| (e - d).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-6, "diagonal entry {} missing from {:?}", d, ev);
        }
    }

    #[test]
    fn psi_matches_direct_log_sum(pts in prop::collection::vec(point(1.0), 1..40), z in point(1.5)) {
        let n = pts.len();
        let (v, clamped) = psi_at(&pts, n, z);
        prop_assume!(clamped == 0);
        let direct: f64 = pts.iter().map(|p| (z - p).norm().ln()).sum::<f64>() - n as f64 * equilibrium_potential(z);
        prop_assert!((v - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        let mut rev = pts.clone();
        rev.reverse();
        prop_assert!((psi_at(&rev, n, z).0 - v).abs() <= 1e-9 * (1.0 + v.abs()));
    }

    #[test]
    fn smoothed_log_dominates_log(eps0 in 0.05f64..=0.25, eps in 0.05f64..1.0, r1 in 1e-4f64..0.5, r2 in 1e-4f64..0.5) {
        // potential of a probability measure: never below log r, nondecreasing in r
        let m = RadialMollifier::new(eps0).unwrap();
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(m.psi(eps, lo) >= lo.ln() - 1e-12);
        prop_assert!(m.psi(eps, hi) >= m.psi(eps, lo) - 1e-12);
    }

    #[test]
    fn kernel_is_hermitian(n in 1usize..300, x in point(1.2), z in point(1.2)) {
        let k = KernelContext::ginibre(n).unwrap();
        let a = k.kernel_eval(x, z).unwrap();
        let b = k.kernel_eval(z, x).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
        let d = k.kernel_eval(z, z).unwrap();
        prop_assert!(d.re > 0.0 && d.im.abs() <= 1e-12 * d.re);
    }

    #[test]
    fn moments_ignore_order_and_rotation(n in 1usize..12, pts in prop::collection::vec(point(0.9), 1..4), theta in 0.0f64..6.3) {
        let base = joint_even_moment_exact(&MomentSpec::new(n, pts.clone()).unwrap()).unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        let flipped = joint_even_moment_exact(&MomentSpec::new(n, rev).unwrap()).unwrap();
        let turn = C::from_polar(1.0, theta);
        let rotated = joint_even_moment_exact(&MomentSpec::new(n, pts.iter().map(|p| p * turn).collect()).unwrap()).unwrap();
        prop_assert!((base - flipped).abs() <= 1e-9 * (1.0 + base.abs()));
        prop_assert!((base - rotated).abs() <= 1e-9 * (1.0 + base.abs()));
    }

    #[test]
    fn single_point_single_eigenvalue(z in point(3.0)) {
        let v = joint_even_moment_exact(&MomentSpec::new(1, vec![z]).unwrap()).unwrap();
        prop_assert!((v.exp() - (1.0 + z.norm_sqr())).abs() <= 1e-12 * (1.0 + z.norm_sqr()));
    }

    #[test]
    fn binomial_interval_brackets_frequency(trials in 1u64..5000, frac in 0.0f64..=1.0) {
        let k = (frac * trials as f64).floor() as u64;
        let (lo, hi) = clopper_pearson(k, trials, 0.95);
        let p = k as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }

    #[test]
    fn radii_are_seeded(n in 1usize..400, seed in any::<u64>(), replica in 0u64..1000) {
        let a = sample_radii_kostlan(n, SeedStream::new(seed, replica)).unwrap();
        let b = sample_radii_kostlan(n, SeedStream::new(seed, replica)).unwrap();
        prop_assert_eq!(a.len(), n);
        prop_assert!(a.iter().all(|r| *r > 0.0));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ramp_heatmap_is_monotone(side in 2usize..24, shift in -5.0f64..5.0) {
        let grid = Grid::square(1.0, side).unwrap();
        let values = grid.nodes().iter().map(|z| z.re + shift).collect();
        let meta = FieldMeta { n: 1, seed: SeedStream::new(0, 0), quantity: Quantity::Psi, clamp_count: 0 };
        let png = heatmap_png(&FieldSample { grid, values, meta }, Palette::Grayscale, 0.0, 1.0).unwrap();
        let decoder = png::Decoder::new(png.as_slice());
        let mut reader = decoder.read_info().unwrap();
        let mut buf = vec![0; reader.output_buffer_size()];
        let info = reader.next_frame(&mut buf).unwrap();
        prop_assert_eq!((info.width as usize, info.height as usize), (side, side));
        let row: Vec<u8> = buf[..info.line_size].chunks(3).map(|px| px[0]).collect();
        prop_assert!(row.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(row[0] < row[side - 1]);
    }

    #[test]
    fn config_survives_json(idx in 0usize..12, seed in any::<u64>(), replicas in 2usize..500) {
        let mut c = ExperimentConfig::preset(ExperimentName::ALL[idx]);
        c.seed = seed;
        c.replicas = replicas;
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eig_files_roundtrip(n in 1usize..64, seed in any::<u64>()) {
        let s = sample_eigenvalues(n, SeedStream::new(seed, 3), Backend::HessenbergModel).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.eig");
        write_eig(&path, &s).unwrap();
        prop_assert_eq!(read_eig(&path).unwrap(), s);
    }
}
