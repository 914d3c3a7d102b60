//! Property tests backed by independent oracles: naive direct-summation
//! filtering, analytic perimeters, and brute-force topology counting.

use proptest::prelude::*;
use relief_core::heightmap::HeightField;
use relief_core::luminance::{load_pnm, rgb_to_luminance, write_pnm_p2, GrayImage, RgbImage};
use relief_core::matrix::Matrix;
use relief_core::mesh::{heightfield_to_mesh, validate};
use relief_core::slicer::{slice_at, stitch_loops};
use relief_core::stl::{read_stl, write_stl_ascii, write_stl_binary};
use relief_core::wavelet::{d4_highpass, d4_lowpass, haar_block_average};

/// Direct-summation filter oracle, independent of the library's
/// convolution path.
fn naive_filter(signal: &[f64], coeffs: &[f64], offset: i64) -> Vec<f64> {
    let n = signal.len() as i64;
    let mut out = Vec::new();
    for k in 0..n / 2 {
        let mut acc = 0.0;
        for (i, &c) in coeffs.iter().enumerate() {
            let mut idx = 2 * k + offset + i as i64;
            while idx < 0 {
                idx += n;
            }
            acc += c * signal[(idx % n) as usize];
        }
        out.push(acc);
    }
    out
}

fn d4_coeffs() -> (Vec<f64>, Vec<f64>) {
    let s3 = 3.0_f64.sqrt();
    let d = 4.0 * 2.0_f64.sqrt();
    (
        vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d],
        vec![(1.0 - s3) / d, -(3.0 - s3) / d, (3.0 + s3) / d, -(1.0 + s3) / d],
    )
}

fn even_signal() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=8).prop_flat_map(|half| {
        prop::collection::vec(-100.0..100.0f64, 2 * half)
    })
}

fn rgb_image() -> impl Strategy<Value = RgbImage> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(w, h)| {
        prop::collection::vec(0u16..=255, 3 * w * h).prop_map(move |pixels| RgbImage {
            width: w,
            height: h,
            pixels,
            maxval: 255,
        })
    })
}

fn height_matrix() -> impl Strategy<Value = Matrix> {
    (2usize..=10, 2usize..=10).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(0.01..10.0f64, rows * cols)
            .prop_map(move |v| Matrix::from_vec(rows, cols, v))
    })
}

fn encode_p3(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P3\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    for px in &img.pixels {
        out.extend_from_slice(format!("{px} ").as_bytes());
    }
    out
}

fn encode_p6(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    for &px in &img.pixels {
        out.push(px as u8);
    }
    out
}

proptest! {
    #[test]
    fn d4_matches_naive_oracle(signal in even_signal()) {
        let (h, g) = d4_coeffs();
        let low = d4_lowpass(&signal).unwrap();
        let high = d4_highpass(&signal).unwrap();
        let low_oracle = naive_filter(&signal, &h, 0);
        let high_oracle = naive_filter(&signal, &g, -2);
        for (a, b) in low.iter().zip(&low_oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in high.iter().zip(&high_oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_preserves_mean_and_halves_dims(
        (rows, cols) in (1usize..=8, 1usize..=8),
        seed in any::<u64>(),
    ) {
        let (rows, cols) = (2 * rows, 2 * cols);
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let m = Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| next()).collect());
        let out = haar_block_average(&m).unwrap();
        prop_assert_eq!(out.rows(), rows / 2);
        prop_assert_eq!(out.cols(), cols / 2);
        prop_assert!((out.mean() - m.mean()).abs() < 1e-12);
    }

    #[test]
    fn luminance_is_monotone_in_each_channel(img in rgb_image(), bump in 1u16..=50) {
        let base = rgb_to_luminance(&img);
        for channel in 0..3 {
            let mut raised = img.clone();
            for px in raised.pixels.chunks_exact_mut(3) {
                px[channel] = (px[channel] + bump).min(img.maxval);
            }
            let lifted = rgb_to_luminance(&raised);
            for (a, b) in base.values.iter().zip(&lifted.values) {
                prop_assert!(b >= a);
            }
        }
    }

    #[test]
    fn p3_and_p6_decode_identically(img in rgb_image()) {
        let from_ascii = load_pnm(&encode_p3(&img)).unwrap().into_gray();
        let from_binary = load_pnm(&encode_p6(&img)).unwrap().into_gray();
        prop_assert_eq!(from_ascii.values, from_binary.values);
    }

    #[test]
    fn p2_round_trip_quantization(values in prop::collection::vec(0.0..=1.0f64, 1..32)) {
        let img = GrayImage { width: values.len(), height: 1, values };
        let back = load_pnm(&write_pnm_p2(&img, 255)).unwrap().into_gray();
        for (a, b) in img.values.iter().zip(&back.values) {
            prop_assert!((a - b).abs() <= 1.0 / 255.0);
        }
    }

    #[test]
    fn generated_meshes_are_watertight(m in height_matrix()) {
        let (rows, cols) = (m.rows(), m.cols());
        let hf = HeightField::from_heights(m, 0.5).unwrap();
        let mesh = heightfield_to_mesh(&hf).unwrap();
        let expected = 4 * (cols - 1) * (rows - 1) + 4 * (cols - 1) + 4 * (rows - 1);
        prop_assert_eq!(mesh.facet_count(), expected);
        let report = validate(&mesh);
        prop_assert!(report.is_watertight(), "{:?}", report);
    }

    #[test]
    fn stl_writers_describe_the_same_geometry(m in height_matrix()) {
        let hf = HeightField::from_heights(m, 0.25).unwrap();
        let mesh = heightfield_to_mesh(&hf).unwrap();
        let binary = write_stl_binary(&mesh, "prop");
        prop_assert_eq!(binary.len(), 84 + 50 * mesh.facet_count());
        let from_binary = read_stl(&binary).unwrap();
        let from_ascii = read_stl(&write_stl_ascii(&mesh, "prop")).unwrap();
        prop_assert_eq!(from_binary.facets.len(), from_ascii.facets.len());
        for f in 0..from_binary.facets.len() {
            let a = from_binary.facet_vertices(f);
            let b = from_ascii.facet_vertices(f);
            for (pa, pb) in a.iter().zip(&b) {
                for k in 0..3 {
                    prop_assert_eq!(pa[k] as f32, pb[k] as f32);
                }
            }
        }
    }

    #[test]
    fn every_slice_of_a_watertight_mesh_stitches(m in height_matrix(), frac in 0.05..0.95f64) {
        let hf = HeightField::from_heights(m, 0.5).unwrap();
        let mesh = heightfield_to_mesh(&hf).unwrap();
        let z = frac * mesh.max_z();
        let segments = slice_at(&mesh, z);
        let layer = stitch_loops(&segments, z, 1e-6);
        prop_assert!(layer.is_ok(), "open chain at z = {}", z);
    }
}

#[test]
fn box_perimeter_matches_analytic_footprint() {
    // 3x5 grid with 2 mm x spacing, 1 mm y: footprint 8 mm x 2 mm.
    let hf = HeightField::from_heights(Matrix::constant(3, 5, 4.0), 0.0).unwrap();
    let hf = relief_core::heightmap::rescale_axes(&hf, 2.0, 1.0).unwrap();
    let mesh = heightfield_to_mesh(&hf).unwrap();
    let layer = stitch_loops(&slice_at(&mesh, 2.0), 2.0, 1e-6).unwrap();
    assert!((layer.total_length() - 2.0 * (8.0 + 2.0)).abs() < 1e-9);
}
