//! Property tests against independent brute-force implementations.

mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;

use seedkin::imagecore::{convex_hull, label_blobs, label_blobs_with, otsu_threshold, Connectivity, Point, RgbImage};
use seedkin::kinetics::{leaf_area, validate_counts};
use seedkin::radiometry::{normalize_colors, sample_gray};
use support::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn otsu_matches_exhaustive_scan(values in otsu_values()) {
        check_otsu(&values)?;
    }

    #[test]
    fn otsu_splits_bimodal_samples(
        a in prop::collection::vec(0.0f32..40.0, 20..200),
        b in prop::collection::vec(200.0f32..255.0, 20..200),
    ) {
        let mut v = a.clone();
        v.extend(&b);
        let t = otsu_threshold(&v).unwrap();
        prop_assert!(a.iter().all(|&x| x as f64 <= t));
        prop_assert!(b.iter().all(|&x| x as f64 > t));
    }

    #[test]
    fn otsu_ignores_order_and_stays_in_range(values in prop::collection::vec(-50.0f32..300.0, 1..200)) {
        let t = otsu_threshold(&values).unwrap();
        let mut rev = values.clone();
        rev.reverse();
        prop_assert_eq!(t, otsu_threshold(&rev).unwrap());
        let lo = values.iter().cloned().fold(f32::INFINITY, f32::min) as f64;
        let hi = values.iter().cloned().fold(f32::NEG_INFINITY, f32::max) as f64;
        prop_assert!(t >= lo && t <= hi);
        // the lower class is never empty, and never everything unless constant
        let below = values.iter().filter(|&&v| v as f64 <= t).count();
        prop_assert!(below >= 1);
        prop_assert!(below < values.len() || lo == hi);
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn labeling_matches_union_find(mask in mask_strategy(), min in 1usize..6) {
        check_labeling(&mask, min, Connectivity::Eight)?;
        check_labeling(&mask, min, Connectivity::Four)?;
    }

    #[test]
    fn eight_connectivity_never_splits_four(mask in mask_strategy()) {
        prop_assert!(label_blobs(&mask, 1).len() <= label_blobs_with(&mask, 1, Connectivity::Four).len());
    }

    #[test]
    fn clustering_matches_all_pairs_linkage(
        mask in mask_strategy(),
        link in 0.5f64..8.0,
        k_conv in 0.05f64..1.5,
    ) {
        check_clustering(&mask, link, k_conv)?;
    }

    #[test]
    fn overlap_test_matches_clipped_area(a in hull_strategy(), b in hull_strategy()) {
        check_overlap(&a, &b)?;
    }

    #[test]
    fn hull_covers_its_pixels(pts in prop::collection::vec((0u32..40, 0u32..40), 1..30)) {
        let hull = convex_hull(&pts).unwrap();
        prop_assert!(hull.is_convex());
        for &(x, y) in &pts {
            for (cx, cy) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, 0.5)] {
                prop_assert!(hull.covers(Point::new(x as f64 + cx, y as f64 + cy)));
            }
        }
        let distinct: BTreeSet<_> = pts.iter().collect();
        prop_assert!(hull.area() >= distinct.len() as f64 - 1e-9);
    }

    #[test]
    fn backward_pass_equals_forward_scan(timeline in timeline_strategy()) {
        check_emergence(&timeline)?;
    }

    #[test]
    fn validation_statistics(
        manual in prop::collection::vec(0u32..50, 2..20),
        noise in prop::collection::vec(-3i32..=3, 20),
    ) {
        let m: Vec<f64> = manual.iter().map(|&v| v as f64).collect();
        let perfect = validate_counts(&m, &m).unwrap();
        prop_assert_eq!(perfect.rmse, 0.0);
        let a: Vec<f64> = m.iter().zip(&noise).map(|(v, d)| v + *d as f64).collect();
        let v = validate_counts(&a, &m).unwrap();
        let mse = a.iter().zip(&m).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / m.len() as f64;
        prop_assert!((v.rmse - mse.sqrt()).abs() < 1e-12);
        prop_assert!(v.rmse <= 3.0);
        if let Some(r2) = v.r2 {
            prop_assert!(r2 <= 1.0);
            prop_assert_eq!(perfect.r2, Some(1.0));
        } else {
            prop_assert!(m.iter().all(|&x| x == m[0]));
        }
    }

    #[test]
    fn leaf_area_is_linear_in_pixels(mask in mask_strategy(), k in 0.01f64..2.0) {
        prop_assert_eq!(leaf_area(&mask, k), k * mask.count() as f64);
    }
}

// ---------------------------------------------------------- radiometry

proptest! {
    #![proptest_config(config())]

    #[test]
    fn normalization_recovers_the_reference(
        lambda in prop::array::uniform3(0.7f64..1.3),
        soil in prop::array::uniform3(20.0f32..200.0),
        gray in 100.0f64..200.0,
    ) {
        let frame = RgbImage::from_fn(40, 40, |x, y| {
            let inside = (10..30).contains(&x) && (10..30).contains(&y);
            let base = if inside { [155.0f32; 3] } else { soil };
            std::array::from_fn(|c| base[c] * lambda[c] as f32)
        })
        .unwrap();
        let s = sample_gray(&frame, Point::new(20.0, 20.0)).unwrap();
        let n = normalize_colors(&frame, &s, gray).unwrap();
        let g = sample_gray(&n, Point::new(20.0, 20.0)).unwrap();
        for c in 0..3 {
            prop_assert!((g.mean_rgb[c] - gray).abs() < 1e-3);
            // outside the patch the illumination cancels too, up to clamping
            let want = (soil[c] as f64 * gray / 155.0).min(255.0);
            prop_assert!((n.get(0, 0)[c] as f64 - want).abs() < 1e-2);
        }
    }
}
