//! Single-linkage grouping of blobs: fragments of one seedling join into a
//! cluster when their nearest pixels are closer than the link distance.

use seedkin::clustering::{cluster_blobs, polygonize};
use seedkin::imagecore::{label_blobs, BinaryMask};

fn main() -> seedkin::Result<()> {
    // two leaves of one plant, 3 px apart, and a second plant 20 px away
    let mask = BinaryMask::from_fn(60, 30, |x, y| {
        let leaf_a = (5..12).contains(&x) && (10..16).contains(&y);
        let leaf_b = (15..22).contains(&x) && (10..16).contains(&y);
        let other = (42..50).contains(&x) && (8..20).contains(&y);
        leaf_a || leaf_b || other
    });
    let blobs = label_blobs(&mask, 1);
    println!("{} blobs", blobs.len());

    let k_conv = 0.2; // mm^2 per px, so one pixel is ~0.45 mm wide
    for link_mm in [1.0, 2.0, 10.0] {
        let clusters = cluster_blobs(&blobs, link_mm, k_conv)?;
        println!("link {link_mm:>4} mm -> {} clusters", clusters.len());
        for c in &clusters {
            let p = polygonize(c, "cam1", 1, 0.0)?;
            println!("    {} px  {}", p.area_px, p.polygon.to_wkt());
        }
    }
    Ok(())
}
