//! Emergence events from a hand-built polygon timeline.
//!
//! A polygon is a new seedling only if it overlaps no polygon of any earlier
//! acquisition, so a plant that grows, or briefly vanishes and comes back,
//! is counted once.

use seedkin::clustering::ClusterPolygon;
use seedkin::imagecore::Polygon;
use seedkin::kinetics::{emergence_events, germination_curve, Epoch};

fn square(x: f64, y: f64, side: f64, t: f64) -> ClusterPolygon {
    ClusterPolygon {
        camera: "cam1".into(),
        replicate: 1,
        t,
        polygon: Polygon::rect(x, y, x + side, y + side).expect("valid rectangle"),
        area_px: (side * side) as usize,
    }
}

fn main() -> seedkin::Result<()> {
    let timeline = vec![
        Epoch {
            t: 24.0,
            polygons: vec![],
        },
        Epoch {
            t: 30.0,
            polygons: vec![square(10.0, 10.0, 4.0, 30.0)],
        },
        // first plant grew; a second one appears
        Epoch {
            t: 36.0,
            polygons: vec![square(9.0, 9.0, 7.0, 36.0), square(40.0, 10.0, 3.0, 36.0)],
        },
        // second plant missed this time (leaves closed, say)
        Epoch {
            t: 48.0,
            polygons: vec![square(8.0, 8.0, 10.0, 48.0)],
        },
        Epoch {
            t: 54.0,
            polygons: vec![
                square(8.0, 8.0, 11.0, 54.0),
                square(39.0, 9.0, 6.0, 54.0),
                square(25.0, 40.0, 3.0, 54.0),
            ],
        },
    ];

    let events = emergence_events(&timeline)?;
    for e in &events {
        println!("emerged at {:>4} h: {}", e.emergence_time, e.polygon.polygon.to_wkt());
    }
    let times: Vec<f64> = timeline.iter().map(|e| e.t).collect();
    let curve = germination_curve("cam1", 1, &events, &times);
    for (t, n) in curve.times.iter().zip(&curve.counts) {
        println!("{t:>5} h  {n}");
    }
    Ok(())
}
