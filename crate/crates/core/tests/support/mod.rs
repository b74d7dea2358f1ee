//! Brute-force oracles and property checks shared by the property suite
//! and the acceptance run.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use seedkin::clustering::{cluster_blobs, polygonize, ClusterPolygon};
use seedkin::imagecore::{
    convex_hull, label_blobs, label_blobs_with, otsu_threshold, polygons_intersect, BinaryMask, Connectivity, Point,
    Polygon,
};
use seedkin::kinetics::{emergence_events, germination_curve, Epoch};

pub type Check = Result<(), TestCaseError>;

/// Scans every split of a 256-bin histogram over `[min, max]` and keeps the
/// first one with the largest `(s0*n - total*n0)^2 / (n0*n1)`, comparing the
/// fractions by cross-multiplication.
pub fn otsu_brute(values: &[f32]) -> f64 {
    let lo = values.iter().map(|&v| v as f64).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|&v| v as f64).fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return lo;
    }
    let width = (hi - lo) / 256.0;
    let bin = |v: f64| (((v - lo) / width).floor() as usize).min(255);
    let n = values.len() as i128;
    let mut best: Option<(usize, u128, u128)> = None;
    for k in 0..255 {
        let (mut n0, mut s0, mut total) = (0i128, 0i128, 0i128);
        for &v in values {
            let b = bin(v as f64) as i128;
            total += b;
            if b as usize <= k {
                n0 += 1;
                s0 += b;
            }
        }
        if n0 == 0 || n0 == n {
            continue;
        }
        let d = (s0 * n - total * n0).unsigned_abs();
        let (num, den) = (d * d, (n0 * (n - n0)) as u128);
        let better = match best {
            None => true,
            Some((_, bn, bd)) => num * bd > bn * den,
        };
        if better {
            best = Some((k, num, den));
        }
    }
    lo + (best.unwrap().0 as f64 + 1.0) * width
}

pub fn otsu_values() -> impl Strategy<Value = Vec<f32>> {
    prop::collection::vec(0u16..1000, 1..300).prop_map(|v| v.into_iter().map(|x| x as f32 / 4.0).collect())
}

pub fn check_otsu(values: &[f32]) -> Check {
    prop_assert_eq!(otsu_threshold(values).unwrap(), otsu_brute(values));
    Ok(())
}

pub struct UnionFind(Vec<usize>);

impl UnionFind {
    pub fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    pub fn join(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

pub fn components_brute(mask: &BinaryMask, min: usize, eight: bool) -> BTreeSet<BTreeSet<(u32, u32)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut uf = UnionFind((0..w * h).collect());
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let mut nb = vec![(x + 1, y), (x, y + 1)];
            if eight {
                nb.push((x + 1, y + 1));
                if x > 0 {
                    nb.push((x - 1, y + 1));
                }
            }
            for (u, v) in nb {
                if u < w && v < h && mask.get(u, v) {
                    uf.join(y * w + x, v * w + u);
                }
            }
        }
    }
    let mut groups: HashMap<usize, BTreeSet<(u32, u32)>> = HashMap::new();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                groups
                    .entry(uf.find(y * w + x))
                    .or_default()
                    .insert((x as u32, y as u32));
            }
        }
    }
    groups.into_values().filter(|g| g.len() >= min.max(1)).collect()
}

pub fn mask_strategy() -> impl Strategy<Value = BinaryMask> {
    (1usize..24, 1usize..24, 0.2f64..0.7).prop_flat_map(|(w, h, p)| {
        prop::collection::vec(prop::bool::weighted(p), w * h)
            .prop_map(move |bits| BinaryMask::from_fn(w, h, |x, y| bits[y * w + x]))
    })
}

pub fn check_labeling(mask: &BinaryMask, min: usize, connectivity: Connectivity) -> Check {
    let set = label_blobs_with(mask, min, connectivity);
    let got: BTreeSet<BTreeSet<(u32, u32)>> = set.blobs().iter().map(|b| b.pixels.iter().copied().collect()).collect();
    prop_assert_eq!(&got, &components_brute(mask, min, connectivity == Connectivity::Eight));
    for (i, b) in set.blobs().iter().enumerate() {
        prop_assert_eq!(b.id, i);
        for &(x, y) in &b.pixels {
            prop_assert_eq!(set.label_at(x as usize, y as usize), Some(i));
        }
    }
    let labeled: usize = set.blobs().iter().map(|b| b.area_px()).sum();
    let total_labels = (0..mask.height())
        .flat_map(|y| (0..mask.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| set.label_at(x, y).is_some())
        .count();
    prop_assert_eq!(labeled, total_labels);
    Ok(())
}

/// Blob partition from every pixel pair of every blob pair, closed
/// transitively.
pub fn linkage_brute(blobs: &seedkin::imagecore::BlobSet, link: f64, k_conv: f64) -> BTreeSet<BTreeSet<usize>> {
    let blobs = blobs.blobs();
    let step = k_conv.sqrt();
    let n = blobs.len();
    let mut uf = UnionFind((0..n).collect());
    for i in 0..n {
        for j in i + 1..n {
            let near = blobs[i].pixels.iter().any(|&(x, y)| {
                blobs[j].pixels.iter().any(|&(u, v)| {
                    let d = ((x as f64 - u as f64).powi(2) + (y as f64 - v as f64).powi(2)).sqrt();
                    d * step < link
                })
            });
            if near {
                uf.join(i, j);
            }
        }
    }
    let mut groups: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().insert(i);
    }
    groups.into_values().collect()
}

pub fn check_clustering(mask: &BinaryMask, link: f64, k_conv: f64) -> Check {
    let set = label_blobs(mask, 1);
    let clusters = cluster_blobs(&set, link, k_conv).unwrap();
    let got: BTreeSet<BTreeSet<usize>> = clusters.iter().map(|c| c.blob_ids.iter().copied().collect()).collect();
    prop_assert_eq!(got, linkage_brute(&set, link, k_conv));

    // every pixel lands in exactly one cluster
    let pixels: usize = clusters.iter().map(|c| c.pixels.len()).sum();
    prop_assert_eq!(pixels, mask.count());
    for c in &clusters {
        let p = polygonize(c, "c", 1, 0.0).unwrap();
        prop_assert!(p.polygon.area() >= c.pixels.len() as f64 - 1e-9);
        prop_assert_eq!(p.area_px, c.pixels.len());
    }
    Ok(())
}

/// Area of the intersection of two convex polygons by Sutherland-Hodgman
/// clipping.
pub fn intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    let mut out: Vec<Point> = a.vertices().to_vec();
    let clip = b.vertices();
    let orient = {
        let s: f64 = (0..clip.len())
            .map(|i| {
                let (p, q) = (clip[i], clip[(i + 1) % clip.len()]);
                p.x * q.y - q.x * p.y
            })
            .sum();
        s.signum()
    };
    for i in 0..clip.len() {
        let (p, q) = (clip[i], clip[(i + 1) % clip.len()]);
        let side = |r: Point| orient * ((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x));
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (cur, prev) = (input[j], input[(j + input.len() - 1) % input.len()]);
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    let t = sp / (sp - sc);
                    out.push(Point::new(prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)));
                }
                out.push(cur);
            } else if sp >= 0.0 {
                let t = sp / (sp - sc);
                out.push(Point::new(prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)));
            }
        }
        if out.is_empty() {
            return 0.0;
        }
    }
    let s: f64 = (0..out.len())
        .map(|i| {
            let (p, q) = (out[i], out[(i + 1) % out.len()]);
            p.x * q.y - q.x * p.y
        })
        .sum();
    s.abs() / 2.0
}

pub fn hull_strategy() -> impl Strategy<Value = Polygon> {
    (0u32..30, 0u32..30, prop::collection::vec((0u32..8, 0u32..8), 1..8)).prop_map(|(ox, oy, pts)| {
        let px: Vec<(u32, u32)> = pts.iter().map(|&(x, y)| (ox + x, oy + y)).collect();
        convex_hull(&px).unwrap()
    })
}

pub fn check_overlap(a: &Polygon, b: &Polygon) -> Check {
    let area = intersection_area(a, b);
    let hit = polygons_intersect(a, b);
    prop_assert_eq!(hit, polygons_intersect(b, a));
    // hull vertices sit on the integer lattice, so a real overlap has area
    // far above rounding noise
    prop_assert_eq!(hit, area > 1e-9, "area {}", area);
    Ok(())
}

fn cp(t: f64, poly: Polygon) -> ClusterPolygon {
    ClusterPolygon {
        camera: "c".into(),
        replicate: 1,
        t,
        area_px: 1,
        polygon: poly,
    }
}

pub fn timeline_strategy() -> impl Strategy<Value = Vec<Epoch>> {
    prop::collection::vec(prop::collection::vec(hull_strategy(), 0..5), 1..7).prop_map(|epochs| {
        epochs
            .into_iter()
            .enumerate()
            .map(|(i, polys)| {
                let t = 24.0 + 3.0 * i as f64;
                Epoch {
                    t,
                    polygons: polys.into_iter().map(|p| cp(t, p)).collect(),
                }
            })
            .collect()
    })
}

/// Declarative definition: a polygon is an emergence iff no polygon of any
/// earlier epoch shares positive area with it.
pub fn forward_events(timeline: &[Epoch]) -> Vec<(f64, Polygon)> {
    let mut out = Vec::new();
    for (t, epoch) in timeline.iter().enumerate() {
        for p in &epoch.polygons {
            let seen = timeline[..t]
                .iter()
                .flat_map(|e| &e.polygons)
                .any(|q| intersection_area(&p.polygon, &q.polygon) > 1e-9);
            if !seen {
                out.push((epoch.t, p.polygon.clone()));
            }
        }
    }
    out
}

pub fn check_emergence(timeline: &[Epoch]) -> Check {
    let events = emergence_events(timeline).unwrap();
    let got: Vec<(f64, Polygon)> = events
        .iter()
        .map(|e| (e.emergence_time, e.polygon.polygon.clone()))
        .collect();
    prop_assert_eq!(got, forward_events(timeline));

    let times: Vec<f64> = timeline.iter().map(|e| e.t).collect();
    let curve = germination_curve("c", 1, &events, &times);
    prop_assert!(curve.counts.windows(2).all(|w| w[0] <= w[1]));
    prop_assert_eq!(curve.final_count() as usize, events.len());
    // everything present at the first epoch is new there
    prop_assert_eq!(curve.counts[0] as usize, timeline[0].polygons.len());
    Ok(())
}
