//! Proximity clustering of green blobs and per-cluster polygons.

use serde::{Deserialize, Serialize};

use crate::calibration::ReplicateId;
use crate::error::{Error, Result};
use crate::imagecore::{convex_hull, Blob, BlobSet, Polygon};

pub const DEFAULT_LINK_DIST_MM: f64 = 5.0;

/// A group of blobs joined by single linkage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    /// Member blob ids, ascending.
    pub blob_ids: Vec<usize>,
    pub pixels: Vec<(u32, u32)>,
}

/// Polygon over one cluster in one replicate at one acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPolygon {
    pub camera: String,
    pub replicate: ReplicateId,
    pub t: f64,
    pub polygon: Polygon,
    pub area_px: usize,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so representatives are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Pixels of `blob` with a 4-neighbor outside the blob. Only these can
/// realize the nearest-pixel distance to another blob.
fn boundary(blob: &Blob, set: &BlobSet) -> Vec<(i64, i64)> {
    let (w, h) = (set.width() as i64, set.height() as i64);
    blob.pixels
        .iter()
        .filter(|&&(x, y)| {
            let (x, y) = (x as i64, y as i64);
            [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                nx < 0 || ny < 0 || nx >= w || ny >= h || set.label_at(nx as usize, ny as usize) != Some(blob.id)
            })
        })
        .map(|&(x, y)| (x as i64, y as i64))
        .collect()
}

/// Single-linkage clustering: two blobs are joined iff some pair of their
/// pixels lies closer than `link_dist_mm`, with one pixel spanning
/// `sqrt(k_conv)` mm. Clusters are the transitive closure of that relation,
/// ordered by their smallest blob id.
pub fn cluster_blobs(blobs: &BlobSet, link_dist_mm: f64, k_conv: f64) -> Result<Vec<Cluster>> {
    if !(link_dist_mm > 0.0) {
        return Err(Error::Config(format!(
            "link distance must be positive, got {link_dist_mm}"
        )));
    }
    if !(k_conv > 0.0) {
        return Err(Error::Config(format!("k_conv must be positive, got {k_conv}")));
    }
    let link_px = link_dist_mm / k_conv.sqrt();
    let link2 = link_px * link_px;
    let list = blobs.blobs();
    let borders: Vec<Vec<(i64, i64)>> = list.iter().map(|b| boundary(b, blobs)).collect();
    let mut dsu = Dsu::new(list.len());

    for i in 0..list.len() {
        let (ax0, ay0, ax1, ay1) = list[i].bounds;
        for j in i + 1..list.len() {
            let (bx0, by0, bx1, by1) = list[j].bounds;
            let gap_x = (bx0 as f64 - ax1 as f64).max(ax0 as f64 - bx1 as f64).max(0.0);
            let gap_y = (by0 as f64 - ay1 as f64).max(ay0 as f64 - by1 as f64).max(0.0);
            if gap_x * gap_x + gap_y * gap_y >= link2 {
                continue;
            }
            if dsu.find(i) == dsu.find(j) {
                continue;
            }
            let close = borders[i].iter().any(|&(x, y)| {
                borders[j].iter().any(|&(u, v)| {
                    let (dx, dy) = ((x - u) as f64, (y - v) as f64);
                    dx * dx + dy * dy < link2
                })
            });
            if close {
                dsu.union(i, j);
            }
        }
    }

    let mut root_slot: Vec<Option<usize>> = vec![None; list.len()];
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, blob) in list.iter().enumerate() {
        let r = dsu.find(i);
        let slot = *root_slot[r].get_or_insert_with(|| {
            clusters.push(Cluster {
                blob_ids: Vec::new(),
                pixels: Vec::new(),
            });
            clusters.len() - 1
        });
        clusters[slot].blob_ids.push(blob.id);
        clusters[slot].pixels.extend_from_slice(&blob.pixels);
    }
    Ok(clusters)
}

/// Convex polygon over the unit squares of the cluster's pixels.
pub fn polygonize(cluster: &Cluster, camera: &str, replicate: ReplicateId, t: f64) -> Result<ClusterPolygon> {
    Ok(ClusterPolygon {
        camera: camera.to_string(),
        replicate,
        t,
        polygon: convex_hull(&cluster.pixels)?,
        area_px: cluster.pixels.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::{label_blobs, BinaryMask, Point};

    // k_conv = 1 makes one pixel one millimetre
    fn blobs_of(rects: &[(u32, u32, u32, u32)], w: usize, h: usize) -> BlobSet {
        let m = BinaryMask::from_fn(w, h, |x, y| {
            rects
                .iter()
                .any(|&(x0, y0, x1, y1)| (x0..x1).contains(&(x as u32)) && (y0..y1).contains(&(y as u32)))
        });
        label_blobs(&m, 1)
    }

    #[test]
    fn three_mm_joins_six_splits() {
        // nearest pixel centers 3 apart
        let b = blobs_of(&[(0, 0, 3, 3), (5, 0, 8, 3)], 20, 5);
        assert_eq!(cluster_blobs(&b, 5.0, 1.0).unwrap().len(), 1);
        let b = blobs_of(&[(0, 0, 3, 3), (8, 0, 11, 3)], 20, 5);
        assert_eq!(cluster_blobs(&b, 5.0, 1.0).unwrap().len(), 2);
    }

    #[test]
    fn chain_is_transitive() {
        // A-B 4, B-C 4, A-C 10
        let b = blobs_of(&[(0, 0, 2, 2), (5, 0, 7, 2), (10, 0, 12, 2)], 20, 4);
        let c = cluster_blobs(&b, 5.0, 1.0).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].blob_ids, vec![0, 1, 2]);
    }

    #[test]
    fn distance_scales_with_pixel_size() {
        // nearest centers 21 px apart, 9.26 mm at 0.441 mm/px
        let b = blobs_of(&[(0, 0, 5, 5), (25, 0, 30, 5)], 40, 6);
        assert_eq!(cluster_blobs(&b, 5.0, 0.194481).unwrap().len(), 2);
        assert_eq!(cluster_blobs(&b, 9.5, 0.194481).unwrap().len(), 1);
        assert_eq!(cluster_blobs(&b, 9.0, 0.194481).unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        let b = blobs_of(&[(0, 0, 2, 2)], 4, 4);
        assert!(cluster_blobs(&b, 0.0, 1.0).is_err());
        assert!(cluster_blobs(&b, 5.0, -1.0).is_err());
    }

    #[test]
    fn polygon_of_square_cluster() {
        let b = blobs_of(&[(2, 2, 7, 7)], 10, 10);
        let c = cluster_blobs(&b, 5.0, 1.0).unwrap();
        let p = polygonize(&c[0], "cam1", 3, 24.0).unwrap();
        assert_eq!(p.area_px, 25);
        assert_eq!(p.polygon.area(), 25.0);
        assert_eq!(p.replicate, 3);
    }

    #[test]
    fn one_polygon_spans_two_blobs() {
        let b = blobs_of(&[(0, 0, 3, 3), (5, 0, 8, 3)], 10, 4);
        let c = cluster_blobs(&b, 5.0, 1.0).unwrap();
        let p = polygonize(&c[0], "c", 1, 0.0).unwrap();
        assert_eq!(p.polygon.area(), 24.0);
        assert!(p.polygon.covers(Point::new(4.0, 1.5)));
    }

    #[test]
    fn diagonal_stem_has_area() {
        let m = BinaryMask::from_fn(12, 12, |x, y| x == y);
        let b = label_blobs(&m, 1);
        let c = cluster_blobs(&b, 5.0, 1.0).unwrap();
        let p = polygonize(&c[0], "c", 1, 0.0).unwrap();
        assert!(p.polygon.area() > 12.0);
    }
}
