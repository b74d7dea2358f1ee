//! Planar polygons in pixel coordinates.
//!
//! Pixel `(i, j)` covers the unit square `[i, i + 1] x [j, j + 1]`, so its
//! center sits at `(i + 0.5, j + 0.5)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::new(p[0], p[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[inline]
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Axis-aligned bounding box `[min_x, max_x] x [min_y, max_y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    /// Interiors intersect.
    pub fn overlaps_open(&self, other: &BBox) -> bool {
        self.min_x < other.max_x && other.min_x < self.max_x && self.min_y < other.max_y && other.min_y < self.max_y
    }
}

/// Simple polygon with positive area. Vertices are stored counter-clockwise
/// (in a y-up frame; clockwise on screen).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<[f64; 2]>> for Polygon {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Polygon::new(v.into_iter().map(Point::from).collect())
    }
}

impl From<Polygon> for Vec<[f64; 2]> {
    fn from(p: Polygon) -> Self {
        p.vertices.into_iter().map(Into::into).collect()
    }
}

impl Polygon {
    /// Validates vertex count, finiteness, positive area and simplicity.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidGeometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite vertex".into()));
        }
        let area = signed_area(&vertices);
        if area.abs() <= EPS {
            return Err(Error::InvalidGeometry("polygon has zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidGeometry("polygon self-intersects".into()));
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Polygon::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = p.x * q.y - q.x * p.y;
            a2 += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        };
        for p in &self.vertices {
            b.min_x = b.min_x.min(p.x);
            b.min_y = b.min_y.min(p.y);
            b.max_x = b.max_x.max(p.x);
            b.max_y = b.max_y.max(p.y);
        }
        b
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], self.vertices[(i + 2) % n]) >= -EPS)
    }

    /// Even-odd point test. Points exactly on an edge may land on either side.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[j];
            if (a.y > p.y) != (b.y > p.y) {
                let xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < xi {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Closed point test with a small tolerance: interior or boundary.
    pub fn covers(&self, p: Point) -> bool {
        if self.contains(p) {
            return true;
        }
        let n = self.vertices.len();
        (0..n).any(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            point_segment_distance(p, a, b) <= 1e-7
        })
    }

    /// Well-known-text form, `POLYGON((x y, ..., x y))` with a closed ring.
    pub fn to_wkt(&self) -> String {
        let mut ring: Vec<String> = self
            .vertices
            .iter()
            .map(|p| format!("{} {}", fmt_coord(p.x), fmt_coord(p.y)))
            .collect();
        ring.push(ring[0].clone());
        format!("POLYGON(({}))", ring.join(", "))
    }

    /// Split into triangles by ear clipping. Convex polygons fan out directly.
    fn triangles(&self) -> Vec<[Point; 3]> {
        let v = &self.vertices;
        if self.is_convex() {
            return (1..v.len() - 1).map(|i| [v[0], v[i], v[i + 1]]).collect();
        }
        let mut idx: Vec<usize> = (0..v.len()).collect();
        let mut out = Vec::with_capacity(v.len() - 2);
        while idx.len() > 3 {
            let n = idx.len();
            let ear = (0..n).find(|&k| {
                let (a, b, c) = (v[idx[(k + n - 1) % n]], v[idx[k]], v[idx[(k + 1) % n]]);
                if cross(a, b, c) <= EPS {
                    return false;
                }
                idx.iter().all(|&m| {
                    let p = v[m];
                    p == a
                        || p == b
                        || p == c
                        || !(cross(a, b, p) > -EPS && cross(b, c, p) > -EPS && cross(c, a, p) > -EPS)
                })
            });
            // A simple polygon always has an ear; fall back to the first
            // vertex if rounding hides it.
            let k = ear.unwrap_or(0);
            out.push([v[idx[(k + n - 1) % n]], v[idx[k]], v[idx[(k + 1) % n]]]);
            idx.remove(k);
        }
        out.push([v[idx[0]], v[idx[1]], v[idx[2]]]);
        out
    }
}

fn fmt_coord(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = v[i];
        let q = v[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    a / 2.0
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.x + t * dx, a.y + t * dy);
    ((p.x - qx).powi(2) + (p.y - qy).powi(2)).sqrt()
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > EPS && d2 < -EPS) || (d1 < -EPS && d2 > EPS)) && ((d3 > EPS && d4 < -EPS) || (d3 < -EPS && d4 > EPS)) {
        return true;
    }
    (d1.abs() <= EPS && point_segment_distance(a, c, d) <= EPS)
        || (d2.abs() <= EPS && point_segment_distance(b, c, d) <= EPS)
        || (d3.abs() <= EPS && point_segment_distance(c, a, b) <= EPS)
        || (d4.abs() <= EPS && point_segment_distance(d, a, b) <= EPS)
}

fn is_simple(v: &[Point]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (v[j], v[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Convex hull of the unit squares of the given pixels.
///
/// Each pixel contributes its four corners, so a single pixel or a straight
/// line of pixels still yields a polygon with area of at least one.
pub fn convex_hull(pixels: &[(u32, u32)]) -> Result<Polygon> {
    if pixels.is_empty() {
        return Err(Error::InvalidInput("convex hull of an empty pixel set".into()));
    }
    // Corners are integer points; keep the monotone chain exact in i64.
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(pixels.len() * 4);
    for &(x, y) in pixels {
        let (x, y) = (x as i64, y as i64);
        pts.extend([(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]);
    }
    pts.sort_unstable();
    pts.dedup();

    fn turn(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    }

    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    Polygon::new(hull.into_iter().map(|(x, y)| Point::new(x as f64, y as f64)).collect())
}

/// True iff the two polygons share a region of strictly positive area.
/// Touching along an edge or at a vertex is not overlap.
pub fn polygons_intersect(a: &Polygon, b: &Polygon) -> bool {
    if !a.bbox().overlaps_open(&b.bbox()) {
        return false;
    }
    if a.is_convex() && b.is_convex() {
        return convex_overlap(&a.vertices, &b.vertices);
    }
    let ta = a.triangles();
    let tb = b.triangles();
    ta.iter().any(|s| tb.iter().any(|t| convex_overlap(s, t)))
}

/// Separating-axis test on two convex counter-clockwise vertex rings. An axis
/// whose projections merely touch counts as separating.
fn convex_overlap(a: &[Point], b: &[Point]) -> bool {
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            let (nx, ny) = (q.y - p.y, p.x - q.x);
            let len = (nx * nx + ny * ny).sqrt();
            if len == 0.0 {
                continue;
            }
            let (nx, ny) = (nx / len, ny / len);
            let (amin, amax) = project(a, nx, ny);
            let (bmin, bmax) = project(b, nx, ny);
            if amax <= bmin + EPS || bmax <= amin + EPS {
                return false;
            }
        }
    }
    true
}

fn project(poly: &[Point], nx: f64, ny: f64) -> (f64, f64) {
    poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.x * nx + p.y * ny;
        (lo.min(d), hi.max(d))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_at(x: f64, y: f64) -> Polygon {
        Polygon::rect(x, y, x + 1.0, y + 1.0).unwrap()
    }

    #[test]
    fn polygon_validation() {
        assert!(Polygon::new(vec![Point::new(0., 0.), Point::new(1., 0.)]).is_err());
        assert!(Polygon::new(vec![Point::new(0., 0.), Point::new(1., 1.), Point::new(2., 2.)]).is_err());
        // bow tie
        assert!(Polygon::new(vec![
            Point::new(0., 0.),
            Point::new(2., 2.),
            Point::new(2., 0.),
            Point::new(0., 2.)
        ])
        .is_err());
        let cw = Polygon::new(vec![
            Point::new(0., 0.),
            Point::new(0., 2.),
            Point::new(2., 2.),
            Point::new(2., 0.),
        ])
        .unwrap();
        assert_eq!(cw.area(), 4.0);
    }

    #[test]
    fn hull_of_single_pixel_is_unit_square() {
        let h = convex_hull(&[(3, 4)]).unwrap();
        assert_eq!(h.area(), 1.0);
        assert_eq!(h.vertices().len(), 4);
        assert!(h.covers(Point::new(3.0, 4.0)) && h.covers(Point::new(4.0, 5.0)));
    }

    #[test]
    fn hull_of_collinear_pixels_is_rectangle() {
        let h = convex_hull(&[(0, 0), (1, 0), (2, 0)]).unwrap();
        assert_eq!(h.area(), 3.0);
        assert_eq!(h.vertices().len(), 4);
    }

    #[test]
    fn hull_of_empty_set_fails() {
        assert!(matches!(convex_hull(&[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn overlap_cases() {
        let a = unit_square_at(0.0, 0.0);
        assert!(!polygons_intersect(&a, &unit_square_at(5.0, 5.0)));
        assert!(polygons_intersect(&a, &unit_square_at(0.5, 0.5)));
        assert!(!polygons_intersect(&a, &unit_square_at(1.0, 0.0)));
        assert!(!polygons_intersect(&a, &unit_square_at(1.0, 1.0)));
        assert!(polygons_intersect(&a, &a.clone()));
    }

    #[test]
    fn containment_counts_as_overlap() {
        let big = Polygon::rect(0., 0., 10., 10.).unwrap();
        let small = Polygon::rect(4., 4., 5., 5.).unwrap();
        assert!(polygons_intersect(&big, &small));
        assert!(polygons_intersect(&small, &big));
    }

    #[test]
    fn concave_polygons_use_triangulation() {
        // L shape; the square sits in the notch without touching the interior
        let l = Polygon::new(vec![
            Point::new(0., 0.),
            Point::new(4., 0.),
            Point::new(4., 1.),
            Point::new(1., 1.),
            Point::new(1., 4.),
            Point::new(0., 4.),
        ])
        .unwrap();
        assert!(!l.is_convex());
        assert!(!polygons_intersect(&l, &Polygon::rect(1., 1., 3., 3.).unwrap()));
        assert!(polygons_intersect(&l, &Polygon::rect(0.5, 0.5, 3., 3.).unwrap()));
        let tri_area: f64 = l.triangles().iter().map(|t| signed_area(t)).sum();
        assert!((tri_area - l.area()).abs() < 1e-9);
    }

    #[test]
    fn wkt_closes_ring() {
        let w = unit_square_at(0.0, 0.0).to_wkt();
        assert_eq!(w, "POLYGON((0 0, 1 0, 1 1, 0 1, 0 0))");
    }

    #[test]
    fn serde_round_trip_validates() {
        let p = unit_square_at(2.0, 3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Polygon>(&s).unwrap(), p);
        assert!(serde_json::from_str::<Polygon>("[[0,0],[1,0]]").is_err());
    }
}
