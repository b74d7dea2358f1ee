use crate::error::{Error, Result};
use crate::imagecore::geometry::Polygon;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                m.bits[y * width + x] = f(x, y);
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    fn check_dims(&self, other: &BinaryMask) -> Result<()> {
        if !self.same_dims(other) {
            return Err(Error::InvalidInput(format!(
                "mask dimensions differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_dims(other)?;
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect(),
        })
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_dims(other)?;
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        })
    }

    /// True iff no pixel is set in both masks.
    pub fn is_disjoint(&self, other: &BinaryMask) -> Result<bool> {
        self.check_dims(other)?;
        Ok(!self.bits.iter().zip(&other.bits).any(|(a, b)| *a && *b))
    }

    /// True iff every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> Result<bool> {
        self.check_dims(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b))
    }

    pub fn set_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }
}

/// Rasterize a quad: a pixel is set iff its center lies inside the polygon.
///
/// Works row by row: the edges crossing the row's center line are collected
/// and the spans between crossing pairs are filled.
pub fn rasterize_quad(quad: &Polygon, width: usize, height: usize) -> Result<BinaryMask> {
    if quad.vertices().len() != 4 {
        return Err(Error::InvalidGeometry(format!(
            "quad must have 4 vertices, got {}",
            quad.vertices().len()
        )));
    }
    rasterize_polygon(quad, width, height)
}

pub fn rasterize_polygon(poly: &Polygon, width: usize, height: usize) -> Result<BinaryMask> {
    if poly.area() <= 0.0 {
        return Err(Error::InvalidGeometry("polygon has zero area".into()));
    }
    let mut mask = BinaryMask::new(width, height);
    let v = poly.vertices();
    let n = v.len();
    let bb = poly.bbox();
    let y_lo = (bb.min_y - 0.5).floor().max(0.0) as usize;
    let y_hi = ((bb.max_y - 0.5).ceil().max(-1.0) as i64).min(height as i64 - 1);
    let mut xs: Vec<f64> = Vec::with_capacity(n);
    for y in y_lo as i64..=y_hi {
        let py = y as f64 + 0.5;
        xs.clear();
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a.y > py) != (b.y > py) {
                xs.push(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
            }
            j = i;
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        for pair in xs.chunks_exact(2) {
            // centers with x0 < cx < x1, i.e. pixel index i with x0 - 0.5 < i < x1 - 0.5
            let first = ((pair[0] - 0.5).floor() + 1.0).max(0.0);
            let last = ((pair[1] - 0.5).ceil() - 1.0).min(width as f64 - 1.0);
            if last < first {
                continue;
            }
            for x in first as usize..=last as usize {
                mask.set(x, y as usize, true);
            }
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::geometry::Point;

    #[test]
    fn axis_aligned_square() {
        let sq = Polygon::rect(0., 0., 10., 10.).unwrap();
        let m = rasterize_quad(&sq, 20, 20).unwrap();
        assert_eq!(m.count(), 100);
        assert!(m.get(0, 0) && m.get(9, 9) && !m.get(10, 9));
    }

    #[test]
    fn quad_outside_is_empty() {
        let sq = Polygon::rect(30., 30., 40., 40.).unwrap();
        assert_eq!(rasterize_quad(&sq, 20, 20).unwrap().count(), 0);
        let neg = Polygon::rect(-40., -40., -30., -30.).unwrap();
        assert_eq!(rasterize_quad(&neg, 20, 20).unwrap().count(), 0);
    }

    #[test]
    fn triangle_rejected_as_quad() {
        let tri = Polygon::new(vec![Point::new(0., 0.), Point::new(5., 0.), Point::new(0., 5.)]).unwrap();
        assert!(matches!(rasterize_quad(&tri, 10, 10), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn mask_set_ops() {
        let a = BinaryMask::from_fn(4, 4, |x, _| x < 2);
        let b = BinaryMask::from_fn(4, 4, |x, _| x >= 2);
        assert!(a.is_disjoint(&b).unwrap());
        assert_eq!(a.and(&b).unwrap().count(), 0);
        assert!(a.and(&b).unwrap().is_subset_of(&a).unwrap());
        assert!(a.is_disjoint(&BinaryMask::new(3, 3)).is_err());
        assert_eq!(a.set_pixels().count(), 8);
    }
}
