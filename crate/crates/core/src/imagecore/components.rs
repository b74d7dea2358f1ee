use std::collections::VecDeque;

use crate::imagecore::mask::BinaryMask;

/// Which neighbors join two set pixels into one region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    /// Edge neighbors only.
    Four,
    /// Edge and corner neighbors.
    #[default]
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &NEIGHBORS4,
            Connectivity::Eight => &NEIGHBORS8,
        }
    }
}

/// A connected region of set pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blob {
    pub id: usize,
    /// Pixels in raster order of discovery (BFS from the top-left-most pixel).
    pub pixels: Vec<(u32, u32)>,
    /// Inclusive pixel bounds `(min_x, min_y, max_x, max_y)`.
    pub bounds: (u32, u32, u32, u32),
}

impl Blob {
    pub fn area_px(&self) -> usize {
        self.pixels.len()
    }
}

/// Connected components surviving the size filter, plus a label raster.
#[derive(Debug, Clone)]
pub struct BlobSet {
    width: usize,
    height: usize,
    /// 0 = background or filtered out; otherwise blob id + 1.
    labels: Vec<u32>,
    blobs: Vec<Blob>,
}

impl BlobSet {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn blobs(&self) -> &[Blob] {
        &self.blobs
    }

    pub fn len(&self) -> usize {
        self.blobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blobs.is_empty()
    }

    /// Id of the surviving blob covering `(x, y)`, if any.
    #[inline]
    pub fn label_at(&self, x: usize, y: usize) -> Option<usize> {
        match self.labels[y * self.width + x] {
            0 => None,
            l => Some(l as usize - 1),
        }
    }

    pub fn into_blobs(self) -> Vec<Blob> {
        self.blobs
    }
}

const NEIGHBORS4: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

const NEIGHBORS8: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// 8-connected components of the set bits, dropping any with fewer than
/// `min_area_px` pixels. Ids follow the raster order of each blob's first
/// pixel, so identical input always yields identical labels.
pub fn label_blobs(mask: &BinaryMask, min_area_px: usize) -> BlobSet {
    label_blobs_with(mask, min_area_px, Connectivity::Eight)
}

/// [`label_blobs`] with a choice of connectivity.
pub fn label_blobs_with(mask: &BinaryMask, min_area_px: usize, connectivity: Connectivity) -> BlobSet {
    let (w, h) = (mask.width(), mask.height());
    let bits = mask.bits();
    let mut visited = vec![false; w * h];
    let mut labels = vec![0u32; w * h];
    let mut blobs = Vec::new();
    let mut queue = VecDeque::new();
    let min_area = min_area_px.max(1);

    for start in 0..w * h {
        if !bits[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            pixels.push((x as u32, y as u32));
            x0 = x0.min(x as u32);
            y0 = y0.min(y as u32);
            x1 = x1.max(x as u32);
            y1 = y1.max(y as u32);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if bits[j] && !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if pixels.len() < min_area {
            continue;
        }
        let id = blobs.len();
        for &(x, y) in &pixels {
            labels[y as usize * w + x as usize] = id as u32 + 1;
        }
        blobs.push(Blob {
            id,
            pixels,
            bounds: (x0, y0, x1, y1),
        });
    }

    BlobSet {
        width: w,
        height: h,
        labels,
        blobs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_separated_squares() {
        // 5x5 squares at x 0..5 and 7..12
        let m = BinaryMask::from_fn(14, 6, |x, y| y < 5 && (x < 5 || (7..12).contains(&x)));
        let set = label_blobs(&m, 25);
        assert_eq!(set.len(), 2);
        assert!(set.blobs().iter().all(|b| b.area_px() == 25));
        assert_eq!(set.label_at(0, 0), Some(0));
        assert_eq!(set.label_at(8, 0), Some(1));
        assert_eq!(set.label_at(6, 0), None);
    }

    #[test]
    fn size_filter_drops_24_px() {
        let m = BinaryMask::from_fn(10, 10, |x, y| x < 4 && y < 6);
        let set = label_blobs(&m, 25);
        assert!(set.is_empty());
        assert_eq!(set.label_at(0, 0), None);
    }

    #[test]
    fn diagonal_chain_is_one_blob() {
        let m = BinaryMask::from_fn(8, 8, |x, y| x == y);
        let set = label_blobs(&m, 1);
        assert_eq!(set.len(), 1);
        assert_eq!(set.blobs()[0].area_px(), 8);
        assert_eq!(set.blobs()[0].bounds, (0, 0, 7, 7));
    }

    #[test]
    fn empty_mask() {
        assert!(label_blobs(&BinaryMask::new(5, 5), 1).is_empty());
    }
}
