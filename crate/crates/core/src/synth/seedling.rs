//! Seedling footprint: a pair of equal ellipses (the cotyledons) placed
//! symmetrically about the sowing point along a random axis.

use std::f64::consts::PI;

/// Offset of each cotyledon center from the sowing point, in units of the
/// cotyledon semi-major axis.
pub const LOBE_OFFSET: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    /// Sowing point, pixels.
    pub cx: f64,
    pub cy: f64,
    /// Semi-axes of each cotyledon, pixels.
    pub a: f64,
    pub b: f64,
    pub cos: f64,
    pub sin: f64,
}

impl Footprint {
    pub fn new(cx: f64, cy: f64, a: f64, b: f64, angle: f64) -> Self {
        Self {
            cx,
            cy,
            a,
            b,
            cos: angle.cos(),
            sin: angle.sin(),
        }
    }

    /// Largest of the two lobe ellipse functions' complements; `<= 1` means
    /// inside. `grow` inflates both semi-axes.
    #[inline]
    fn level(&self, x: f64, y: f64, grow: f64) -> f64 {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = dx * self.cos + dy * self.sin;
        let v = -dx * self.sin + dy * self.cos;
        let (a, b) = (self.a + grow, self.b + grow);
        let off = LOBE_OFFSET * self.a;
        let vv = (v / b).powi(2);
        let l1 = ((u - off) / a).powi(2) + vv;
        let l2 = ((u + off) / a).powi(2) + vv;
        l1.min(l2)
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.a > 0.0 && self.level(x, y, 0.0) <= 1.0
    }

    /// Whether the unit pixel with top-left `(px, py)` may touch the
    /// footprint. Conservative: never false for a touching pixel.
    #[inline]
    pub fn may_touch_pixel(&self, px: f64, py: f64) -> bool {
        self.a > 0.0 && self.level(px + 0.5, py + 0.5, 1.0) <= 1.0
    }

    /// Whether the unit pixel lies entirely within one lobe. Each lobe is
    /// convex, so checking the four corners against it suffices.
    pub fn covers_pixel(&self, px: f64, py: f64) -> bool {
        if self.a <= 0.0 {
            return false;
        }
        let off = LOBE_OFFSET * self.a;
        [-off, off].iter().any(|&o| {
            [(px, py), (px + 1.0, py), (px, py + 1.0), (px + 1.0, py + 1.0)]
                .iter()
                .all(|&(x, y)| {
                    let (dx, dy) = (x - self.cx, y - self.cy);
                    let u = dx * self.cos + dy * self.sin - o;
                    let v = -dx * self.sin + dy * self.cos;
                    (u / self.a).powi(2) + (v / self.b).powi(2) <= 1.0
                })
        })
    }

    /// Inclusive pixel bounds that may be touched, before clipping.
    pub fn pixel_bounds(&self) -> (i64, i64, i64, i64) {
        let reach = (1.0 + LOBE_OFFSET) * self.a + 2.0;
        (
            (self.cx - reach).floor() as i64,
            (self.cy - reach).floor() as i64,
            (self.cx + reach).ceil() as i64,
            (self.cy + reach).ceil() as i64,
        )
    }

    /// Exact area of the lobe union: two ellipses minus their lens.
    ///
    /// Scaling the minor axis by `a / b` turns both lobes into circles of
    /// radius `a` whose centers sit `2 * LOBE_OFFSET * a` apart.
    pub fn analytic_area(&self) -> f64 {
        analytic_pair_area(self.a, self.b)
    }
}

pub fn analytic_pair_area(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let r = a;
    let d = 2.0 * LOBE_OFFSET * a;
    let lens = if d >= 2.0 * r {
        0.0
    } else {
        2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
    };
    (2.0 * PI * r * r - lens) * (b / a)
}

/// Area in pixels of the union of `fps`, clipped to the `width x height`
/// raster. Pixels fully inside a lobe count whole; pixels near a boundary
/// are supersampled on an 8x8 grid.
pub fn union_area_px(fps: &[Footprint], width: usize, height: usize) -> f64 {
    const NEAR: u8 = 1;
    const FULL: u8 = 2;
    let clip = |fp: &Footprint| {
        let (x0, y0, x1, y1) = fp.pixel_bounds();
        let x0 = x0.max(0) as usize;
        let y0 = y0.max(0) as usize;
        let x1 = x1.min(width as i64 - 1);
        let y1 = y1.min(height as i64 - 1);
        (x1 >= x0 as i64 && y1 >= y0 as i64).then_some((x0, y0, x1 as usize, y1 as usize))
    };
    let live: Vec<(&Footprint, (usize, usize, usize, usize))> = fps
        .iter()
        .filter(|f| f.a > 0.0)
        .filter_map(|f| clip(f).map(|b| (f, b)))
        .collect();
    if live.is_empty() {
        return 0.0;
    }
    let gx0 = live.iter().map(|(_, b)| b.0).min().unwrap();
    let gy0 = live.iter().map(|(_, b)| b.1).min().unwrap();
    let gx1 = live.iter().map(|(_, b)| b.2).max().unwrap();
    let gy1 = live.iter().map(|(_, b)| b.3).max().unwrap();
    let gw = gx1 - gx0 + 1;
    let mut state = vec![0u8; gw * (gy1 - gy0 + 1)];
    let mut bits = vec![0u64; state.len()];

    for (fp, (x0, y0, x1, y1)) in &live {
        for y in *y0..=*y1 {
            for x in *x0..=*x1 {
                let k = (y - gy0) * gw + (x - gx0);
                if state[k] == FULL {
                    continue;
                }
                if fp.covers_pixel(x as f64, y as f64) {
                    state[k] = FULL;
                } else if fp.may_touch_pixel(x as f64, y as f64) {
                    state[k] = NEAR;
                }
            }
        }
    }
    for (fp, (x0, y0, x1, y1)) in &live {
        for y in *y0..=*y1 {
            for x in *x0..=*x1 {
                let k = (y - gy0) * gw + (x - gx0);
                if state[k] != NEAR || !fp.may_touch_pixel(x as f64, y as f64) {
                    continue;
                }
                for s in 0..64 {
                    let sx = x as f64 + ((s % 8) as f64 + 0.5) / 8.0;
                    let sy = y as f64 + ((s / 8) as f64 + 0.5) / 8.0;
                    if fp.contains(sx, sy) {
                        bits[k] |= 1 << s;
                    }
                }
            }
        }
    }
    state
        .iter()
        .zip(&bits)
        .map(|(&s, &b)| match s {
            FULL => 1.0,
            NEAR => b.count_ones() as f64 / 64.0,
            _ => 0.0,
        })
        .sum()
}
