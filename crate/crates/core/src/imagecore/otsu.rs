use std::cmp::Ordering;

use crate::error::{Error, Result};

pub const OTSU_BINS: usize = 256;

/// Otsu threshold over a 256-bin histogram spanning the observed
/// `[min, max]` range.
///
/// Returns the upper edge of the bin that closes the lower class, so
/// `value <= threshold` selects it. Between-class variance is compared in
/// exact integer arithmetic on bin indices; among equal maxima the lowest
/// threshold wins. If every sample is identical that value is returned.
pub fn otsu_threshold(values: &[f32]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("otsu threshold of an empty sample".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        let v = v as f64;
        if !v.is_finite() {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        return Ok(lo);
    }
    let width = (hi - lo) / OTSU_BINS as f64;
    let mut hist = [0u64; OTSU_BINS];
    for &v in values {
        hist[bin_index(v as f64, lo, width)] += 1;
    }

    let n = values.len() as u64;
    let total: u64 = hist.iter().enumerate().map(|(i, &c)| i as u64 * c).sum();
    let mut best: Option<(usize, Score)> = None;
    let (mut n0, mut s0) = (0u64, 0u64);
    for (k, &c) in hist.iter().enumerate() {
        n0 += c;
        s0 += k as u64 * c;
        if n0 == 0 || n0 == n {
            continue;
        }
        let score = Score::new(n, total, n0, s0);
        if best.as_ref().is_none_or(|(_, b)| score.cmp(b) == Ordering::Greater) {
            best = Some((k, score));
        }
    }
    // lo != hi guarantees both classes are populated for some k
    let k = best.map(|(k, _)| k).unwrap_or(0);
    Ok(lo + (k as f64 + 1.0) * width)
}

#[inline]
pub(crate) fn bin_index(v: f64, lo: f64, width: f64) -> usize {
    (((v - lo) / width) as usize).min(OTSU_BINS - 1)
}

/// Between-class variance scaled by `n^2`, held as the exact fraction
/// `(s0*n - total*n0)^2 / (n0 * n1)`.
#[derive(Debug, Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(n: u64, total: u64, n0: u64, s0: u64) -> Self {
        let a = s0 as i128 * n as i128 - total as i128 * n0 as i128;
        let d = a.unsigned_abs();
        Self {
            num: d * d,
            den: n0 as u128 * (n - n0) as u128,
        }
    }

    /// Compares `num/den` without overflow: quotients first, then remainders
    /// (both below their denominators, so the cross products fit).
    fn cmp(&self, other: &Score) -> Ordering {
        let (q1, r1) = (self.num / self.den, self.num % self.den);
        let (q2, r2) = (other.num / other.den, other.num % other.den);
        q1.cmp(&q2).then_with(|| (r1 * other.den).cmp(&(r2 * self.den)))
    }
}
