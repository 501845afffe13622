//! The regular interval cover of a filter range, parametrized by
//! resolution and gain.

use crate::error::{input_err, Result};

/// Relative padding applied to each open endpoint so the open intervals
/// cover the closed range of observed filter values.
pub const COVER_PAD: f64 = 1e-9;

/// A cover of `[fmin, fmax]` by `count` open intervals of nominal length
/// `r`, consecutive ones overlapping by `g * r`. Only consecutive intervals
/// intersect (g < 1/2).
#[derive(Debug, Clone)]
pub struct IntervalCover {
    fmin: f64,
    fmax: f64,
    r: f64,
    g: f64,
    count: usize,
}

/// Interval `s` (0-based) nominally starts at `fmin + s*(1-g)*r` with length
/// `r`; the stored open endpoints are padded by `1e-9 * r` on each side. The
/// count is the smallest making the union reach `fmax`.
pub fn build_cover(fmin: f64, fmax: f64, r: f64, g: f64) -> Result<IntervalCover> {
    if !fmin.is_finite() || !fmax.is_finite() || fmax < fmin {
        return input_err(format!("bad filter range [{fmin}, {fmax}]"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return input_err(format!("resolution must be positive, got {r}"));
    }
    if !(g > 0.0 && g < 0.5) {
        return input_err(format!("gain must lie in (0, 1/2), got {g}"));
    }
    let span = fmax - fmin;
    let step = (1.0 - g) * r;
    let count = if span <= r {
        1
    } else {
        1 + ((span - r) / step).ceil() as usize
    };
    Ok(IntervalCover {
        fmin,
        fmax,
        r,
        g,
        count,
    })
}

impl IntervalCover {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn resolution(&self) -> f64 {
        self.r
    }

    pub fn gain(&self) -> f64 {
        self.g
    }

    pub fn range(&self) -> (f64, f64) {
        (self.fmin, self.fmax)
    }

    fn step(&self) -> f64 {
        (1.0 - self.g) * self.r
    }

    fn pad(&self) -> f64 {
        COVER_PAD * self.r
    }

    /// Nominal (unpadded) start of interval `s`.
    pub fn start(&self, s: usize) -> f64 {
        self.fmin + s as f64 * self.step()
    }

    /// Padded open endpoints of interval `s`.
    pub fn interval(&self, s: usize) -> (f64, f64) {
        let lo = self.start(s) - self.pad();
        (lo, lo + self.r + 2.0 * self.pad())
    }

    /// Test against the padded endpoints. Closed comparison: when a value's
    /// magnitude makes the pad round away (fmin - pad == fmin in f64), the
    /// padded open interval still must contain the range endpoint.
    pub fn contains(&self, s: usize, y: f64) -> bool {
        let (lo, hi) = self.interval(s);
        lo <= y && y <= hi
    }

    /// Indices of the (one or two) intervals containing `y`.
    pub fn covering(&self, y: f64) -> Vec<usize> {
        let step = self.step();
        let guess = if y <= self.fmin {
            0isize
        } else {
            ((y - self.fmin) / step).floor() as isize
        };
        let mut out = Vec::with_capacity(2);
        for s in (guess - 1).max(0)..=(guess + 1).min(self.count as isize - 1) {
            let s = s as usize;
            if self.contains(s, y) {
                out.push(s);
            }
        }
        out
    }

    /// Nominal overlap zone between intervals `s` and `s+1`; length `g * r`.
    pub fn overlap_zone(&self, s: usize) -> (f64, f64) {
        (self.start(s + 1), self.start(s) + self.r)
    }

    /// Midpoints of the intervals with their overlap zones trimmed away:
    /// both sides for interior intervals, the right side only for the first,
    /// the left side only for the last. A single-interval cover is untrimmed.
    pub fn reduced_midpoints(&self) -> Vec<f64> {
        let (r, g) = (self.r, self.g);
        (0..self.count)
            .map(|s| {
                let lo = self.start(s);
                if self.count == 1 {
                    lo + r / 2.0
                } else if s == 0 {
                    lo + (1.0 - g) * r / 2.0
                } else if s == self.count - 1 {
                    lo + (1.0 + g) * r / 2.0
                } else {
                    lo + r / 2.0
                }
            })
            .collect()
    }
}
