use serde::{Deserialize, Serialize};

/// Interval of the real line with explicit endpoint closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: true }
    }

    /// `[lo, hi)`
    pub fn right_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: false }
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Finite sub-interval usable for sampling: infinite ends are replaced
    /// by `span` beyond the finite end, open ends are pulled inwards by a
    /// relative margin.
    pub fn sampling_range(&self, span: f64) -> (f64, f64) {
        let (mut lo, mut hi) = (self.lo, self.hi);
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {}
            (true, false) => hi = lo + span,
            (false, true) => lo = hi - span,
            (false, false) => {
                lo = -span;
                hi = span;
            }
        }
        let margin = 1e-9 * (hi - lo).abs().max(1e-300);
        if !self.lo_closed || !self.lo.is_finite() {
            lo += margin;
        }
        if !self.hi_closed || !self.hi.is_finite() {
            hi -= margin;
        }
        (lo, hi)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}
