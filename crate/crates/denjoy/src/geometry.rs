//! Finite-gap boundary sets E on the negative real axis and geometric queries.
//!
//! A set is either compact, `E = [b0, a0] \ ∪ gaps`, or of half-line type,
//! `E = (-∞, a0] \ ∪ gaps`. The complement `Ω = ℂ \ E` is the domain every
//! other module works in. Sets are immutable after validation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative length below which a band counts as degenerate and is rejected.
pub const DEGENERATE_BAND_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Compact,
    HalfLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalRole {
    Band,
    Gap,
}

/// A finite open or closed subinterval of the real line with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub role: IntervalRole,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("gaps overlap or touch: ({0}, {1}) and ({2}, {3})")]
    OverlappingGaps(f64, f64, f64, f64),
    #[error("gap ({0}, {1}) is not strictly inside the hull")]
    GapOutsideHull(f64, f64),
    #[error("degenerate band of length {0:e} near {1}")]
    EmptyBand(f64, f64),
    #[error("boundary point {0} lies on the positive real axis")]
    NonNegativeBoundary(f64),
    #[error("gap endpoints invalid: ({0}, {1})")]
    BadGap(f64, f64),
    #[error("hull endpoints invalid: b0={0}, a0={1}")]
    BadHull(f64, f64),
    #[error("scaled gaps collide: lambda*b1 = {0} >= a1 = {1}")]
    GapsCollide(f64, f64),
}

/// The boundary set E as an ordered collection of bands and gaps.
///
/// Gaps are stored sorted decreasing (the gap closest to `a0` first), matching
/// the convention that gap index 1 is the rightmost one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGapSet {
    kind: SetKind,
    a0: f64,
    b0: Option<f64>,
    gaps: Vec<(f64, f64)>,
}

/// On-disk JSON form of a domain spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: SetKind,
    pub a0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    pub gaps: Vec<(f64, f64)>,
}

impl FiniteGapSet {
    /// Validate and normalize a raw description into a set.
    pub fn validate(
        kind: SetKind,
        a0: f64,
        b0: Option<f64>,
        gaps: &[(f64, f64)],
    ) -> Result<Self, GeometryError> {
        if !a0.is_finite() || a0 > 0.0 {
            return Err(GeometryError::NonNegativeBoundary(a0));
        }
        let b0 = match kind {
            SetKind::Compact => {
                let b0 = b0.ok_or(GeometryError::BadHull(f64::NEG_INFINITY, a0))?;
                if !b0.is_finite() || b0 >= a0 {
                    return Err(GeometryError::BadHull(b0, a0));
                }
                Some(b0)
            }
            SetKind::HalfLine => None,
        };

        let mut gaps: Vec<(f64, f64)> = gaps.to_vec();
        for &(lo, hi) in &gaps {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(GeometryError::BadGap(lo, hi));
            }
            let inside = match kind {
                SetKind::Compact => lo > b0.unwrap() && hi < a0,
                SetKind::HalfLine => hi < a0,
            };
            if !inside {
                return Err(GeometryError::GapOutsideHull(lo, hi));
            }
        }
        // sort decreasing: gap nearest a0 first
        gaps.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
        for w in gaps.windows(2) {
            let (right, left) = (w[0], w[1]);
            if left.1 >= right.0 {
                return Err(GeometryError::OverlappingGaps(
                    left.0, left.1, right.0, right.1,
                ));
            }
        }

        let set = FiniteGapSet { kind, a0, b0, gaps };
        let diam = set.span();
        for band in set.bands() {
            if band.lo.is_finite() && band.len() < DEGENERATE_BAND_REL * diam {
                return Err(GeometryError::EmptyBand(band.len(), band.lo));
            }
        }
        Ok(set)
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self, GeometryError> {
        Self::validate(spec.kind, spec.a0, spec.b0, &spec.gaps)
    }

    pub fn to_spec(&self) -> DomainSpec {
        DomainSpec {
            kind: self.kind,
            a0: self.a0,
            b0: self.b0,
            gaps: self.gaps.clone(),
        }
    }

    /// Half-line set with gaps `λ^k (a1, b1)`, `k = 0..n-1`, hull `(-∞, 0]`.
    ///
    /// The infinite family `λ^k` with `k < 0` accumulates at 0 and is absorbed
    /// into E by the truncation, so the hull closes at 0.
    pub fn self_similar_truncation(
        lambda: f64,
        seed_gap: (f64, f64),
        n: usize,
    ) -> Result<Self, GeometryError> {
        let (a1, b1) = seed_gap;
        if !(lambda > 1.0) || !(b1 < 0.0) || a1 >= b1 {
            return Err(GeometryError::BadGap(a1, b1));
        }
        if lambda * b1 >= a1 {
            return Err(GeometryError::GapsCollide(lambda * b1, a1));
        }
        let mut gaps = Vec::with_capacity(n);
        let mut scale = 1.0;
        for _ in 0..n {
            gaps.push((scale * a1, scale * b1));
            scale *= lambda;
        }
        Self::validate(SetKind::HalfLine, 0.0, None, &gaps)
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    /// Right endpoint of E.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Left endpoint for compact sets.
    pub fn b0(&self) -> Option<f64> {
        self.b0
    }

    pub fn num_gaps(&self) -> usize {
        self.gaps.len()
    }

    /// Gaps sorted decreasing (closest to `a0` first).
    pub fn gaps(&self) -> Vec<Interval> {
        self.gaps
            .iter()
            .map(|&(lo, hi)| Interval {
                lo,
                hi,
                role: IntervalRole::Gap,
            })
            .collect()
    }

    /// Bands sorted decreasing (the band ending at `a0` first). A half-line
    /// set's last band has `lo = -∞`.
    pub fn bands(&self) -> Vec<Interval> {
        let mut bands = Vec::with_capacity(self.gaps.len() + 1);
        let mut hi = self.a0;
        for &(lo, ghi) in &self.gaps {
            bands.push(Interval {
                lo: ghi,
                hi,
                role: IntervalRole::Band,
            });
            hi = lo;
        }
        let leftmost = match self.kind {
            SetKind::Compact => self.b0.unwrap(),
            SetKind::HalfLine => f64::NEG_INFINITY,
        };
        bands.push(Interval {
            lo: leftmost,
            hi,
            role: IntervalRole::Band,
        });
        bands
    }

    /// All finite band endpoints, sorted increasing. These are the branch
    /// points of the curve `s² = ∏ (z - e_i)`.
    pub fn branch_points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        for band in self.bands() {
            if band.lo.is_finite() {
                pts.push(band.lo);
            }
            pts.push(band.hi);
        }
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts
    }

    /// Leftmost finite branch point.
    pub fn left_finite(&self) -> f64 {
        match self.kind {
            SetKind::Compact => self.b0.unwrap(),
            SetKind::HalfLine => {
                // leftmost gap's lower endpoint
                self.gaps.last().map(|g| g.0).unwrap_or(self.a0 - 1.0)
            }
        }
    }

    /// Diameter of the finite geometry: the span of the finite branch points,
    /// floored at 1 so scale-based tolerances stay meaningful for tiny sets.
    pub fn span(&self) -> f64 {
        (self.a0 - self.left_finite()).max(1.0)
    }

    /// True if x lies in E.
    pub fn on_e(&self, x: f64) -> bool {
        if x > self.a0 {
            return false;
        }
        if let Some(b0) = self.b0 {
            if x < b0 {
                return false;
            }
        }
        !self.gaps.iter().any(|&(lo, hi)| lo < x && x < hi)
    }

    /// Exact Euclidean distance from z to E.
    pub fn distance_to_e(&self, z: Complex64) -> f64 {
        let (x, y) = (z.re, z.im);
        let mut best = f64::INFINITY;
        for band in self.bands() {
            let dx = if x < band.lo {
                band.lo - x
            } else if x > band.hi {
                x - band.hi
            } else {
                0.0
            };
            let d = (dx * dx + y * y).sqrt();
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Nearest point of E to z (used by the walk-on-spheres absorber).
    pub fn project_to_e(&self, z: Complex64) -> f64 {
        let x = z.re;
        let mut best = f64::INFINITY;
        let mut proj = self.a0;
        for band in self.bands() {
            let px = x.clamp(band.lo, band.hi);
            let d = (x - px).hypot(z.im);
            if d < best {
                best = d;
                proj = px;
            }
        }
        proj
    }

    /// True if z lies in the open domain Ω.
    pub fn in_domain(&self, z: Complex64) -> bool {
        z.im != 0.0 || !self.on_e(z.re)
    }

    /// Gap index (0-based, rightmost gap is 0) containing x strictly inside.
    pub fn gap_of(&self, x: f64) -> Option<usize> {
        self.gaps
            .iter()
            .position(|&(lo, hi)| lo < x && x < hi)
    }
}
