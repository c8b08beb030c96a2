//! The hyperelliptic curve s² = ∏(z - e_i) attached to a finite-gap set and
//! a globally single-valued branch of s on Ω = ℂ ∖ E.
//!
//! Pairing the branch points band by band gives one square-root factor per
//! band whose cut is exactly that band, so the product is analytic on Ω
//! without any path tracking. The branch is fixed by s(x) > 0 for x > a0.

use crate::geometry::{FiniteGapSet, SetKind};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct CurveData {
    /// Bounded bands as (center, half-width), rightmost first.
    pairs: Vec<(f64, f64)>,
    /// Finite endpoint of the unbounded band (half-line sets only).
    ray_tip: Option<f64>,
    branch_points: Vec<f64>,
    genus: usize,
}

impl CurveData {
    pub fn new(set: &FiniteGapSet) -> Self {
        let mut pairs = Vec::new();
        let mut ray_tip = None;
        for band in set.bands() {
            if band.lo.is_finite() {
                pairs.push((band.mid(), 0.5 * band.len()));
            } else {
                ray_tip = Some(band.hi);
            }
        }
        debug_assert_eq!(ray_tip.is_some(), set.kind() == SetKind::HalfLine);
        CurveData {
            pairs,
            ray_tip,
            branch_points: set.branch_points(),
            genus: set.num_gaps(),
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[f64] {
        &self.branch_points
    }

    /// The branch of √(∏(z-e_i)) analytic on Ω with s(x) > 0 for x > a0.
    ///
    /// Each bounded band [l,r] contributes (z-c)·√(1 - (ρ/(z-c))²) with
    /// c = (l+r)/2, ρ = (r-l)/2 (cut on the band); the unbounded band
    /// contributes the principal √(z - tip).
    pub fn s(&self, z: Complex64) -> Complex64 {
        let mut out = Complex64::new(1.0, 0.0);
        if let Some(tip) = self.ray_tip {
            out *= (z - tip).sqrt();
        }
        for &(c, rho) in &self.pairs {
            let w = z - c;
            if w.norm() == 0.0 {
                // band center: upper-edge limit i·ρ
                out *= Complex64::new(0.0, rho);
            } else {
                // w·√(1-(ρ/w)²) written as w·√((z-l)(z-r)/w²): the argument
                // crosses ℝ₋ exactly on the band, so the cut is the band
                out *= w * ((z - (c - rho)) * (z - (c + rho)) / (w * w)).sqrt();
            }
        }
        out
    }

    /// |s(t)| for real t.
    pub fn s_abs(&self, t: f64) -> f64 {
        let mut out = 1.0;
        if let Some(tip) = self.ray_tip {
            out *= (t - tip).abs().sqrt();
        }
        for &(c, rho) in &self.pairs {
            out *= ((t - (c - rho)) * (t - (c + rho))).abs().sqrt();
        }
        out
    }

    /// |s(t)| with the factors at the two given branch points removed; used
    /// by gap quadratures whose rule supplies √((t-lo)(hi-t)) exactly.
    pub fn s_abs_excluding(&self, skip: (f64, f64), t: f64) -> f64 {
        let mut out = 1.0;
        let keep = |e: f64| e != skip.0 && e != skip.1;
        if let Some(tip) = self.ray_tip {
            if keep(tip) {
                out *= (t - tip).abs().sqrt();
            }
        }
        for &(c, rho) in &self.pairs {
            for e in [c - rho, c + rho] {
                if keep(e) {
                    out *= (t - e).abs().sqrt();
                }
            }
        }
        out
    }

    /// Number of branch points strictly to the right of t.
    pub fn branch_points_right_of(&self, t: f64) -> usize {
        self.branch_points.iter().filter(|&&e| e > t).count()
    }

    /// Boundary value s(t + i0) on a band: |s(t)|·e^{iπm/2} where m counts
    /// branch points to the right.
    pub fn s_upper_on_band(&self, t: f64) -> Complex64 {
        let m = self.branch_points_right_of(t);
        let phase = Complex64::new(0.0, std::f64::consts::FRAC_PI_2 * m as f64).exp();
        phase * self.s_abs(t)
    }

    /// s(t) for real t in a gap (or outside the hull): real with sign
    /// (-1)^(m/2) where m (even) counts branch points to the right.
    pub fn s_on_gap(&self, t: f64) -> f64 {
        let m = self.branch_points_right_of(t);
        debug_assert!(m % 2 == 0, "s_on_gap called on a band point");
        let sign = if m % 4 == 0 { 1.0 } else { -1.0 };
        sign * self.s_abs(t)
    }
}
