//! The difference integral H(z,a,b) for two real poles a, b sitting in
//! distinct gaps: the combination of their Green differentials normalized at
//! 0, integrated from the right endpoint of b's gap, with
//! Re H(z,a,b) = G(z,b)/G(0,b) - G(z,a)/G(0,a) and Re H(0,a,b) = 0. The
//! numerator is a degree g+1 polynomial whose extra real zero ξ falls in
//! (b, a).

use crate::cheb::ChebPoly;
use crate::differential::{canonical_path_from, AbelianDifferential, AbelianError, Pole};
use crate::geometry::FiniteGapSet;
use crate::quad;
use num_complex::Complex64;

pub struct DifferenceIntegral {
    set: FiniteGapSet,
    diff_a: AbelianDifferential,
    diff_b: AbelianDifferential,
    pub a: f64,
    pub b: f64,
    pub g0a: f64,
    pub g0b: f64,
    /// Combined numerator of degree g+1.
    pub numerator: ChebPoly,
    /// Basepoint: right endpoint of the gap containing b.
    pub basepoint: f64,
}

impl DifferenceIntegral {
    pub fn new(set: &FiniteGapSet, a: f64, b: f64) -> Result<Self, AbelianError> {
        if set.a0() >= 0.0 {
            // the normalization point 0 must lie inside Ω
            return Err(AbelianError::NotInDomain(Complex64::new(0.0, 0.0)));
        }
        if b >= a {
            return Err(AbelianError::SamePoint(a));
        }
        let gap_a = set.gap_of(a).ok_or(AbelianError::NotInGaps(a))?;
        let gap_b = set.gap_of(b).ok_or(AbelianError::NotInGaps(b))?;
        if gap_a == gap_b {
            return Err(AbelianError::NotInGaps(a));
        }
        let diff_a = AbelianDifferential::green(set, Pole::at_real(a))?;
        let diff_b = AbelianDifferential::green(set, Pole::at_real(b))?;
        let zero = Complex64::new(0.0, 0.0);
        let g0a = diff_a.green_value(zero)?;
        let g0b = diff_b.green_value(zero)?;

        let na = diff_a.n_poly.as_ref().unwrap();
        let nb = diff_b.n_poly.as_ref().unwrap();
        let numerator = nb
            .mul_linear(a)
            .scale(1.0 / g0b)
            .add(&na.mul_linear(b).scale(-1.0 / g0a));
        let basepoint = set.gaps()[gap_b].hi;

        Ok(DifferenceIntegral {
            set: set.clone(),
            diff_a,
            diff_b,
            a,
            b,
            g0a,
            g0b,
            numerator,
            basepoint,
        })
    }

    /// H(z,a,b) along the canonical path from the basepoint. The integrand is
    /// evaluated through the combined numerator, independently of the two
    /// Green path integrals it is tested against.
    pub fn h(&self, z: Complex64) -> Result<Complex64, AbelianError> {
        let span = self.set.span();
        for &p in &[self.a, self.b] {
            if (z - p).norm() < 1e-9 * span {
                return Err(AbelianError::SamePoint(p));
            }
        }
        if !self.set.in_domain(z) {
            return Err(AbelianError::NotInDomain(z));
        }
        let path = canonical_path_from(&self.set, self.basepoint, z, None);
        let curve = &self.diff_a.curve;
        let tol = 1e-10 * (1.0 + z.norm() / span).sqrt();
        let r = quad::integrate_path(
            |lam| {
                let s = if lam.im == 0.0 && !self.set.on_e(lam.re) {
                    Complex64::new(curve.s_on_gap(lam.re), 0.0)
                } else {
                    curve.s(lam)
                };
                self.numerator.eval_complex(lam) / ((lam - self.a) * (lam - self.b) * s)
            },
            &path,
            tol,
        )?;
        Ok(r.value)
    }

    /// The Green-ratio difference the real part must reproduce.
    pub fn green_ratio_difference(&self, z: Complex64) -> Result<f64, AbelianError> {
        Ok(self.diff_b.green_value(z)? / self.g0b - self.diff_a.green_value(z)? / self.g0a)
    }

    /// Bracket the extra numerator zero ξ in (b, a) outside the other gaps.
    pub fn extra_zero(&self) -> Option<f64> {
        let gaps = self.set.gaps();
        // segments of (b, a) minus gaps strictly between the two poles
        let mut cuts = vec![self.b];
        for gap in gaps.iter() {
            if gap.lo > self.b && gap.hi < self.a {
                cuts.push(gap.lo);
                cuts.push(gap.hi);
            }
        }
        cuts.push(self.a);
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for seg in cuts.chunks(2) {
            if seg.len() < 2 {
                break;
            }
            let (lo, hi) = (seg[0], seg[1]);
            let pad = 1e-10 * (hi - lo);
            if let Some(xi) = self
                .numerator
                .bisect_zero(lo + pad, hi - pad, 1e-12 * (hi - lo))
            {
                return Some(xi);
            }
            // scan for an interior double bracket
            let m = 256;
            let mut prev = (lo + pad, self.numerator.eval(lo + pad));
            for i in 1..=m {
                let t = lo + (hi - lo) * i as f64 / (m as f64 + 1.0);
                let v = self.numerator.eval(t);
                if v.signum() != prev.1.signum() {
                    return self.numerator.bisect_zero(prev.0, t, 1e-12 * (hi - lo));
                }
                prev = (t, v);
            }
        }
        None
    }
}

/// H(z,a,b); the degenerate pair a = b gives the zero function.
pub fn difference_integral(
    set: &FiniteGapSet,
    a: f64,
    b: f64,
    z: Complex64,
) -> Result<Complex64, AbelianError> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    DifferenceIntegral::new(set, a, b)?.h(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SetKind;

    /// E = (-∞,-7] ∪ [-6,-4] ∪ [-3,-1]: a0 = -1 < 0 so 0 ∈ Ω.
    fn g2_diffint_set() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::HalfLine, -1.0, None, &[(-7.0, -6.0), (-4.0, -3.0)])
            .unwrap()
    }

    #[test]
    fn degenerate_pair_is_zero() {
        let set = g2_diffint_set();
        let v = difference_integral(&set, -3.5, -3.5, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn normalized_at_zero() {
        let set = g2_diffint_set();
        let d = DifferenceIntegral::new(&set, -3.5, -6.5).unwrap();
        let h0 = d.h(Complex64::new(0.0, 0.0)).unwrap();
        assert!(h0.re.abs() < 1e-9, "Re H(0) = {}", h0.re);
    }

    #[test]
    fn reproduces_green_ratio_difference() {
        let set = g2_diffint_set();
        let d = DifferenceIntegral::new(&set, -3.5, -6.5).unwrap();
        for &z in &[
            Complex64::new(1.0, 0.0),
            Complex64::new(5.0, 0.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(2.0, 3.0),
            Complex64::new(-10.0, 1.0),
        ] {
            let lhs = d.h(z).unwrap().re;
            let rhs = d.green_ratio_difference(z).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "at {}: {} vs {}", z, lhs, rhs);
        }
    }

    #[test]
    fn extra_zero_bracketed() {
        let set = g2_diffint_set();
        let d = DifferenceIntegral::new(&set, -3.5, -6.5).unwrap();
        assert_eq!(d.numerator.degree(), set.num_gaps() + 1);
        let xi = d.extra_zero().expect("extra zero in (b,a)");
        assert!(xi > -6.5 && xi < -3.5, "ξ = {}", xi);
        // and it is not inside another gap (none lie strictly between here)
        assert!(set.gap_of(xi).is_none() || (xi > -4.0 && xi < -3.5) || (xi > -6.5 && xi < -6.0));
    }

    #[test]
    fn sign_pattern_on_real_sections() {
        // Re H > 0 on R+, < 0 on the gap part inside (a, 0)
        let set = g2_diffint_set();
        let d = DifferenceIntegral::new(&set, -3.5, -6.5).unwrap();
        for &x in &[0.5, 1.0, 3.0, 10.0] {
            let v = d.h(Complex64::new(x, 0.0)).unwrap().re;
            assert!(v > 0.0, "Re H({}) = {}", x, v);
        }
        // points of the gap (-4,-3) right of a = -3.5 lie inside (a, 0)
        for &x in &[-3.4, -3.1] {
            let v = d.h(Complex64::new(x, 0.0)).unwrap().re;
            assert!(v < 0.0, "Re H({}) = {}", x, v);
        }
        // gaps left of b: positive
        for &x in &[-6.9, -6.6] {
            let v = d.h(Complex64::new(x, 0.0)).unwrap().re;
            assert!(v > 0.0, "Re H({}) = {}", x, v);
        }
    }
}
