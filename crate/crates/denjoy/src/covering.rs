//! Genus-1 covering machinery for a half-line set with a single gap.
//!
//! The Abel map J(z) = ∫_{a0}^z dλ/s sends the upper half-plane onto the
//! rectangle (0,L1)×(0,L2): [a0,∞) to the bottom edge, the unbounded band to
//! the right edge, the gap to the top, the bounded band to the left.
//! Reflection unfolding makes the strip (0,L1)×ℝ a universal cover of Ω with
//! cyclic deck group J ↦ J + 2iL2, and
//!
//! ```text
//! w(z) = iκ · tan(πJ(z)/(2L1))
//! ```
//!
//! is the covering branch normalized so E lands on the negative real ray,
//! ℝ₊ on the positive imaginary ray, and the gap on the half-circle
//! |w - c| = r with c = -κ(τ+1/τ)/2, r = κ(1/τ-τ)/2, τ = tanh(πL2/(2L1)).
//! The scale κ fixes u(P) = Im w(P) = 1.

use crate::curve::CurveData;
use crate::differential::{canonical_path_from, AbelianDifferential, AbelianError, MartinFunction};
use crate::geometry::{FiniteGapSet, Interval, SetKind};
use crate::quad::{self, PathSpec, Singular};
use num_complex::Complex64;
use thiserror::Error;

const NEWTON_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error)]
pub enum CoveringError {
    #[error("covering requires a half-line set with exactly one gap, got {0} gaps")]
    WrongGenus(usize),
    #[error("point {0} is not strictly inside the gap")]
    NotInGap(f64),
    #[error("extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),
    #[error("newton inversion failed at J = {0}")]
    InversionFailed(Complex64),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Quad(#[from] quad::QuadError),
}

/// Genus-1 covering state; immutable after build, evaluations are pure.
pub struct CoveringG1 {
    pub set: FiniteGapSet,
    curve: CurveData,
    gap: Interval,
    /// Real and imaginary half-periods of ∫ dλ/s.
    pub l1: f64,
    pub l2: f64,
    /// Deck-transformation multiplier e^{-2πL2/L1}.
    pub deck_multiplier: f64,
    /// Normalization point with u(P) = 1.
    pub p: f64,
    /// Scale in w = iκ tan(πJ/(2L1)).
    pub kappa: f64,
    /// Image half-disc of the gap.
    pub disc_center: f64,
    pub disc_radius: f64,
    /// Closure defects of the period rectangle (two routes per period).
    pub period_defect: f64,
    /// Seed grid for Newton inversion: (z, J(z)) samples.
    seeds: Vec<(Complex64, Complex64)>,
}

impl CoveringG1 {
    pub fn build(set: &FiniteGapSet, p: f64) -> Result<Self, CoveringError> {
        if set.kind() != SetKind::HalfLine || set.num_gaps() != 1 {
            return Err(CoveringError::WrongGenus(set.num_gaps()));
        }
        assert!(p > set.a0(), "normalization point must lie on R+ side");
        let curve = CurveData::new(set);
        let gap = set.gaps()[0];
        let band = set.bands()[0]; // [b1, a0]

        // near-degenerate gaps push the band integral against the budget;
        // keep the best estimate and carry its error into the defect
        let tolerant = |r: Result<quad::QuadResult, quad::QuadError>| -> (f64, f64) {
            match r {
                Ok(q) => (q.value.re, q.err),
                Err(quad::QuadError::NoConvergence { value, err, .. }) => (value.re, err),
            }
        };

        // L1 two ways: across the gap, and along [a0, ∞)
        let gap_ends = (gap.lo, gap.hi);
        let (l1_gap, e1) = tolerant(quad::integrate_chebyshev_weighted(
            |t| Complex64::new(1.0 / curve.s_abs_excluding(gap_ends, t), 0.0),
            gap.lo,
            gap.hi,
            1e-12,
        ));
        let (l1_ray, e2) = {
            let a0 = set.a0();
            let (near, en) = tolerant(quad::integrate_singular(
                |t| Complex64::new(1.0 / curve.s_abs(t), 0.0),
                a0,
                a0 + 1.0,
                Singular::Lo,
                1e-12,
            ));
            // λ = a0 + 1/t for the tail, integrand ~ t^{-1/2} handled by u²
            let (far, ef) = tolerant(quad::adaptive(
                |u| {
                    let t = u * u;
                    let lam = a0 + 1.0 / t;
                    Complex64::new(2.0 * u / (t * t) / curve.s_abs(lam), 0.0)
                },
                0.0,
                1.0,
                1e-12,
                quad::DEFAULT_BUDGET,
            ));
            (near + far, en + ef)
        };
        // L2 two ways: across the bounded band, and along the unbounded band
        let (l2_band, e3) = tolerant(quad::integrate_singular(
            |t| Complex64::new(1.0 / curve.s_abs(t), 0.0),
            band.lo,
            band.hi,
            Singular::Both,
            1e-12,
        ));
        let (l2_ray, e4) = tolerant(quad::integrate_left_ray(
            |t| Complex64::new(1.0 / curve.s_abs(t), 0.0),
            gap.lo,
            true,
            1e-12,
        ));

        let l1 = l1_gap;
        let l2 = l2_band;
        let period_defect = ((l1_gap - l1_ray).abs() / l1)
            .max((l2_band - l2_ray).abs() / l2)
            .max((e1 + e2) / l1)
            .max((e3 + e4) / l2);

        let tau = (std::f64::consts::PI * l2 / (2.0 * l1)).tanh();
        let deck_multiplier = (-2.0 * std::f64::consts::PI * l2 / l1).exp();

        let mut cov = CoveringG1 {
            set: set.clone(),
            curve,
            gap,
            l1,
            l2,
            deck_multiplier,
            p,
            kappa: 1.0,
            disc_center: 0.0,
            disc_radius: 0.0,
            period_defect,
            seeds: Vec::new(),
        };
        // scale: u(P) = 1; J(P) is real so w(P) = iκ·tan(real)
        let jp = cov.abel(Complex64::new(p, 0.0))?;
        let t = (std::f64::consts::PI * jp / (2.0 * l1)).tan();
        cov.kappa = 1.0 / t.re;
        cov.disc_center = -0.5 * cov.kappa * (tau + 1.0 / tau);
        cov.disc_radius = 0.5 * cov.kappa * (1.0 / tau - tau);
        cov.build_seed_grid()?;
        Ok(cov)
    }

    /// The Abel map J(z) = ∫_{a0}^z dλ/s along the canonical path.
    pub fn abel(&self, z: Complex64) -> Result<Complex64, CoveringError> {
        let path = canonical_path_from(&self.set, self.set.a0(), z, None);
        let r = quad::integrate_path(|lam| 1.0 / self.s_at(lam), &path, 1e-12)?;
        Ok(r.value)
    }

    fn s_at(&self, lam: Complex64) -> Complex64 {
        if lam.im == 0.0 && !self.set.on_e(lam.re) {
            Complex64::new(self.curve.s_on_gap(lam.re), 0.0)
        } else {
            self.curve.s(lam)
        }
    }

    /// The covering branch w = v + iu on the closed upper half-plane.
    pub fn w(&self, z: Complex64) -> Result<Complex64, CoveringError> {
        let zz = if z.im < 0.0 { z.conj() } else { z };
        let j = self.abel(zz)?;
        Ok(self.w_from_abel(j))
    }

    fn w_from_abel(&self, j: Complex64) -> Complex64 {
        Complex64::new(0.0, self.kappa) * (std::f64::consts::PI * j / (2.0 * self.l1)).tan()
    }

    /// u(z): positive harmonic off the gap, vanishing on E, even in Im z.
    pub fn u(&self, z: Complex64) -> Result<f64, CoveringError> {
        Ok(self.w(z)?.im)
    }

    /// v(z) = Re w(z) on the closed upper half-plane.
    pub fn v(&self, z: Complex64) -> Result<f64, CoveringError> {
        Ok(self.w(z)?.re)
    }

    /// Density of dv = (∂v/∂t) dt at a point strictly inside the gap,
    /// by the chain rule through the Abel map (dJ/dt = 1/s on the upper edge).
    pub fn dv_on_gap(&self, t: f64) -> Result<f64, CoveringError> {
        if !self.gap.contains_open(t) {
            return Err(CoveringError::NotInGap(t));
        }
        let j = self.abel(Complex64::new(t, 0.0))?;
        let half = std::f64::consts::PI / (2.0 * self.l1);
        let sec2 = {
            let c = (half * j).cos();
            1.0 / (c * c)
        };
        let dwdz = Complex64::new(0.0, self.kappa) * half * sec2 / self.curve.s_on_gap(t);
        Ok(dwdz.re)
    }

    /// ∫_gap dv: equals twice the image half-disc radius. Integrated with the
    /// gap-endpoint factors of s cancelled against the Chebyshev weight.
    pub fn dv_total(&self) -> Result<f64, CoveringError> {
        let ends = (self.gap.lo, self.gap.hi);
        let half = std::f64::consts::PI / (2.0 * self.l1);
        let r = quad::integrate_chebyshev_weighted(
            |t| {
                let j = match self.abel(Complex64::new(t, 0.0)) {
                    Ok(j) => j,
                    Err(_) => return Complex64::new(f64::NAN, 0.0),
                };
                let c = (half * j).cos();
                let sec2 = 1.0 / (c * c);
                // s_on_gap = -|s| here (two branch points to the right)
                let numer = (Complex64::new(0.0, self.kappa) * half * sec2).re;
                Complex64::new(numer / -self.curve.s_abs_excluding(ends, t), 0.0)
            },
            self.gap.lo,
            self.gap.hi,
            1e-9,
        )?;
        Ok(r.value.re)
    }

    fn build_seed_grid(&mut self) -> Result<(), CoveringError> {
        let span = self.set.span();
        let x0 = self.gap.lo - 4.0 * span;
        let x1 = self.set.a0() + 4.0 * span;
        let n = 24usize;
        let mut seeds = Vec::with_capacity(n * n);
        for i in 0..n {
            let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
            // column-wise: one canonical path to the column base, then short
            // vertical increments
            let y_base = 1e-3 * span;
            let mut z = Complex64::new(x, y_base);
            let mut j = self.abel(z)?;
            seeds.push((z, j));
            for k in 1..n {
                let y_next = y_base * (4.0 * span / y_base).powf(k as f64 / (n - 1) as f64);
                let z_next = Complex64::new(x, y_next);
                let seg = PathSpec::polyline(vec![z, z_next]);
                j += quad::integrate_path(|lam| 1.0 / self.s_at(lam), &seg, 1e-11)?.value;
                z = z_next;
                seeds.push((z, j));
            }
        }
        self.seeds = seeds;
        Ok(())
    }

    /// Invert the Abel map on the fundamental rectangle by damped Newton with
    /// incremental continuation of J along the iteration path.
    pub fn invert_abel(&self, j_target: Complex64) -> Result<Complex64, CoveringError> {
        let (mut z, mut j) = self
            .seeds
            .iter()
            .min_by(|a, b| {
                (a.1 - j_target)
                    .norm()
                    .partial_cmp(&(b.1 - j_target).norm())
                    .unwrap()
            })
            .copied()
            .ok_or(CoveringError::InversionFailed(j_target))?;
        let scale = self.set.span();
        for _ in 0..80 {
            if (j - j_target).norm() < NEWTON_TOL * (1.0 + self.l1) {
                return Ok(z);
            }
            let mut step = (j_target - j) * self.s_at(z);
            // damp and keep the iterate in the upper half-plane
            let max_step = 0.5 * scale + 0.1 * z.norm();
            if step.norm() > max_step {
                step *= max_step / step.norm();
            }
            let mut z_next = z + step;
            let mut halving = 0;
            while z_next.im <= 0.0 && halving < 60 {
                step *= 0.5;
                z_next = z + step;
                halving += 1;
            }
            let seg = PathSpec::polyline(vec![z, z_next]);
            let dj = quad::integrate_path(|lam| 1.0 / self.s_at(lam), &seg, 1e-13)?.value;
            j += dj;
            z = z_next;
        }
        if (j - j_target).norm() < 1e-9 * (1.0 + self.l1) {
            Ok(z)
        } else {
            Err(CoveringError::InversionFailed(j_target))
        }
    }

    /// Max of |w(t) - c| - r over interior gap samples (half-circle defect).
    pub fn circle_defect(&self, samples: usize) -> Result<f64, CoveringError> {
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let t = self.gap.lo
                + self.gap.len() * (i as f64 + 0.5) / samples as f64;
            let w = self.w(Complex64::new(t, 0.0))?;
            worst = worst.max(((w - self.disc_center).norm() - self.disc_radius).abs());
        }
        Ok(worst)
    }
}

/// Output of the criterion computation.
#[derive(Debug, Clone, Copy)]
pub struct CriterionReport {
    /// 𝓔 = ∫ G(P,t) dμ(t) with dμ the flux-normalized gap measure dv/2π.
    pub e_int: f64,
    /// ρ = 1 + 2𝓔 = lim u(x)/M(x).
    pub rho: f64,
    /// σ{1} = lim M(x)/u(x) from Richardson extrapolation in 1/√x.
    pub sigma1: f64,
    /// |ρ·σ{1} - 1|.
    pub consistency: f64,
}

pub struct RieszMachine {
    pub cov: CoveringG1,
    martin: MartinFunction,
}

impl RieszMachine {
    pub fn new(set: &FiniteGapSet, p: f64) -> Result<Self, CoveringError> {
        let cov = CoveringG1::build(set, p)?;
        let martin = MartinFunction::new(set, p)?;
        Ok(RieszMachine { cov, martin })
    }

    pub fn martin_value(&self, z: Complex64) -> Result<f64, CoveringError> {
        Ok(self.martin.eval(z)?)
    }

    /// ∫_gap G(z,t) dv(t) computed with the pole-z differential (one solve)
    /// evaluated across the gap nodes.
    fn green_dv_integral(&self, z: Complex64) -> Result<f64, CoveringError> {
        let diff = AbelianDifferential::green(&self.cov.set, crate::differential::Pole::At(z))?;
        let gap = self.cov.gap;
        let r = quad::integrate_singular(
            |t| {
                let g = diff
                    .green_value(Complex64::new(t, 0.0))
                    .unwrap_or(f64::NAN);
                let dv = self.cov.dv_on_gap(t).unwrap_or(f64::NAN);
                Complex64::new(g * dv, 0.0)
            },
            gap.lo,
            gap.hi,
            Singular::Both,
            1e-8,
        )?;
        Ok(r.value.re)
    }

    /// 𝓔, ρ and the independent σ{1} limit.
    pub fn criterion_and_rho(&self) -> Result<CriterionReport, CoveringError> {
        let e_raw = self.green_dv_integral(Complex64::new(self.cov.p, 0.0))?;
        let e_int = e_raw / std::f64::consts::TAU;
        let rho = 1.0 + 2.0 * e_int;

        // σ{1} = lim M/u with tail model σ + c/√x
        let xs: Vec<f64> = (2..=6).map(|k| 10f64.powi(k)).collect();
        let mut f = Vec::new();
        for &x in &xs {
            let z = Complex64::new(x, 0.0);
            f.push(self.martin_value(z)? / self.cov.u(z)?);
        }
        let mut extr = Vec::new();
        for i in 0..f.len() - 1 {
            let (xi, xj) = (xs[i].sqrt(), xs[i + 1].sqrt());
            extr.push((f[i + 1] * xj - f[i] * xi) / (xj - xi));
        }
        let sigma1 = *extr.last().unwrap();
        // stability: fitted 1/√x coefficient on the two grid halves
        let c_first = (f[0] - sigma1) * xs[0].sqrt();
        let c_last = (f[f.len() - 1] - sigma1) * xs[f.len() - 1].sqrt();
        let tail_jump = (extr[extr.len() - 1] - extr[extr.len() - 2]).abs();
        if !(sigma1 > 0.0) || tail_jump > 0.05 * sigma1.abs() {
            return Err(CoveringError::ExtrapolationUnstable(format!(
                "extrapolants {:?}, coeffs {:.3e}/{:.3e}",
                extr, c_first, c_last
            )));
        }
        Ok(CriterionReport {
            e_int,
            rho,
            sigma1,
            consistency: (rho * sigma1 - 1.0).abs(),
        })
    }

    /// |ρM(z) - u(z) - (1/π)∫ G(z,t) dv(t)| / M(z).
    pub fn riesz_residual(&self, z: Complex64, rho: f64) -> Result<f64, CoveringError> {
        let m = self.martin_value(z)?;
        let u = self.cov.u(z)?;
        let g = self.green_dv_integral(z)? / std::f64::consts::PI;
        Ok((rho * m - u - g).abs() / m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;

    fn one_gap() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[(-2.0, -1.0)]).unwrap()
    }

    #[test]
    fn wrong_genus_rejected() {
        let g0 = FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[]).unwrap();
        assert!(matches!(
            CoveringG1::build(&g0, 1.0),
            Err(CoveringError::WrongGenus(0))
        ));
        let compact =
            FiniteGapSet::validate(SetKind::Compact, -1.0, Some(-4.0), &[(-3.0, -2.0)]).unwrap();
        assert!(CoveringG1::build(&compact, 1.0).is_err());
    }

    #[test]
    fn periods_close_up() {
        let cov = CoveringG1::build(&one_gap(), 1.0).unwrap();
        assert!(
            cov.period_defect < 1e-9,
            "period defect {}",
            cov.period_defect
        );
        assert!(cov.l1 > 0.0 && cov.l2 > 0.0);
        assert!(cov.deck_multiplier > 0.0 && cov.deck_multiplier < 1.0);
    }

    #[test]
    fn normalization_invariants() {
        let cov = CoveringG1::build(&one_gap(), 1.0).unwrap();
        // u(P) = 1
        let up = cov.u(Complex64::new(1.0, 0.0)).unwrap();
        assert!((up - 1.0).abs() < 1e-10, "u(P) = {}", up);
        // u = 0 on E (32 samples across both bands), w on the negative ray
        for i in 0..16 {
            let t = -1.0 + 0.999 * i as f64 / 15.0; // band [-1, 0)
            let w = cov.w(Complex64::new(t, 0.0)).unwrap();
            assert!(w.im.abs() < 1e-9, "u({}) = {}", t, w.im);
            assert!(w.re <= 0.0);
            let t2 = -2.0 - 3.0 * i as f64 / 3.0; // unbounded band
            let w2 = cov.w(Complex64::new(t2, 0.0)).unwrap();
            assert!(w2.im.abs() < 1e-8, "u({}) = {}", t2, w2.im);
            assert!(w2.re < 0.0);
        }
        // R+ maps to the positive imaginary ray
        for &x in &[0.5, 1.0, 5.0, 50.0] {
            let w = cov.w(Complex64::new(x, 0.0)).unwrap();
            assert!(w.re.abs() < 1e-10 && w.im > 0.0, "w({}) = {}", x, w);
        }
        // u > 0 in the open domain
        assert!(cov.u(Complex64::new(3.0, 4.0)).unwrap() > 0.0);
        assert!(cov.u(Complex64::new(-1.5, 0.0)).unwrap() > 0.0);
    }

    #[test]
    fn gap_image_is_half_circle() {
        let cov = CoveringG1::build(&one_gap(), 1.0).unwrap();
        let defect = cov.circle_defect(32).unwrap();
        assert!(defect < 1e-6, "circle defect {}", defect);
        assert!(cov.disc_center < 0.0 && cov.disc_radius > 0.0);
        assert!(cov.disc_center.abs() > cov.disc_radius);
    }

    #[test]
    fn dv_nonnegative_and_total_is_diameter() {
        let cov = CoveringG1::build(&one_gap(), 1.0).unwrap();
        for i in 0..24 {
            let t = -2.0 + (i as f64 + 0.5) / 24.0;
            assert!(cov.dv_on_gap(t).unwrap() >= 0.0);
        }
        let total = cov.dv_total().unwrap();
        assert!(
            (total - 2.0 * cov.disc_radius).abs() < 1e-6,
            "∫dv = {} vs 2r = {}",
            total,
            2.0 * cov.disc_radius
        );
    }

    #[test]
    fn roundtrip_inversion() {
        let cov = CoveringG1::build(&one_gap(), 1.0).unwrap();
        // deterministic pseudo-random points of the open rectangle
        let mut worst = 0.0f64;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let j = Complex64::new(
                cov.l1 * (0.02 + 0.96 * next()),
                cov.l2 * (0.02 + 0.96 * next()),
            );
            let z = cov.invert_abel(j).unwrap();
            let j_back = cov.abel(z).unwrap();
            worst = worst.max((j_back - j).norm());
        }
        assert!(worst < 1e-10, "roundtrip error {}", worst);
    }

    #[test]
    fn u_harmonic_and_monotone() {
        let cov = CoveringG1::build(&one_gap(), 1.0).unwrap();
        let z = Complex64::new(2.0, 1.5);
        let lap = |h: f64| {
            let g = |dz: Complex64| cov.u(z + dz).unwrap();
            (g(Complex64::new(h, 0.0))
                + g(Complex64::new(-h, 0.0))
                + g(Complex64::new(0.0, h))
                + g(Complex64::new(0.0, -h))
                - 4.0 * g(Complex64::new(0.0, 0.0)))
                / (h * h)
        };
        let l1 = lap(2e-2).abs();
        let l2 = lap(1e-2).abs();
        assert!(l1 < 1e-2, "stencil {}", l1);
        assert!(l2 < 0.5 * l1 || l2 < 1e-5);

        let mut prev = 0.0;
        for &x in &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let u = cov.u(Complex64::new(x, 0.0)).unwrap();
            assert!(u > prev);
            prev = u;
        }
    }

    #[test]
    fn degenerate_gap_reproduces_martin() {
        // shrink the gap: u converges to the closed-form no-gap Martin Re√z
        let delta = 1e-8;
        let set = FiniteGapSet::validate(
            SetKind::HalfLine,
            0.0,
            None,
            &[(-1.0 - delta, -1.0)],
        )
        .unwrap();
        let cov = CoveringG1::build(&set, 1.0).unwrap();
        for &z in &[
            Complex64::new(4.0, 0.0),
            Complex64::new(0.25, 0.0),
            Complex64::new(2.0, 2.0),
        ] {
            let u = cov.u(z).unwrap();
            let m = closed_form::martin_halfline(0.0, 1.0, z);
            assert!((u - m).abs() < 1e-6, "u({}) = {} vs M = {}", z, u, m);
        }
    }

    #[test]
    fn criterion_rho_sigma_consistency() {
        let set = one_gap();
        let machine = RieszMachine::new(&set, 1.0).unwrap();
        let rep = machine.criterion_and_rho().unwrap();
        assert!(rep.e_int > 0.0);
        assert!(rep.rho >= 1.0);
        assert!(rep.sigma1 > 0.0);
        assert!(
            (rep.rho - 1.0 / rep.sigma1).abs() / rep.rho < 1e-2,
            "rho {} vs 1/sigma1 {}",
            rep.rho,
            1.0 / rep.sigma1
        );
    }

    #[test]
    fn riesz_identity_residuals() {
        let set = one_gap();
        let machine = RieszMachine::new(&set, 1.0).unwrap();
        let rep = machine.criterion_and_rho().unwrap();
        // z = P: residual vanishes by the construction of ρ
        let at_p = machine
            .riesz_residual(Complex64::new(1.0, 0.0), rep.rho)
            .unwrap();
        assert!(at_p < 1e-6, "residual at P {}", at_p);
        for &z in &[
            Complex64::new(10.0, 0.0),
            Complex64::new(100.0, 0.0),
            Complex64::new(10.0, 10.0),
        ] {
            let r = machine.riesz_residual(z, rep.rho).unwrap();
            assert!(r < 1e-4, "residual {} at {}", r, z);
        }
    }
}
