//! Abelian differentials on the curve s² = ∏(z-e_i): construction of the
//! Green and Martin integrands with vanishing gap periods, and their path
//! integrals H(z) = G + iG̃ (resp. the Martin integral).
//!
//! For a finite pole z0 the differential is
//!
//!   dH = [ (s(λ) - conj(s0))/(2(λ - z̄0)) - (s(λ) + s0)/(2(λ - z0)) + Q(λ) ] dλ/s(λ)
//!
//! with s0 = s(z0) and Q a real polynomial of degree ≤ g-1 fixed by the g
//! real conditions Re ∫_gap dH = 0. For real z0 this collapses to the
//! classical -s0/(λ-z0) + Q form with numerator N(λ) = -s0 + (λ-z0)Q(λ)
//! carrying exactly one zero per gap. The pole at infinity (Green of a
//! compact set, Martin of a half-line set) uses dH = N(λ) dλ/s(λ) with N of
//! degree g.

use crate::cheb::ChebPoly;
use crate::curve::CurveData;
use crate::geometry::{FiniteGapSet, Interval, SetKind};
use crate::quad::{self, PathSpec, QuadError, Singular};
use num_complex::Complex64;
use thiserror::Error;

/// Largest |z| accepted by evaluators.
pub const EVAL_RADIUS: f64 = 1e8;
/// Relative pole-collision threshold.
pub const POLE_COLLISION_REL: f64 = 1e-9;
/// Distance (relative to span) under which a terminal point counts as
/// sitting on a branch point and gets the square-root substitution.
pub const NEAR_BRANCH_REL: f64 = 1e-8;

const SOLVE_TOL: f64 = 1e-12;
const EVAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pole {
    Infinity,
    At(Complex64),
}

impl Pole {
    pub fn at_real(x: f64) -> Self {
        Pole::At(Complex64::new(x, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    /// Green's function differential, pole at `Pole`.
    Green,
    /// Martin-at-infinity differential (half-line sets).
    MartinInfinity,
}

#[derive(Debug, Clone, Error)]
pub enum AbelianError {
    #[error("period system is numerically singular (cond ~ {0:.2e})")]
    SingularSystem(f64),
    #[error("pole collision: |z - z0| = {0:e} below threshold")]
    PoleCollision(f64),
    #[error("point {0} is not in the domain")]
    NotInDomain(Complex64),
    #[error("|z| = {0:e} exceeds the evaluation radius 1e8")]
    EvalOutOfRange(f64),
    #[error("martin function requires a half-line set")]
    NotHalfLine,
    #[error("green pole at infinity requires a compact set")]
    InfinityOnBoundary,
    #[error("target is not a subset of E near {0}")]
    TargetNotOnE(f64),
    #[error("points coincide: {0}")]
    SamePoint(f64),
    #[error("point {0} does not lie in a gap")]
    NotInGaps(f64),
    #[error("zero collides with evaluation point at {0}")]
    ZeroCollision(Complex64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A solved differential, immutable after construction; evaluations are pure.
#[derive(Debug, Clone)]
pub struct AbelianDifferential {
    pub set: FiniteGapSet,
    pub curve: CurveData,
    pub kind: DiffKind,
    pub(crate) pole: Option<(Complex64, Complex64)>, // (z0, s0) for finite poles
    /// Correction polynomial Q (finite pole) of degree ≤ g-1.
    pub(crate) q_poly: Option<ChebPoly>,
    /// Full numerator N of degree g for real-pole and infinity kinds.
    pub(crate) n_poly: Option<ChebPoly>,
    /// One critical zero per gap (real-pole and infinity kinds).
    pub critical: Vec<f64>,
    /// Gap-period residuals after the solve.
    pub gap_residuals: Vec<f64>,
    /// 1-norm condition estimate of the period matrix.
    pub condition: f64,
}

fn basis_frame(set: &FiniteGapSet) -> (f64, f64) {
    let lo = set.left_finite();
    let hi = set.a0();
    (0.5 * (lo + hi), (0.5 * (hi - lo)).max(0.5))
}

fn gap_sign(curve: &CurveData, gap: &Interval) -> f64 {
    if curve.branch_points_right_of(gap.mid()) % 4 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// ∫_gap f(t)/s(t) dt. The gap-endpoint factors of s cancel against the
/// Chebyshev weight analytically, so tiny gaps stay stable.
fn gap_integral<F: Fn(f64) -> f64>(
    curve: &CurveData,
    gap: &Interval,
    f: F,
) -> Result<f64, QuadError> {
    let sign = gap_sign(curve, gap);
    let ends = (gap.lo, gap.hi);
    let r = quad::integrate_chebyshev_weighted(
        |t| Complex64::new(f(t) / (sign * curve.s_abs_excluding(ends, t)), 0.0),
        gap.lo,
        gap.hi,
        SOLVE_TOL,
    )?;
    Ok(r.value.re)
}

/// Principal-value ∫_gap f(t)/((t-x)s(t)) dt for x strictly inside the gap,
/// using PV ∫ w(t)/(t-x) dt = 0 for the Chebyshev weight w of the gap.
fn gap_integral_pv<F: Fn(f64) -> f64>(
    curve: &CurveData,
    gap: &Interval,
    x: f64,
    f: F,
) -> Result<f64, QuadError> {
    let sign = gap_sign(curve, gap);
    let ends = (gap.lo, gap.hi);
    let smooth = |t: f64| f(t) / (sign * curve.s_abs_excluding(ends, t));
    let sx = smooth(x);
    let r = quad::integrate_chebyshev_weighted(
        |t| Complex64::new((smooth(t) - sx) / (t - x), 0.0),
        gap.lo,
        gap.hi,
        SOLVE_TOL,
    )?;
    Ok(r.value.re)
}

fn gauss_solve(a: &mut Vec<Vec<f64>>, b: &mut Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

fn one_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    (0..n)
        .map(|j| (0..n).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl AbelianDifferential {
    /// Solve the gap-period conditions for the Green differential with the
    /// given pole (finite point of Ω, or ∞ for compact sets).
    pub fn green(set: &FiniteGapSet, pole: Pole) -> Result<Self, AbelianError> {
        match pole {
            Pole::Infinity => {
                if set.kind() != SetKind::Compact {
                    return Err(AbelianError::InfinityOnBoundary);
                }
                Self::solve_at_infinity(set, DiffKind::Green)
            }
            Pole::At(z0) => {
                if !set.in_domain(z0) {
                    return Err(AbelianError::NotInDomain(z0));
                }
                Self::solve_finite(set, z0)
            }
        }
    }

    /// Martin-at-infinity differential for a half-line set.
    pub fn martin(set: &FiniteGapSet) -> Result<Self, AbelianError> {
        if set.kind() != SetKind::HalfLine {
            return Err(AbelianError::NotHalfLine);
        }
        Self::solve_at_infinity(set, DiffKind::MartinInfinity)
    }

    fn solve_at_infinity(set: &FiniteGapSet, kind: DiffKind) -> Result<Self, AbelianError> {
        let curve = CurveData::new(set);
        let g = set.num_gaps();
        let (center, half) = basis_frame(set);
        let gaps = set.gaps();

        let mut a: Vec<Vec<f64>> = vec![vec![0.0; g]; g];
        let mut rhs = vec![0.0; g];
        let lead = ChebPoly::basis(center, half, g);
        for (j, gap) in gaps.iter().enumerate() {
            for k in 0..g {
                let bk = ChebPoly::basis(center, half, k);
                a[j][k] = gap_integral(&curve, gap, |t| bk.eval(t))?;
            }
            rhs[j] = -gap_integral(&curve, gap, |t| lead.eval(t))?;
        }
        let (q, cond) = solve_with_cond(a, rhs)?;

        let mut coeffs = q;
        coeffs.push(1.0);
        let mut n_poly = ChebPoly::new(center, half, coeffs);
        if kind == DiffKind::Green {
            // normalize so dH ~ dλ/λ at ∞: monomial leading coefficient 1
            let lead_mono = if g == 0 {
                1.0
            } else {
                2f64.powi(g as i32 - 1) / half.powi(g as i32)
            };
            n_poly = n_poly.scale(1.0 / lead_mono);
        }

        let critical = locate_criticals(&n_poly, &gaps);
        let mut diff = AbelianDifferential {
            set: set.clone(),
            curve,
            kind,
            pole: None,
            q_poly: None,
            n_poly: Some(n_poly),
            critical,
            gap_residuals: Vec::new(),
            condition: cond,
        };
        diff.gap_residuals = diff.compute_residuals()?;
        Ok(diff)
    }

    fn solve_finite(set: &FiniteGapSet, z0: Complex64) -> Result<Self, AbelianError> {
        let curve = CurveData::new(set);
        let g = set.num_gaps();
        let (center, half) = basis_frame(set);
        let gaps = set.gaps();
        let s0 = if z0.im == 0.0 {
            Complex64::new(curve.s_on_gap(z0.re), 0.0)
        } else {
            curve.s(z0)
        };

        let mut a: Vec<Vec<f64>> = vec![vec![0.0; g]; g];
        let mut rhs = vec![0.0; g];
        for (j, gap) in gaps.iter().enumerate() {
            for k in 0..g {
                let bk = ChebPoly::basis(center, half, k);
                a[j][k] = gap_integral(&curve, gap, |t| bk.eval(t))?;
            }
            rhs[j] = -pole_part_gap_integral(&curve, gap, z0, s0)?;
        }
        let (q, cond) = solve_with_cond(a, rhs)?;
        let q_poly = ChebPoly::new(center, half, if q.is_empty() { vec![0.0] } else { q });

        // real poles admit the classical degree-g numerator
        let (n_poly, critical) = if z0.im == 0.0 {
            let n = q_poly.mul_linear(z0.re).add(&ChebPoly::new(
                center,
                half,
                vec![-s0.re],
            ));
            let crits = locate_criticals(&n, &gaps);
            (Some(n), crits)
        } else {
            (None, Vec::new())
        };

        let mut diff = AbelianDifferential {
            set: set.clone(),
            curve,
            kind: DiffKind::Green,
            pole: Some((z0, s0)),
            q_poly: Some(q_poly),
            n_poly,
            critical,
            gap_residuals: Vec::new(),
            condition: cond,
        };
        diff.gap_residuals = diff.compute_residuals()?;
        Ok(diff)
    }

    /// The integrand dH/dλ at a point of Ω (off the real axis, or on the real
    /// part of Ω).
    pub fn integrand(&self, lam: Complex64) -> Complex64 {
        let s = if lam.im == 0.0 && !self.set.on_e(lam.re) {
            Complex64::new(self.curve.s_on_gap(lam.re), 0.0)
        } else {
            self.curve.s(lam)
        };
        self.integrand_with_s(lam, s)
    }

    /// Same integrand evaluated with an explicit branch value of s (used on
    /// band edges where the branch is fixed by hand).
    pub fn integrand_with_s(&self, lam: Complex64, s: Complex64) -> Complex64 {
        match (&self.pole, &self.n_poly) {
            (None, Some(n)) => n.eval_complex(lam) / s,
            (Some((z0, s0)), _) => {
                let q = self.q_poly.as_ref().unwrap().eval_complex(lam);
                let term_conj = (s - s0.conj()) / (2.0 * (lam - z0.conj()));
                let term_pole = (s + s0) / (2.0 * (lam - *z0));
                (term_conj - term_pole + q) / s
            }
            _ => unreachable!(),
        }
    }

    /// Integrand of the reflected differential (pole at z̄0): same Q, pole
    /// data conjugated. Coincides with `integrand_with_s` for real poles.
    pub fn integrand_conj_pole_with_s(&self, lam: Complex64, s: Complex64) -> Complex64 {
        match (&self.pole, &self.n_poly) {
            (None, Some(n)) => n.eval_complex(lam) / s,
            (Some((z0, s0)), _) => {
                let q = self.q_poly.as_ref().unwrap().eval_complex(lam);
                let term_conj = (s - *s0) / (2.0 * (lam - *z0));
                let term_pole = (s + s0.conj()) / (2.0 * (lam - z0.conj()));
                (term_conj - term_pole + q) / s
            }
            _ => unreachable!(),
        }
    }

    fn compute_residuals(&self) -> Result<Vec<f64>, AbelianError> {
        let mut out = Vec::new();
        for gap in self.set.gaps() {
            let pv_at = self.pole.and_then(|(z0, _)| {
                (z0.im == 0.0 && gap.contains_open(z0.re)).then_some(z0.re)
            });
            let r = match pv_at {
                None => {
                    let q = quad::integrate_singular(
                        |t| self.integrand(Complex64::new(t, 0.0)),
                        gap.lo,
                        gap.hi,
                        Singular::Both,
                        1e-13,
                    );
                    match q {
                        Ok(r) => r.value.re,
                        // near-degenerate geometry: report the defect instead
                        Err(QuadError::NoConvergence { value, .. }) => value.re,
                    }
                }
                Some(x) => {
                    // PV of the full integrand: polynomial part + pole part
                    let (_, s0) = self.pole.unwrap();
                    let qv = gap_integral(&self.curve, &gap, |t| {
                        self.q_poly.as_ref().unwrap().eval(t)
                    })?;
                    let pv = gap_integral_pv(&self.curve, &gap, x, |_| -s0.re)?;
                    qv + pv
                }
            };
            out.push(r.abs());
        }
        Ok(out)
    }

    /// Canonical evaluation path from the basepoint a0 to z: up, across, down,
    /// kept a height 2·span above the boundary and dodging finite poles.
    pub fn canonical_path(&self, z: Complex64) -> PathSpec {
        canonical_path_from(&self.set, self.set.a0(), z, self.pole.map(|p| p.0))
    }

    /// H(z) = ∫ dH along the canonical path from a0.
    pub fn h(&self, z: Complex64) -> Result<Complex64, AbelianError> {
        self.h_along(&self.canonical_path(z))
    }

    /// H along an arbitrary path (the value's imaginary part is path
    /// dependent; the real part is not).
    pub fn h_along(&self, path: &PathSpec) -> Result<Complex64, AbelianError> {
        let z = *path.vertices.last().unwrap();
        if z.norm() > EVAL_RADIUS {
            return Err(AbelianError::EvalOutOfRange(z.norm()));
        }
        if !self.set.in_domain(z) {
            return Err(AbelianError::NotInDomain(z));
        }
        if let Some((z0, _)) = self.pole {
            let d = (z - z0).norm();
            if d < POLE_COLLISION_REL * self.set.span() {
                return Err(AbelianError::PoleCollision(d));
            }
        }
        let tol = EVAL_TOL * (1.0 + z.norm() / self.set.span()).sqrt();
        let r = quad::integrate_path(|lam| self.integrand(lam), path, tol)?;
        Ok(r.value)
    }

    /// Green's function value G(z) = Re H(z) (or the unnormalized Martin
    /// integral for the infinity kind).
    pub fn green_value(&self, z: Complex64) -> Result<f64, AbelianError> {
        Ok(self.h(z)?.re)
    }
}

fn solve_with_cond(
    mut a: Vec<Vec<f64>>,
    mut rhs: Vec<f64>,
) -> Result<(Vec<f64>, f64), AbelianError> {
    let g = rhs.len();
    if g == 0 {
        return Ok((Vec::new(), 1.0));
    }
    let norm_a = one_norm(&a);
    let a_copy = a.clone();
    let q = gauss_solve(&mut a, &mut rhs).ok_or(AbelianError::SingularSystem(f64::INFINITY))?;
    // crude 1-norm inverse estimate from the identity columns
    let mut inv_norm: f64 = 0.0;
    for j in 0..g {
        let mut aj = a_copy.clone();
        let mut e = vec![0.0; g];
        e[j] = 1.0;
        if let Some(col) = gauss_solve(&mut aj, &mut e) {
            inv_norm = inv_norm.max(col.iter().map(|x| x.abs()).sum());
        }
    }
    let cond = norm_a * inv_norm;
    if !cond.is_finite() || cond > 1e12 {
        return Err(AbelianError::SingularSystem(cond));
    }
    Ok((q, cond))
}

fn locate_criticals(n: &ChebPoly, gaps: &[Interval]) -> Vec<f64> {
    gaps.iter()
        .map(|gap| {
            let tol = 1e-12 * gap.len();
            n.bisect_zero(gap.lo, gap.hi, tol).unwrap_or_else(|| {
                // guaranteed zero; refine a sign change on a dense scan
                let m = 512;
                let mut prev = (gap.lo + 1e-12 * gap.len(), n.eval(gap.lo + 1e-12 * gap.len()));
                for i in 1..=m {
                    let t = gap.lo + gap.len() * i as f64 / (m as f64 + 1.0);
                    let v = n.eval(t);
                    if v.signum() != prev.1.signum() {
                        return n.bisect_zero(prev.0, t, tol).unwrap_or(0.5 * (prev.0 + t));
                    }
                    prev = (t, v);
                }
                gap.mid()
            })
        })
        .collect()
}

fn pole_part_gap_integral(
    curve: &CurveData,
    gap: &Interval,
    z0: Complex64,
    s0: Complex64,
) -> Result<f64, AbelianError> {
    if z0.im == 0.0 {
        let x0 = z0.re;
        if gap.contains_open(x0) {
            // PV of -s0/((t-x0)s(t))
            return Ok(gap_integral_pv(curve, gap, x0, |_| -s0.re)?);
        }
        return Ok(gap_integral(curve, gap, |t| -s0.re / (t - x0))?);
    }
    // complex pole: smooth on the gap; take the real part of the pair term
    let r = quad::integrate_singular(
        |t| {
            let s = Complex64::new(curve.s_on_gap(t), 0.0);
            let tc = Complex64::new(t, 0.0);
            let term = (s - s0.conj()) / (2.0 * (tc - z0.conj())) - (s + s0) / (2.0 * (tc - z0));
            term / s
        },
        gap.lo,
        gap.hi,
        Singular::Both,
        SOLVE_TOL,
    )
    .map_err(AbelianError::from)?;
    Ok(r.value.re)
}

/// Build the canonical up-across-down polyline from a real basepoint to z,
/// flagging the square-root singularity at the basepoint (a branch point)
/// and at z when z itself sits within 1e-8·span of a branch point.
pub fn canonical_path_from(
    set: &FiniteGapSet,
    base: f64,
    z: Complex64,
    pole: Option<Complex64>,
) -> PathSpec {
    let span = set.span();
    let sign = if z.im < 0.0 { -1.0 } else { 1.0 };
    let h = sign * (2.0 * span).max(1.25 * z.im.abs());
    let mut xd = z.re;
    // dodge a pole column
    if let Some(z0) = pole {
        for p in [z0, z0.conj()] {
            if (p.re - xd).abs() < 1e-6 * span
                && (p.im - z.im) * (p.im - h) < 0.0
                && (p - z).norm() > 1e-3 * span
            {
                xd += 1e-3 * span;
            }
        }
    }
    let mut vertices = vec![
        Complex64::new(base, 0.0),
        Complex64::new(base, h),
        Complex64::new(xd, h),
    ];
    if xd != z.re {
        vertices.push(Complex64::new(xd, z.im + sign * 1e-3 * span));
        vertices.push(Complex64::new(z.re, z.im + sign * 1e-3 * span));
    }
    vertices.push(z);
    // collapse duplicate consecutive vertices (z near the liftoff column)
    vertices.dedup_by(|a, b| (*a - *b).norm() == 0.0);
    let near_branch = set
        .branch_points()
        .iter()
        .any(|&e| (z - e).norm() < NEAR_BRANCH_REL * span);
    PathSpec {
        vertices,
        singular_start: true,
        singular_end: near_branch,
    }
}

/// Convenience wrapper: Green's function G(z, z0) of Ω.
pub fn green(set: &FiniteGapSet, pole: Pole, z: Complex64) -> Result<f64, AbelianError> {
    AbelianDifferential::green(set, pole)?.green_value(z)
}

/// Martin function at infinity, normalized M(p) = 1.
pub struct MartinFunction {
    pub diff: AbelianDifferential,
    pub p: f64,
    norm: f64,
}

impl MartinFunction {
    pub fn new(set: &FiniteGapSet, p: f64) -> Result<Self, AbelianError> {
        assert!(p > set.a0(), "normalization point must lie in R+ part of Ω");
        let diff = AbelianDifferential::martin(set)?;
        let norm = diff.h(Complex64::new(p, 0.0))?.re;
        Ok(MartinFunction { diff, p, norm })
    }

    pub fn eval(&self, z: Complex64) -> Result<f64, AbelianError> {
        Ok(self.diff.h(z)?.re / self.norm)
    }

    /// M + iM̃ along a path from a0 (the imaginary part is path dependent).
    pub fn h_normalized(&self, path: &PathSpec) -> Result<Complex64, AbelianError> {
        Ok(self.diff.h_along(path)? / self.norm)
    }
}

/// Martin function value with default normalization point.
pub fn martin(set: &FiniteGapSet, p: f64, z: Complex64) -> Result<f64, AbelianError> {
    MartinFunction::new(set, p)?.eval(z)
}

/// log|B_Ω(z)| = -Σ G(z, z_k) for a finite zero set; -∞ when z hits a zero.
pub fn blaschke_log_abs(
    set: &FiniteGapSet,
    zeros: &[Complex64],
    z: Complex64,
) -> Result<f64, AbelianError> {
    let span = set.span();
    let mut sum = 0.0;
    for &zk in zeros {
        if (z - zk).norm() < POLE_COLLISION_REL * span {
            return Ok(f64::NEG_INFINITY);
        }
        sum -= green(set, Pole::At(zk), z)?;
    }
    Ok(sum)
}

/// Widom function W(z) = Σ_j G(λ_j, z) over the critical points of G(·, z0).
pub fn widom_function(set: &FiniteGapSet, z0: Pole, z: Complex64) -> Result<f64, AbelianError> {
    let diff = AbelianDifferential::green(set, z0)?;
    let mut sum = 0.0;
    for &lam in &diff.critical {
        sum += green(set, Pole::at_real(lam), z)?;
    }
    Ok(sum)
}

/// a·(M + iM̃)(z) continued along `path` (defaults to the canonical path).
/// The modulus exp(a·M) is path independent; the phase is not.
pub fn singular_inner_log(
    set: &FiniteGapSet,
    a_mass: f64,
    z: Complex64,
    path: Option<&PathSpec>,
    p: f64,
) -> Result<Complex64, AbelianError> {
    if a_mass == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m = MartinFunction::new(set, p)?;
    let h = match path {
        Some(pth) => m.h_normalized(pth)?,
        None => m.h_normalized(&m.diff.canonical_path(z))?,
    };
    Ok(a_mass * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use crate::geometry::SetKind;

    fn no_gap_compact() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::Compact, -1.0, Some(-3.0), &[]).unwrap()
    }

    fn symmetric_two_band() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::Compact, -1.0, Some(-4.0), &[(-3.0, -2.0)]).unwrap()
    }

    fn halfline_no_gap() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[]).unwrap()
    }

    fn halfline_one_gap() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[(-2.0, -1.0)]).unwrap()
    }

    fn g2_halfline() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[(-5.0, -3.0), (-2.0, 0.0 - 2.0)])
            .unwrap()
    }

    #[test]
    fn g0_numerator_is_constant_one() {
        let d = AbelianDifferential::green(&no_gap_compact(), Pole::Infinity).unwrap();
        let n = d.n_poly.as_ref().unwrap();
        assert_eq!(n.degree(), 0);
        assert!((n.coeffs[0] - 1.0).abs() < 1e-15);
        assert!(d.critical.is_empty());
    }

    #[test]
    fn green_inf_anchor() {
        // E = [-3,-1], G(0, ∞) = log(2+√3)
        let g = green(&no_gap_compact(), Pole::Infinity, Complex64::new(0.0, 0.0)).unwrap();
        assert!(
            (g - (2.0 + 3.0f64.sqrt()).ln()).abs() < 1e-9,
            "got {}",
            g
        );
    }

    #[test]
    fn green_halfline_anchor() {
        // E = (-∞,0], G(4, 1) = log 3
        let g = green(
            &halfline_no_gap(),
            Pole::at_real(1.0),
            Complex64::new(4.0, 0.0),
        )
        .unwrap();
        assert!((g - 3.0f64.ln()).abs() < 1e-9, "got {}", g);
    }

    #[test]
    fn green_matches_closed_form_complex_args() {
        let e = no_gap_compact();
        for &(z, z0) in &[
            (Complex64::new(1.0, 0.5), Complex64::new(0.0, 2.0)),
            (Complex64::new(-2.0, 1.0), Complex64::new(3.0, 0.0)),
            (Complex64::new(0.5, -1.5), Complex64::new(-4.0, 0.0)),
        ] {
            let num = green(&e, Pole::At(z0), z).unwrap();
            let cf = closed_form::green_interval(-3.0, -1.0, z, z0);
            assert!((num - cf).abs() < 1e-9, "{} vs {} at {} {}", num, cf, z, z0);
        }
        let h = halfline_no_gap();
        for &(z, z0) in &[
            (Complex64::new(4.0, 1.0), Complex64::new(1.0, 1.0)),
            (Complex64::new(-3.0, 2.0), Complex64::new(2.0, 0.0)),
        ] {
            let num = green(&h, Pole::At(z0), z).unwrap();
            let cf = closed_form::green_halfline(0.0, z, z0);
            assert!((num - cf).abs() < 1e-9, "{} vs {}", num, cf);
        }
    }

    #[test]
    fn symmetric_set_critical_point() {
        let d = AbelianDifferential::green(&symmetric_two_band(), Pole::Infinity).unwrap();
        assert_eq!(d.critical.len(), 1);
        assert!((d.critical[0] + 2.5).abs() < 1e-10, "λ1 = {}", d.critical[0]);
    }

    #[test]
    fn g2_martin_residuals_and_sign_changes() {
        // E = (-∞,-6] ∪ [-5,-3] ∪ [-2,0]: gaps (-6,-5), (-3,-2)
        let set =
            FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[(-6.0, -5.0), (-3.0, -2.0)])
                .unwrap();
        let d = AbelianDifferential::martin(&set).unwrap();
        for r in &d.gap_residuals {
            assert!(*r < 1e-10, "residual {}", r);
        }
        let n = d.n_poly.as_ref().unwrap();
        for gap in set.gaps() {
            let lo = n.eval(gap.lo + 1e-9);
            let hi = n.eval(gap.hi - 1e-9);
            assert!(lo.signum() != hi.signum(), "one sign change per gap");
        }
        assert_eq!(d.critical.len(), 2);
    }

    #[test]
    fn martin_anchors() {
        let h = halfline_no_gap();
        let m4 = martin(&h, 1.0, Complex64::new(4.0, 0.0)).unwrap();
        assert!((m4 - 2.0).abs() < 1e-9, "M(4) = {}", m4);
        let mi = martin(&h, 1.0, Complex64::new(0.0, 1.0)).unwrap();
        assert!((mi - 0.5f64.sqrt()).abs() < 1e-9, "M(i) = {}", mi);
        let mp = martin(&halfline_one_gap(), 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((mp - 1.0).abs() < 1e-12);
    }

    #[test]
    fn martin_matches_far_pole_green_ratio() {
        let set = halfline_one_gap();
        let m = MartinFunction::new(&set, 1.0).unwrap();
        let z = Complex64::new(10.0, 0.0);
        let mz = m.eval(z).unwrap();
        let far = AbelianDifferential::green(&set, Pole::at_real(1.0e6)).unwrap();
        let ratio = far.green_value(z).unwrap() / far.green_value(Complex64::new(1.0, 0.0)).unwrap();
        assert!(
            (mz - ratio).abs() / mz < 1e-3,
            "martin {} vs far-pole ratio {}",
            mz,
            ratio
        );
    }

    #[test]
    fn green_positive_and_path_independent() {
        let set = symmetric_two_band();
        let d = AbelianDifferential::green(&set, Pole::at_real(1.0)).unwrap();
        let z = Complex64::new(3.0, 0.0);
        let g1 = d.green_value(z).unwrap();
        assert!(g1 > 0.0);
        // an alternative path through the lower half plane
        let alt = PathSpec {
            vertices: vec![
                Complex64::new(-1.0, 0.0),
                Complex64::new(-1.0, -9.0),
                Complex64::new(3.0, -9.0),
                z,
            ],
            singular_start: true,
            singular_end: false,
        };
        let g2 = d.h_along(&alt).unwrap().re;
        assert!((g1 - g2).abs() < 1e-9, "path dependence {} vs {}", g1, g2);
    }

    #[test]
    fn green_symmetry_two_band() {
        let set = symmetric_two_band();
        let pairs = [
            (Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)),
            (Complex64::new(-2.5, 0.0), Complex64::new(0.5, 0.0)),
            (Complex64::new(1.0, 1.0), Complex64::new(-2.4, 0.0)),
            (Complex64::new(0.5, 0.7), Complex64::new(-6.0, 1.2)),
        ];
        for &(za, zb) in &pairs {
            let g_ab = green(&set, Pole::At(za), zb).unwrap();
            let g_ba = green(&set, Pole::At(zb), za).unwrap();
            assert!(
                (g_ab - g_ba).abs() < 1e-8,
                "symmetry {} vs {} for ({}, {})",
                g_ab,
                g_ba,
                za,
                zb
            );
        }
    }

    #[test]
    fn boundary_vanishing_monotone() {
        let set = symmetric_two_band();
        let d = AbelianDifferential::green(&set, Pole::at_real(1.0)).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let eps = 10f64.powi(-k);
            let g = d.green_value(Complex64::new(-1.5, eps)).unwrap();
            assert!(g > 0.0 && g < prev, "g({}) = {}", eps, g);
            prev = g;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn harmonicity_stencil() {
        let set = symmetric_two_band();
        let d = AbelianDifferential::green(&set, Pole::at_real(1.0)).unwrap();
        let z = Complex64::new(-2.5, 1.0);
        let lap = |h: f64| {
            let g = |dz: Complex64| d.green_value(z + dz).unwrap();
            (g(Complex64::new(h, 0.0))
                + g(Complex64::new(-h, 0.0))
                + g(Complex64::new(0.0, h))
                + g(Complex64::new(0.0, -h))
                - 4.0 * g(Complex64::new(0.0, 0.0)))
                / (h * h)
        };
        let l1 = lap(1e-2).abs();
        let l2 = lap(5e-3).abs();
        // O(h²) residual: halving h divides the residual by about 4
        assert!(l1 < 1e-3, "laplacian {}", l1);
        assert!(l2 < 0.5 * l1 || l2 < 1e-6);
    }

    #[test]
    fn scaling_covariance() {
        let set = symmetric_two_band();
        let lam = 2.5;
        let scaled = FiniteGapSet::validate(
            SetKind::Compact,
            -1.0 * lam,
            Some(-4.0 * lam),
            &[(-3.0 * lam, -2.0 * lam)],
        )
        .unwrap();
        let z = Complex64::new(0.7, 0.9);
        let z0 = Complex64::new(2.0, 0.0);
        let g = green(&set, Pole::At(z0), z).unwrap();
        let gs = green(&scaled, Pole::At(lam * z0), lam * z).unwrap();
        assert!((g - gs).abs() < 1e-9, "{} vs {}", g, gs);
    }

    #[test]
    fn pole_collision_flagged() {
        let set = no_gap_compact();
        let d = AbelianDifferential::green(&set, Pole::at_real(1.0)).unwrap();
        let err = d.green_value(Complex64::new(1.0 + 1e-12, 0.0)).unwrap_err();
        assert!(matches!(err, AbelianError::PoleCollision(_)));
    }

    #[test]
    fn blaschke_and_widom_trivial_cases() {
        let set = symmetric_two_band();
        assert_eq!(
            blaschke_log_abs(&set, &[], Complex64::new(1.0, 0.0)).unwrap(),
            0.0
        );
        let c = Complex64::new(-2.5, 0.0);
        let single = blaschke_log_abs(&set, &[c], Complex64::new(2.0, 0.0)).unwrap();
        let gref = green(&set, Pole::At(c), Complex64::new(2.0, 0.0)).unwrap();
        assert!((single + gref).abs() < 1e-10);
        assert_eq!(
            blaschke_log_abs(&set, &[c], c).unwrap(),
            f64::NEG_INFINITY
        );

        // widom: g=0 empty sum; symmetric g=1 equals G(-2.5, z)
        let w0 = widom_function(&no_gap_compact(), Pole::Infinity, Complex64::new(1.0, 0.0))
            .unwrap();
        assert_eq!(w0, 0.0);
        let z = Complex64::new(2.0, 0.5);
        let w1 = widom_function(&set, Pole::Infinity, z).unwrap();
        let expect = green(&set, Pole::at_real(-2.5), z).unwrap();
        assert!((w1 - expect).abs() < 1e-8);
    }

    #[test]
    fn singular_inner_modulus_path_independent() {
        let set = halfline_one_gap();
        let z = Complex64::new(3.0, 2.0);
        let v0 = singular_inner_log(&set, 0.0, z, None, 1.0).unwrap();
        assert_eq!(v0, Complex64::new(0.0, 0.0));

        let a = 0.8;
        let v1 = singular_inner_log(&set, a, z, None, 1.0).unwrap();
        // a wilder path to the same point
        let path = PathSpec {
            vertices: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 7.0),
                Complex64::new(-9.0, 7.0),
                Complex64::new(-9.0, 1.0),
                Complex64::new(3.0, 1.0),
                z,
            ],
            singular_start: true,
            singular_end: false,
        };
        let v2 = singular_inner_log(&set, a, z, Some(&path), 1.0).unwrap();
        let m = martin(&set, 1.0, z).unwrap();
        assert!((v1.exp().norm() - (a * m).exp()).abs() < 1e-10 * (a * m).exp());
        assert!((v2.exp().norm() - (a * m).exp()).abs() < 1e-10 * (a * m).exp());
    }

    #[test]
    fn g0_halfline_singular_inner_closed_form() {
        // E = (-∞,0]: M + iM̃ along the canonical path equals √z / √P up to
        // the harmonic conjugate's sign convention; modulus pins a·M = a·Re√z
        let set = halfline_no_gap();
        let a = 0.5;
        for &z in &[Complex64::new(4.0, 0.0), Complex64::new(1.0, 2.0)] {
            let v = singular_inner_log(&set, a, z, None, 1.0).unwrap();
            let expect = a * z.sqrt().re;
            assert!((v.re - expect).abs() < 1e-9, "{} vs {}", v.re, expect);
            assert!((v.im.abs() - (a * z.sqrt().im).abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn g2_green_pole_in_gap_pv_solve() {
        let set = FiniteGapSet::validate(
            SetKind::HalfLine,
            0.0,
            None,
            &[(-6.0, -5.0), (-3.0, -2.0)],
        )
        .unwrap();
        let d = AbelianDifferential::green(&set, Pole::at_real(-2.5)).unwrap();
        for r in &d.gap_residuals {
            assert!(*r < 1e-9, "residual {}", r);
        }
        let g = d.green_value(Complex64::new(1.0, 0.0)).unwrap();
        assert!(g > 0.0);
        // symmetry against the pole-at-1 differential
        let d2 = AbelianDifferential::green(&set, Pole::at_real(1.0)).unwrap();
        let g2 = d2.green_value(Complex64::new(-2.5, 0.0)).unwrap();
        assert!((g - g2).abs() < 1e-8, "{} vs {}", g, g2);
    }

    #[test]
    fn martin_scaling_ray() {
        // martin(λ·set, λz)/martin(set, z) is independent of z
        let set = halfline_one_gap();
        let lam = 3.0;
        let scaled =
            FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[(-6.0, -3.0)]).unwrap();
        let m1 = MartinFunction::new(&set, 1.0).unwrap();
        let m2 = MartinFunction::new(&scaled, 1.0).unwrap();
        let mut ratios = Vec::new();
        for &z in &[
            Complex64::new(2.0, 0.0),
            Complex64::new(10.0, 0.0),
            Complex64::new(5.0, 5.0),
        ] {
            ratios.push(m2.eval(lam * z).unwrap() / m1.eval(z).unwrap());
        }
        assert!((ratios[0] - ratios[1]).abs() < 1e-8);
        assert!((ratios[0] - ratios[2]).abs() < 1e-8);
    }
}
