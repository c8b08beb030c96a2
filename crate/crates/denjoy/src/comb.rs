//! Comb conformal maps Θ = iH: the upper half-plane maps onto a half-strip
//! (Green case) or quarter-plane (Martin case) slotted with vertical teeth,
//! one per gap, of height G(λ_k, z0) (resp. M(λ_k)) at base -G̃ (resp. -M̃).

use crate::differential::{AbelianDifferential, AbelianError, MartinFunction, Pole};
use crate::geometry::{FiniteGapSet, SetKind};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CombCase {
    GreenComb,
    /// Second-kind pole at an interior point of E; does not arise for the
    /// sets handled here (the positive axis always reaches infinity first).
    MartinCaseA,
    MartinCaseB,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CombTooth {
    pub base: f64,
    pub height: f64,
    pub critical_point: f64,
    pub gap_lo: f64,
    pub gap_hi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CombData {
    pub case: CombCase,
    pub teeth: Vec<CombTooth>,
    /// u-extent of the polygon: π for Green combs, unbounded for Martin.
    pub width: f64,
}

/// The conformal map Θ for a Green pole (real or ∞) or the Martin function.
pub struct CombMap {
    diff: AbelianDifferential,
    norm: f64,
    case: CombCase,
}

impl CombMap {
    pub fn new_green(set: &FiniteGapSet, pole: Pole) -> Result<Self, AbelianError> {
        if let Pole::At(z0) = pole {
            if z0.im != 0.0 {
                return Err(AbelianError::NotInDomain(z0));
            }
        }
        let diff = AbelianDifferential::green(set, pole)?;
        Ok(CombMap {
            diff,
            norm: 1.0,
            case: CombCase::GreenComb,
        })
    }

    pub fn new_martin(set: &FiniteGapSet, p: f64) -> Result<Self, AbelianError> {
        let m = MartinFunction::new(set, p)?;
        let norm = m.diff.h(Complex64::new(p, 0.0))?.re;
        Ok(CombMap {
            diff: m.diff,
            norm,
            case: CombCase::MartinCaseB,
        })
    }

    /// Θ(z) = iH(z)/norm with Im Θ = G (or M) ≥ 0 on the closed upper
    /// half-plane.
    pub fn theta(&self, z: Complex64) -> Result<Complex64, AbelianError> {
        let h = self.diff.h(z)?;
        Ok(Complex64::new(0.0, 1.0) * h / self.norm)
    }

    pub fn differential(&self) -> &AbelianDifferential {
        &self.diff
    }

    /// Teeth: one per gap; base is the constant Re Θ along the gap, height
    /// the value of Im Θ at the critical point inside it.
    pub fn data(&self) -> Result<CombData, AbelianError> {
        let mut teeth = Vec::new();
        for (gap, &lam) in self.diff.set.gaps().iter().zip(self.diff.critical.iter()) {
            let th = self.theta(Complex64::new(lam, 0.0))?;
            teeth.push(CombTooth {
                base: th.re,
                height: th.im,
                critical_point: lam,
                gap_lo: gap.lo,
                gap_hi: gap.hi,
            });
        }
        let width = match self.case {
            CombCase::GreenComb => std::f64::consts::PI,
            _ => f64::INFINITY,
        };
        Ok(CombData {
            case: self.case,
            teeth,
            width,
        })
    }

    /// Max |Re Θ(t) - base| over interior samples of each gap; the comb is
    /// genuinely vertical-toothed when this is ≈ 0.
    pub fn verticality_defect(&self, samples: usize) -> Result<f64, AbelianError> {
        let data = self.data()?;
        let mut worst: f64 = 0.0;
        for tooth in &data.teeth {
            // stay clear of the branch points at the gap ends
            let (lo, hi) = (tooth.gap_lo, tooth.gap_hi);
            let pad = 1e-3 * (hi - lo);
            for i in 0..samples {
                let t = lo + pad + (hi - lo - 2.0 * pad) * i as f64 / (samples - 1) as f64;
                if let Some((z0, _)) = self.diff.pole {
                    if (t - z0.re).abs() < 1e-6 * (hi - lo) && z0.im == 0.0 {
                        continue;
                    }
                }
                let th = self.theta(Complex64::new(t, 0.0))?;
                worst = worst.max((th.re - tooth.base).abs());
            }
        }
        Ok(worst)
    }
}

/// Convenience: comb data for a kind matching the spec's surface.
pub fn comb_data(set: &FiniteGapSet, pole: Option<Pole>, p: f64) -> Result<CombData, AbelianError> {
    match pole {
        Some(pl) => CombMap::new_green(set, pl)?.data(),
        None => {
            if set.kind() != SetKind::HalfLine {
                return Err(AbelianError::NotHalfLine);
            }
            CombMap::new_martin(set, p)?.data()
        }
    }
}
