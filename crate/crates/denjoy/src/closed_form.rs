//! Closed forms for the gapless cases: a single compact interval (Joukowski
//! map to the exterior disc) and the half-line (square-root map to a half
//! plane). These anchor the numerical machinery and provide the far-field
//! envelope used by the finite-difference oracle.

use num_complex::Complex64;

/// Exterior uniformizer of a compact interval [b0, a0]:
/// φ(z) = u + √(u-1)√(u+1) with u = (2z - a0 - b0)/(a0 - b0), |φ| > 1 on Ω.
pub fn joukowski_phi(b0: f64, a0: f64, z: Complex64) -> Complex64 {
    let u = (2.0 * z - (a0 + b0)) / (a0 - b0);
    u + (u - 1.0).sqrt() * (u + 1.0).sqrt()
}

/// Green's function of ℂ ∖ [b0, a0] with pole at infinity.
pub fn green_interval_inf(b0: f64, a0: f64, z: Complex64) -> f64 {
    joukowski_phi(b0, a0, z).norm().ln()
}

/// Green's function of ℂ ∖ [b0, a0] with a finite pole.
pub fn green_interval(b0: f64, a0: f64, z: Complex64, z0: Complex64) -> f64 {
    // map to the unit disc via w = 1/φ and use G_D(w,w0) = log|(1-conj(w0)w)/(w-w0)|
    let w = 1.0 / joukowski_phi(b0, a0, z);
    let w0 = 1.0 / joukowski_phi(b0, a0, z0);
    (((1.0 - w0.conj() * w) / (w - w0)).norm()).ln()
}

/// Green's function of ℂ ∖ (-∞, a0].
pub fn green_halfline(a0: f64, z: Complex64, z0: Complex64) -> f64 {
    let r = (z - a0).sqrt();
    let r0 = (z0 - a0).sqrt();
    (((r + r0.conj()) / (r - r0)).norm()).ln()
}

/// Martin function at infinity of ℂ ∖ (-∞, a0], normalized M(p) = 1, p > a0.
pub fn martin_halfline(a0: f64, p: f64, z: Complex64) -> f64 {
    (z - a0).sqrt().re / (p - a0).sqrt()
}

/// Equilibrium-measure mass (harmonic measure from ∞) of [p, q] ⊂ [b0, a0].
pub fn equilibrium_mass(b0: f64, a0: f64, p: f64, q: f64) -> f64 {
    let u = |x: f64| ((2.0 * x - (a0 + b0)) / (a0 - b0)).clamp(-1.0, 1.0);
    (u(q).asin() - u(p).asin()) / std::f64::consts::PI
}

/// Harmonic measure of (-∞, -a] ⊂ (-∞, 0] seen from x > 0.
pub fn halfline_tail_mass(a: f64, x: f64) -> f64 {
    1.0 - (2.0 / std::f64::consts::PI) * (a / x).sqrt().atan()
}

/// Harmonic measure of [p, q] ⊂ [b0, a0] from a finite pole z0 of ℂ ∖ [b0, a0].
///
/// The boundary doubles onto the unit circle under w = 1/φ; each edge of the
/// slit carries an arc, and the disc harmonic measure of an arc (α, β) from
/// w0 is the normalized angular length after the Möbius move to the center.
pub fn interval_measure(b0: f64, a0: f64, p: f64, q: f64, z0: Complex64) -> f64 {
    let w0 = 1.0 / joukowski_phi(b0, a0, z0);
    // upper-edge boundary point t ↦ w = e^{-i·arccos(u(t))}
    let theta = |t: f64| ((2.0 * t - (a0 + b0)) / (a0 - b0)).clamp(-1.0, 1.0).acos();
    // harmonic measure density integrated exactly: for an arc between angles,
    // use the argument principle form ω(arc) = (arg-term(β) - arg-term(α))/2π
    // with arg-term(θ) = arg((e^{iθ} - w0)/(1 - conj(w0) e^{iθ})) continuous.
    let arg_term = |th: f64| {
        let e = Complex64::from_polar(1.0, th);
        ((e - w0) / (1.0 - w0.conj() * e)).arg()
    };
    // the slit's two edges, each an arc traversed counterclockwise; the
    // Möbius image angle increases along the circle, so each arc's measure
    // is the mod-2π positive increment of arg-term
    let tau = 2.0 * std::f64::consts::PI;
    let (tp, tq) = (theta(p), theta(q));
    let upper = (arg_term(-tq) - arg_term(-tp)).rem_euclid(tau);
    let lower = (arg_term(tp) - arg_term(tq)).rem_euclid(tau);
    if p == q {
        return 0.0;
    }
    (upper + lower) / tau
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_anchor_values() {
        // E = [-3,-1], pole ∞, z = 0 → log(2+√3)
        let g = green_interval_inf(-3.0, -1.0, Complex64::new(0.0, 0.0));
        assert!((g - (2.0 + 3.0_f64.sqrt()).ln()).abs() < 1e-14);

        // E = (-∞, 0], z0 = 1, z = 4 → log 3
        let g = green_halfline(0.0, Complex64::new(4.0, 0.0), Complex64::new(1.0, 0.0));
        assert!((g - 3.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn martin_anchor_values() {
        assert!((martin_halfline(0.0, 1.0, Complex64::new(4.0, 0.0)) - 2.0).abs() < 1e-14);
        let m = martin_halfline(0.0, 1.0, Complex64::new(0.0, 1.0));
        assert!((m - 0.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn equilibrium_symmetry() {
        let half = equilibrium_mass(-3.0, -1.0, -3.0, -2.0);
        assert!((half - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tail_mass_anchor() {
        assert!((halfline_tail_mass(1.0, 1.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn interval_measure_symmetry_and_total() {
        // pole on the symmetry axis sees both halves equally
        let m = interval_measure(-3.0, -1.0, -3.0, -2.0, Complex64::new(-2.0, 1.0));
        assert!((m - 0.5).abs() < 1e-12, "got {}", m);
        // total mass is 1
        let t = interval_measure(-3.0, -1.0, -3.0, -1.0, Complex64::new(1.0, 0.5));
        assert!((t - 1.0).abs() < 1e-12, "got {}", t);
        // real pole to the right: nearer half carries more mass
        let near = interval_measure(-3.0, -1.0, -2.0, -1.0, Complex64::new(1.0, 0.0));
        assert!(near > 0.5 && near < 1.0);
    }

    #[test]
    fn green_symmetry_closed_form() {
        let (z, z0) = (Complex64::new(0.5, 0.8), Complex64::new(-5.0, 0.3));
        let a = green_interval(-3.0, -1.0, z, z0);
        let b = green_interval(-3.0, -1.0, z0, z);
        assert!((a - b).abs() < 1e-12);
        assert!(a > 0.0);
        let c = green_halfline(0.0, z, z0.conj());
        let d = green_halfline(0.0, z0.conj(), z);
        assert!((c - d).abs() < 1e-12);
    }
}
