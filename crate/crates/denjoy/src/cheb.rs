//! Chebyshev polynomials scaled to an interval, used as the basis for the
//! numerator polynomials of Abelian differentials. Monomial bases go singular
//! well before genus 10; this basis keeps the period systems well conditioned.

use num_complex::Complex64;

/// A polynomial `Σ c_k T_k(u)` with `u = (x - center)/half` scaled to a
/// reference interval.
#[derive(Debug, Clone)]
pub struct ChebPoly {
    pub center: f64,
    pub half: f64,
    pub coeffs: Vec<f64>,
}

impl ChebPoly {
    pub fn new(center: f64, half: f64, coeffs: Vec<f64>) -> Self {
        assert!(half > 0.0);
        ChebPoly {
            center,
            half,
            coeffs,
        }
    }

    pub fn basis(center: f64, half: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        ChebPoly::new(center, half, coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Clenshaw evaluation; valid for real or complex x, inside or outside
    /// the reference interval.
    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        let u = (x - self.center) / self.half;
        let n = self.coeffs.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for k in (1..n).rev() {
            let b0 = 2.0 * u * b1 - b2 + self.coeffs[k];
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.coeffs[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_complex(Complex64::new(x, 0.0)).re
    }

    /// Multiply by the linear factor (x - root), staying in the same basis.
    /// Uses u·T_k = (T_{k+1} + T_{k-1})/2 after writing x - root in u.
    pub fn mul_linear(&self, root: f64) -> ChebPoly {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n + 1];
        // x - root = half·u + (center - root)
        let alpha = self.half;
        let beta = self.center - root;
        for (k, &ck) in self.coeffs.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            out[k] += beta * ck;
            if k == 0 {
                out[1] += alpha * ck;
            } else {
                // u·T_k = (T_{k+1} + T_{k-1})/2 for k ≥ 1
                out[k + 1] += 0.5 * alpha * ck;
                out[k - 1] += 0.5 * alpha * ck;
            }
        }
        ChebPoly::new(self.center, self.half, out)
    }

    pub fn scale(&self, factor: f64) -> ChebPoly {
        ChebPoly::new(
            self.center,
            self.half,
            self.coeffs.iter().map(|c| c * factor).collect(),
        )
    }

    pub fn add(&self, other: &ChebPoly) -> ChebPoly {
        assert_eq!(self.center, other.center);
        assert_eq!(self.half, other.half);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        ChebPoly::new(self.center, self.half, coeffs)
    }

    /// Locate a simple zero in (lo, hi) by bisection on a sign change.
    /// Returns None if the endpoint samples do not bracket one.
    pub fn bisect_zero(&self, lo: f64, hi: f64, tol: f64) -> Option<f64> {
        let eps = 1e-13 * (hi - lo);
        let (mut a, mut b) = (lo + eps, hi - eps);
        let (mut fa, fb) = (self.eval(a), self.eval(b));
        if fa == 0.0 {
            return Some(a);
        }
        if fb == 0.0 {
            return Some(b);
        }
        if fa.signum() == fb.signum() {
            return None;
        }
        while b - a > tol {
            let m = 0.5 * (a + b);
            let fm = self.eval(m);
            if fm == 0.0 {
                return Some(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_monomials() {
        // T_0 + 2T_1 + 3T_2 on [−1,1]: 3·(2u²−1) + 2u + 1 = 6u² + 2u − 2
        let p = ChebPoly::new(0.0, 1.0, vec![1.0, 2.0, 3.0]);
        for &u in &[-0.9, -0.3, 0.0, 0.5, 1.7] {
            let want = 6.0 * u * u + 2.0 * u - 2.0;
            assert!((p.eval(u) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn mul_linear_consistent() {
        let p = ChebPoly::new(-2.0, 3.0, vec![0.5, -1.0, 2.0, 0.25]);
        let q = p.mul_linear(1.5);
        for &x in &[-4.0, -2.0, 0.0, 1.0, 3.0] {
            let want = p.eval(x) * (x - 1.5);
            assert!((q.eval(x) - want).abs() < 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn bisect_finds_root() {
        // T_1 scaled to [2,6]: root at x=4
        let p = ChebPoly::basis(4.0, 2.0, 1);
        let r = p.bisect_zero(2.0, 6.0, 1e-14).unwrap();
        assert!((r - 4.0).abs() < 1e-12);
    }
}
