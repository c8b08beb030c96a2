//! Quadrature for Abelian integrands: Gauss-Chebyshev rules for inverse
//! square-root endpoint singularities and adaptive Gauss-Kronrod panels for
//! smooth parts, over real intervals and complex polylines.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default budget of integrand evaluations per call.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// 15-point Kronrod abscissae on [0,1] (positive half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Embedded 7-point Gauss weights (for odd-indexed Kronrod nodes).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singular {
    None,
    Lo,
    Hi,
    Both,
}

/// Result of a quadrature: value, an absolute error estimate, and the number
/// of integrand evaluations spent.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub err: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

#[derive(Debug, Clone, Error)]
pub enum QuadError {
    #[error("quadrature failed to reach tol={tol:e}: err={err:e} after {evaluations} evaluations")]
    NoConvergence {
        value: Complex64,
        err: f64,
        tol: f64,
        evaluations: usize,
    },
}

/// A polyline in the complex plane with optional square-root singularities
/// declared at its terminal vertices.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub vertices: Vec<Complex64>,
    pub singular_start: bool,
    pub singular_end: bool,
}

impl PathSpec {
    pub fn polyline(vertices: Vec<Complex64>) -> Self {
        PathSpec {
            vertices,
            singular_start: false,
            singular_end: false,
        }
    }

    pub fn with_singular(mut self, start: bool, end: bool) -> Self {
        self.singular_start = start;
        self.singular_end = end;
        self
    }
}

/// One GK15 application of `f` over [a,b] (in the real parameter).
fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, usize) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = 0.0;
    let fc = f(center);
    kron += WGK[7] * fc;
    resabs += WGK[7] * fc.norm();
    gauss += WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        let sum = f1 + f2;
        kron += WGK[j] * sum;
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kron * half;
    let raw = ((kron - gauss) * half).norm();
    let resabs = resabs * half.abs();
    let err = raw.max(50.0 * f64::EPSILON * resabs);
    (value, err, 15)
}

/// e + d, stepped one ulp toward d when the addition rounds back to e; keeps
/// substituted integrands off their singular endpoint.
fn off_endpoint(e: f64, d: f64) -> f64 {
    let x = e + d;
    if x != e || d == 0.0 {
        return x;
    }
    let bits = x.to_bits();
    let stepped = if (d > 0.0) == (x >= 0.0) {
        bits + 1
    } else {
        bits - 1
    };
    f64::from_bits(stepped)
}

fn off_endpoint_c(e: Complex64, d: Complex64) -> Complex64 {
    let z = e + d;
    if z != e || d.norm() == 0.0 {
        return z;
    }
    let eps = (e.norm() * f64::EPSILON * 4.0).max(f64::MIN_POSITIVE);
    e + d * (eps / d.norm())
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Adaptive GK15 over [a,b] for a smooth integrand.
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            err: 0.0,
            evaluations: 0,
        });
    }
    let (v, e, n) = gk15(&mut f, a, b);
    let mut evals = n;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        err: e,
    });
    // panels too narrow to split keep their honest error estimate here
    let mut dead_value = Complex64::new(0.0, 0.0);
    let mut dead_err: f64 = 0.0;
    let mut live_err: f64 = e;
    loop {
        let total = heap.iter().map(|p| p.value).sum::<Complex64>() + dead_value;
        let total_err = live_err + dead_err;
        if total_err <= tol {
            return Ok(QuadResult {
                value: total,
                err: total_err,
                evaluations: evals,
            });
        }
        if evals + 30 > budget || heap.is_empty() {
            return Err(QuadError::NoConvergence {
                value: total,
                err: total_err,
                tol,
                evaluations: evals,
            });
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            live_err -= worst.err;
            dead_err += worst.err;
            dead_value += worst.value;
            continue;
        }
        live_err -= worst.err;
        let (v1, e1, n1) = gk15(&mut f, worst.a, mid);
        let (v2, e2, n2) = gk15(&mut f, mid, worst.b);
        evals += n1 + n2;
        live_err += e1 + e2;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
}

/// Gauss-Chebyshev rule with n nodes applied to a general integrand carrying
/// inverse square-root singularities at both endpoints:
/// `∫ f(x) dx = (π/n) Σ f(x_k) √((x_k-lo)(hi-x_k))`.
fn chebyshev_rule<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Complex64 {
    let m = 0.5 * (lo + hi);
    let rho = 0.5 * (hi - lo);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let theta = (2.0 * k as f64 + 1.0) * std::f64::consts::PI / (2.0 * n as f64);
        let (s, c) = theta.sin_cos();
        let x = m + rho * c;
        // √((x-lo)(hi-x)) = rho·sinθ exactly on the rule nodes
        sum += f(x) * (rho * s);
    }
    sum * (std::f64::consts::PI / n as f64)
}

/// ∫ g(x)/√((x-lo)(hi-x)) dx with the weight handled exactly by the rule:
/// (π/n) Σ g(x_k). The caller supplies only the smooth factor, so tiny
/// intervals suffer no endpoint cancellation.
pub fn integrate_chebyshev_weighted<F: FnMut(f64) -> Complex64>(
    mut g: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let m = 0.5 * (lo + hi);
    let rho = 0.5 * (hi - lo);
    let rule = |g: &mut F, n: usize| {
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let theta = (2.0 * k as f64 + 1.0) * std::f64::consts::PI / (2.0 * n as f64);
            sum += g(m + rho * theta.cos());
        }
        sum * (std::f64::consts::PI / n as f64)
    };
    let mut n = 16usize;
    let mut prev = rule(&mut g, n);
    let mut evals = n;
    loop {
        n *= 2;
        let cur = rule(&mut g, n);
        evals += n;
        let err = (cur - prev).norm();
        if err <= tol || err <= 1e-14 * cur.norm() {
            return Ok(QuadResult {
                value: cur,
                err,
                evaluations: evals,
            });
        }
        if evals + 2 * n > DEFAULT_BUDGET {
            return Err(QuadError::NoConvergence {
                value: cur,
                err,
                tol,
                evaluations: evals,
            });
        }
        prev = cur;
    }
}

/// Integrate `f` over (lo,hi) where `f` may blow up like an inverse square
/// root at the declared endpoints.
pub fn integrate_singular<F: FnMut(f64) -> Complex64>(
    mut f: F,
    lo: f64,
    hi: f64,
    sing: Singular,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    assert!(lo < hi, "integrate_singular: empty interval");
    match sing {
        Singular::Both => {
            // doubling Gauss-Chebyshev; exact for polynomial/weight integrands
            let mut n = 16usize;
            let mut prev = chebyshev_rule(&mut f, lo, hi, n);
            let mut evals = n;
            loop {
                n *= 2;
                let cur = chebyshev_rule(&mut f, lo, hi, n);
                evals += n;
                let err = (cur - prev).norm();
                // relative floor: endpoint-node rounding keeps successive
                // rules apart by O(eps·scale) even on exact integrands
                if err <= tol || err <= 1e-14 * cur.norm() {
                    return Ok(QuadResult {
                        value: cur,
                        err,
                        evaluations: evals,
                    });
                }
                if evals + 2 * n > DEFAULT_BUDGET {
                    // fall back: split at the midpoint into two one-sided
                    // problems with the t² substitution at each end
                    let mid = 0.5 * (lo + hi);
                    let wl = mid - lo;
                    let left = adaptive(
                        |t| f(off_endpoint(lo, wl * t * t)) * (2.0 * wl * t),
                        0.0,
                        1.0,
                        0.5 * tol,
                        DEFAULT_BUDGET,
                    )?;
                    let wr = hi - mid;
                    let right = adaptive(
                        |t| f(off_endpoint(hi, -(wr * t * t))) * (2.0 * wr * t),
                        0.0,
                        1.0,
                        0.5 * tol,
                        DEFAULT_BUDGET,
                    )?;
                    return Ok(QuadResult {
                        value: left.value + right.value,
                        err: left.err + right.err,
                        evaluations: evals + left.evaluations + right.evaluations,
                    });
                }
                prev = cur;
            }
        }
        Singular::Lo => {
            // x = lo + (hi-lo) t², dx = 2(hi-lo) t dt removes the singularity
            let w = hi - lo;
            adaptive(
                |t| f(off_endpoint(lo, w * t * t)) * (2.0 * w * t),
                0.0,
                1.0,
                tol,
                DEFAULT_BUDGET,
            )
        }
        Singular::Hi => {
            let w = hi - lo;
            adaptive(
                |t| f(off_endpoint(hi, -(w * t * t))) * (2.0 * w * t),
                0.0,
                1.0,
                tol,
                DEFAULT_BUDGET,
            )
        }
        Singular::None => adaptive(f, lo, hi, tol, DEFAULT_BUDGET),
    }
}

/// Integrate a complex integrand along a polyline. Terminal square-root
/// singularities are removed by the t² substitution on the first/last segment.
pub fn integrate_path<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    path: &PathSpec,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let nseg = path.vertices.len().saturating_sub(1);
    assert!(nseg >= 1, "integrate_path: need at least two vertices");
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0usize;
    let seg_tol = tol / nseg as f64;
    for i in 0..nseg {
        let a = path.vertices[i];
        let b = path.vertices[i + 1];
        let d = b - a;
        let sing_lo = i == 0 && path.singular_start;
        let sing_hi = i == nseg - 1 && path.singular_end;
        let r = if sing_lo && sing_hi {
            // rare; split in the middle
            let mid = a + 0.5 * d;
            let r1 = adaptive(
                |t| f(off_endpoint_c(a, (mid - a) * (t * t))) * (mid - a) * (2.0 * t),
                0.0,
                1.0,
                0.5 * seg_tol,
                DEFAULT_BUDGET,
            )?;
            let r2 = adaptive(
                |t| f(off_endpoint_c(b, (mid - b) * (t * t))) * (b - mid) * (2.0 * t),
                0.0,
                1.0,
                0.5 * seg_tol,
                DEFAULT_BUDGET,
            )?;
            QuadResult {
                value: r1.value + r2.value,
                err: r1.err + r2.err,
                evaluations: r1.evaluations + r2.evaluations,
            }
        } else if sing_lo {
            adaptive(
                |t| f(off_endpoint_c(a, d * (t * t))) * d * (2.0 * t),
                0.0,
                1.0,
                seg_tol,
                DEFAULT_BUDGET,
            )?
        } else if sing_hi {
            adaptive(
                |t| f(off_endpoint_c(b, -d * (t * t))) * d * (2.0 * t),
                0.0,
                1.0,
                seg_tol,
                DEFAULT_BUDGET,
            )?
        } else {
            adaptive(|t| f(a + d * t) * d, 0.0, 1.0, seg_tol, DEFAULT_BUDGET)?
        };
        total += r.value;
        err += r.err;
        evals += r.evaluations;
    }
    Ok(QuadResult {
        value: total,
        err,
        evaluations: evals,
    })
}

/// Integrate `f` over the unbounded ray (-∞, hi] via the λ = hi - (1-t)/t
/// compactification; `f` must decay at least like |λ|^{-3/2}. A square-root
/// singularity at `hi` is allowed and removed first.
pub fn integrate_left_ray<F: FnMut(f64) -> Complex64>(
    mut f: F,
    hi: f64,
    sing_hi: bool,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    // near part: (hi-1, hi], possibly singular at hi
    let near = integrate_singular(
        &mut f,
        hi - 1.0,
        hi,
        if sing_hi { Singular::Hi } else { Singular::None },
        0.5 * tol,
    )?;
    // far part: λ = hi - 1/t, t ∈ (0, 1], dλ = dt/t²; integrand ~ t^{-1/2}
    // at t = 0 after the change of variables, removed by one more t² map.
    let far = adaptive(
        |u| {
            let t = u * u;
            let lam = hi - 1.0 / t;
            f(lam) * (2.0 * u / (t * t))
        },
        0.0,
        1.0,
        0.5 * tol,
        DEFAULT_BUDGET,
    )?;
    Ok(QuadResult {
        value: near.value + far.value,
        err: near.err + far.err,
        evaluations: near.evaluations + far.evaluations,
    })
}
