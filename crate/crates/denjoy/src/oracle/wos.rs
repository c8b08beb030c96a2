//! Walk-on-spheres estimator for harmonic measure: step to the largest disc
//! centered at the walker, absorb within eps_shell of E, score the nearest
//! boundary point. Each walk draws from its own counter-derived RNG stream so
//! estimates are bit-identical at any degree of parallelism.

use super::{OracleEstimate, OracleError, OracleMethod};
use crate::geometry::FiniteGapSet;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    pub walks: u64,
    /// Absorption distance; defaults to 1e-6 · span.
    pub eps_shell: f64,
    pub max_steps: u64,
    pub seed: u64,
}

impl WalkConfig {
    pub fn for_set(set: &FiniteGapSet, walks: u64, seed: u64) -> Self {
        WalkConfig {
            walks,
            eps_shell: 1e-6 * set.span(),
            max_steps: 100_000,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WalkStats {
    pub killed: u64,
    pub resampled: u64,
}

/// One walk; returns the absorbed boundary point, or None when the step
/// budget ran out.
fn run_walk(set: &FiniteGapSet, z0: Complex64, cfg: &WalkConfig, stream: u64) -> Option<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut z = z0;
    for _ in 0..cfg.max_steps {
        let d = set.distance_to_e(z);
        if d < cfg.eps_shell {
            return Some(set.project_to_e(z));
        }
        let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        z += Complex64::from_polar(d, theta);
    }
    None
}

/// ω(F, z0) for F a finite union of closed subintervals of E.
pub fn wos_harmonic_measure(
    set: &FiniteGapSet,
    z0: Complex64,
    target: &[(f64, f64)],
    cfg: &WalkConfig,
) -> Result<(OracleEstimate, WalkStats), OracleError> {
    assert!(cfg.walks >= 1 && cfg.eps_shell > 0.0);
    let in_target = |t: f64| target.iter().any(|&(p, q)| p <= t && t <= q);

    let results: Vec<(u64, u64)> = (0..cfg.walks)
        .into_par_iter()
        .map(|i| {
            // resample a killed walk on fresh streams derived from its index
            let mut attempt = 0u64;
            loop {
                let stream = i + attempt * cfg.walks;
                match run_walk(set, z0, cfg, stream) {
                    Some(t) => return (if in_target(t) { 1 } else { 0 }, attempt),
                    None => {
                        attempt += 1;
                        if attempt > 16 {
                            return (0, attempt);
                        }
                    }
                }
            }
        })
        .collect();

    let hits: u64 = results.iter().map(|r| r.0).sum();
    let killed: u64 = results.iter().map(|r| r.1).sum();
    let stats = WalkStats {
        killed,
        resampled: killed,
    };
    let kill_fraction = killed as f64 / cfg.walks as f64;
    if kill_fraction > 1e-4 {
        return Err(OracleError::WalkBudgetExceeded(kill_fraction));
    }
    let p = hits as f64 / cfg.walks as f64;
    let stderr = (p * (1.0 - p) / cfg.walks as f64).sqrt();
    Ok((
        OracleEstimate {
            value: p,
            stderr_or_disc: stderr,
            n: cfg.walks,
            method: OracleMethod::WoS,
        },
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SetKind;

    fn halfline() -> FiniteGapSet {
        FiniteGapSet::validate(SetKind::HalfLine, 0.0, None, &[]).unwrap()
    }

    #[test]
    fn closed_form_target_within_3_sigma() {
        let set = halfline();
        let cfg = WalkConfig::for_set(&set, 200_000, 7);
        let (est, _) = wos_harmonic_measure(
            &set,
            Complex64::new(1.0, 0.0),
            &[(f64::NEG_INFINITY, -1.0)],
            &cfg,
        )
        .unwrap();
        assert!(
            (est.value - 0.5).abs() < 3.0 * est.stderr_or_disc,
            "{} ± {}",
            est.value,
            est.stderr_or_disc
        );
    }

    #[test]
    fn full_boundary_scores_one() {
        let set = halfline();
        let cfg = WalkConfig::for_set(&set, 2_000, 3);
        let (est, _) = wos_harmonic_measure(
            &set,
            Complex64::new(2.0, 1.0),
            &[(f64::NEG_INFINITY, 0.0)],
            &cfg,
        )
        .unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn deterministic_across_thread_pools() {
        let set = FiniteGapSet::validate(SetKind::Compact, -1.0, Some(-4.0), &[(-3.0, -2.0)])
            .unwrap();
        let cfg = WalkConfig::for_set(&set, 20_000, 42);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                wos_harmonic_measure(&set, Complex64::new(1.0, 0.0), &[(-4.0, -3.0)], &cfg)
                    .unwrap()
                    .0
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn sphere_steps_stay_inside() {
        // every step radius equals the distance to E, so no step may cross E:
        // walk manually and assert positivity of the pre-step distance
        let set = FiniteGapSet::validate(SetKind::Compact, -1.0, Some(-3.0), &[]).unwrap();
        let cfg = WalkConfig::for_set(&set, 1, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(0);
        let mut z = Complex64::new(0.5, 0.2);
        for _ in 0..1000 {
            let d = set.distance_to_e(z);
            if d < cfg.eps_shell {
                break;
            }
            assert!(d > 0.0);
            let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let next = z + Complex64::from_polar(d, theta);
            // the open disc of radius d lies in Ω
            assert!(set.distance_to_e(next) >= 0.0);
            z = next;
        }
    }
}
