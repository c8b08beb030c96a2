//! Green's functions, Martin functions, comb conformal maps, harmonic
//! measures, and genus-1 covering liftings for finite-gap Denjoy domains
//! Ω = ℂ ∖ E with E on the negative real axis, together with brute-force
//! oracles (walk-on-spheres, finite differences) and inequality suites that
//! exercise the factorization and domination results these domains satisfy.

pub mod cheb;
pub mod covering;
pub mod curve;
pub mod comb;
pub mod differential;
pub mod diffint;
pub mod measure;
pub mod oracle;
pub mod geometry;
pub mod closed_form;
pub mod quad;

pub use geometry::{DomainSpec, FiniteGapSet, GeometryError, Interval, IntervalRole, SetKind};
pub use quad::{PathSpec, QuadError, QuadResult, Singular};
