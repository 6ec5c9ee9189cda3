//! Relative entropy, the bivariate cumulant generating function of `(Z, Z²)`
//! and its Cramér transform for finitely supported probability measures on ℝ,
//! together with a verification harness for the lower bound
//!
//! ```text
//! H(μ|ρ) ≥ (∫z dμ)² / (2 ∫z² dμ)      for symmetric ρ,
//! ```
//!
//! and for every intermediate inequality used to establish it.
//!
//! Every measure is represented internally as a finite list of weighted
//! atoms ([`DiscreteMeasure`]); continuous families are discretized on a grid
//! so that all integrals become exact finite sums.

pub mod cli;
pub mod entropy;
pub mod error;
pub mod measures;
pub mod numeric;
pub mod tilt;
pub mod verify;

pub use entropy::{blm_bound, dv_lower_bound, jensen_bound, relative_entropy, EntropyResult, TabulatedFn};
pub use error::{Error, Result};
pub use measures::{parse_spec, DiscreteMeasure, MomentPair, SpecMeasure};
pub use tilt::{
    cgf, cramer_transform, realizable_region, witness_bound, witness_integral, Argmax, CgfEval, CramerResult,
    CramerTransform, Region, TiltParams,
};
pub use verify::{Check, Verdict, VerificationReport};
