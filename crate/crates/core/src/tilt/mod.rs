//! The bivariate log-Laplace transform `Λ(u, v) = ln ∫ e^{uz + vz²} dρ(z)`,
//! its Legendre conjugate (the Cramér transform of `(Z, Z²)`), and the
//! explicit quadratic-tilt witness bound.

mod cgf;
mod cramer;
pub mod hull;
mod witness;

pub use cgf::{cgf, CgfEval, TiltParams};
pub use cramer::{cramer_transform, Argmax, CramerResult, CramerTransform, NewtonSettings};
pub use hull::Region;
pub use witness::{symmetrized_integrand_identity_check, witness_bound, witness_integral};

use crate::measures::{DiscreteMeasure, MomentPair};

/// Where `point` sits relative to the closed convex hull of `{(z, z²)}` over
/// the atoms of `rho`. Points within `1e-10` of the hull boundary are
/// classified as boundary.
pub fn realizable_region(rho: &DiscreteMeasure, point: MomentPair) -> Region {
    hull::MomentHull::new(rho).classify(point)
}
