//! Random measure generators and the counterexample search for asymmetric
//! references.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::report::{Check, Quantities, VerificationReport};
use super::{DIRAC_TOL, STRICT_MARGIN};
use crate::entropy::{jensen_bound_from_moments, relative_entropy};
use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, SpecMeasure, SYMMETRY_TOL};
use crate::numeric::ExtReal;
use crate::tilt::{witness_bound, CramerTransform};

/// `n` measures with weights `ρᵢ e^{gᵢ}` (renormalized), `gᵢ ~ N(0, 1)`
/// drawn independently per atom. Always absolutely continuous w.r.t. `rho`.
pub fn random_reweightings<R: Rng>(rho: &DiscreteMeasure, n: usize, rng: &mut R) -> Vec<DiscreteMeasure> {
    (0..n)
        .map(|_| {
            rho.reweight(|_, _| rng.sample::<f64, _>(StandardNormal).exp())
                .expect("positive factors keep the total mass positive")
        })
        .collect()
}

/// Stream offsets keep each family's draws independent of the others and of
/// the family count.
pub(crate) const MU_STREAM: u64 = 0;
pub(crate) const KERNEL_STREAM: u64 = 1 << 32;

/// The generator behind the suite's draws for family `family` under `seed`.
pub fn family_rng(seed: u64, family: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream + family);
    rng
}

/// The `n` random μ the suite checks against family number `family`.
pub fn suite_random_mus(rho: &DiscreteMeasure, n: usize, seed: u64, family: u64) -> Vec<DiscreteMeasure> {
    random_reweightings(rho, n, &mut family_rng(seed, family, MU_STREAM))
}

/// The exponential tilt `e^{uz + vz²} ρ / normalizer`.
pub fn tilted(rho: &DiscreteMeasure, u: f64, v: f64) -> Result<DiscreteMeasure> {
    if !(u.is_finite() && v.is_finite()) {
        return Err(Error::Domain(format!("tilt ({u}, {v}) is not finite")));
    }
    let shift = rho
        .positions()
        .map(|z| u * z + v * z * z)
        .fold(f64::NEG_INFINITY, f64::max);
    rho.reweight(|_, z| (u * z + v * z * z - shift).exp())
}

/// Evaluate `H(μ|ρ) ≥ F(μ)` for random reweightings of an asymmetric `rho`
/// and for `μ = ρ`. A check fails exactly when it is a violation,
/// `H < F − 1e-12`.
pub fn search_counterexample_asymmetric(rho: &SpecMeasure, trials: usize, seed: u64) -> Result<VerificationReport> {
    if rho.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::Precondition(
            "reference measure is symmetric; the bound holds".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = vec![("counterexample/mu_equals_rho".to_string(), rho.measure.clone())];
    candidates.extend(
        random_reweightings(rho, trials, &mut rng)
            .into_iter()
            .enumerate()
            .map(|(k, mu)| (format!("counterexample/trial_{k:05}"), mu)),
    );

    let cramer = CramerTransform::new(rho);
    let checks = candidates
        .into_par_iter()
        .filter(|(_, mu)| !mu.is_dirac_at_zero(DIRAC_TOL))
        .map(|(name, mu)| {
            let h = relative_entropy(&mu, rho).value;
            let m = mu.moments();
            let f = jensen_bound_from_moments(m.x, m.y);
            let violation = h < f - STRICT_MARGIN;
            Check::new(
                name,
                rho.spec.clone(),
                if violation { "violation" } else { "no_violation" },
            )
            .with_mu(mu.to_spec())
            .with_quantities(Quantities {
                h: Some(ExtReal(h)),
                i: Some(ExtReal(cramer.eval(m).value)),
                f: Some(f),
                w: witness_bound(rho, m.x, m.y).ok(),
            })
            .with_margins([h - f])
            .with_verdict(!violation)
        })
        .collect();
    Ok(VerificationReport::new("counterexample_search", seed, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reweightings_are_deterministic_and_absolutely_continuous() {
        let rho = DiscreteMeasure::uniform(-1.0, 1.0, 11).unwrap();
        let a = random_reweightings(&rho, 5, &mut ChaCha8Rng::seed_from_u64(3));
        let b = random_reweightings(&rho, 5, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        for mu in &a {
            assert_eq!(mu.len(), rho.len());
            assert!(relative_entropy(mu, &rho).absolutely_continuous);
        }
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn tilt_of_rademacher_is_a_coin() {
        let rad = DiscreteMeasure::rademacher();
        let mu = tilted(&rad, 0.5 * 3f64.ln(), 0.7).unwrap();
        assert!((mu.weight_at(1.0) - 0.75).abs() < 1e-15);
        let big = tilted(&rad, 800.0, 0.0).unwrap();
        assert_eq!(big.weight_at(1.0), 1.0);
    }

    #[test]
    fn counterexamples() {
        let d1 = SpecMeasure::parse("atoms:1=1").unwrap();
        let r = search_counterexample_asymmetric(&d1, 10, 1).unwrap();
        let at_rho = r
            .checks
            .iter()
            .find(|c| c.name == "counterexample/mu_equals_rho")
            .unwrap();
        assert_eq!(at_rho.case, "violation");
        assert_eq!(at_rho.quantities.h, Some(ExtReal(0.0)));
        assert_eq!(at_rho.quantities.f, Some(0.5));

        let coin = SpecMeasure::parse("atoms:-1=0.1,1=0.9").unwrap();
        let r = search_counterexample_asymmetric(&coin, 1000, 42).unwrap();
        assert_eq!(r.checks.len(), 1001);
        let at_rho = r
            .checks
            .iter()
            .find(|c| c.name == "counterexample/mu_equals_rho")
            .unwrap();
        assert_eq!(at_rho.case, "violation");
        assert!((at_rho.quantities.f.unwrap() - 0.32).abs() < 1e-15);

        let rad = SpecMeasure::parse("rademacher").unwrap();
        assert!(matches!(
            search_counterexample_asymmetric(&rad, 3, 1),
            Err(Error::Precondition(_))
        ));
    }
}
