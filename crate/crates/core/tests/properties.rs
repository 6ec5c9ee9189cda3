use entrobound::numeric::{sym2_eigenvalues, ExtReal};
use entrobound::verify::{check_theorem, tilted};
use entrobound::{
    cgf, cramer_transform, jensen_bound, parse_spec, relative_entropy, witness_bound, DiscreteMeasure, MomentPair,
    Region, TiltParams,
};
use proptest::prelude::*;

/// Symmetric measures on up to 6 mirrored pairs plus an optional atom at 0.
fn symmetric_measure() -> impl Strategy<Value = DiscreteMeasure> {
    (
        prop::collection::vec((0.05f64..4.0, 0.01f64..1.0), 1..6),
        prop::option::of(0.01f64..1.0),
    )
        .prop_map(|(pairs, zero)| {
            let mut atoms: Vec<(f64, f64)> = pairs.iter().flat_map(|&(z, w)| [(z, w), (-z, w)]).collect();
            if let Some(w) = zero {
                atoms.push((0.0, w));
            }
            DiscreteMeasure::new(atoms).unwrap().symmetrize()
        })
}

/// A reweighting of `rho` with log-factors drawn from [-3, 3].
fn with_reweighting() -> impl Strategy<Value = (DiscreteMeasure, DiscreteMeasure)> {
    symmetric_measure()
        .prop_flat_map(|rho| {
            let n = rho.len();
            (Just(rho), prop::collection::vec(-3.0f64..3.0, n))
        })
        .prop_map(|(rho, g)| {
            let mu = rho.reweight(|i, _| g[i].exp()).unwrap();
            (mu, rho)
        })
}

fn any_measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0), 1..8)
        .prop_filter("positive mass", |v| v.iter().any(|(_, w)| *w > 1e-3))
        .prop_map(|v| DiscreteMeasure::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_nonnegative_and_vanishes_on_the_diagonal(mu in any_measure(), rho in any_measure()) {
        prop_assert!(relative_entropy(&mu, &rho).value >= 0.0);
        prop_assert_eq!(relative_entropy(&rho, &rho).value, 0.0);
    }

    #[test]
    fn jensen_bound_is_at_most_one_half(mu in any_measure()) {
        if let Ok(f) = jensen_bound(&mu) {
            prop_assert!((0.0..=0.5).contains(&f));
        }
    }

    #[test]
    fn theorem_chain_holds((mu, rho) in with_reweighting()) {
        let c = check_theorem(&mu, &rho).unwrap();
        prop_assert!(c.f <= c.i_at_moments + 1e-9);
        prop_assert!(c.i_at_moments <= c.h + 1e-9);
        prop_assert!(c.w <= c.i_at_moments + 1e-9);
    }

    #[test]
    fn exact_tilts_attain_the_variational_bound(rho in symmetric_measure(), u in -1.5f64..1.5, v in -1.0f64..0.3) {
        let mu = tilted(&rho, u, v).unwrap();
        let h = relative_entropy(&mu, &rho).value;
        let r = cramer_transform(&rho, mu.moments());
        if r.region == Region::Interior {
            prop_assert!((h - r.value).abs() <= 1e-8 * (1.0 + h), "H={} I={} rho={} u={} v={} {:?}", h, r.value, rho.to_spec(), u, v, r);
        } else {
            prop_assert!(r.value <= h + 1e-9);
        }
    }

    #[test]
    fn cramer_vanishes_at_the_moments_of_rho(rho in any_measure()) {
        let r = cramer_transform(&rho, rho.moments());
        prop_assert!(r.value.abs() <= 1e-9, "{r:?}");
    }

    #[test]
    fn cramer_dominates_the_witness_bound(rho in symmetric_measure(), fx in -0.95f64..0.95, fy in 0.05f64..0.95) {
        let zmax = rho.positions().fold(0.0f64, |a, z| a.max(z.abs()));
        let y = fy * zmax * zmax;
        let x = fx * y.sqrt();
        let i = cramer_transform(&rho, MomentPair::new(x, y)).value;
        let w = witness_bound(&rho, x, y).unwrap();
        prop_assert!(i >= 0.0);
        prop_assert!(i >= w - 1e-9, "I={} W={}", i, w);
    }

    #[test]
    fn cgf_hessian_is_psd(rho in any_measure(), u in -5.0f64..5.0, v in -2.0f64..2.0) {
        let e = cgf(&rho, TiltParams::new(u, v));
        let (lo, _) = sym2_eigenvalues(e.hessian[0][0], e.hessian[0][1], e.hessian[1][1]);
        let scale = 1.0 + e.hessian[0][0].abs() + e.hessian[1][1].abs();
        prop_assert!(lo >= -1e-10 * scale);
        prop_assert!(e.value.is_finite());
    }

    #[test]
    fn specs_round_trip(mu in any_measure()) {
        let back = parse_spec(&mu.to_spec()).unwrap();
        prop_assert!(back.approx_eq(&mu, 1e-15));
    }

    #[test]
    fn ext_real_json_round_trip(x in prop_oneof![any::<f64>().prop_filter("not nan", |x| !x.is_nan()), Just(f64::INFINITY), Just(f64::NEG_INFINITY)]) {
        let s = serde_json::to_string(&ExtReal(x)).unwrap();
        let back: ExtReal = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back.0, x);
    }
}
