//! Analytic checks on the building blocks: CGF derivatives, convexity, the
//! symmetrization identity and the pointwise `cosh` inequality.

use rand::Rng;

use super::report::Check;
use crate::error::Result;
use crate::measures::SpecMeasure;
use crate::numeric::{cosh_gauss_deficit, ln_cosh_gauss, sym2_eigenvalues};
use crate::tilt::{cgf, symmetrized_integrand_identity_check, TiltParams};

pub const FD_STEP: f64 = 1e-6;
pub const FD_REL_TOL: f64 = 1e-6;
pub const PSD_TOL: f64 = -1e-10;
pub const IDENTITY_REL_TOL: f64 = 1e-10;

/// Range of the random tilts: `u ∈ [−U_RANGE, U_RANGE]`, `v ∈ [−V_RANGE, V_RANGE]`.
const U_RANGE: f64 = 2.0;
const V_RANGE: f64 = 1.0;

/// Central-difference gradient of `Λ`, relative error against the analytic
/// gradient (scaled by `max(‖∇Λ‖∞, 1)`).
fn gradient_error(rho: &SpecMeasure, theta: TiltParams) -> f64 {
    let h = FD_STEP;
    let at = |u: f64, v: f64| cgf(rho, TiltParams::new(u, v)).value;
    let fd = [
        (at(theta.u + h, theta.v) - at(theta.u - h, theta.v)) / (2.0 * h),
        (at(theta.u, theta.v + h) - at(theta.u, theta.v - h)) / (2.0 * h),
    ];
    let g = cgf(rho, theta).gradient;
    let err = (fd[0] - g[0]).abs().max((fd[1] - g[1]).abs());
    err / g[0].abs().max(g[1].abs()).max(1.0)
}

/// One check per random tilt: gradient against finite differences, Hessian
/// eigenvalues, and the symmetrization identity at `(s, t) = (u, |v|)` and at
/// the witness choice `t = s²/2`.
pub fn kernel_checks<R: Rng>(rho: &SpecMeasure, samples: usize, rng: &mut R) -> Result<Vec<Check>> {
    let mut checks = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = TiltParams::new(
            rng.random_range(-U_RANGE..=U_RANGE),
            rng.random_range(-V_RANGE..=V_RANGE),
        );
        let grad_err = gradient_error(rho, theta);
        let hess = cgf(rho, theta).hessian;
        let (min_eig, _) = sym2_eigenvalues(hess[0][0], hess[0][1], hess[1][1]);

        let mut identity_err: f64 = 0.0;
        for (s, t) in [(theta.u, theta.v.abs()), (theta.u, 0.5 * theta.u * theta.u)] {
            let (l, r) = symmetrized_integrand_identity_check(rho, s, t)?;
            identity_err = identity_err.max((l - r).abs() / l.abs().max(r.abs()));
        }

        let margins = [
            FD_REL_TOL - grad_err,
            min_eig - PSD_TOL,
            IDENTITY_REL_TOL - identity_err,
        ];
        checks.push(
            Check::new(
                format!("kernel/sample_{k:02} u={} v={}", theta.u, theta.v),
                rho.spec.clone(),
                "kernel",
            )
            .with_margins(margins)
            .with_verdict(margins.iter().all(|m| *m >= 0.0)),
        );
    }
    Ok(checks)
}

/// `cosh(u)·e^{−u²/2} < 1` on `n` log-spaced points of `[lo, hi]`.
///
/// Margins: the largest value of `ln cosh u − u²/2` (negated) and the
/// smallest `1 − cosh(u)e^{−u²/2}`.
pub fn cosh_inequality_check(lo: f64, hi: f64, n: usize) -> Check {
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let step = if n > 1 { (ln_hi - ln_lo) / (n - 1) as f64 } else { 0.0 };
    let (mut worst_log, mut worst_deficit) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..n {
        let u = if k + 1 == n {
            hi
        } else {
            (ln_lo + step * k as f64).exp()
        };
        worst_log = worst_log.max(ln_cosh_gauss(u));
        worst_deficit = worst_deficit.min(cosh_gauss_deficit(u));
    }
    Check::new(format!("analytic/cosh_inequality n={n} u=[{lo},{hi}]"), "", "analytic")
        .with_margins([-worst_log, worst_deficit])
        .with_verdict(worst_log < 0.0 && worst_deficit > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_checks_pass_on_symmetric_families() {
        for spec in [
            "rademacher",
            "atoms:-1=0.25,0=0.5,1=0.25",
            "uniform:a=-1,b=1,n=201",
            "gauss:mean=0,sd=1",
        ] {
            let rho = SpecMeasure::parse(spec).unwrap();
            let checks = kernel_checks(&rho, 10, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
            for c in &checks {
                assert!(c.verdict.is_pass(), "{spec}: {c:?}");
            }
        }
    }

    #[test]
    fn kernel_checks_need_symmetry() {
        let rho = SpecMeasure::parse("atoms:-1=0.1,1=0.9").unwrap();
        assert!(kernel_checks(&rho, 1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn cosh_check() {
        let c = cosh_inequality_check(1e-8, 50.0, 200);
        assert!(c.verdict.is_pass());
        // smallest deficit is at u = 1e-8: u⁴/12
        assert!((c.margins[1].0 / (1e-32 / 12.0) - 1.0).abs() < 1e-12);
    }
}
