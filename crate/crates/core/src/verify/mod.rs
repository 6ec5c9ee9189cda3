//! End-to-end checks of the entropy lower bound and of each inequality used
//! to derive it:
//!
//! ```text
//! F(μ) < I(m₁(μ), m₂(μ)) ≤ H(μ|ρ)        (ρ symmetric, μ ≠ ρ)
//! ```
//!
//! where `F(μ) = m₁²/(2m₂)` and `I` is the Cramér transform of `(Z, Z²)`
//! under `ρ`.

mod grid;
mod kernel;
mod report;
mod search;
mod suite;

pub use grid::{check_proposition, evaluate_grid, grid_minimizer, sweep_min_g, GridRow, MomentGrid};
pub use kernel::{cosh_inequality_check, kernel_checks};
pub use report::{Check, Quantities, Summary, Verdict, VerificationReport};
pub use search::{family_rng, random_reweightings, search_counterexample_asymmetric, suite_random_mus, tilted};
pub use suite::{run_suite, GridConfig, SuiteConfig};

use serde::{Deserialize, Serialize};

use crate::entropy::{jensen_bound_from_moments, relative_entropy};
use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, SYMMETRY_TOL};
use crate::numeric::ExtReal;
use crate::tilt::{witness_bound, CramerTransform};

/// Slack allowed on the non-strict steps of the chain.
pub const CHAIN_TOL: f64 = 1e-9;
/// Minimum margin demanded of strict inequalities.
pub const STRICT_MARGIN: f64 = 1e-12;
/// Tolerance for "is the Dirac mass at 0".
pub const DIRAC_TOL: f64 = 1e-12;
/// Two measures whose weights agree within this are treated as equal.
pub const SAME_MEASURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    MuEqualsRho,
    ZeroFirstMoment,
    HInfinite,
    Generic,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::MuEqualsRho => "mu_equals_rho",
            CaseLabel::ZeroFirstMoment => "zero_first_moment",
            CaseLabel::HInfinite => "h_infinite",
            CaseLabel::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck {
    pub h: f64,
    pub i_at_moments: f64,
    pub f: f64,
    /// Witness bound at the moments of μ.
    pub w: f64,
    /// `(H − I, I − F)`.
    pub margins: (f64, f64),
    pub verdict: Verdict,
    pub case_label: CaseLabel,
}

impl TheoremCheck {
    pub fn to_check(&self, name: impl Into<String>, rho: &str, mu: &str) -> Check {
        Check::new(name, rho, self.case_label.as_str())
            .with_mu(mu)
            .with_quantities(Quantities {
                h: Some(ExtReal(self.h)),
                i: Some(ExtReal(self.i_at_moments)),
                f: Some(self.f),
                w: Some(self.w),
            })
            .with_margins([self.margins.0, self.margins.1])
            .with_verdict(self.verdict.is_pass())
    }
}

/// Hypotheses shared by the theorem and proposition checks.
pub fn require_symmetric_reference(rho: &DiscreteMeasure) -> Result<()> {
    if !rho.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::Precondition("reference measure is not symmetric".into()));
    }
    if rho.is_dirac_at_zero(DIRAC_TOL) {
        return Err(Error::Precondition("reference measure is the Dirac mass at 0".into()));
    }
    Ok(())
}

pub fn check_theorem(mu: &DiscreteMeasure, rho: &DiscreteMeasure) -> Result<TheoremCheck> {
    check_theorem_with(mu, rho, &CramerTransform::new(rho))
}

/// [`check_theorem`] reusing a prepared transform for `rho`.
pub fn check_theorem_with(
    mu: &DiscreteMeasure,
    rho: &DiscreteMeasure,
    cramer: &CramerTransform,
) -> Result<TheoremCheck> {
    require_symmetric_reference(rho)?;
    if mu.is_dirac_at_zero(DIRAC_TOL) {
        return Err(Error::Precondition("mu is the Dirac mass at 0".into()));
    }
    let h = relative_entropy(mu, rho).value;
    let m = mu.moments();
    let f = jensen_bound_from_moments(m.x, m.y);
    let i = cramer.eval(m).value;
    let w = witness_bound(rho, m.x, m.y)?;

    let case_label = if mu.approx_eq(rho, SAME_MEASURE_TOL) {
        CaseLabel::MuEqualsRho
    } else if m.x.abs() <= DIRAC_TOL {
        CaseLabel::ZeroFirstMoment
    } else if h == f64::INFINITY {
        CaseLabel::HInfinite
    } else {
        CaseLabel::Generic
    };

    let chain = f <= i + CHAIN_TOL && i <= h + CHAIN_TOL;
    let ok = match case_label {
        CaseLabel::MuEqualsRho => chain && (h - f).abs() <= STRICT_MARGIN && h <= STRICT_MARGIN,
        CaseLabel::HInfinite => chain && f <= 0.5,
        CaseLabel::ZeroFirstMoment | CaseLabel::Generic => chain && h >= f + STRICT_MARGIN,
    };
    Ok(TheoremCheck {
        h,
        i_at_moments: i,
        f,
        w,
        margins: (report::slack(h, i), report::slack(i, f)),
        verdict: Verdict::from_bool(ok),
        case_label,
    })
}
