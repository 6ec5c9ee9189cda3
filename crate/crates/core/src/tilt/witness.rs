//! The explicit tilt `s = x/y`, `t = s²/2` and the quantities built on it.

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, SYMMETRY_TOL};

/// `(Σ ρᵢ e^{s zᵢ − t zᵢ²}, Σ ρᵢ cosh(s zᵢ) e^{−t zᵢ²})`; the two sums agree
/// for symmetric `rho`.
pub fn symmetrized_integrand_identity_check(rho: &DiscreteMeasure, s: f64, t: f64) -> Result<(f64, f64)> {
    if !rho.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::Domain(
            "the symmetrization identity needs a symmetric measure".into(),
        ));
    }
    let (mut left, mut right) = (0.0, 0.0);
    for a in rho.atoms() {
        let z = a.position;
        left += a.weight * (s * z - t * z * z).exp();
        right += a.weight * (s * z).cosh() * (-t * z * z).exp();
    }
    Ok((left, right))
}

/// `Σ ρᵢ exp(s zᵢ − s² zᵢ² / 2)` with `s = x / y`.
///
/// The exponent never exceeds 1/2, so the plain sum cannot overflow.
pub fn witness_integral(rho: &DiscreteMeasure, x: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::Domain("witness tilt needs y != 0".into()));
    }
    let s = x / y;
    Ok(rho
        .atoms()
        .iter()
        .map(|a| {
            let sz = s * a.position;
            a.weight * (sz - 0.5 * sz * sz).exp()
        })
        .sum())
}

/// `x²/(2y) − ln witness_integral(ρ, x, y)`, the dual objective evaluated at
/// the tilt `(x/y, −x²/(2y²))`; a lower bound on `I(x, y)`.
pub fn witness_bound(rho: &DiscreteMeasure, x: f64, y: f64) -> Result<f64> {
    let w = witness_integral(rho, x, y)?;
    Ok(x * x / (2.0 * y) - w.ln())
}
