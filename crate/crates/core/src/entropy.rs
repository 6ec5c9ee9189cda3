//! Relative entropy between discrete measures and the lower-bound
//! functionals compared against it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, MERGE_TOL};
use crate::numeric::log_sum_exp;

/// `H(μ|ρ)`: finite and non-negative when μ ≪ ρ, `+∞` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub value: f64,
    pub absolutely_continuous: bool,
}

impl EntropyResult {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `Σ μᵢ ln(μᵢ/ρᵢ)` over the atoms of `mu`, or `+∞` if some atom of `mu`
/// has no counterpart in `rho` within [`MERGE_TOL`]. Atoms of `rho` outside
/// the support of `mu` contribute nothing.
pub fn relative_entropy(mu: &DiscreteMeasure, rho: &DiscreteMeasure) -> EntropyResult {
    let mut sum = 0.0;
    for a in mu.atoms() {
        match rho.find_atom(a.position, MERGE_TOL) {
            Some(j) => sum += a.weight * (a.weight / rho.atoms()[j].weight).ln(),
            None => {
                return EntropyResult {
                    value: f64::INFINITY,
                    absolutely_continuous: false,
                };
            }
        }
    }
    EntropyResult {
        value: sum.max(0.0),
        absolutely_continuous: true,
    }
}

/// `F(μ) = m₁² / (2 m₂)`, which lies in `[0, 1/2]`.
pub fn jensen_bound(mu: &DiscreteMeasure) -> Result<f64> {
    if mu.is_dirac_at_zero(1e-12) {
        return Err(Error::Domain("F is 0/0 for the Dirac mass at 0".into()));
    }
    let m = mu.moments();
    Ok(jensen_bound_from_moments(m.x, m.y))
}

/// `F` from the raw moments. An infinite second moment yields 0, the value
/// the bound takes for laws with finite mean but infinite variance.
pub fn jensen_bound_from_moments(m1: f64, m2: f64) -> f64 {
    if m2 == f64::INFINITY {
        return 0.0;
    }
    (m1 * m1 / (2.0 * m2)).min(0.5)
}

/// A real function tabulated at finitely many positions; lookups match
/// positions within [`MERGE_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFn {
    points: Vec<(f64, f64)>,
}

impl TabulatedFn {
    pub fn new(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut points: Vec<(f64, f64)> = points.into_iter().collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        TabulatedFn { points }
    }

    /// Tabulate `f` on the union of the supports of the given measures.
    pub fn on_supports<'a>(
        measures: impl IntoIterator<Item = &'a DiscreteMeasure>,
        mut f: impl FnMut(f64) -> f64,
    ) -> Self {
        Self::new(
            measures
                .into_iter()
                .flat_map(|m| m.positions().collect::<Vec<_>>())
                .map(|z| (z, f(z)))
                .collect::<Vec<_>>(),
        )
    }

    pub fn get(&self, z: f64) -> Option<f64> {
        let i = self.points.partition_point(|p| p.0 < z);
        [i.wrapping_sub(1), i]
            .into_iter()
            .filter_map(|j| self.points.get(j))
            .filter(|p| (p.0 - z).abs() <= MERGE_TOL)
            .min_by(|a, b| (a.0 - z).abs().total_cmp(&(b.0 - z).abs()))
            .map(|p| p.1)
    }

    fn require(&self, z: f64) -> Result<f64> {
        match self.get(z) {
            Some(v) if v.is_finite() => Ok(v),
            Some(v) => Err(Error::Domain(format!("phi({z}) = {v} is not finite"))),
            None => Err(Error::Domain(format!("phi is not tabulated at {z}"))),
        }
    }
}

/// `∫Φ dμ − ln ∫e^Φ dρ`, a lower bound on `H(μ|ρ)` for every `Φ`.
pub fn dv_lower_bound(mu: &DiscreteMeasure, rho: &DiscreteMeasure, phi: &TabulatedFn) -> Result<f64> {
    let mut mean = 0.0;
    for a in mu.atoms() {
        mean += a.weight * phi.require(a.position)?;
    }
    let exponents = rho
        .atoms()
        .iter()
        .map(|a| Ok(a.weight.ln() + phi.require(a.position)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean - log_sum_exp(exponents.iter().copied()))
}

/// `(m₁(μ) − m)² / (2v)` with `m` the mean of `rho`. The caller vouches for
/// `rho` being sub-Gaussian with variance proxy `v_sg`; this is not checked.
pub fn blm_bound(mu: &DiscreteMeasure, rho: &DiscreteMeasure, v_sg: f64) -> Result<f64> {
    if !(v_sg.is_finite() && v_sg > 0.0) {
        return Err(Error::Domain(format!("variance proxy must be positive, got {v_sg}")));
    }
    let d = mu.moments().x - rho.moments().x;
    Ok(d * d / (2.0 * v_sg))
}
