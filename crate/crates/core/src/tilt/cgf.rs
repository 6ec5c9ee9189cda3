use serde::{Deserialize, Serialize};

use crate::measures::DiscreteMeasure;
use crate::numeric::log_sum_exp;

/// Dual variables `(u, v)` of the tilt `e^{uz + vz²}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TiltParams {
    pub u: f64,
    pub v: f64,
}

impl TiltParams {
    pub fn new(u: f64, v: f64) -> Self {
        TiltParams { u, v }
    }

    pub fn norm(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

/// Value, gradient and Hessian of `Λ` at a tilt.
///
/// The gradient is the mean of `(Z, Z²)` under the tilted law
/// `θ ∝ e^{uz+vz²} ρ`, the Hessian its covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgfEval {
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

pub fn cgf(rho: &DiscreteMeasure, theta: TiltParams) -> CgfEval {
    TiltKernel::new(rho).eval(theta)
}

/// Atom data laid out for repeated evaluation of `Λ` at many tilts.
#[derive(Debug, Clone)]
pub(crate) struct TiltKernel {
    z: Vec<f64>,
    z2: Vec<f64>,
    log_w: Vec<f64>,
}

impl TiltKernel {
    pub(crate) fn new(rho: &DiscreteMeasure) -> Self {
        let atoms = rho.atoms();
        TiltKernel {
            z: atoms.iter().map(|a| a.position).collect(),
            z2: atoms.iter().map(|a| a.position * a.position).collect(),
            log_w: atoms.iter().map(|a| a.weight.ln()).collect(),
        }
    }

    fn exponents(&self, theta: TiltParams) -> impl Iterator<Item = f64> + Clone + '_ {
        self.log_w
            .iter()
            .zip(self.z.iter().zip(&self.z2))
            .map(move |(lw, (z, z2))| lw + theta.u * z + theta.v * z2)
    }

    /// `Λ(θ)` alone.
    pub(crate) fn value(&self, theta: TiltParams) -> f64 {
        log_sum_exp(self.exponents(theta))
    }

    pub(crate) fn eval(&self, theta: TiltParams) -> CgfEval {
        let m = self.exponents(theta).fold(f64::NEG_INFINITY, f64::max);
        let probs: Vec<f64> = self.exponents(theta).map(|e| (e - m).exp()).collect();
        let total: f64 = probs.iter().sum();
        let value = m + total.ln();

        let (mut m1, mut m2) = (0.0, 0.0);
        for ((p, z), z2) in probs.iter().zip(&self.z).zip(&self.z2) {
            m1 += p * z;
            m2 += p * z2;
        }
        m1 /= total;
        m2 /= total;

        // centered second moments
        let (mut c11, mut c12, mut c22) = (0.0, 0.0, 0.0);
        for ((p, z), z2) in probs.iter().zip(&self.z).zip(&self.z2) {
            let d1 = z - m1;
            let d2 = z2 - m2;
            c11 += p * d1 * d1;
            c12 += p * d1 * d2;
            c22 += p * d2 * d2;
        }
        let (c11, c12, c22) = (c11 / total, c12 / total, c22 / total);

        CgfEval {
            value,
            gradient: [m1, m2],
            hessian: [[c11, c12], [c12, c22]],
        }
    }
}
