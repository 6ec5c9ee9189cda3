//! `I(x, y) = sup_{(u,v)} { ux + vy − Λ(u, v) }`.
//!
//! Interior points of the moment hull are solved by damped Newton ascent on
//! the concave dual objective. On the boundary the supremum is in general
//! not attained; there the value is obtained exactly by restricting `ρ` to
//! the atoms of the supporting face:
//!
//! ```text
//! I(p) = −ln ρ(F) + I_{ρ(·|F)}(p)
//! ```
//!
//! where the face-relative transform is a one-dimensional problem along the
//! face (closed form for two atoms).

use serde::{Deserialize, Serialize};

use super::cgf::{TiltKernel, TiltParams};
use super::hull::{Location, MomentHull, Region};
use crate::measures::{DiscreteMeasure, MomentPair};
use crate::numeric::{log_sum_exp, sym2_eigenvalues};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Stop once the dual gradient norm falls below this.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Sufficient-increase constant of the backtracking search.
    pub armijo: f64,
    pub max_halvings: usize,
    /// Hessians with a larger condition number fall back to a gradient step.
    pub max_condition: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            grad_tol: 1e-10,
            max_iter: 200,
            armijo: 1e-4,
            max_halvings: 60,
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmax {
    Attained(TiltParams),
    /// The supremum is approached only as the tilt runs off to infinity.
    BoundaryDivergence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CramerResult {
    /// `I(x, y)`; `+∞` outside the moment hull.
    pub value: f64,
    pub argmax: Argmax,
    pub iterations: usize,
    pub converged: bool,
    pub region: Region,
}

impl CramerResult {
    fn outside() -> Self {
        CramerResult {
            value: f64::INFINITY,
            argmax: Argmax::BoundaryDivergence,
            iterations: 0,
            converged: true,
            region: Region::Outside,
        }
    }
}

/// Solver for the Cramér transform of a fixed reference measure; the hull
/// and the atom tables are built once and reused across points.
#[derive(Debug, Clone)]
pub struct CramerTransform {
    kernel: TiltKernel,
    hull: MomentHull,
    positions: Vec<f64>,
    log_weights: Vec<f64>,
    settings: NewtonSettings,
}

pub fn cramer_transform(rho: &DiscreteMeasure, point: MomentPair) -> CramerResult {
    CramerTransform::new(rho).eval(point)
}

impl CramerTransform {
    pub fn new(rho: &DiscreteMeasure) -> Self {
        Self::with_settings(rho, NewtonSettings::default())
    }

    pub fn with_settings(rho: &DiscreteMeasure, settings: NewtonSettings) -> Self {
        CramerTransform {
            kernel: TiltKernel::new(rho),
            hull: MomentHull::new(rho),
            positions: rho.positions().collect(),
            log_weights: rho.atoms().iter().map(|a| a.weight.ln()).collect(),
            settings,
        }
    }

    pub fn region(&self, point: MomentPair) -> Region {
        self.hull.classify(point)
    }

    /// The dual objective `θ·p − Λ(θ)`.
    pub fn objective(&self, theta: TiltParams, point: MomentPair) -> f64 {
        theta.u * point.x + theta.v * point.y - self.kernel.value(theta)
    }

    pub fn eval(&self, point: MomentPair) -> CramerResult {
        if !(point.x.is_finite() && point.y.is_finite()) {
            return CramerResult::outside();
        }
        match self.hull.locate(point) {
            Location::Outside => CramerResult::outside(),
            Location::Interior => self.newton(point),
            Location::Boundary {
                face,
                relative_interior,
            } => self.on_face(&face, relative_interior, point),
        }
    }

    fn on_face(&self, face: &[usize], relative_interior: bool, point: MomentPair) -> CramerResult {
        let (value, argmax) = if let [atom] = face {
            let argmax = if relative_interior {
                Argmax::Attained(TiltParams::default())
            } else {
                Argmax::BoundaryDivergence
            };
            (-self.log_weights[*atom], argmax)
        } else {
            let (a, b) = (face[0], face[face.len() - 1]);
            let coord = |i: usize| {
                let z = self.positions[i];
                self.hull.edge_coordinate(a, b, (z, z * z))
            };
            let ts: Vec<f64> = face.iter().map(|&i| coord(i)).collect();
            let lws: Vec<f64> = face.iter().map(|&i| self.log_weights[i]).collect();
            let target = self.hull.edge_coordinate(a, b, (point.x, point.y));
            let (value, lambda) = cramer_1d(&ts, &lws, target, &self.settings);
            let argmax = match lambda {
                Some(l) if relative_interior => {
                    let (dx, dy) = self.hull.edge_direction(a, b);
                    Argmax::Attained(TiltParams::new(l * dx, l * dy))
                }
                _ => Argmax::BoundaryDivergence,
            };
            (value, argmax)
        };
        CramerResult {
            value: value.max(0.0),
            argmax,
            iterations: 0,
            converged: true,
            region: Region::Boundary,
        }
    }

    /// Backtracking (Armijo) search along the ascent direction `d`, whose
    /// length is first capped at `10 (1 + ‖θ‖)`: where the tilted law sits
    /// almost entirely on one atom the Hessian is tiny and the raw Newton step
    /// is astronomically long.
    fn line_search(
        &self,
        theta: TiltParams,
        d: [f64; 2],
        grad: [f64; 2],
        p: MomentPair,
        f0: f64,
        noise: f64,
    ) -> Option<TiltParams> {
        let s = &self.settings;
        let cap = 10.0 * (1.0 + theta.norm());
        let len = d[0].hypot(d[1]);
        let d = if len > cap {
            [d[0] * cap / len, d[1] * cap / len]
        } else {
            d
        };
        let slope = grad[0] * d[0] + grad[1] * d[1];
        let mut alpha = 1.0;
        for _ in 0..s.max_halvings {
            if alpha * slope <= noise {
                return None;
            }
            let cand = TiltParams::new(theta.u + alpha * d[0], theta.v + alpha * d[1]);
            if self.objective(cand, p) >= f0 + s.armijo * alpha * slope {
                return Some(cand);
            }
            alpha *= 0.5;
        }
        None
    }

    fn newton(&self, p: MomentPair) -> CramerResult {
        let s = &self.settings;
        let mut theta = TiltParams::default();
        let mut last_grad = f64::INFINITY;
        for iter in 0..s.max_iter {
            let e = self.kernel.eval(theta);
            let g = [p.x - e.gradient[0], p.y - e.gradient[1]];
            let gn = g[0].hypot(g[1]);
            last_grad = gn;
            let f0 = theta.u * p.x + theta.v * p.y - e.value;
            if gn <= s.grad_tol {
                return CramerResult {
                    value: f0.max(0.0),
                    argmax: Argmax::Attained(theta),
                    iterations: iter,
                    converged: true,
                    region: Region::Interior,
                };
            }

            let [[a, b], [_, c]] = e.hessian;
            let (lmin, lmax) = sym2_eigenvalues(a, b, c);
            // Ill-conditioned Hessians (a tilted atom mass underflowing) get a
            // Levenberg shift that caps the condition number; plain gradient
            // ascent there crawls along a narrow ridge.
            let newton_ok = lmax > 0.0;
            let d = if newton_ok {
                let shift = if lmin > 0.0 && lmax / lmin <= s.max_condition {
                    0.0
                } else {
                    lmax / s.max_condition
                };
                let (a, c) = (a + shift, c + shift);
                let det = a * c - b * b;
                [(c * g[0] - b * g[1]) / det, (a * g[1] - b * g[0]) / det]
            } else {
                g
            };
            // gains below this are indistinguishable from round-off in f
            let noise = 64.0 * f64::EPSILON * (1.0 + f0.abs() + e.value.abs());
            let mut next = self.line_search(theta, d, g, p, f0, noise);
            if next.is_none() && newton_ok {
                next = self.line_search(theta, g, g, p, f0, noise);
            }
            theta = match next {
                Some(t) => t,
                None => {
                    // Near the optimum the predicted increase drops below the
                    // round-off of the objective; accept the full Newton step
                    // if it still shrinks the gradient.
                    let cand = TiltParams::new(theta.u + d[0], theta.v + d[1]);
                    let ec = self.kernel.eval(cand);
                    let gc = (p.x - ec.gradient[0]).hypot(p.y - ec.gradient[1]);
                    if gc < gn {
                        cand
                    } else {
                        let value = self.objective(theta, p);
                        return CramerResult {
                            value: value.max(0.0),
                            argmax: Argmax::Attained(theta),
                            iterations: iter + 1,
                            converged: false,
                            region: Region::Interior,
                        };
                    }
                }
            };
        }
        let e = self.kernel.eval(theta);
        let gn = (p.x - e.gradient[0]).hypot(p.y - e.gradient[1]);
        let value = theta.u * p.x + theta.v * p.y - e.value;
        CramerResult {
            value: value.max(0.0),
            argmax: Argmax::Attained(theta),
            iterations: s.max_iter,
            converged: gn <= s.grad_tol || last_grad <= s.grad_tol,
            region: Region::Interior,
        }
    }
}

/// One-dimensional transform `sup_λ { λ·t − ln Σ wᵢ e^{λ tᵢ} }` for sorted
/// coordinates `ts` and unnormalized log-weights. Returns the value and the
/// maximizer, `None` when the target sits at an end of the support.
fn cramer_1d(ts: &[f64], log_w: &[f64], target: f64, s: &NewtonSettings) -> (f64, Option<f64>) {
    let n = ts.len();
    let scale = (ts[n - 1] - ts[0]).max(f64::MIN_POSITIVE);
    let end_tol = 1e-14 * scale.max(1.0);
    if target <= ts[0] + end_tol {
        return (-log_w[0], None);
    }
    if target >= ts[n - 1] - end_tol {
        return (-log_w[n - 1], None);
    }
    if n == 2 {
        let span = ts[1] - ts[0];
        let fa = (ts[1] - target) / span;
        let fb = (target - ts[0]) / span;
        let value = fa * (fa.ln() - log_w[0]) + fb * (fb.ln() - log_w[1]);
        let lambda = ((fb / fa).ln() - (log_w[1] - log_w[0])) / span;
        return (value, Some(lambda));
    }

    let objective = |l: f64| l * target - log_sum_exp(ts.iter().zip(log_w).map(|(t, lw)| lw + l * t));
    let mut lambda = 0.0;
    for _ in 0..s.max_iter {
        let exps: Vec<f64> = ts.iter().zip(log_w).map(|(t, lw)| lw + lambda * t).collect();
        let m = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let p: Vec<f64> = exps.iter().map(|e| (e - m).exp()).collect();
        let total: f64 = p.iter().sum();
        let mean = p.iter().zip(ts).map(|(p, t)| p * t).sum::<f64>() / total;
        let var = p.iter().zip(ts).map(|(p, t)| p * (t - mean) * (t - mean)).sum::<f64>() / total;
        let g = target - mean;
        if g.abs() <= s.grad_tol {
            break;
        }
        let d = if var > 0.0 { g / var } else { g };
        let f0 = objective(lambda);
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..s.max_halvings {
            let cand = lambda + alpha * d;
            if objective(cand) >= f0 + s.armijo * alpha * g * d {
                lambda = cand;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (objective(lambda), Some(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilt::cgf;

    fn three_atom() -> DiscreteMeasure {
        DiscreteMeasure::new([(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]).unwrap()
    }

    /// For three atoms the moment constraints pin down a unique law ν, and
    /// `I(x, y) = H(ν|ρ)`.
    fn three_atom_rate(x: f64, y: f64) -> f64 {
        let (pp, pm) = ((y + x) / 2.0, (y - x) / 2.0);
        let p0 = 1.0 - y;
        pp * (pp / 0.25).ln() + pm * (pm / 0.25).ln() + p0 * (p0 / 0.5).ln()
    }

    #[test]
    fn value_at_own_moments_is_zero() {
        let rho = three_atom();
        let r = cramer_transform(&rho, rho.moments());
        assert_eq!(r.value, 0.0);
        assert_eq!(r.argmax, Argmax::Attained(TiltParams::default()));
        assert!(r.converged);

        let rad = DiscreteMeasure::rademacher();
        let r = cramer_transform(&rad, rad.moments());
        assert_eq!(r.value, 0.0);
        assert_eq!(r.argmax, Argmax::Attained(TiltParams::default()));
    }

    #[test]
    fn rademacher_boundary_matches_coin_entropy() {
        let rad = DiscreteMeasure::rademacher();
        let r = cramer_transform(&rad, MomentPair::new(0.5, 1.0));
        let expected = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((r.value - expected).abs() < 1e-15);
        assert_eq!(r.region, Region::Boundary);
        // the segment hull has no interior, so the sup is attained at u = atanh(x)
        match r.argmax {
            Argmax::Attained(t) => assert!((t.u - 0.5f64.atanh()).abs() < 1e-14 && t.v.abs() < 1e-14),
            other => panic!("{other:?}"),
        }
        assert_eq!(cramer_transform(&rad, MomentPair::new(0.0, 2.0)).value, f64::INFINITY);
        let end = cramer_transform(&rad, MomentPair::new(1.0, 1.0));
        assert!((end.value - 2f64.ln()).abs() < 1e-15);
        assert_eq!(end.argmax, Argmax::BoundaryDivergence);
    }

    #[test]
    fn interior_newton_matches_unique_law() {
        let rho = three_atom();
        let t = CramerTransform::new(&rho);
        for (x, y) in [(0.1, 0.6), (-0.4, 0.5), (0.0, 0.9), (0.7, 0.8), (0.05, 0.06)] {
            let r = t.eval(MomentPair::new(x, y));
            assert!(r.converged, "({x},{y})");
            assert!(
                (r.value - three_atom_rate(x, y)).abs() < 1e-12,
                "({x},{y}): {}",
                r.value
            );
            let Argmax::Attained(theta) = r.argmax else { panic!() };
            let g = cgf(&rho, theta).gradient;
            assert!((g[0] - x).hypot(g[1] - y) <= 1e-8);
        }
    }

    #[test]
    fn triangle_edges_use_face_restriction() {
        let rho = three_atom();
        // lower edge between (0,0) and (1,1): ν = (0, 1−x, x)
        let r = cramer_transform(&rho, MomentPair::new(0.3, 0.3));
        let expected = 0.7 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.25).ln();
        assert!((r.value - expected).abs() < 1e-14);
        assert_eq!(r.argmax, Argmax::BoundaryDivergence);
        // upper edge y = 1: ν = ((1−x)/2, 0, (1+x)/2)
        let r = cramer_transform(&rho, MomentPair::new(0.2, 1.0));
        let expected = 0.4 * (0.4f64 / 0.25).ln() + 0.6 * (0.6f64 / 0.25).ln();
        assert!((r.value - expected).abs() < 1e-14);
        // vertex (0,0)
        let r = cramer_transform(&rho, MomentPair::new(0.0, 0.0));
        assert!((r.value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn near_boundary_interior_is_continuous_with_face_value() {
        let rho = three_atom();
        let on = cramer_transform(&rho, MomentPair::new(0.3, 0.3)).value;
        let near = cramer_transform(&rho, MomentPair::new(0.3, 0.3 + 1e-7));
        assert_eq!(near.region, Region::Interior);
        assert!((near.value - three_atom_rate(0.3, 0.3 + 1e-7)).abs() < 1e-9);
        assert!((near.value - on).abs() < 1e-5);
    }

    #[test]
    fn one_dimensional_solver_handles_many_collinear_atoms() {
        // three equally weighted points at 0, 1, 2: at target 1 the sup is at λ = 0
        let lw = [(1.0f64 / 3.0).ln(); 3];
        let s = NewtonSettings::default();
        let (v, l) = cramer_1d(&[0.0, 1.0, 2.0], &lw, 1.0, &s);
        assert!(v.abs() < 1e-14);
        assert!(l.unwrap().abs() < 1e-12);
        // against a fine scan of λ
        let (v, _) = cramer_1d(&[0.0, 1.0, 2.0], &lw, 1.6, &s);
        let scan = (-20000..20000)
            .map(|k| {
                let l = k as f64 * 1e-3;
                l * 1.6 - ((1.0 + l.exp() + (2.0 * l).exp()) / 3.0).ln()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((v - scan).abs() < 1e-6 && v >= scan - 1e-12);
        let (v, l) = cramer_1d(&[0.0, 1.0, 2.0], &lw, 2.0, &s);
        assert!((v - 3f64.ln()).abs() < 1e-15 && l.is_none());
    }

    #[test]
    fn single_atom_reference() {
        let rho = DiscreteMeasure::dirac(1.5).unwrap();
        assert_eq!(cramer_transform(&rho, MomentPair::new(1.5, 2.25)).value, 0.0);
        assert_eq!(cramer_transform(&rho, MomentPair::new(1.5, 2.0)).value, f64::INFINITY);
    }
}
