//! Grid sweeps of `G(x, y) = I(x, y) − x²/(2y)`.

use std::time::Instant;

use rayon::prelude::*;

use super::report::{Check, Quantities, VerificationReport};
use super::{require_symmetric_reference, CHAIN_TOL, STRICT_MARGIN};
use crate::error::Result;
use crate::measures::{DiscreteMeasure, MomentPair, SpecMeasure};
use crate::numeric::ExtReal;
use crate::tilt::{witness_bound, CramerTransform, Region};

/// Below this `|x/y|` the strict margin of the proposition is only required
/// to be positive.
pub const STRICT_RATIO_GATE: f64 = 1e-3;
/// Lower floor on `G` anywhere.
pub const MIN_G_FLOOR: f64 = -1e-9;
/// Upper bound on the grid minimum of `G`.
pub const MIN_G_CEIL: f64 = 1e-8;

/// A rectangular grid of candidate moment pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// `n` points symmetric about `center`, spanning `center ± half`. The middle
/// point of an odd count is exactly `center`.
fn centered(center: f64, half: f64, n: usize) -> Vec<f64> {
    if n <= 1 || half == 0.0 {
        return vec![center];
    }
    let m = (n - 1) as f64;
    (0..n).map(|k| center + half * ((2.0 * k as f64 - m) / m)).collect()
}

fn spacing(v: &[f64]) -> f64 {
    if v.len() < 2 {
        0.0
    } else {
        (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
    }
}

impl MomentGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        MomentGrid { xs, ys }
    }

    /// `x ∈ [−x_max, x_max]` with `nx` points, `y ∈ (0, y_max]` with `ny`
    /// points `y_max·j/ny`.
    pub fn rectangular(x_max: f64, y_max: f64, nx: usize, ny: usize) -> Self {
        let ys = (1..=ny.max(1)).map(|j| y_max * j as f64 / ny.max(1) as f64).collect();
        MomentGrid {
            xs: centered(0.0, x_max, nx),
            ys,
        }
    }

    /// A grid spanning the fraction `shrink` of the moment hull's bounding box:
    /// `x ∈ ±shrink·max|z|` and `y` over the central `shrink` fraction of
    /// `[min z², max z²]`.
    pub fn hull_interior(rho: &DiscreteMeasure, nx: usize, ny: usize, shrink: f64) -> Self {
        let (x_hull, y_lo, y_hi) = hull_box(rho);
        MomentGrid {
            xs: centered(0.0, shrink * x_hull, nx),
            ys: centered(0.5 * (y_lo + y_hi), 0.5 * shrink * (y_hi - y_lo), ny),
        }
    }

    /// A grid whose central node is exactly `(0, m₂(ρ))`, the location of the
    /// global minimum of `G`. The `y` half-range is `shrink` times the
    /// distance from `m₂` to the nearer end of `[min z², max z²]`; the `x`
    /// range is limited to where `y ≥ x²` can hold.
    pub fn centered_on_moments(rho: &DiscreteMeasure, nx: usize, ny: usize, shrink: f64) -> Self {
        let (x_hull, y_lo, y_hi) = hull_box(rho);
        let m2 = rho.moments().y;
        let half_y = shrink * (m2 - y_lo).min(y_hi - m2).max(0.0);
        let ys = centered(m2, half_y, ny);
        let y_top = ys[ys.len() - 1];
        MomentGrid {
            xs: centered(0.0, shrink * x_hull.min(y_top.sqrt()), nx),
            ys,
        }
    }

    pub fn x_spacing(&self) -> f64 {
        spacing(&self.xs)
    }

    pub fn y_spacing(&self) -> f64 {
        spacing(&self.ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn hull_box(rho: &DiscreteMeasure) -> (f64, f64, f64) {
    let x_hull = rho.positions().map(f64::abs).fold(0.0, f64::max);
    let sq = rho.positions().map(|z| z * z);
    let y_lo = sq.clone().fold(f64::INFINITY, f64::min);
    let y_hi = sq.fold(0.0, f64::max);
    (x_hull, y_lo, y_hi)
}

/// One evaluated grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
    pub region: Region,
    /// `I(x, y)`.
    pub i: f64,
    /// `x²/(2y)`; NaN when `y = 0`.
    pub bound: f64,
    /// Witness bound, `None` when `y = 0`.
    pub w: Option<f64>,
    /// `I − x²/(2y)`.
    pub g: f64,
    pub converged: bool,
}

impl GridRow {
    pub fn realizable(&self) -> bool {
        self.region != Region::Outside
    }
}

/// Evaluate `I`, `x²/(2y)` and the witness bound at every node, row-major in
/// `(ix, iy)`. Nodes are solved in parallel; the output order is fixed.
pub fn evaluate_grid(rho: &DiscreteMeasure, grid: &MomentGrid) -> Vec<GridRow> {
    let cramer = CramerTransform::new(rho);
    let nodes: Vec<(usize, usize)> = (0..grid.xs.len())
        .flat_map(|ix| (0..grid.ys.len()).map(move |iy| (ix, iy)))
        .collect();
    nodes
        .into_par_iter()
        .map(|(ix, iy)| {
            let (x, y) = (grid.xs[ix], grid.ys[iy]);
            let r = cramer.eval(MomentPair::new(x, y));
            let (bound, w) = if y == 0.0 {
                (f64::NAN, None)
            } else {
                (x * x / (2.0 * y), witness_bound(rho, x, y).ok())
            };
            GridRow {
                ix,
                iy,
                x,
                y,
                region: r.region,
                i: r.value,
                bound,
                w,
                g: r.value - bound,
                converged: r.converged,
            }
        })
        .collect()
}

fn node_name(kind: &str, row: &GridRow) -> String {
    format!("{kind}/{:02}_{:02} x={} y={}", row.ix, row.iy, row.x, row.y)
}

fn row_quantities(row: &GridRow) -> Quantities {
    Quantities {
        h: None,
        i: Some(ExtReal(row.i)),
        f: (!row.bound.is_nan()).then_some(row.bound),
        w: row.w,
    }
}

/// Verdict of the proposition at one node: `I > x²/(2y)` for `x ≠ 0`,
/// with margin `1e-12` once `|x/y| ≥ 1e-3`, and `I ≥ W − 1e-9`.
pub(crate) fn proposition_row_check(row: &GridRow, rho_spec: &str) -> Check {
    let base = Check::new(node_name("proposition", row), rho_spec, "");
    if !row.realizable() {
        // I = +∞ exceeds any finite bound
        return Check {
            case: "vacuous".into(),
            ..base
        }
        .with_quantities(row_quantities(row))
        .with_margins([f64::INFINITY])
        .with_verdict(true);
    }
    if row.y == 0.0 || row.x == 0.0 {
        // only I ≥ 0 = x²/(2y) is claimed here
        return Check {
            case: "x_zero".into(),
            ..base
        }
        .with_quantities(row_quantities(row))
        .with_margins([row.i])
        .with_verdict(row.i >= -STRICT_MARGIN);
    }
    let gate = if (row.x / row.y).abs() >= STRICT_RATIO_GATE {
        STRICT_MARGIN
    } else {
        0.0
    };
    let w = row.w.unwrap_or(f64::NEG_INFINITY);
    let ok = row.g > gate && row.i >= w - CHAIN_TOL;
    let case = if row.converged {
        "proposition"
    } else {
        "proposition_unconverged"
    };
    Check {
        case: case.into(),
        ..base
    }
    .with_quantities(row_quantities(row))
    .with_margins([row.g, row.i - w])
    .with_verdict(ok)
}

/// `I(x, y) > x²/(2y)` at every realizable node with `x, y ≠ 0`.
pub fn check_proposition(rho: &SpecMeasure, grid: &MomentGrid) -> Result<VerificationReport> {
    require_symmetric_reference(rho)?;
    let start = Instant::now();
    let rows = evaluate_grid(rho, grid);
    let per_node = start.elapsed() / rows.len().max(1) as u32;
    let checks = rows
        .iter()
        .map(|r| proposition_row_check(r, &rho.spec).timed(per_node))
        .collect();
    Ok(VerificationReport::new("proposition", 0, checks))
}

/// The realizable node with the smallest `G`; ties resolve to the earliest.
pub fn grid_minimizer(rows: &[GridRow]) -> Option<&GridRow> {
    rows.iter()
        .filter(|r| r.realizable() && r.g.is_finite())
        .fold(None, |best: Option<&GridRow>, r| match best {
            Some(b) if b.g <= r.g => Some(b),
            _ => Some(r),
        })
}

/// Locate the grid minimum of `G` and compare it with `(0, m₂(ρ))`.
pub fn sweep_min_g(rho: &SpecMeasure, grid: &MomentGrid) -> Result<VerificationReport> {
    require_symmetric_reference(rho)?;
    let start = Instant::now();
    let rows = evaluate_grid(rho, grid);
    let per_node = start.elapsed() / rows.len().max(1) as u32;
    Ok(VerificationReport::new(
        "min_g",
        0,
        min_g_checks(rho, grid, &rows, per_node),
    ))
}

pub(crate) fn min_g_checks(
    rho: &SpecMeasure,
    grid: &MomentGrid,
    rows: &[GridRow],
    per_node: std::time::Duration,
) -> Vec<Check> {
    let mut checks: Vec<Check> = rows
        .iter()
        .map(|row| {
            let base = Check::new(node_name("min_g", row), rho.spec.clone(), "");
            if !row.realizable() {
                Check {
                    case: "vacuous".into(),
                    ..base
                }
                .with_quantities(row_quantities(row))
                .with_margins([f64::INFINITY])
            } else {
                Check {
                    case: "min_g".into(),
                    ..base
                }
                .with_quantities(row_quantities(row))
                .with_margins([row.g - MIN_G_FLOOR])
                .with_verdict(row.g >= MIN_G_FLOOR)
            }
            .timed(per_node)
        })
        .collect();

    let m2 = rho.moments().y;
    let summary = match grid_minimizer(rows) {
        Some(best) => {
            let dx = grid.x_spacing() + STRICT_MARGIN - best.x.abs();
            let dy = grid.y_spacing() + STRICT_MARGIN - (best.y - m2).abs();
            let slack = [MIN_G_CEIL - best.g, best.g - MIN_G_FLOOR, dx, dy];
            Check::new(
                format!("min_g/minimizer x={} y={}", best.x, best.y),
                rho.spec.clone(),
                "min_g_minimizer",
            )
            .with_quantities(row_quantities(best))
            .with_margins(slack)
            .with_verdict(slack.iter().all(|s| *s >= 0.0))
        }
        None => Check::new("min_g/minimizer", rho.spec.clone(), "min_g_minimizer").with_verdict(false),
    };
    checks.push(summary);
    checks
}
