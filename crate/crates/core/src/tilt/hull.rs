//! Convex hull of the moment curve points `(z, z²)` over the support of a
//! measure, with tolerance-aware point location.
//!
//! Every point of a parabola is extreme, so each atom is a hull vertex and
//! every face carries at most two atoms; the code does not rely on this and
//! works for any planar point set.

use serde::{Deserialize, Serialize};

use crate::measures::{DiscreteMeasure, MomentPair};

/// Distance below which a point is considered to lie on the hull boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interior,
    Boundary,
    Outside,
}

/// Result of locating a point, with the supporting face for boundary points.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Location {
    Outside,
    Interior,
    Boundary {
        /// Indices (into the measure's atoms) of the points on the face.
        face: Vec<usize>,
        /// The face is the whole hull and the point is in its relative
        /// interior. Only possible when the hull has empty interior.
        relative_interior: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pt {
    x: f64,
    y: f64,
}

impl Pt {
    fn sub(self, o: Pt) -> Pt {
        Pt {
            x: self.x - o.x,
            y: self.y - o.y,
        }
    }
    fn cross(self, o: Pt) -> f64 {
        self.x * o.y - self.y * o.x
    }
    fn dot(self, o: Pt) -> f64 {
        self.x * o.x + self.y * o.y
    }
    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone)]
pub struct MomentHull {
    points: Vec<Pt>,
    /// Counter-clockwise hull vertices as indices into `points`.
    vertices: Vec<usize>,
    tol: f64,
}

impl MomentHull {
    pub fn new(rho: &DiscreteMeasure) -> Self {
        Self::from_points(rho.positions().map(|z| (z, z * z)), BOUNDARY_TOL)
    }

    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>, tol: f64) -> Self {
        let points: Vec<Pt> = points.into_iter().map(|(x, y)| Pt { x, y }).collect();
        let vertices = monotone_chain(&points);
        MomentHull { points, vertices, tol }
    }

    /// Number of hull vertices (1: a point, 2: a segment, ≥3: a polygon).
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_interior(&self) -> bool {
        self.vertices.len() >= 3
    }

    pub fn classify(&self, p: MomentPair) -> Region {
        match self.locate(p) {
            Location::Outside => Region::Outside,
            Location::Interior => Region::Interior,
            Location::Boundary { .. } => Region::Boundary,
        }
    }

    pub(crate) fn locate(&self, p: MomentPair) -> Location {
        let p = Pt { x: p.x, y: p.y };
        let tol = self.tol;
        match self.vertices.len() {
            0 => Location::Outside,
            1 => {
                let v = self.vertices[0];
                if p.sub(self.points[v]).norm() <= tol {
                    Location::Boundary {
                        face: vec![v],
                        relative_interior: true,
                    }
                } else {
                    Location::Outside
                }
            }
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                if self.segment_distance(a, b, p) > tol {
                    return Location::Outside;
                }
                for v in [a, b] {
                    if p.sub(self.points[v]).norm() <= tol {
                        return Location::Boundary {
                            face: vec![v],
                            relative_interior: false,
                        };
                    }
                }
                Location::Boundary {
                    face: self.points_on_segment(a, b),
                    relative_interior: true,
                }
            }
            n => {
                let mut best = (f64::INFINITY, 0usize);
                for i in 0..n {
                    let a = self.points[self.vertices[i]];
                    let b = self.points[self.vertices[(i + 1) % n]];
                    let e = b.sub(a);
                    let d = e.cross(p.sub(a)) / e.norm();
                    if d < best.0 {
                        best = (d, i);
                    }
                }
                let (d, i) = best;
                if d < -tol {
                    return Location::Outside;
                }
                if d > tol {
                    return Location::Interior;
                }
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                for v in [a, b] {
                    if p.sub(self.points[v]).norm() <= tol {
                        return Location::Boundary {
                            face: vec![v],
                            relative_interior: false,
                        };
                    }
                }
                // between the edge's endpoints?
                let e = self.points[b].sub(self.points[a]);
                let t = e.dot(p.sub(self.points[a])) / e.norm();
                if t < -tol || t > e.norm() + tol {
                    return Location::Outside;
                }
                Location::Boundary {
                    face: self.points_on_segment(a, b),
                    relative_interior: false,
                }
            }
        }
    }

    /// Coordinate of `p` along the edge `a → b`, measured from `a`.
    pub(crate) fn edge_coordinate(&self, a: usize, b: usize, p: (f64, f64)) -> f64 {
        let e = self.points[b].sub(self.points[a]);
        e.dot(Pt { x: p.0, y: p.1 }.sub(self.points[a])) / e.norm()
    }

    /// Unit direction of the edge `a → b`.
    pub(crate) fn edge_direction(&self, a: usize, b: usize) -> (f64, f64) {
        let e = self.points[b].sub(self.points[a]);
        let n = e.norm();
        (e.x / n, e.y / n)
    }

    fn segment_distance(&self, a: usize, b: usize, p: Pt) -> f64 {
        let (pa, pb) = (self.points[a], self.points[b]);
        let e = pb.sub(pa);
        let len2 = e.dot(e);
        let t = (e.dot(p.sub(pa)) / len2).clamp(0.0, 1.0);
        let proj = Pt {
            x: pa.x + t * e.x,
            y: pa.y + t * e.y,
        };
        p.sub(proj).norm()
    }

    /// All points within tolerance of the closed segment `a–b`, ordered by
    /// coordinate along it.
    fn points_on_segment(&self, a: usize, b: usize) -> Vec<usize> {
        let mut on: Vec<usize> = (0..self.points.len())
            .filter(|&i| self.segment_distance(a, b, self.points[i]) <= self.tol)
            .collect();
        on.sort_by(|&i, &j| {
            let ti = self.edge_coordinate(a, b, (self.points[i].x, self.points[i].y));
            let tj = self.edge_coordinate(a, b, (self.points[j].x, self.points[j].y));
            ti.total_cmp(&tj)
        });
        on
    }
}

/// Andrew's monotone chain; collinear points are dropped. Returns vertex
/// indices in counter-clockwise order.
fn monotone_chain(points: &[Pt]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i]
            .x
            .total_cmp(&points[j].x)
            .then(points[i].y.total_cmp(&points[j].y))
    });
    idx.dedup_by(|i, j| points[*i] == points[*j]);
    if idx.len() <= 2 {
        return idx;
    }
    let turn = |o: usize, a: usize, b: usize| points[a].sub(points[o]).cross(points[b].sub(points[o]));

    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0.0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0.0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_atom() -> DiscreteMeasure {
        DiscreteMeasure::new([(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]).unwrap()
    }

    #[test]
    fn region_examples() {
        let rad = MomentHull::new(&DiscreteMeasure::rademacher());
        assert_eq!(rad.vertex_count(), 2);
        assert_eq!(rad.classify(MomentPair::new(0.0, 1.0)), Region::Boundary);
        assert_eq!(rad.classify(MomentPair::new(0.0, 2.0)), Region::Outside);
        let tri = MomentHull::new(&three_atom());
        assert_eq!(tri.vertex_count(), 3);
        assert_eq!(tri.classify(MomentPair::new(0.0, 0.5)), Region::Interior);
    }

    #[test]
    fn triangle_edges_and_vertices() {
        let tri = MomentHull::new(&three_atom());
        assert_eq!(tri.classify(MomentPair::new(0.5, 0.5)), Region::Boundary);
        assert_eq!(tri.classify(MomentPair::new(0.5, 0.5 - 1e-9)), Region::Outside);
        assert_eq!(tri.classify(MomentPair::new(0.5, 0.5 + 1e-9)), Region::Interior);
        assert_eq!(tri.classify(MomentPair::new(0.5, 0.5 + 1e-11)), Region::Boundary);
        assert_eq!(tri.classify(MomentPair::new(0.3, 1.0)), Region::Boundary);
        assert_eq!(tri.classify(MomentPair::new(0.3, 1.1)), Region::Outside);
        assert_eq!(tri.classify(MomentPair::new(1.0, 1.0)), Region::Boundary);
        assert_eq!(tri.classify(MomentPair::new(2.0, 2.0)), Region::Outside);
        match tri.locate(MomentPair::new(0.5, 0.5)) {
            Location::Boundary {
                face,
                relative_interior,
            } => {
                assert_eq!(face, vec![1, 2]);
                assert!(!relative_interior);
            }
            other => panic!("{other:?}"),
        }
        match tri.locate(MomentPair::new(-1.0, 1.0)) {
            Location::Boundary { face, .. } => assert_eq!(face, vec![0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_point_hull() {
        let h = MomentHull::new(&DiscreteMeasure::dirac(2.0).unwrap());
        assert_eq!(h.classify(MomentPair::new(2.0, 4.0)), Region::Boundary);
        assert_eq!(h.classify(MomentPair::new(2.0, 4.1)), Region::Outside);
    }

    #[test]
    fn segment_endpoints_are_relative_boundary() {
        let h = MomentHull::new(&DiscreteMeasure::rademacher());
        assert_eq!(
            h.locate(MomentPair::new(1.0, 1.0)),
            Location::Boundary {
                face: vec![1],
                relative_interior: false
            }
        );
        assert_eq!(
            h.locate(MomentPair::new(0.2, 1.0)),
            Location::Boundary {
                face: vec![0, 1],
                relative_interior: true
            }
        );
    }

    #[test]
    fn fine_gauss_grid_keeps_every_atom_as_vertex() {
        let g = DiscreteMeasure::gauss(0.0, 1.0, 8.0, 2001).unwrap();
        let h = MomentHull::new(&g);
        assert_eq!(h.vertex_count(), 2001);
    }

    #[test]
    fn chain_drops_collinear_points() {
        let h = MomentHull::from_points([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1.0)], 1e-10);
        assert_eq!(h.vertex_count(), 3);
    }
}
