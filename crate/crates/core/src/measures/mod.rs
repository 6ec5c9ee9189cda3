//! Finitely supported probability measures on ℝ.
//!
//! A [`DiscreteMeasure`] is a sorted list of atoms with strictly increasing
//! positions and positive weights summing to one. Positions closer than
//! [`MERGE_TOL`] are merged at construction.

mod parse;

pub use parse::parse_spec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atom positions closer than this are treated as the same point.
pub const MERGE_TOL: f64 = 1e-12;

/// Default tolerance for [`DiscreteMeasure::is_symmetric`] on discretized families.
pub const SYMMETRY_TOL: f64 = 1e-9;

pub const GAUSS_DEFAULT_HALFWIDTH: f64 = 8.0;
pub const GAUSS_DEFAULT_N: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// A candidate value `(x, y)` of the pair `(∫z dμ, ∫z² dμ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub x: f64,
    pub y: f64,
}

impl MomentPair {
    pub fn new(x: f64, y: f64) -> Self {
        MomentPair { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Build a measure from `(position, weight)` pairs.
    ///
    /// Zero weights are dropped, coincident positions merged and the result
    /// renormalized. Negative or non-finite inputs are rejected.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for (z, w) in pairs {
            if !z.is_finite() {
                return Err(Error::Degenerate(format!("non-finite atom position {z}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Degenerate(format!("invalid weight {w} at position {z}")));
            }
            if w > 0.0 {
                raw.push((z, w));
            }
        }
        if raw.is_empty() {
            return Err(Error::Degenerate("no atom carries positive weight".into()));
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut atoms: Vec<Atom> = Vec::with_capacity(raw.len());
        for (z, w) in raw {
            match atoms.last_mut() {
                Some(last) if (z - last.position).abs() <= MERGE_TOL => last.weight += w,
                _ => atoms.push(Atom { position: z, weight: w }),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Degenerate(format!("total weight {total}")));
        }
        for a in &mut atoms {
            a.weight /= total;
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub fn dirac(position: f64) -> Result<Self> {
        Self::new([(position, 1.0)])
    }

    /// ½δ₋₁ + ½δ₁.
    pub fn rademacher() -> Self {
        DiscreteMeasure {
            atoms: vec![
                Atom {
                    position: -1.0,
                    weight: 0.5,
                },
                Atom {
                    position: 1.0,
                    weight: 0.5,
                },
            ],
        }
    }

    /// Uniform law on `[a, b]` discretized by `n` equal-weight midpoints.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Domain(format!("uniform requires a < b, got a={a}, b={b}")));
        }
        if n < 2 {
            return Err(Error::Domain(format!("uniform requires n >= 2, got {n}")));
        }
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let nf = n as f64;
        // (2k + 1 − n)/n is exactly antisymmetric in k, so a centered interval
        // yields an exactly symmetric grid.
        Self::new((0..n).map(|k| {
            let t = (2.0 * k as f64 + 1.0 - nf) / nf;
            (center + half * t, 1.0)
        }))
    }

    /// Normal law truncated to `mean ± halfwidth·sd`, `n` equally spaced atoms
    /// with weights proportional to the density.
    pub fn gauss(mean: f64, sd: f64, halfwidth: f64, n: usize) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
            return Err(Error::Domain(format!(
                "gauss requires finite mean and sd > 0, got mean={mean}, sd={sd}"
            )));
        }
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::Domain(format!("gauss requires halfwidth > 0, got {halfwidth}")));
        }
        if n < 2 {
            return Err(Error::Domain(format!("gauss requires n >= 2, got {n}")));
        }
        let m = (n - 1) as f64;
        Self::new((0..n).map(|k| {
            let t = (2.0 * k as f64 - m) / m;
            let standardized = halfwidth * t;
            (mean + sd * standardized, (-0.5 * standardized * standardized).exp())
        }))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        self.atoms.iter().map(|a| a.position)
    }

    /// `(Σ pᵢzᵢ, Σ pᵢzᵢ²)`.
    pub fn moments(&self) -> MomentPair {
        let (x, y) = self.atoms.iter().fold((0.0, 0.0), |(m1, m2), a| {
            let z = a.position;
            (m1 + a.weight * z, m2 + a.weight * z * z)
        });
        MomentPair { x, y }
    }

    /// Index of the atom nearest to `z`, if one lies within `tol`.
    pub fn find_atom(&self, z: f64, tol: f64) -> Option<usize> {
        let i = self.atoms.partition_point(|a| a.position < z);
        let mut best: Option<(usize, f64)> = None;
        for j in [i.wrapping_sub(1), i] {
            if let Some(a) = self.atoms.get(j) {
                let d = (a.position - z).abs();
                if d <= tol && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    /// Weight of the atom at `z` (within [`MERGE_TOL`]), zero if absent.
    pub fn weight_at(&self, z: f64) -> f64 {
        self.find_atom(z, MERGE_TOL).map_or(0.0, |i| self.atoms[i].weight)
    }

    /// Whether every atom `(z, p)` has a mirror atom `(−z, q)` with
    /// `|p − q| ≤ tol`, positions matched within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.atoms.iter().all(|a| {
            self.find_atom(-a.position, tol)
                .is_some_and(|j| (self.atoms[j].weight - a.weight).abs() <= tol)
        })
    }

    /// `(ρ + ρ∘(−id)) / 2`.
    pub fn symmetrize(&self) -> DiscreteMeasure {
        let mirrored = self
            .atoms
            .iter()
            .flat_map(|a| [(a.position, 0.5 * a.weight), (-a.position, 0.5 * a.weight)]);
        let mut out = Self::new(mirrored).expect("mirror of a valid measure is valid");
        // Merging keeps the first of two nearby positions; re-impose exact
        // mirror symmetry on positions and weights.
        let n = out.atoms.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let z = 0.5 * (out.atoms[j].position - out.atoms[i].position);
            let w = 0.5 * (out.atoms[i].weight + out.atoms[j].weight);
            out.atoms[i] = Atom {
                position: -z,
                weight: w,
            };
            out.atoms[j] = Atom { position: z, weight: w };
        }
        if n % 2 == 1 {
            out.atoms[n / 2].position = 0.0;
        }
        out
    }

    /// Whether all mass sits within `tol` of the origin.
    pub fn is_dirac_at_zero(&self, tol: f64) -> bool {
        self.atoms.iter().all(|a| a.position.abs() <= tol)
    }

    /// Same atoms (positions within [`MERGE_TOL`]) with weights within `tol`.
    pub fn approx_eq(&self, other: &DiscreteMeasure, tol: f64) -> bool {
        self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| (a.position - b.position).abs() <= MERGE_TOL && (a.weight - b.weight).abs() <= tol)
    }

    /// Reweight atoms by `factor(z)` and renormalize.
    pub fn reweight(&self, mut factor: impl FnMut(usize, f64) -> f64) -> Result<DiscreteMeasure> {
        Self::new(
            self.atoms
                .iter()
                .enumerate()
                .map(|(i, a)| (a.position, a.weight * factor(i, a.position))),
        )
    }

    /// An `atoms:` spec that parses back to this measure.
    pub fn to_spec(&self) -> String {
        let body: Vec<String> = self
            .atoms
            .iter()
            .map(|a| format!("{}={}", spec_real(a.position), spec_real(a.weight)))
            .collect();
        format!("atoms:{}", body.join(","))
    }
}

/// A measure together with the spec text it was built from; reports quote
/// the text instead of re-serializing large atom lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecMeasure {
    pub spec: String,
    pub measure: DiscreteMeasure,
}

impl SpecMeasure {
    pub fn parse(spec: &str) -> Result<Self> {
        Ok(SpecMeasure {
            spec: spec.to_string(),
            measure: parse_spec(spec)?,
        })
    }

    pub fn from_measure(measure: DiscreteMeasure) -> Self {
        SpecMeasure {
            spec: measure.to_spec(),
            measure,
        }
    }
}

impl std::ops::Deref for SpecMeasure {
    type Target = DiscreteMeasure;

    fn deref(&self) -> &DiscreteMeasure {
        &self.measure
    }
}

/// Shortest round-trip text of `x`, switching to exponent form for very
/// small or large magnitudes.
fn spec_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(m: &DiscreteMeasure) -> Vec<(f64, f64)> {
        m.atoms().iter().map(|a| (a.position, a.weight)).collect()
    }

    #[test]
    fn construction_sorts_merges_normalizes() {
        let m = DiscreteMeasure::new([(1.0, 1.0), (-1.0, 2.0), (1.0 + 1e-13, 1.0), (3.0, 0.0)]).unwrap();
        assert_eq!(atoms(&m), vec![(-1.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(DiscreteMeasure::new([(0.0, 0.0)]), Err(Error::Degenerate(_))));
        assert!(matches!(DiscreteMeasure::new([(0.0, -1.0)]), Err(Error::Degenerate(_))));
        assert!(matches!(
            DiscreteMeasure::new([(f64::NAN, 1.0)]),
            Err(Error::Degenerate(_))
        ));
        assert!(DiscreteMeasure::new(std::iter::empty()).is_err());
    }

    #[test]
    fn moments_examples() {
        assert_eq!(DiscreteMeasure::rademacher().moments(), MomentPair::new(0.0, 1.0));
        let coin = DiscreteMeasure::new([(-1.0, 0.25), (1.0, 0.75)]).unwrap();
        assert_eq!(coin.moments(), MomentPair::new(0.5, 1.0));
        assert_eq!(
            DiscreteMeasure::dirac(1.0).unwrap().moments(),
            MomentPair::new(1.0, 1.0)
        );
    }

    #[test]
    fn symmetry_examples() {
        let rad = DiscreteMeasure::rademacher();
        assert!(rad.is_symmetric(SYMMETRY_TOL));
        assert!(!DiscreteMeasure::dirac(1.0).unwrap().is_symmetric(SYMMETRY_TOL));
        let coin = DiscreteMeasure::new([(-1.0, 0.25), (1.0, 0.75)]).unwrap();
        assert!(!coin.is_symmetric(SYMMETRY_TOL));
    }

    #[test]
    fn symmetrize_examples() {
        assert_eq!(
            atoms(&DiscreteMeasure::dirac(1.0).unwrap().symmetrize()),
            vec![(-1.0, 0.5), (1.0, 0.5)]
        );
        assert_eq!(
            DiscreteMeasure::rademacher().symmetrize(),
            DiscreteMeasure::rademacher()
        );
        assert_eq!(
            atoms(&DiscreteMeasure::dirac(0.0).unwrap().symmetrize()),
            vec![(0.0, 1.0)]
        );
    }

    #[test]
    fn dirac_at_zero_examples() {
        assert!(DiscreteMeasure::dirac(0.0).unwrap().is_dirac_at_zero(1e-12));
        assert!(!DiscreteMeasure::rademacher().is_dirac_at_zero(1e-12));
        assert!(DiscreteMeasure::dirac(1e-15).unwrap().is_dirac_at_zero(1e-12));
    }

    #[test]
    fn discretized_families_are_exactly_symmetric() {
        let u = DiscreteMeasure::uniform(-1.0, 1.0, 101).unwrap();
        assert!(u.is_symmetric(0.0));
        let g = DiscreteMeasure::gauss(0.0, 1.0, GAUSS_DEFAULT_HALFWIDTH, GAUSS_DEFAULT_N).unwrap();
        assert!(g.is_symmetric(0.0));
        assert_eq!(g.len(), GAUSS_DEFAULT_N);
        assert!((g.moments().y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn uniform_second_moment_converges() {
        let m = DiscreteMeasure::uniform(-1.0, 1.0, 1001).unwrap().moments();
        assert!(m.x.abs() < 1e-12);
        assert!((m.y - 1.0 / 3.0).abs() < 1e-4);
        let coarse = DiscreteMeasure::uniform(-1.0, 1.0, 11).unwrap().moments();
        assert!((coarse.y - 1.0 / 3.0).abs() > (m.y - 1.0 / 3.0).abs());
    }

    #[test]
    fn spec_round_trip() {
        let m = DiscreteMeasure::new([(-0.3, 1e-7), (2.5e-9, 0.4), (17.0, 0.6)]).unwrap();
        let back = parse_spec(&m.to_spec()).unwrap();
        // renormalizing an already normalized list may move weights by an ulp
        assert!(back.approx_eq(&m, 1e-15));
        let positions: Vec<f64> = back.positions().collect();
        assert_eq!(positions, m.positions().collect::<Vec<_>>());
    }

    #[test]
    fn find_atom_picks_nearest() {
        let m = DiscreteMeasure::new([(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        assert_eq!(m.find_atom(1.0 + 1e-13, 1e-12), Some(1));
        assert_eq!(m.find_atom(0.5, 0.6), Some(0));
        assert_eq!(m.find_atom(5.0, 1e-12), None);
        assert_eq!(m.weight_at(2.0), 1.0 / 3.0);
        assert_eq!(m.weight_at(2.5), 0.0);
    }
}
