use crate::error::{invalid, Result};
use crate::problem::BoxDomain;

/// Default dedup radius for index points (max-metric).
pub const DEFAULT_DEDUP_TOL: f64 = 1e-12;

/// A finite set of index points `Y^k` in `Y`. Insertion skips any point
/// within `dedup_tol` (max-metric) of a point already present; insertion
/// order is preserved.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    points: Vec<Vec<f64>>,
    dedup_tol: f64,
}

impl Discretization {
    pub fn new(dedup_tol: f64) -> Self {
        Self {
            points: Vec::new(),
            dedup_tol,
        }
    }

    pub fn empty() -> Self {
        Self::new(DEFAULT_DEDUP_TOL)
    }

    /// Builds a discretization from points, checking membership in `y_domain`.
    pub fn from_points(y_domain: &BoxDomain, points: Vec<Vec<f64>>) -> Result<Self> {
        let mut d = Self::empty();
        for p in points {
            if !y_domain.contains(&p, 0.0) {
                return Err(invalid(format!("index point {p:?} lies outside Y")));
            }
            d.insert(p);
        }
        Ok(d)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    pub fn contains_near(&self, y: &[f64]) -> bool {
        self.points.iter().any(|p| {
            p.iter()
                .zip(y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                <= self.dedup_tol
        })
    }

    /// Returns whether the point was added.
    pub fn insert(&mut self, y: Vec<f64>) -> bool {
        if self.contains_near(&y) {
            return false;
        }
        self.points.push(y);
        true
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&[f64]) -> bool) {
        self.points.retain(|p| keep(p));
    }

    /// True if every point of `self` has a dedup-equivalent in `other`.
    pub fn is_subset_of(&self, other: &Discretization) -> bool {
        self.points.iter().all(|p| other.contains_near(p))
    }
}

impl Default for Discretization {
    fn default() -> Self {
        Self::empty()
    }
}
