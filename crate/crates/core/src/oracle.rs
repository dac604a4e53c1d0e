//! Certified global maximization of `y -> g_i(x, y)` over the box `Y`.
//!
//! The default solver is a best-first branch and bound on boxes: each box is
//! bounded through its [`Section`] (Taylor bound for polynomial families,
//! Lipschitz bound otherwise), the box with the largest bound is bisected
//! along its widest axis, and the search stops once the largest outstanding
//! bound is within `delta` of the best value seen. The returned gap is that
//! difference, so `sup_Y g_i(x, .) <= value + gap` holds by construction.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{invalid, Result, SipError};
use crate::problem::{BoxDomain, ConstraintFamily, LipschitzSection, Section};

/// A certified approximate maximizer of one lower-level problem.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedMax {
    pub y_star: Vec<f64>,
    /// `g_i(x, y_star)`, exactly as evaluated.
    pub value: f64,
    /// `sup_Y g_i(x, .) <= value + gap`.
    pub gap: f64,
    /// Number of section evaluations spent.
    pub evaluations: u64,
}

impl CertifiedMax {
    pub fn upper_bound(&self) -> f64 {
        self.value + self.gap
    }
}

/// Pluggable lower-level solver. Implementations must return a gap no larger
/// than the requested `delta` and must be deterministic.
pub trait MaxOracle: Send + Sync {
    fn certified_max(
        &self,
        family: &dyn ConstraintFamily,
        y_domain: &BoxDomain,
        x: &[f64],
        delta: f64,
    ) -> Result<CertifiedMax>;
}

/// Best-first branch and bound with an evaluation budget.
#[derive(Clone, Debug)]
pub struct BranchAndBound {
    pub max_evaluations: u64,
    /// Coordinate golden-section sweeps applied to the incumbent.
    pub polish_sweeps: usize,
}

impl Default for BranchAndBound {
    fn default() -> Self {
        Self {
            max_evaluations: 4_000_000,
            polish_sweeps: 2,
        }
    }
}

struct Node {
    bound: f64,
    seq: u64,
    center: Vec<f64>,
    half: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap on the bound; among equal bounds the older node first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Incumbent<'s> {
    section: &'s dyn Section,
    y: Vec<f64>,
    value: f64,
    evaluations: u64,
}

impl Incumbent<'_> {
    fn offer(&mut self, y: &[f64], v: f64) {
        if v > self.value {
            self.value = v;
            self.y.clear();
            self.y.extend_from_slice(y);
        }
    }

    fn eval(&mut self, y: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = self.section.value(y);
        self.offer(y, v);
        v
    }
}

impl BranchAndBound {
    fn run(&self, section: &dyn Section, y_domain: &BoxDomain, delta: f64) -> Result<CertifiedMax> {
        let q = y_domain.dim();
        let mut inc = Incumbent {
            section,
            y: y_domain.center(),
            value: f64::NEG_INFINITY,
            evaluations: 0,
        };
        // Corners first: affine sections peak there.
        if q <= 12 {
            for v in y_domain.vertices() {
                inc.eval(&v);
            }
        }
        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        let root_center = y_domain.center();
        let root_half = y_domain.half_widths();
        let (v, bound) = section.upper_bound(&root_center, &root_half);
        inc.evaluations += 1;
        inc.offer(&root_center, v);
        heap.push(Node {
            bound,
            seq,
            center: root_center,
            half: root_half,
        });

        let mut frontier;
        loop {
            let Some(node) = heap.pop() else {
                frontier = inc.value;
                break;
            };
            frontier = node.bound.max(inc.value);
            if frontier - inc.value <= delta {
                break;
            }
            if inc.evaluations >= self.max_evaluations {
                return Err(SipError::OracleBudget {
                    evaluations: inc.evaluations,
                    gap: frontier - inc.value,
                    requested: delta,
                });
            }
            let (axis, &width) = node
                .half
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                .expect("nonempty box");
            if width == 0.0 {
                // a single point, already offered to the incumbent
                continue;
            }
            for sign in [-1.0, 1.0] {
                let mut center = node.center.clone();
                let mut half = node.half.clone();
                half[axis] = 0.5 * width;
                center[axis] += sign * half[axis];
                let (v, b) = section.upper_bound(&center, &half);
                inc.evaluations += 1;
                inc.offer(&center, v);
                seq += 1;
                heap.push(Node {
                    bound: b.min(node.bound),
                    seq,
                    center,
                    half,
                });
            }
        }

        self.polish(&mut inc, y_domain, frontier);
        let value = section.value(&inc.y);
        let gap = (frontier - value).max(0.0);
        Ok(CertifiedMax {
            y_star: inc.y,
            value,
            gap,
            evaluations: inc.evaluations,
        })
    }

    /// Golden-section line searches along each axis around the incumbent.
    /// Only ever raises the incumbent value, so the certificate survives.
    fn polish(&self, inc: &mut Incumbent<'_>, y_domain: &BoxDomain, frontier: f64) {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        if inc.value >= frontier {
            return;
        }
        let q = y_domain.dim();
        for _ in 0..self.polish_sweeps {
            for j in 0..q {
                let (lo, hi) = (y_domain.lower()[j], y_domain.upper()[j]);
                if hi <= lo {
                    continue;
                }
                let reach = 0.05 * (hi - lo);
                let mut a = (inc.y[j] - reach).max(lo);
                let mut b = (inc.y[j] + reach).min(hi);
                let mut probe = inc.y.clone();
                let mut at = |t: f64, inc: &mut Incumbent<'_>| {
                    probe[j] = t;
                    let p = probe.clone();
                    inc.eval(&p)
                };
                let mut c = b - INV_PHI * (b - a);
                let mut d = a + INV_PHI * (b - a);
                let mut fc = at(c, inc);
                let mut fd = at(d, inc);
                for _ in 0..40 {
                    if fc >= fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - INV_PHI * (b - a);
                        fc = at(c, inc);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + INV_PHI * (b - a);
                        fd = at(d, inc);
                    }
                }
            }
        }
    }
}

impl MaxOracle for BranchAndBound {
    fn certified_max(
        &self,
        family: &dyn ConstraintFamily,
        y_domain: &BoxDomain,
        x: &[f64],
        delta: f64,
    ) -> Result<CertifiedMax> {
        if !(delta > 0.0) {
            return Err(invalid(format!(
                "lower-level tolerance must be positive, got {delta}"
            )));
        }
        match family.section(x) {
            Some(section) => self.run(section.as_ref(), y_domain, delta),
            None => {
                let section = LipschitzSection { family, x };
                self.run(&section, y_domain, delta)
            }
        }
    }
}

/// Certified `delta`-approximate solution of `max_{y in Y} g_i(x, y)`.
pub fn certified_max(
    oracle: &dyn MaxOracle,
    family: &dyn ConstraintFamily,
    y_domain: &BoxDomain,
    x: &[f64],
    delta: f64,
) -> Result<CertifiedMax> {
    let out = oracle.certified_max(family, y_domain, x, delta)?;
    debug_assert!(out.gap <= delta && out.gap >= 0.0);
    Ok(out)
}

/// The entry with the largest value; ties go to the smallest family index.
pub fn strongest_violator(
    results: &BTreeMap<usize, CertifiedMax>,
) -> Result<(usize, &CertifiedMax)> {
    let mut best: Option<(usize, &CertifiedMax)> = None;
    for (&i, cm) in results {
        match best {
            Some((_, b)) if cm.value <= b.value => {}
            _ => best = Some((i, cm)),
        }
    }
    best.ok_or_else(|| invalid("strongest violator of an empty result set"))
}
