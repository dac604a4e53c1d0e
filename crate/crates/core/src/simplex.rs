//! Dense revised simplex for standard-form linear programs
//!
//! ```text
//! minimize  c'l   subject to  M l = h,  l >= 0
//! ```
//!
//! with few equality rows and many columns. The basis inverse is rebuilt
//! from scratch after every pivot (the row count is tiny), entering and
//! leaving variables follow Bland's rule. Columns may be appended between
//! solves; the current basis stays primal feasible, so re-solving after
//! adding columns is a warm start.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

/// Objective, basis, basis inverse and basic values of a visited basis.
type Snapshot = (f64, Vec<usize>, DMatrix<f64>, Vec<f64>);

/// Outcome of [`Simplex::solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// The objective decreases without bound along the ray of column `entering`.
    Unbounded {
        entering: usize,
    },
    Infeasible,
    PivotLimit,
}

#[derive(Clone, Debug)]
pub struct Simplex {
    rows: usize,
    columns: Vec<Vec<f64>>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    binv: DMatrix<f64>,
    xb: Vec<f64>,
    pivots: u64,
    excluded: Option<(usize, usize)>,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;

impl Simplex {
    pub fn new(rhs: Vec<f64>) -> Self {
        let rows = rhs.len();
        Self {
            rows,
            columns: Vec::new(),
            cost: Vec::new(),
            rhs,
            basis: Vec::new(),
            binv: DMatrix::zeros(rows, rows),
            xb: Vec::new(),
            pivots: 0,
            excluded: None,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Total pivots performed over the lifetime of this instance.
    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    pub fn add_column(&mut self, cost: f64, column: Vec<f64>) -> usize {
        assert_eq!(
            column.len(),
            self.rows,
            "column length must equal row count"
        );
        self.columns.push(column);
        self.cost.push(cost);
        self.columns.len() - 1
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn cost(&self, j: usize) -> f64 {
        self.cost[j]
    }

    /// Installs a starting basis. Returns false if it is singular or not
    /// primal feasible, in which case the previous basis is kept.
    pub fn set_basis(&mut self, basis: Vec<usize>) -> bool {
        if basis.len() != self.rows || basis.iter().any(|&j| j >= self.columns.len()) {
            return false;
        }
        let Some(binv) = self.invert(&basis) else {
            return false;
        };
        let xb = Self::mul(&binv, &self.rhs);
        let scale = self.rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if xb.iter().any(|&v| v < -1e-9 * scale) {
            return false;
        }
        self.basis = basis;
        self.binv = binv;
        self.xb = xb.into_iter().map(|v| v.max(0.0)).collect();
        true
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Values of all columns at the current basic solution.
    pub fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.columns.len()];
        for (&j, &v) in self.basis.iter().zip(&self.xb) {
            x[j] = v;
        }
        x
    }

    /// Simplex multipliers `pi` with `B' pi = c_B`.
    pub fn duals(&self) -> Vec<f64> {
        let cb = DVector::from_iterator(self.rows, self.basis.iter().map(|&j| self.cost[j]));
        let pi = self.binv.transpose() * cb;
        pi.iter().copied().collect()
    }

    pub fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .map(|(&j, &v)| self.cost[j] * v)
            .sum()
    }

    fn invert(&self, basis: &[usize]) -> Option<DMatrix<f64>> {
        let b = DMatrix::from_fn(self.rows, self.rows, |i, k| self.columns[basis[k]][i]);
        let inv = b.try_inverse()?;
        inv.iter().all(|v| v.is_finite()).then_some(inv)
    }

    fn mul(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|k| m[(i, k)] * v[k]).sum())
            .collect()
    }

    /// Runs phase 2 from the installed basis, or phase 1 first if no basis
    /// has been installed.
    pub fn solve(&mut self, max_pivots: u64) -> LpStatus {
        if self.basis.len() != self.rows && !self.phase_one(max_pivots) {
            return if self.basis.len() == self.rows {
                LpStatus::PivotLimit
            } else {
                LpStatus::Infeasible
            };
        }
        self.iterate(max_pivots)
    }

    /// Primal simplex iterations with Bland's rule.
    fn iterate(&mut self, max_pivots: u64) -> LpStatus {
        let limit = self.columns.len();
        let (ex_lo, ex_hi) = self.excluded.unwrap_or((0, 0));
        let cost_scale = self.cost.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut budget = max_pivots;
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut best: Option<Snapshot> = None;
        loop {
            let pi = self.duals();
            let mut in_basis = vec![false; self.columns.len()];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            let entering = (0..limit).find(|&j| {
                if in_basis[j] || (ex_lo..ex_hi).contains(&j) {
                    return false;
                }
                let col = &self.columns[j];
                let norm = col.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let d = self.cost[j] - col.iter().zip(&pi).map(|(a, p)| a * p).sum::<f64>();
                d < -COST_TOL * cost_scale * norm
            });
            let Some(q) = entering else {
                return LpStatus::Optimal;
            };
            if budget == 0 {
                return LpStatus::PivotLimit;
            }
            budget -= 1;
            let u = Self::mul(&self.binv, &self.columns[q]);
            let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut leave: Option<(usize, f64)> = None;
            for (r, (&ur, &xr)) in u.iter().zip(&self.xb).enumerate() {
                if ur <= PIVOT_TOL * umax.max(1.0) {
                    continue;
                }
                let ratio = xr / ur;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        let tie = (ratio - bratio).abs() <= 1e-12 * bratio.abs().max(1e-300);
                        if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return LpStatus::Unbounded { entering: q };
            };
            let mut basis = self.basis.clone();
            basis[r] = q;
            let mut key = basis.clone();
            key.sort_unstable();
            if !seen.insert(key) {
                // Rounding made the pivots cycle; keep the best basis met.
                if let Some((obj, b, binv, xb)) = best.take() {
                    if obj < self.objective() {
                        self.basis = b;
                        self.binv = binv;
                        self.xb = xb;
                    }
                }
                return LpStatus::Optimal;
            }
            let obj = self.objective();
            if best.as_ref().is_none_or(|(o, ..)| obj < *o) {
                best = Some((obj, self.basis.clone(), self.binv.clone(), self.xb.clone()));
            }
            match self.invert(&basis) {
                Some(binv) => {
                    self.basis = basis;
                    self.binv = binv;
                    self.xb = Self::mul(&self.binv, &self.rhs)
                        .into_iter()
                        .map(|v| v.max(0.0))
                        .collect();
                    self.pivots += 1;
                }
                // Numerically singular pivot: treat as converged.
                None => return LpStatus::Optimal,
            }
        }
    }

    /// Minimizes the sum of artificial variables. On success the installed
    /// basis is feasible for the original columns (artificials that remain
    /// basic sit at zero on redundant rows).
    fn phase_one(&mut self, max_pivots: u64) -> bool {
        let n = self.columns.len();
        let saved_cost = std::mem::replace(&mut self.cost, vec![0.0; n]);
        let signs: Vec<f64> = self
            .rhs
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        for (i, s) in signs.iter().enumerate() {
            let mut col = vec![0.0; self.rows];
            col[i] = *s;
            self.columns.push(col);
            self.cost.push(1.0);
        }
        let basis: Vec<usize> = (n..n + self.rows).collect();
        let ok = self.set_basis(basis);
        debug_assert!(ok);
        let status = self.iterate(max_pivots);
        let scale = self.rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let feasible = status == LpStatus::Optimal && self.objective() <= 1e-9 * scale;
        // Drive zero-level artificials out where a real column can replace them.
        if feasible {
            for r in 0..self.rows {
                if self.basis[r] < n {
                    continue;
                }
                let row: Vec<f64> = (0..self.rows).map(|k| self.binv[(r, k)]).collect();
                let replacement = (0..n).find(|&j| {
                    !self.basis.contains(&j)
                        && self.columns[j]
                            .iter()
                            .zip(&row)
                            .map(|(a, b)| a * b)
                            .sum::<f64>()
                            .abs()
                            > 1e-9
                });
                if let Some(j) = replacement {
                    let mut basis = self.basis.clone();
                    basis[r] = j;
                    if let Some(binv) = self.invert(&basis) {
                        self.basis = basis;
                        self.binv = binv;
                        self.xb = Self::mul(&self.binv, &self.rhs)
                            .into_iter()
                            .map(|v| v.max(0.0))
                            .collect();
                    }
                }
            }
        }
        let stuck = self.basis.iter().any(|&j| j >= n);
        self.cost = saved_cost;
        if !feasible {
            self.columns.truncate(n);
            self.basis.clear();
            return false;
        }
        if stuck {
            // Artificials left on redundant rows stay basic at zero; they
            // must never re-enter.
            self.cost.extend(std::iter::repeat_n(0.0, self.rows));
            self.excluded = Some((n, n + self.rows));
        } else {
            self.columns.truncate(n);
        }
        true
    }
}
