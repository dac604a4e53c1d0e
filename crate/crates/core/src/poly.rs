//! Sparse multivariate polynomials in the monomial basis.
//!
//! Besides evaluation and differentiation, a polynomial can bound itself from
//! above on an axis-aligned box through its Taylor expansion at the box
//! centre. The lower-level solver uses that bound to prune boxes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Exponent vector `alpha` of the monomial `y^alpha`.
pub type MultiIndex = Vec<u32>;

/// All multi-indices in `dim` variables with total degree at most `degree`,
/// graded by degree. Within one degree the earlier variables carry the larger
/// exponents, so in one variable the order is `1, u, u^2, ...` and in two
/// variables it starts `1, u1, u2, u1^2, u1 u2, u2^2`.
pub fn monomial_exponents(dim: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for total in 0..=degree {
        let mut current = vec![0u32; dim];
        push_compositions(dim, total, 0, &mut current, &mut out);
    }
    out
}

fn push_compositions(
    dim: usize,
    remaining: u32,
    pos: usize,
    current: &mut MultiIndex,
    out: &mut Vec<MultiIndex>,
) {
    if dim == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == dim - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        push_compositions(dim, remaining - e, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// Number of monomials of degree at most `degree` in `dim` variables, i.e.
/// the binomial coefficient `(degree + dim choose dim)`.
pub fn monomial_count(dim: usize, degree: u32) -> usize {
    let mut acc: u128 = 1;
    for k in 1..=dim as u128 {
        acc = acc * (degree as u128 + k) / k;
    }
    acc as usize
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
fn falling(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i))
}

fn monomial(y: &[f64], exps: &[u32]) -> f64 {
    exps.iter().zip(y).fold(
        1.0,
        |acc, (&e, &v)| if e == 0 { acc } else { acc * v.powi(e as i32) },
    )
}

/// One term `coef * y^exps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exps: MultiIndex,
    pub coef: f64,
}

/// A polynomial in `dim` variables stored as a canonical list of terms
/// (sorted exponents, merged duplicates, no zero coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_terms(dim, [(vec![0; dim], c)]).expect("well-formed constant")
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut merged: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (exps, coef) in terms {
            if exps.len() != dim {
                return Err(invalid(format!(
                    "monomial exponent vector has length {}, polynomial has {dim} variables",
                    exps.len()
                )));
            }
            if !coef.is_finite() {
                return Err(invalid("polynomial coefficient is not finite"));
            }
            *merged.entry(exps).or_insert(0.0) += coef;
        }
        Ok(Self::from_map(dim, merged))
    }

    /// Dense coefficients in the order of [`monomial_exponents`].
    pub fn from_dense(dim: usize, degree: u32, coefs: &[f64]) -> Result<Self> {
        let exps = monomial_exponents(dim, degree);
        if exps.len() != coefs.len() {
            return Err(invalid(format!(
                "expected {} coefficients for degree {degree} in {dim} variables, got {}",
                exps.len(),
                coefs.len()
            )));
        }
        Self::from_terms(dim, exps.into_iter().zip(coefs.iter().copied()))
    }

    fn from_map(dim: usize, map: BTreeMap<MultiIndex, f64>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(exps, coef)| Term { exps, coef })
            .collect();
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// True when no term depends on any variable.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.exps.iter().all(|&e| e == 0))
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.dim);
        self.terms
            .iter()
            .map(|t| t.coef * monomial(y, &t.exps))
            .sum()
    }

    /// The mixed partial derivative `d^alpha p`.
    pub fn derivative(&self, alpha: &[u32]) -> Result<Self> {
        if alpha.len() != self.dim {
            return Err(invalid(format!(
                "derivative multi-index has length {}, polynomial has {} variables",
                alpha.len(),
                self.dim
            )));
        }
        let mut map = BTreeMap::new();
        for t in &self.terms {
            if t.exps.iter().zip(alpha).any(|(e, a)| a > e) {
                continue;
            }
            let factor: f64 = t
                .exps
                .iter()
                .zip(alpha)
                .map(|(&e, &a)| falling(e, a))
                .product();
            let exps: MultiIndex = t.exps.iter().zip(alpha).map(|(e, a)| e - a).collect();
            *map.entry(exps).or_insert(0.0) += factor * t.coef;
        }
        Ok(Self::from_map(self.dim, map))
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &Polynomial, scale: f64) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut map: BTreeMap<MultiIndex, f64> = self
            .terms
            .iter()
            .map(|t| (t.exps.clone(), t.coef))
            .collect();
        if scale != 0.0 {
            for t in &other.terms {
                *map.entry(t.exps.clone()).or_insert(0.0) += scale * t.coef;
            }
        }
        Self::from_map(self.dim, map)
    }

    /// Coefficients of the expansion around `center`: `p(center + d) =
    /// sum_beta T_beta d^beta`.
    pub fn taylor_coefficients(&self, center: &[f64]) -> Vec<Term> {
        let mut map: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for t in &self.terms {
            let mut beta = vec![0u32; self.dim];
            loop {
                let weight: f64 = (0..self.dim)
                    .map(|j| {
                        let (a, b) = (t.exps[j], beta[j]);
                        binomial(a, b)
                            * if a > b {
                                center[j].powi((a - b) as i32)
                            } else {
                                1.0
                            }
                    })
                    .product();
                *map.entry(beta.clone()).or_insert(0.0) += t.coef * weight;
                // odometer over 0..=exps
                let mut j = 0;
                while j < self.dim {
                    if beta[j] < t.exps[j] {
                        beta[j] += 1;
                        break;
                    }
                    beta[j] = 0;
                    j += 1;
                }
                if j == self.dim {
                    break;
                }
            }
        }
        map.into_iter()
            .map(|(exps, coef)| Term { exps, coef })
            .collect()
    }

    /// Returns `(p(center), bound)` with `p(y) <= bound` whenever
    /// `|y_j - center_j| <= half_widths[j]` for every `j`.
    pub fn upper_bound_on_box(&self, center: &[f64], half_widths: &[f64]) -> (f64, f64) {
        let mut value = 0.0;
        let mut spread = 0.0;
        for t in self.taylor_coefficients(center) {
            if t.exps.iter().all(|&e| e == 0) {
                value += t.coef;
            } else {
                spread += t.coef.abs() * monomial(half_widths, &t.exps);
            }
        }
        // Evaluate directly as well: it is the value reported to callers.
        let direct = self.eval(center);
        let slack = (value - direct).abs();
        (direct, direct + spread + slack)
    }

    /// Upper bound for `sup |p|` over the box `[lower, upper]`.
    pub fn abs_bound(&self, lower: &[f64], upper: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let m: f64 = t
                    .exps
                    .iter()
                    .enumerate()
                    .map(|(j, &e)| lower[j].abs().max(upper[j].abs()).powi(e as i32))
                    .product();
                t.coef.abs() * m
            })
            .sum()
    }

    /// Max-metric Lipschitz constant of `p` on the box: `sum_j sup |d_j p|`.
    pub fn lipschitz_bound(&self, lower: &[f64], upper: &[f64]) -> f64 {
        (0..self.dim)
            .map(|j| {
                let mut alpha = vec![0u32; self.dim];
                alpha[j] = 1;
                self.derivative(&alpha)
                    .expect("well-formed index")
                    .abs_bound(lower, upper)
            })
            .sum()
    }

    /// Per-variable absolute derivative bounds `sup |d_j p|` on the box.
    pub fn partial_abs_bounds(&self, lower: &[f64], upper: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|j| {
                let mut alpha = vec![0u32; self.dim];
                alpha[j] = 1;
                self.derivative(&alpha)
                    .expect("well-formed index")
                    .abs_bound(lower, upper)
            })
            .collect()
    }
}
