//! Multi-index algebra: construction, evaluation, differentiation and
//! counting of monomial bases in `r` variables.
//!
//! The canonical ordering is graded lexicographic: monomials are sorted by
//! total degree first, then by exponent tuple with the first variable most
//! significant (so `x1^2` precedes `x1*x2` precedes `x2^2`). Every basis has
//! a unique serialization under this order.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest exponent a single variable may carry. Far beyond any realistic
/// polynomial degree for this model class; keeps degree arithmetic exact.
pub const MAX_EXPONENT: u32 = 31;

/// Exponent multi-index of a single monomial `prod_i x_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidDimension);
        }
        if let Some(&e) = exponents.iter().find(|&&e| e > MAX_EXPONENT) {
            return Err(Error::ExponentOverflow(e));
        }
        Ok(Self { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn num_vars(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Product of two monomials over the same variable set.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.num_vars() != other.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "monomial product over {} vs {} variables",
                self.num_vars(),
                other.num_vars()
            )));
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(exponents)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} entries, monomial has {} variables",
                x.len(),
                self.num_vars()
            )));
        }
        Ok(self
            .exponents
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product())
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Ordered, duplicate-free set of monomials in `r` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    r: usize,
    entries: Vec<MultiIndex>,
}

impl MonomialBasis {
    /// Builds a basis from arbitrary entries: sorts canonically and
    /// removes duplicates.
    pub fn from_entries(r: usize, mut entries: Vec<MultiIndex>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidDimension);
        }
        for e in &entries {
            if e.num_vars() != r {
                return Err(Error::DimensionMismatch(format!(
                    "entry over {} variables in a basis of {}",
                    e.num_vars(),
                    r
                )));
            }
        }
        entries.sort();
        entries.dedup();
        Ok(Self { r, entries })
    }

    pub fn num_vars(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MultiIndex] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.entries.iter()
    }

    /// Position of a monomial in the basis, if present.
    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.entries.binary_search(m).ok()
    }

    /// Set-semantics union of two bases over the same variables.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch(
                "union of bases over different variable counts".into(),
            ));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Self::from_entries(self.r, entries)
    }

    /// Degree of each entry; encodes `x^T grad(x^a) = |a| x^a` per monomial,
    /// so `x^T grad(k^T phi)(x) = sum_j w_j k_j phi_j(x)`.
    pub fn euler_weights(&self) -> Vec<u32> {
        self.entries.iter().map(|m| m.degree()).collect()
    }

    /// Evaluates every monomial at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let pows = self.power_table(x)?;
        Ok(self
            .entries
            .iter()
            .map(|m| {
                m.exponents
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| pows[(i, e as usize)])
                    .product()
            })
            .collect())
    }

    /// Analytic gradient of the polynomial `k^T phi` at `x`.
    pub fn eval_gradient(&self, k: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        if k.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector has {} entries, basis has {}",
                k.len(),
                self.len()
            )));
        }
        let pows = self.power_table(x)?;
        let mut grad = vec![0.0; self.r];
        for (m, &kj) in self.entries.iter().zip(k) {
            if kj == 0.0 {
                continue;
            }
            for (j, &ej) in m.exponents.iter().enumerate() {
                if ej == 0 {
                    continue;
                }
                let mut term = ej as f64 * pows[(j, ej as usize - 1)];
                for (i, &ei) in m.exponents.iter().enumerate() {
                    if i != j {
                        term *= pows[(i, ei as usize)];
                    }
                }
                grad[j] += kj * term;
            }
        }
        Ok(grad)
    }

    /// Hessian of `k^T phi` at `x` (symmetric `r x r`).
    pub fn eval_hessian(&self, k: &[f64], x: &[f64]) -> Result<DMatrix<f64>> {
        if k.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector has {} entries, basis has {}",
                k.len(),
                self.len()
            )));
        }
        let pows = self.power_table(x)?;
        let mut hess = DMatrix::zeros(self.r, self.r);
        for (m, &kj) in self.entries.iter().zip(k) {
            if kj == 0.0 {
                continue;
            }
            let e = &m.exponents;
            for j in 0..self.r {
                if e[j] == 0 {
                    continue;
                }
                // Diagonal: e_j (e_j - 1) x_j^{e_j - 2} * rest.
                if e[j] >= 2 {
                    let mut term = (e[j] * (e[j] - 1)) as f64 * pows[(j, e[j] as usize - 2)];
                    for (i, &ei) in e.iter().enumerate() {
                        if i != j {
                            term *= pows[(i, ei as usize)];
                        }
                    }
                    hess[(j, j)] += kj * term;
                }
                for l in (j + 1)..self.r {
                    if e[l] == 0 {
                        continue;
                    }
                    let mut term = (e[j] * e[l]) as f64
                        * pows[(j, e[j] as usize - 1)]
                        * pows[(l, e[l] as usize - 1)];
                    for (i, &ei) in e.iter().enumerate() {
                        if i != j && i != l {
                            term *= pows[(i, ei as usize)];
                        }
                    }
                    hess[(j, l)] += kj * term;
                    hess[(l, j)] += kj * term;
                }
            }
        }
        Ok(hess)
    }

    /// Jacobian-of-basis matrix at `x`: entry `(j, a)` is `d phi_a / d x_j`.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let pows = self.power_table(x)?;
        let mut jac = DMatrix::zeros(self.r, self.len());
        for (a, m) in self.entries.iter().enumerate() {
            for (j, &ej) in m.exponents.iter().enumerate() {
                if ej == 0 {
                    continue;
                }
                let mut term = ej as f64 * pows[(j, ej as usize - 1)];
                for (i, &ei) in m.exponents.iter().enumerate() {
                    if i != j {
                        term *= pows[(i, ei as usize)];
                    }
                }
                jac[(j, a)] = term;
            }
        }
        Ok(jac)
    }

    /// One monomial per line, exponents space-separated.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for m in &self.entries {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the line serialization; entries must already be in canonical
    /// order with no duplicates.
    pub fn from_lines(r: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let exps: Vec<u32> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent {t:?}")))
                })
                .collect::<Result<_>>()?;
            entries.push(MultiIndex::new(exps)?);
        }
        let parsed = entries.clone();
        let basis = Self::from_entries(r, entries)?;
        if basis.entries != parsed {
            return Err(Error::Parse(
                "monomial lines are not in canonical order".into(),
            ));
        }
        Ok(basis)
    }

    fn power_table(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if x.len() != self.r {
            return Err(Error::DimensionMismatch(format!(
                "point has {} entries, basis has {} variables",
                x.len(),
                self.r
            )));
        }
        let max_e = self
            .entries
            .iter()
            .flat_map(|m| m.exponents.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let mut pows = DMatrix::zeros(self.r, max_e + 1);
        for i in 0..self.r {
            pows[(i, 0)] = 1.0;
            for e in 1..=max_e {
                pows[(i, e)] = pows[(i, e - 1)] * x[i];
            }
        }
        Ok(pows)
    }
}

fn check_model_degree(d: usize) -> Result<()> {
    if d < 2 || d % 2 != 0 || d > MAX_EXPONENT as usize {
        return Err(Error::InvalidDegree(d));
    }
    Ok(())
}

/// All exponent vectors over `vars` (subset of `0..r`) with total degree in
/// `lo..=hi`, embedded in `r` variables.
fn monomials_on_support(r: usize, vars: &[usize], lo: u32, hi: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; r];
    fn rec(
        vars: &[usize],
        pos: usize,
        remaining: u32,
        lo: u32,
        exps: &mut Vec<u32>,
        out: &mut Vec<MultiIndex>,
    ) {
        if pos == vars.len() {
            let deg: u32 = vars.iter().map(|&v| exps[v]).sum();
            if deg >= lo {
                out.push(MultiIndex {
                    exponents: exps.clone(),
                });
            }
            return;
        }
        for e in 0..=remaining {
            exps[vars[pos]] = e;
            rec(vars, pos + 1, remaining - e, lo, exps, out);
        }
        exps[vars[pos]] = 0;
    }
    rec(vars, 0, hi, lo, &mut exps, &mut out);
    out
}

/// All monomials of degree `2..=d` in `r` variables. Size equals
/// `C(r + d, d) - r - 1`: the constant and the `r` linear monomials are
/// excluded since they cannot appear in a sum-of-squares potential with
/// zero value at the origin.
pub fn full_basis(r: usize, d: usize) -> Result<MonomialBasis> {
    if r == 0 {
        return Err(Error::InvalidDimension);
    }
    check_model_degree(d)?;
    let vars: Vec<usize> = (0..r).collect();
    MonomialBasis::from_entries(r, monomials_on_support(r, &vars, 2, d as u32))
}

/// All monomials of degree `2..=d` supported on the given variable subset,
/// embedded in `r` variables.
pub fn cluster_basis(r: usize, vars: &[usize], d: usize) -> Result<MonomialBasis> {
    check_support(r, vars)?;
    check_model_degree(d)?;
    MonomialBasis::from_entries(r, monomials_on_support(r, vars, 2, d as u32))
}

/// Closed-form count of [`full_basis`]: `C(r + d, d) - r - 1`.
pub fn count_full(r: usize, d: usize) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidDimension);
    }
    check_model_degree(d)?;
    Ok(binomial(r + d, d) - r as u64 - 1)
}

/// Sum-of-squares factor basis for one cluster: all monomials of degree
/// `1..=d/2` in the given variables (constant excluded so each factor
/// vanishes at the origin). Size is `C(|vars| + d/2, d/2) - 1`.
pub fn sos_factor_basis(r: usize, vars: &[usize], d: usize) -> Result<MonomialBasis> {
    if vars.is_empty() {
        return Err(Error::InvalidCluster("empty variable set".into()));
    }
    check_support(r, vars)?;
    check_model_degree(d)?;
    let half = (d / 2) as u32;
    MonomialBasis::from_entries(r, monomials_on_support(r, vars, 1, half))
}

fn check_support(r: usize, vars: &[usize]) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidDimension);
    }
    if vars.is_empty() {
        return Err(Error::InvalidCluster("empty variable set".into()));
    }
    for w in vars.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidCluster(
                "variable indices must be strictly increasing".into(),
            ));
        }
    }
    if *vars.last().unwrap() >= r {
        return Err(Error::InvalidCluster(format!(
            "variable index {} out of range for r = {}",
            vars.last().unwrap(),
            r
        )));
    }
    Ok(())
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as u64
}
