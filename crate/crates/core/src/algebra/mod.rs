//! Coefficient calculus of the magnetic algebra.
//!
//! An operator is a finite family `{s_{j,k}}` standing for `Σ s_{j,k} Υ_{j→k}`,
//! where the transition operators act on the first Laguerre index by
//! `Υ_{j→k} ψ_{n,m} = δ_{j,n} ψ_{k,m}` and leave the second alone.

mod absorb;
mod block;
mod io;
mod weight;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use absorb::{
    absorb_product, absorption_bound, coefficient_bound_check, hs_kernel_norm, AbsorptionReport,
    CoefficientBoundReport, KernelNormReport, TailConvergence,
};
pub use block::{covering_block, matrix_block, spectral_norm, BlockOperator, TruncatedMatrix};
pub use io::{read_operator, write_operator, OperatorFile, OperatorFileEntry};
pub use weight::{weighted_product, DiagonalWeight, Form, WeightedProduct};

/// Summability class an operator is declared to belong to.
///
/// The flag is metadata: no operation ever infers membership from the
/// stored entries, it only propagates what the caller declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum OperatorClass {
    L1,
    L2,
    Itau,
    #[default]
    #[serde(rename = "unclassified")]
    Unclassified,
}

impl OperatorClass {
    /// Class of a product. `𝕃¹` is an algebra and an ideal in `𝕃²`, and
    /// products of two `𝕃²` elements are trace class.
    fn of_product(a: Self, b: Self) -> Self {
        use OperatorClass::*;
        match (a, b) {
            (L1, L1) => L1,
            (L1, L2) | (L2, L1) => L2,
            (L2, L2) | (L1, Itau) | (Itau, L1) => Itau,
            _ => Unclassified,
        }
    }

    fn of_sum(a: Self, b: Self) -> Self {
        if a == b {
            a
        } else {
            OperatorClass::Unclassified
        }
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorClass::L1 => "L1",
            OperatorClass::L2 => "L2",
            OperatorClass::Itau => "Itau",
            OperatorClass::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// Finite coefficient family `(j, k) ↦ s_{j,k}`; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoefficientOperator {
    entries: BTreeMap<(usize, usize), Complex64>,
    class: OperatorClass,
}

impl CoefficientOperator {
    /// The zero operator.
    pub fn zero(class: OperatorClass) -> Self {
        Self {
            entries: BTreeMap::new(),
            class,
        }
    }

    /// Builds an operator from `(j, k, value)` triples. Repeated keys are
    /// summed and exact zeros are dropped.
    pub fn from_entries<I>(entries: I, class: OperatorClass) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut op = Self::zero(class);
        for (j, k, v) in entries {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Domain(format!("coefficient ({j},{k}) is not finite: {v}")));
            }
            *op.entries.entry((j, k)).or_default() += v;
        }
        op.prune();
        Ok(op)
    }

    /// Transition operator `Υ_{j→k}`.
    pub fn transition(j: usize, k: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((j, k), Complex64::new(1.0, 0.0));
        Self {
            entries,
            class: OperatorClass::L1,
        }
    }

    /// Landau projection `Π_j = Υ_{j→j}`.
    pub fn landau_projection(j: usize) -> Self {
        Self::transition(j, j)
    }

    /// Diagonal operator `Σ c_n Π_n`.
    pub fn diagonal_from(values: &[Complex64], class: OperatorClass) -> Result<Self> {
        Self::from_entries(values.iter().enumerate().map(|(n, &c)| (n, n, c)), class)
    }

    /// The algebra has no unit, so this always fails.
    pub fn identity() -> Result<Self> {
        Err(Error::Domain(
            "the magnetic algebra is non-unital: the identity has no coefficient representation".into(),
        ))
    }

    fn prune(&mut self) {
        self.entries.retain(|_, v| *v != Complex64::new(0.0, 0.0));
    }

    pub fn class(&self) -> OperatorClass {
        self.class
    }

    pub fn with_class(mut self, class: OperatorClass) -> Self {
        self.class = class;
        self
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries.get(&(j, k)).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index appearing in either slot, if any entry is stored.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().map(|&(j, k)| j.max(k)).max()
    }

    /// Dimension of the smallest block containing every stored index.
    pub fn support_dim(&self) -> usize {
        self.max_index().map_or(1, |i| i + 1)
    }

    /// Stored diagonal entries `n ↦ s_{n,n}`.
    pub fn diagonal(&self) -> BTreeMap<usize, Complex64> {
        self.entries
            .iter()
            .filter(|((j, k), _)| j == k)
            .map(|(&(n, _), &v)| (n, v))
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(j, k)| j == k)
    }

    /// True when `s_{j,k} = conj(s_{k,j})` within `tol`.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.entries
            .iter()
            .all(|(&(j, k), v)| (v - self.get(k, j).conj()).norm() <= tol)
            && self
                .entries
                .keys()
                .all(|&(j, k)| self.entries.contains_key(&(k, j)) || self.get(j, k).norm() <= tol)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self {
            entries: self.entries.iter().map(|(&key, &v)| (key, v * c)).collect(),
            class: self.class,
        };
        out.prune();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        for (&key, &v) in &other.entries {
            *entries.entry(key).or_default() += v;
        }
        let mut out = Self {
            entries,
            class: OperatorClass::of_sum(self.class, other.class),
        };
        out.prune();
        out
    }

    /// Adjoint: `(A*)_{j,k} = conj(a_{k,j})`.
    pub fn adjoint(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(&(j, k), v)| ((k, j), v.conj()))
                .collect(),
            class: self.class,
        }
    }

    /// Product `AB` with `(AB)_{m,k} = Σ_j a_{j,k} b_{m,j}`.
    pub fn compose(&self, other: &Self) -> Self {
        // index A by its first slot so each b_{m,j} meets the a_{j,·} row
        let mut rows: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (&(j, k), &a) in &self.entries {
            rows.entry(j).or_default().push((k, a));
        }
        let mut entries: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (&(m, j), &b) in &other.entries {
            if let Some(row) = rows.get(&j) {
                for &(k, a) in row {
                    *entries.entry((m, k)).or_default() += a * b;
                }
            }
        }
        let mut out = Self {
            entries,
            class: OperatorClass::of_product(self.class, other.class),
        };
        out.prune();
        out
    }

    /// `(Σ |a_{j,k}|^p)^{1/p}` over stored entries.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("ℓ^p norm needs p ≥ 1 (got {p})")));
        }
        if p.is_infinite() {
            return Ok(self.entries.values().map(|v| v.norm()).fold(0.0, f64::max));
        }
        let sum: f64 = self.entries.values().map(|v| v.norm().powf(p)).sum();
        Ok(sum.powf(1.0 / p))
    }
}

/// Free-function form of [`CoefficientOperator::adjoint`].
pub fn adjoint(a: &CoefficientOperator) -> CoefficientOperator {
    a.adjoint()
}

/// Free-function form of [`CoefficientOperator::compose`].
pub fn compose(a: &CoefficientOperator, b: &CoefficientOperator) -> CoefficientOperator {
    a.compose(b)
}

/// Free-function form of [`CoefficientOperator::lp_norm`].
pub fn lp_norm(a: &CoefficientOperator, p: f64) -> Result<f64> {
    a.lp_norm(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn adjoint_swaps_transition() {
        let a = CoefficientOperator::transition(0, 1);
        assert_eq!(a.adjoint(), CoefficientOperator::transition(1, 0));
    }

    #[test]
    fn adjoint_conjugates_diagonal() {
        let a = CoefficientOperator::from_entries([(2, 2, c(0.0, 1.0))], OperatorClass::L1).unwrap();
        assert_eq!(a.adjoint().get(2, 2), c(0.0, -1.0));
    }

    #[test]
    fn compose_generators() {
        let p = CoefficientOperator::transition(0, 1).compose(&CoefficientOperator::transition(2, 0));
        assert_eq!(p, CoefficientOperator::transition(2, 1));
        let pi1 = CoefficientOperator::landau_projection(1);
        assert_eq!(pi1.compose(&pi1), pi1);
        assert!(pi1.compose(&CoefficientOperator::landau_projection(2)).is_zero());
    }

    #[test]
    fn generator_relations_exhaustive() {
        for j in 0..=20 {
            for k in 0..=20 {
                let a = CoefficientOperator::transition(j, k);
                assert_eq!(a.adjoint(), CoefficientOperator::transition(k, j));
                for m in 0..=20 {
                    for n in 0..=20 {
                        let p = a.compose(&CoefficientOperator::transition(m, n));
                        if j == n {
                            assert_eq!(p, CoefficientOperator::transition(m, k));
                        } else {
                            assert!(p.is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lp_norms() {
        assert_eq!(CoefficientOperator::landau_projection(0).lp_norm(1.0).unwrap(), 1.0);
        let a = CoefficientOperator::from_entries([(0, 1, c(1.0, 0.0)), (3, 2, c(2.0, 0.0))], OperatorClass::L1)
            .unwrap();
        assert!((a.lp_norm(2.0).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(CoefficientOperator::zero(OperatorClass::L1).lp_norm(3.0).unwrap(), 0.0);
        assert!(matches!(a.lp_norm(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn identity_is_refused() {
        assert!(matches!(CoefficientOperator::identity(), Err(Error::Domain(_))));
    }

    #[test]
    fn non_finite_entries_rejected() {
        let r = CoefficientOperator::from_entries([(0, 0, c(f64::NAN, 0.0))], OperatorClass::L1);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn class_propagation() {
        let l1 = CoefficientOperator::landau_projection(0);
        let l2 = l1.clone().with_class(OperatorClass::L2);
        assert_eq!(l1.compose(&l1).class(), OperatorClass::L1);
        assert_eq!(l2.adjoint().compose(&l2).class(), OperatorClass::Itau);
        assert_eq!(l1.add(&l2).class(), OperatorClass::Unclassified);
    }
}
