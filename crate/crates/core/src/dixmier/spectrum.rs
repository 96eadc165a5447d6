use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{covering_block, spectral_norm, DiagonalWeight, Form, WeightedProduct};
use crate::error::{Error, Result};
use crate::trace::hurwitz_zeta;

/// Eigenvector matrices with a smaller normalized singular value are
/// treated as defective.
const DEFECT_TOL: f64 = 1e-8;

/// Which sequence to extract from each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Singular,
    Eigen,
}

/// Retained index set: all `(n, m)` with `n + m + 1 ≤ shells` and `n < n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub shells: usize,
    pub n_max: usize,
}

impl Truncation {
    /// Whole shells up to `shells`.
    pub fn shells(shells: usize) -> Self {
        Self { shells, n_max: shells }
    }

    /// Whole shells keeping about as many values for an operator supported
    /// on the first `support` Landau levels as `shells` shells keep for a
    /// pure weight, namely `shells(shells+1)/2`.
    pub fn matched_to_weight(shells: usize, support: usize) -> Self {
        let target = shells * (shells + 1) / 2;
        Self::shells(shells.max(target.div_ceil(support.max(1))))
    }

    /// Retained size of block `m`.
    fn block_dim(&self, m: usize) -> usize {
        self.shells.saturating_sub(m).min(self.n_max)
    }

    fn validate(&self) -> Result<()> {
        if self.shells == 0 || self.n_max == 0 {
            return Err(Error::Domain("truncation needs at least one shell and one n".into()));
        }
        Ok(())
    }
}

/// Operators whose spectra can be collected block by block.
#[derive(Debug, Clone, Copy)]
pub enum SpectrumSource<'a> {
    Weight(&'a DiagonalWeight),
    Product(&'a WeightedProduct),
}

impl<'a> From<&'a DiagonalWeight> for SpectrumSource<'a> {
    fn from(w: &'a DiagonalWeight) -> Self {
        SpectrumSource::Weight(w)
    }
}

impl<'a> From<&'a WeightedProduct> for SpectrumSource<'a> {
    fn from(p: &'a WeightedProduct) -> Self {
        SpectrumSource::Product(p)
    }
}

impl SpectrumSource<'_> {
    fn describe(&self) -> String {
        match self {
            SpectrumSource::Weight(w) => w.describe(),
            SpectrumSource::Product(p) => p.describe(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub operator: String,
    pub truncation: Option<Truncation>,
    pub kind: SpectrumKind,
}

/// Analytic model for the part of the spectrum outside the truncation,
/// used to complete `Σ μ^{1+x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TailModel {
    /// Nothing known; sums are lower bounds.
    None,
    /// Values `coeff·(k + offset)^{-exponent}`, `k ≥ 0`.
    PowerLaw { coeff: f64, exponent: f64, offset: f64 },
    /// Shells `e ≥ from_shell`, each `e` values `coeff·(e + λ)^{-s}`.
    QShells { coeff: f64, s: f64, lambda: f64, from_shell: usize },
    /// For each `c`, values `c·(e + λ)^{-s}` over shells `e ≥ from_shell`.
    DiagonalShells { coeffs: Vec<f64>, s: f64, lambda: f64, from_shell: usize },
    /// Values `first·ratio^k`, `k ≥ 0`.
    Geometric { first: f64, ratio: f64 },
}

impl TailModel {
    /// `Σ_{tail} μ^{1+x}`, or `None` when no model is available.
    pub fn zeta_tail(&self, x: f64) -> Result<Option<f64>> {
        let p = 1.0 + x;
        Ok(match self {
            TailModel::None => None,
            TailModel::PowerLaw { coeff, exponent, offset } => {
                Some(coeff.powf(p) * hurwitz_zeta(exponent * p, *offset)?)
            }
            TailModel::QShells { coeff, s, lambda, from_shell } => {
                let q = *from_shell as f64 + lambda;
                // Σ_e e (e+λ)^{-t} = ζ(t−1, q) − λ ζ(t, q)
                let t = s * p;
                Some(coeff.powf(p) * (hurwitz_zeta(t - 1.0, q)? - lambda * hurwitz_zeta(t, q)?))
            }
            TailModel::DiagonalShells { coeffs, s, lambda, from_shell } => {
                let z = hurwitz_zeta(s * p, *from_shell as f64 + lambda)?;
                Some(coeffs.iter().map(|c| c.powf(p)).sum::<f64>() * z)
            }
            TailModel::Geometric { first, ratio } => {
                if !(*ratio >= 0.0 && *ratio < 1.0) {
                    return Err(Error::Domain(format!("geometric tail needs 0 ≤ ratio < 1 (got {ratio})")));
                }
                Some(first.powf(p) / (1.0 - ratio.powf(p)))
            }
        })
    }
}

/// Sequences whose partial sums feed the Dixmier estimators.
pub trait SpectralSequence {
    /// Total retained dimension, zeros included.
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Length of the prefix that coincides with the untruncated operator.
    fn certified_len(&self) -> usize;
    fn modulus(&self, i: usize) -> f64;
    /// Term `i` of the Dixmier partial sum.
    fn summand(&self, i: usize) -> Result<f64>;
    fn describe(&self) -> String;
}

/// Non-increasing singular values `μ₀ ≥ μ₁ ≥ … ≥ 0`.
///
/// Only the non-zero part is stored; indices up to `len()` beyond it are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    dim: usize,
    certified_len: usize,
    pub tail: TailModel,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl SingularSpectrum {
    /// Spectrum from explicit values; all of it is certified and no tail
    /// model is attached.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("singular values must be finite and non-negative".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let dim = values.len();
        while values.last() == Some(&0.0) {
            values.pop();
        }
        Ok(Self {
            values,
            dim,
            certified_len: dim,
            tail: TailModel::None,
            provenance: Provenance {
                operator: "explicit values".into(),
                truncation: None,
                kind: SpectrumKind::Singular,
            },
            warnings: Vec::new(),
        })
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = tail;
        self
    }

    /// Non-zero values in non-increasing order.
    pub fn nonzero_values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// All values including trailing zeros.
    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.value(i)).collect()
    }
}

impl SpectralSequence for SingularSpectrum {
    fn len(&self) -> usize {
        self.dim
    }

    fn certified_len(&self) -> usize {
        self.certified_len
    }

    fn modulus(&self, i: usize) -> f64 {
        self.value(i)
    }

    fn summand(&self, i: usize) -> Result<f64> {
        Ok(self.value(i))
    }

    fn describe(&self) -> String {
        self.provenance.operator.clone()
    }
}

/// Eigenvalues ordered by non-increasing modulus, with the block each came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSequence {
    values: Vec<(Complex64, usize)>,
    dim: usize,
    certified_len: usize,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl EigenSequence {
    pub fn value(&self, i: usize) -> Complex64 {
        self.values.get(i).map(|v| v.0).unwrap_or_default()
    }

    pub fn block_of(&self, i: usize) -> Option<usize> {
        self.values.get(i).map(|v| v.1)
    }

    pub fn nonzero_values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().map(|v| v.0)
    }
}

impl SpectralSequence for EigenSequence {
    fn len(&self) -> usize {
        self.dim
    }

    fn certified_len(&self) -> usize {
        self.certified_len
    }

    fn modulus(&self, i: usize) -> f64 {
        self.value(i).norm()
    }

    fn summand(&self, i: usize) -> Result<f64> {
        match self.values.get(i) {
            None => Ok(0.0),
            Some(&(v, block)) if v.im.abs() > 1e-10 => Err(Error::Computation {
                block,
                message: format!("eigenvalue {v} has a non-negligible imaginary part"),
            }),
            Some(&(v, _)) => Ok(v.re),
        }
    }

    fn describe(&self) -> String {
        self.provenance.operator.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Singular(SingularSpectrum),
    Eigen(EigenSequence),
}

impl Spectrum {
    pub fn as_sequence(&self) -> &dyn SpectralSequence {
        match self {
            Spectrum::Singular(s) => s,
            Spectrum::Eigen(e) => e,
        }
    }
}

/// Eigenvalues of a block, failing when it is numerically defective.
fn block_eigenvalues(block: DMatrix<Complex64>, id: usize) -> Result<Vec<Complex64>> {
    let n = block.nrows();
    let scale = block.norm();
    if scale == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    if (&block - block.adjoint()).norm() <= 1e-14 * scale {
        let hermitian = (&block + block.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(hermitian);
        return Ok(eig.eigenvalues.iter().map(|&v| Complex64::new(v, 0.0)).collect());
    }
    let (q, t) = nalgebra::Schur::new(block).unpack();
    let eigs: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    // eigenvectors of the triangular factor by back substitution
    let floor = f64::EPSILON * scale;
    let mut vecs = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        vecs[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in j + 1..=i {
                acc += t[(j, k)] * vecs[(k, i)];
            }
            let mut denom = t[(j, j)] - eigs[i];
            if denom.norm() < floor {
                denom = Complex64::new(floor, 0.0);
            }
            vecs[(j, i)] = -acc / denom;
        }
    }
    let mut v = q * vecs;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        col /= Complex64::new(nrm, 0.0);
    }
    let smallest = v.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
    if smallest.is_nan() || smallest <= DEFECT_TOL {
        return Err(Error::Computation {
            block: id,
            message: format!(
                "block is not numerically diagonalizable (eigenvector conditioning {smallest:.1e})"
            ),
        });
    }
    Ok(eigs)
}

/// Values `value > threshold` are exact: everything at or below it may
/// have been affected by the truncation.
fn count_above(moduli: impl Iterator<Item = f64>, threshold: f64) -> usize {
    moduli.filter(|&v| v > threshold).count()
}

fn weight_spectrum(
    w: &DiagonalWeight,
    trunc: Truncation,
    kind: SpectrumKind,
) -> (Vec<(Complex64, usize)>, usize, TailModel, Vec<String>) {
    let values: Vec<(Complex64, usize)> = (0..trunc.shells)
        .into_par_iter()
        .flat_map_iter(|m| {
            (0..trunc.block_dim(m)).map(move |n| {
                let v = w.value(n, m);
                let v = match kind {
                    SpectrumKind::Singular => v.abs(),
                    SpectrumKind::Eigen => v,
                };
                (Complex64::new(v, 0.0), m)
            })
        })
        .collect();
    let mut warnings = Vec::new();
    let (certified, tail) = match w {
        DiagonalWeight::QPower { s, lambda } => {
            // the smallest omitted shell bounds every omitted value
            let missing = (trunc.shells + 1).min(trunc.n_max + 1);
            let threshold = (missing as f64 + lambda).powf(-s);
            let certified = count_above(values.iter().map(|v| v.0.norm()), threshold);
            let tail = if trunc.n_max >= trunc.shells {
                TailModel::QShells {
                    coeff: 1.0,
                    s: *s,
                    lambda: *lambda,
                    from_shell: trunc.shells + 1,
                }
            } else {
                TailModel::None
            };
            (certified, tail)
        }
        _ => {
            warnings.push(format!(
                "{} is not monotone in the shell: no prefix is certified",
                w.describe()
            ));
            (0, TailModel::None)
        }
    };
    (values, certified, tail, warnings)
}

/// Values with multiplicities, certified length, tail model and warnings.
type CollectedValues = (Vec<(Complex64, usize)>, usize, TailModel, Vec<String>);

fn product_spectrum(p: &WeightedProduct, trunc: Truncation, kind: SpectrumKind) -> Result<CollectedValues> {
    let support = p.op.support_dim();
    let blocks: Vec<Vec<(Complex64, usize)>> = (0..trunc.shells)
        .into_par_iter()
        .map(|m| {
            let dim = trunc.block_dim(m).min(support);
            if dim == 0 || p.op.is_zero() {
                return Ok(Vec::new());
            }
            let block = DMatrix::from_fn(dim, dim, |n, n2| p.entry(n, n2, m));
            let vals: Vec<Complex64> = match kind {
                SpectrumKind::Singular => block
                    .singular_values()
                    .iter()
                    .map(|&v| Complex64::new(v, 0.0))
                    .collect(),
                SpectrumKind::Eigen => block_eigenvalues(block, m)?,
            };
            Ok(vals.into_iter().filter(|v| v.norm() > 0.0).map(|v| (v, m)).collect())
        })
        .collect::<Result<_>>()?;
    let values: Vec<(Complex64, usize)> = blocks.into_iter().flatten().collect();

    let mut warnings = Vec::new();
    let certified = if trunc.n_max < support {
        warnings.push(format!(
            "n_max {} is below the operator support {support}: no prefix is certified",
            trunc.n_max
        ));
        0
    } else if trunc.shells < support {
        0
    } else {
        // blocks m ≤ shells − support are complete; later ones are bounded
        // by ‖S‖ times the weight at shell (shells − support + 2)
        let op_norm = spectral_norm(&covering_block(&p.op));
        let first_partial = trunc.shells - support + 1;
        let threshold = op_norm * p.weight_bound(first_partial + 1);
        count_above(values.iter().map(|v| v.0.norm()), threshold)
    };

    let diagonal_tail = p.op.is_diagonal()
        && trunc.n_max >= trunc.shells
        && (p.form != Form::Split || p.lambda == p.lambda_prime);
    let tail = if diagonal_tail {
        TailModel::DiagonalShells {
            coeffs: p.op.diagonal().values().map(|c| c.norm()).collect(),
            s: p.s,
            lambda: p.lambda,
            from_shell: trunc.shells + 1,
        }
    } else {
        TailModel::None
    };
    Ok((values, certified, tail, warnings))
}

/// Collects the singular values or eigenvalues of a block-diagonal operator
/// over the retained shells, merged in non-increasing modulus.
pub fn collect_spectrum<'a>(
    source: impl Into<SpectrumSource<'a>>,
    trunc: Truncation,
    kind: SpectrumKind,
) -> Result<Spectrum> {
    trunc.validate()?;
    let source = source.into();
    let (mut values, certified_len, tail, warnings) = match source {
        SpectrumSource::Weight(w) => weight_spectrum(w, trunc, kind),
        SpectrumSource::Product(p) => product_spectrum(p, trunc, kind)?,
    };
    let dim: usize = (0..trunc.shells).map(|m| trunc.block_dim(m)).sum();
    values.par_sort_by(|a, b| {
        b.0.norm()
            .total_cmp(&a.0.norm())
            .then(b.0.re.total_cmp(&a.0.re))
            .then(b.0.im.total_cmp(&a.0.im))
            .then(a.1.cmp(&b.1))
    });
    while values.last().is_some_and(|v| v.0.norm() == 0.0) {
        values.pop();
    }
    let provenance = Provenance {
        operator: source.describe(),
        truncation: Some(trunc),
        kind,
    };
    Ok(match kind {
        SpectrumKind::Singular => Spectrum::Singular(SingularSpectrum {
            values: values.into_iter().map(|v| v.0.re).collect(),
            dim,
            certified_len,
            tail,
            provenance,
            warnings,
        }),
        SpectrumKind::Eigen => Spectrum::Eigen(EigenSequence {
            values,
            dim,
            certified_len,
            provenance,
            warnings,
        }),
    })
}

/// Singular values of `source`.
pub fn singular_spectrum<'a>(source: impl Into<SpectrumSource<'a>>, trunc: Truncation) -> Result<SingularSpectrum> {
    match collect_spectrum(source, trunc, SpectrumKind::Singular)? {
        Spectrum::Singular(s) => Ok(s),
        Spectrum::Eigen(_) => unreachable!("singular kind requested"),
    }
}

/// Eigenvalues of `source`.
pub fn eigen_sequence<'a>(source: impl Into<SpectrumSource<'a>>, trunc: Truncation) -> Result<EigenSequence> {
    match collect_spectrum(source, trunc, SpectrumKind::Eigen)? {
        Spectrum::Eigen(e) => Ok(e),
        Spectrum::Singular(_) => unreachable!("eigen kind requested"),
    }
}
