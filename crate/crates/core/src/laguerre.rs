//! Generalized Laguerre polynomials and the orthonormal Laguerre basis
//! `ψ_{n,m}` of `L²(ℝ²)`.
//!
//! The basis is oriented so that the transition operators act on the first
//! index through twisted convolution with the magnetic phase
//! `exp(i x∧y / 2ℓ²)`: the holomorphic-type factor is `(x₁ − i x₂)/(ℓ√2)`.
//! With this orientation `Π_0` fixes every `ψ_{0,m}` and `Υ_{j→k}ψ_{n,m} =
//! δ_{j,n} ψ_{k,m}` holds for the kernel series in [`crate::kernel`].

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::config::MagneticConfig;
use crate::error::{Error, Result};

/// Largest index accepted by [`orthonormality_check`].
pub const MAX_GRAM_INDEX: usize = 8;

/// Index `(n, m)` of a Laguerre basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub n: usize,
    pub m: usize,
}

impl BasisIndex {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    /// Energy shell `n + m + 1`, the eigenvalue of the harmonic oscillator.
    pub fn shell(&self) -> usize {
        self.n + self.m + 1
    }
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x1: f64,
    pub x2: f64,
}

impl Point2D {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    /// Symplectic form `x∧a = x₁a₂ − x₂a₁`.
    pub fn wedge(&self, other: &Point2D) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl std::ops::Sub for Point2D {
    type Output = Point2D;
    fn sub(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl std::ops::Add for Point2D {
    type Output = Point2D;
    fn add(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

/// Generalized Laguerre polynomial `L_n^{(α)}(ζ)` by the three-term
/// recurrence `k L_k = (2k − 1 + α − ζ) L_{k−1} − (k − 1 + α) L_{k−2}`.
pub fn laguerre_poly(n: usize, alpha: f64, zeta: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - zeta;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0 + alpha - zeta) * cur - (kf - 1.0 + alpha) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln √(n!/m!)` via log-gamma.
fn half_log_factorial_ratio(n: usize, m: usize) -> f64 {
    0.5 * (ln_gamma(n as f64 + 1.0) - ln_gamma(m as f64 + 1.0))
}

/// Value of the Laguerre basis function `ψ_{n,m}` at `p`.
pub fn psi(index: BasisIndex, p: Point2D, cfg: &MagneticConfig) -> Complex64 {
    let ell = cfg.ell();
    let r2 = p.norm_sqr();
    let zeta = r2 / (2.0 * ell * ell);
    let (n, m) = (index.n, index.m);
    // ψ_{n,m} for m < n reduces to the (m, n) polynomial through
    // L_n^{(−k)}(ζ) = (−ζ)^k (n−k)!/n! L_{n−k}^{(k)}(ζ).
    let (low, k, conj_power, sign) = if m >= n {
        (n, m - n, false, 1.0)
    } else {
        let k = n - m;
        (m, k, true, if k % 2 == 0 { 1.0 } else { -1.0 })
    };
    let poly = laguerre_poly(low, k as f64, zeta);
    if poly == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let log_ratio = if m >= n {
        half_log_factorial_ratio(n, m)
    } else {
        half_log_factorial_ratio(m, n)
    };
    let gauss = -r2 / (4.0 * ell * ell);
    let prefactor = 1.0 / ((2.0 * PI).sqrt() * ell);
    if k == 0 {
        return Complex64::new(sign * prefactor * poly * (log_ratio + gauss).exp(), 0.0);
    }
    if r2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // w = (x₁ − i x₂)/(ℓ√2) = |w| e^{−iθ}
    let log_modulus = 0.5 * zeta.ln();
    let theta = p.x2.atan2(p.x1);
    let angle = if conj_power { k as f64 * theta } else { -(k as f64) * theta };
    let amplitude = sign * prefactor * poly * (log_ratio + gauss + k as f64 * log_modulus).exp();
    Complex64::from_polar(1.0, angle) * amplitude
}

/// Tensor-product Gauss–Legendre rule on `[−R, R]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub half_width: f64,
    pub nodes: usize,
}

impl QuadratureSpec {
    /// Default rule: `R = 12ℓ`, 160 nodes per axis.
    pub fn default_for(cfg: &MagneticConfig) -> Self {
        Self {
            half_width: 12.0 * cfg.ell(),
            nodes: 160,
        }
    }

    /// Quadrature points and weights; fails on degenerate rules.
    pub fn points(&self) -> Result<Vec<(Point2D, f64)>> {
        if self.nodes < 2 {
            return Err(Error::Resource(format!(
                "quadrature needs at least 2 nodes per axis (got {})",
                self.nodes
            )));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::Resource(format!(
                "quadrature half-width must be positive (got {})",
                self.half_width
            )));
        }
        let rule = GaussLegendre::new(
            self.nodes
                .try_into()
                .map_err(|_| Error::Resource("node count overflow".into()))?,
        );
        let axis: Vec<(f64, f64)> = rule
            .iter()
            .map(|(x, w)| (x * self.half_width, w * self.half_width))
            .collect();
        let mut pts = Vec::with_capacity(axis.len() * axis.len());
        for &(x1, w1) in &axis {
            for &(x2, w2) in &axis {
                pts.push((Point2D::new(x1, x2), w1 * w2));
            }
        }
        Ok(pts)
    }
}

/// Pairing errors `|⟨ψ_a, ψ_b⟩ − δ_ab|` over all indices with `n, m ≤ max_index`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramReport {
    pub indices: Vec<BasisIndex>,
    pub errors: Vec<Vec<f64>>,
    pub max_error: f64,
}

pub fn orthonormality_check(
    max_index: usize,
    cfg: &MagneticConfig,
    grid: &QuadratureSpec,
) -> Result<GramReport> {
    if max_index > MAX_GRAM_INDEX {
        return Err(Error::Resource(format!(
            "max_index {max_index} exceeds the quadrature budget ({MAX_GRAM_INDEX})"
        )));
    }
    let pts = grid.points()?;
    let indices: Vec<BasisIndex> = (0..=max_index)
        .flat_map(|n| (0..=max_index).map(move |m| BasisIndex::new(n, m)))
        .collect();
    let samples: Vec<Vec<Complex64>> = indices
        .par_iter()
        .map(|&idx| pts.iter().map(|(p, _)| psi(idx, *p, cfg)).collect())
        .collect();
    let errors: Vec<Vec<f64>> = (0..indices.len())
        .into_par_iter()
        .map(|a| {
            (0..indices.len())
                .map(|b| {
                    let inner: Complex64 = samples[a]
                        .iter()
                        .zip(&samples[b])
                        .zip(&pts)
                        .map(|((fa, fb), (_, w))| fa.conj() * fb * *w)
                        .sum();
                    let target = if a == b { 1.0 } else { 0.0 };
                    (inner - target).norm()
                })
                .collect()
        })
        .collect();
    let max_error = errors.iter().flatten().cloned().fold(0.0, f64::max);
    Ok(GramReport {
        indices,
        errors,
        max_error,
    })
}
