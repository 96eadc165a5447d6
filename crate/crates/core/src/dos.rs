//! Integrated density of states for Hamiltonians diagonal in the Landau
//! projections, the atomic DOS measure, functional calculus and the two trace
//! formulas for `f(H)`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{weighted_product, CoefficientOperator, Form, OperatorClass};
use crate::config::MagneticConfig;
use crate::dixmier::{default_checkpoints, dixmier_estimate, eigen_sequence, Truncation};
use crate::error::{Error, Result};
use crate::trace::{tau_diagonal, tau_shell, ConvergenceTable};

/// `H = Σ_j h_j Π_j` with `h_j` stored for `j < J`.
///
/// Eigenvalues beyond the truncation are only known through `tail_floor`,
/// a lower bound for every `h_j` with `j ≥ J`. Projections and test
/// functions that reach the floor cannot be represented faithfully.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandauDiagonalOperator {
    values: Vec<f64>,
    tail_floor: f64,
    eps_inf: f64,
}

impl LandauDiagonalOperator {
    pub fn new(values: Vec<f64>, tail_floor: f64, eps_inf: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a Landau-diagonal operator needs at least one level".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("eigenvalues must be finite reals".into()));
        }
        if tail_floor.is_nan() || eps_inf.is_nan() {
            return Err(Error::Domain("tail floor and eps_inf must not be NaN".into()));
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if eps_inf < max || eps_inf < tail_floor {
            return Err(Error::Domain(format!(
                "eps_inf = {eps_inf} is below the represented spectrum (max {max}, tail floor {tail_floor})"
            )));
        }
        Ok(Self {
            values,
            tail_floor,
            eps_inf,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn truncation(&self) -> usize {
        self.values.len()
    }

    pub fn tail_floor(&self) -> f64 {
        self.tail_floor
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }

    fn check_energy(&self, eps: f64, what: &str) -> Result<()> {
        if !eps.is_finite() {
            return Err(Error::Domain(format!("{what} must be finite (got {eps})")));
        }
        if eps >= self.eps_inf {
            return Err(Error::Domain(format!(
                "{what} = {eps} must lie strictly below eps_inf = {}: the identity is not trace class",
                self.eps_inf
            )));
        }
        if eps >= self.tail_floor {
            return Err(Error::Range(format!(
                "{what} = {eps} reaches levels beyond the truncation J = {} (tail floor {}); the projection would be misrepresented",
                self.values.len(),
                self.tail_floor
            )));
        }
        Ok(())
    }
}

/// Landau Hamiltonian `h_j = j + 1/2`, truncated to `j < levels`.
pub fn landau_hamiltonian(levels: usize) -> Result<LandauDiagonalOperator> {
    if levels == 0 {
        return Err(Error::Domain("truncation J must be at least 1".into()));
    }
    let values = (0..levels).map(|j| j as f64 + 0.5).collect();
    LandauDiagonalOperator::new(values, levels as f64 + 0.5, f64::INFINITY)
}

/// Projection onto `(−∞, eps]`.
pub fn spectral_projection(h: &LandauDiagonalOperator, eps: f64) -> Result<CoefficientOperator> {
    h.check_energy(eps, "eps")?;
    let diag: Vec<Complex64> = h
        .values
        .iter()
        .map(|&v| Complex64::new(if v <= eps { 1.0 } else { 0.0 }, 0.0))
        .collect();
    CoefficientOperator::diagonal_from(&diag, OperatorClass::L1)
}

/// `N_H(ε) = (2πℓ²)⁻¹ τ(P_H(ε))`.
pub fn idos(h: &LandauDiagonalOperator, eps: f64, cfg: &MagneticConfig) -> Result<f64> {
    let p = spectral_projection(h, eps)?;
    Ok(cfg.idos_scale() * tau_diagonal(&p).re)
}

/// Pure point measure `Σ w_i δ(ε − ε_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DOSMeasure {
    /// `(energy, weight)`, energies strictly increasing.
    pub atoms: Vec<(f64, f64)>,
    pub scale: f64,
}

impl DOSMeasure {
    /// `μ((e1, e2])`.
    pub fn mass(&self, e1: f64, e2: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(e, _)| *e > e1 && *e <= e2)
            .map(|(_, w)| w)
            .sum()
    }

    /// `μ((−∞, e])`, which equals `N_H(e)` wherever the IDOS is defined.
    pub fn cumulative(&self, e: f64) -> f64 {
        self.mass(f64::NEG_INFINITY, e)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.atoms.iter().map(|&(e, w)| w * f(e)).sum()
    }
}

/// Atoms at the distinct levels, each weighted by its multiplicity.
pub fn dos_measure(h: &LandauDiagonalOperator, cfg: &MagneticConfig) -> DOSMeasure {
    let mut sorted = h.values.clone();
    sorted.sort_by(f64::total_cmp);
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for v in sorted {
        match atoms.last() {
            Some(&(e, _)) if e == v => *counts.last_mut().expect("paired with atoms") += 1,
            _ => {
                atoms.push((v, 0.0));
                counts.push(1);
            }
        }
    }
    for (atom, c) in atoms.iter_mut().zip(counts) {
        atom.1 = cfg.idos_scale() * c as f64;
    }
    DOSMeasure {
        atoms,
        scale: cfg.idos_scale(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestFunctionFile {
    nodes: Vec<[f64; 2]>,
}

/// Continuous piecewise-linear function vanishing outside its first and
/// last node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TestFunctionFile", into = "TestFunctionFile")]
pub struct CompactTestFunction {
    nodes: Vec<(f64, f64)>,
}

impl TryFrom<TestFunctionFile> for CompactTestFunction {
    type Error = Error;

    fn try_from(file: TestFunctionFile) -> Result<Self> {
        Self::new(file.nodes.into_iter().map(|[e, v]| (e, v)).collect())
    }
}

impl From<CompactTestFunction> for TestFunctionFile {
    fn from(f: CompactTestFunction) -> Self {
        Self {
            nodes: f.nodes.into_iter().map(|(e, v)| [e, v]).collect(),
        }
    }
}

impl CompactTestFunction {
    /// Nodes `(ε, f(ε))` with strictly increasing `ε`; the end values must
    /// be zero.
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Domain("a test function needs at least two nodes".into()));
        }
        if nodes.iter().any(|(e, v)| !e.is_finite() || !v.is_finite()) {
            return Err(Error::Domain("test-function nodes must be finite".into()));
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain("test-function energies must be strictly increasing".into()));
        }
        let (first, last) = (nodes[0].1, nodes[nodes.len() - 1].1);
        if first != 0.0 || last != 0.0 {
            return Err(Error::Domain(format!(
                "test function must vanish at its support endpoints (got {first} and {last})"
            )));
        }
        Ok(Self { nodes })
    }

    /// Hat function rising from `lo` to `height` at `peak` and back to zero at `hi`.
    pub fn hat(lo: f64, peak: f64, hi: f64, height: f64) -> Result<Self> {
        Self::new(vec![(lo, 0.0), (peak, height), (hi, 0.0)])
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn support(&self) -> (f64, f64) {
        (self.nodes[0].0, self.nodes[self.nodes.len() - 1].0)
    }

    pub fn eval(&self, e: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(e > lo && e < hi) {
            return 0.0;
        }
        let i = self.nodes.partition_point(|(x, _)| *x <= e);
        let (x0, y0) = self.nodes[i - 1];
        let (x1, y1) = self.nodes[i];
        if e == x0 {
            return y0;
        }
        y0 + (y1 - y0) * (e - x0) / (x1 - x0)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.nodes.iter().map(|&(e, v)| (e, c * v)).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("test function: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("test functions always serialize")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `f(H) = Σ_j f(h_j) Π_j`.
pub fn functional_calculus(h: &LandauDiagonalOperator, f: &CompactTestFunction) -> Result<CoefficientOperator> {
    let (_, top) = f.support();
    h.check_energy(top, "upper end of the test-function support")?;
    let diag: Vec<Complex64> = h.values.iter().map(|&v| Complex64::new(f.eval(v), 0.0)).collect();
    CoefficientOperator::diagonal_from(&diag, OperatorClass::L1)
}

/// Both sides of `τ(f(H)) = (Ω_ℓ/2) ∫ f dμ_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFormulaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn spectral_formula_check(
    h: &LandauDiagonalOperator,
    f: &CompactTestFunction,
    cfg: &MagneticConfig,
) -> Result<SpectralFormulaCheck> {
    let lhs = tau_diagonal(&functional_calculus(h, f)?).re;
    let rhs = cfg.omega_ell() / 2.0 * dos_measure(h, cfg).integrate(|e| f.eval(e));
    Ok(SpectralFormulaCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// Shell-average approximation `(2/(Ω_ℓ log N)) Σ_{j≤N} w_j(P_H(ε))` of the
/// IDOS, with the harmonic acceleration in the second column.
pub fn idos_shell_approx(
    h: &LandauDiagonalOperator,
    eps: f64,
    n_grid: &[usize],
    cfg: &MagneticConfig,
) -> Result<ConvergenceTable> {
    let p = spectral_projection(h, eps)?;
    let scale = 2.0 / cfg.omega_ell();
    let shell = tau_shell(&p, n_grid)?;
    let mut table = ConvergenceTable::new(format!("idos_shell[eps={eps}]"), shell.rows);
    for row in &mut table.rows {
        row.raw *= scale;
        row.accelerated = row.accelerated.map(|a| a * scale);
    }
    Ok(table.fit_log_inverse())
}

/// Dixmier trace of `Q_λ^{-1} f(H)` against `(Ω_ℓ/2) ∫ f dμ_H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DixmierDosCheck {
    pub dixmier: f64,
    pub integral: f64,
    pub gap: f64,
    pub table: ConvergenceTable,
}

#[allow(clippy::too_many_arguments)]
pub fn dixmier_dos_check(
    h: &LandauDiagonalOperator,
    f: &CompactTestFunction,
    form: Form,
    lambda: f64,
    lambda_prime: f64,
    shells: usize,
    cfg: &MagneticConfig,
) -> Result<DixmierDosCheck> {
    let fh = functional_calculus(h, f)?;
    let integral = spectral_formula_check(h, f, cfg)?.rhs;
    let product = weighted_product(&fh, form, lambda, lambda_prime, 1.0)?;
    let seq = eigen_sequence(&product, Truncation::shells(shells))?;
    let table = if fh.is_zero() {
        ConvergenceTable::new("dixmier[zero]", Vec::new())
    } else {
        let cps = default_checkpoints(&seq, 8)?;
        dixmier_estimate(&seq, &cps)?
    };
    let dixmier = table.extrapolated.map_or(0.0, |z| z.re);
    Ok(DixmierDosCheck {
        dixmier,
        integral,
        gap: (dixmier - integral).abs(),
        table,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::trace::HarmonicNumbers;

    fn unit() -> MagneticConfig {
        MagneticConfig::default()
    }

    fn two_level() -> CompactTestFunction {
        CompactTestFunction::new(vec![(0.25, 0.0), (0.5, 1.0), (1.5, 0.25), (1.75, 0.0)]).unwrap()
    }

    #[test]
    fn landau_levels() {
        assert_eq!(landau_hamiltonian(3).unwrap().values(), &[0.5, 1.5, 2.5]);
        assert_eq!(landau_hamiltonian(1).unwrap().values(), &[0.5]);
        assert!(matches!(landau_hamiltonian(0), Err(Error::Domain(_))));
    }

    #[test]
    fn projections() {
        let h = landau_hamiltonian(5).unwrap();
        assert_eq!(spectral_projection(&h, 1.0).unwrap(), CoefficientOperator::landau_projection(0));
        assert!(spectral_projection(&h, 0.1).unwrap().is_zero());
        let p = spectral_projection(&h, 2.0).unwrap();
        assert_eq!(p, CoefficientOperator::landau_projection(0).add(&CoefficientOperator::landau_projection(1)));
        // The endpoint belongs to the interval.
        assert_eq!(spectral_projection(&h, 0.5).unwrap(), CoefficientOperator::landau_projection(0));
        assert!(matches!(spectral_projection(&h, 5.5), Err(Error::Range(_))));
        let bounded = LandauDiagonalOperator::new(vec![0.5, 1.5], 2.0, 2.0).unwrap();
        assert!(matches!(spectral_projection(&bounded, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn negated_landau_is_not_representable() {
        let values: Vec<f64> = (0..10).map(|j| -(j as f64 + 0.5)).collect();
        let h = LandauDiagonalOperator::new(values, f64::NEG_INFINITY, -0.5).unwrap();
        for eps in [-100.0, -3.0, -0.6] {
            assert!(matches!(spectral_projection(&h, eps), Err(Error::Range(_))));
        }
    }

    #[test]
    fn idos_values() {
        let h = landau_hamiltonian(10).unwrap();
        assert!((idos(&h, 2.0, &unit()).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert_eq!(idos(&h, 0.1, &unit()).unwrap(), 0.0);
        let cfg = MagneticConfig::new(0.5).unwrap();
        assert!((idos(&h, 1.0, &cfg).unwrap() - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn measure_atoms() {
        let m = dos_measure(&landau_hamiltonian(3).unwrap(), &unit());
        assert_eq!(m.atoms.len(), 3);
        for (atom, e) in m.atoms.iter().zip([0.5, 1.5, 2.5]) {
            assert_eq!(atom.0, e);
            assert!((atom.1 - 1.0 / (2.0 * PI)).abs() < 1e-16);
        }
        let flat = LandauDiagonalOperator::new(vec![7.0; 3], 8.0, f64::INFINITY).unwrap();
        let m = dos_measure(&flat, &unit());
        assert_eq!(m.atoms.len(), 1);
        assert!((m.atoms[0].1 - 3.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn measure_reproduces_idos() {
        let h = landau_hamiltonian(8).unwrap();
        let m = dos_measure(&h, &unit());
        let grid: Vec<f64> = (0..64).map(|i| i as f64 * 0.125).collect();
        for &a in &grid {
            for &b in &grid {
                if a < b {
                    let diff = idos(&h, b, &unit()).unwrap() - idos(&h, a, &unit()).unwrap();
                    assert!((m.mass(a, b) - diff).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn test_function_evaluation() {
        let f = two_level();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(1.5), 0.25);
        assert_eq!(f.eval(0.25), 0.0);
        assert_eq!(f.eval(3.0), 0.0);
        assert!((f.eval(1.0) - 0.625).abs() < 1e-15);
        assert!(CompactTestFunction::new(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(CompactTestFunction::new(vec![(1.0, 0.0), (0.0, 0.0)]).is_err());
        let json = f.to_json();
        assert_eq!(CompactTestFunction::from_json(&json).unwrap(), f);
        let parsed = CompactTestFunction::from_json(r#"{"nodes": [[0, 0], [0.5, 1], [1, 0]]}"#).unwrap();
        assert_eq!(parsed.eval(0.5), 1.0);
        assert!(matches!(CompactTestFunction::from_json(r#"{"nodes": [[0, 1]]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn functional_calculus_examples() {
        let h = landau_hamiltonian(6).unwrap();
        let hat = CompactTestFunction::hat(0.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(functional_calculus(&h, &hat).unwrap(), CoefficientOperator::landau_projection(0));
        let zero = CompactTestFunction::hat(0.0, 0.5, 1.0, 0.0).unwrap();
        assert!(functional_calculus(&h, &zero).unwrap().is_zero());
        let fh = functional_calculus(&h, &two_level()).unwrap();
        let expected = CoefficientOperator::landau_projection(0)
            .add(&CoefficientOperator::landau_projection(1).scale(Complex64::new(0.25, 0.0)));
        assert_eq!(fh, expected);
        let bounded = LandauDiagonalOperator::new(vec![0.5, 1.5], 2.0, 2.0).unwrap();
        let wide = CompactTestFunction::hat(0.0, 1.0, 2.5, 1.0).unwrap();
        assert!(matches!(functional_calculus(&bounded, &wide), Err(Error::Domain(_))));
    }

    #[test]
    fn spectral_formula() {
        let h = landau_hamiltonian(6).unwrap();
        let c = spectral_formula_check(&h, &two_level(), &unit()).unwrap();
        assert!((c.lhs - 1.25).abs() < 1e-15);
        assert!(c.gap <= 1e-12);
        let doubled = spectral_formula_check(&h, &two_level().scale(2.0).unwrap(), &unit()).unwrap();
        assert!((doubled.rhs - 2.0 * c.rhs).abs() < 1e-14);
        let zero = CompactTestFunction::hat(0.0, 0.5, 1.0, 0.0).unwrap();
        let z = spectral_formula_check(&h, &zero, &unit()).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
    }

    #[test]
    fn shell_approximation() {
        let h = landau_hamiltonian(10).unwrap();
        let grid = [100, 1000, 10_000];
        let t = idos_shell_approx(&h, 2.0, &grid, &unit()).unwrap();
        let exact = idos(&h, 2.0, &unit()).unwrap();
        for row in &t.rows {
            assert_eq!(row.accelerated.unwrap().re, exact);
        }
        // Closed form: Σ_{j≤N} w_j = 2h_N − 1 for the diagonal (1, 1, 0, …).
        let hn = HarmonicNumbers::new(10_000).get(10_000);
        let factor = (2.0 * hn - 1.0) / (2.0 * 10_000f64.ln());
        let last = t.rows.last().unwrap().raw.re;
        assert!((last - exact * factor).abs() < 1e-14);
        assert!(t.rows.windows(2).all(|w| w[1].raw.re < w[0].raw.re && w[1].raw.re > exact));
        let below = idos_shell_approx(&h, 0.1, &grid, &unit()).unwrap();
        assert!(below.rows.iter().all(|r| r.raw.re == 0.0 && r.accelerated.unwrap().re == 0.0));
    }

    #[test]
    fn dixmier_dos_quick() {
        let h = landau_hamiltonian(6).unwrap();
        let hat = CompactTestFunction::hat(0.0, 0.5, 1.0, 1.0).unwrap();
        let c = dixmier_dos_check(&h, &hat, Form::Left, 0.0, 0.0, 400, &unit()).unwrap();
        assert!(c.gap <= 1e-2, "{c:?}");
        let zero = CompactTestFunction::hat(0.0, 0.5, 1.0, 0.0).unwrap();
        let z = dixmier_dos_check(&h, &zero, Form::Left, 0.0, 0.0, 50, &unit()).unwrap();
        assert_eq!((z.dixmier, z.integral), (0.0, 0.0));
    }
}
