use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dd::DoubleDouble;
use super::table::{log_inverse_fit, ConvergenceRow, ConvergenceTable, ExtrapolationModel};
use super::{hurwitz_zeta, HarmonicNumbers};
use crate::algebra::CoefficientOperator;
use crate::config::MagneticConfig;
use crate::error::{check_lambda, Error, Result};
use crate::kernel::kernel_pairing;
use crate::laguerre::QuadratureSpec;

/// Complex double-double accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct ComplexDd {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl ComplexDd {
    fn from(z: Complex64) -> Self {
        Self {
            re: DoubleDouble::new(z.re),
            im: DoubleDouble::new(z.im),
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    fn scale(self, r: DoubleDouble) -> Self {
        Self {
            re: self.re * r,
            im: self.im * r,
        }
    }

    fn div(self, r: DoubleDouble) -> Self {
        Self {
            re: self.re / r,
            im: self.im / r,
        }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Dense diagonal `s_{0,0}, …, s_{len−1,len−1}`.
fn diagonal_vec(s: &CoefficientOperator, len: usize) -> Vec<Complex64> {
    let mut d = vec![Complex64::new(0.0, 0.0); len];
    for (n, v) in s.diagonal() {
        if n < len {
            d[n] = v;
        }
    }
    d
}

fn validate_n_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::Domain("N grid is empty".into()));
    }
    if n_grid.iter().any(|&n| n < 2) {
        return Err(Error::Domain("every N in the grid must be at least 2".into()));
    }
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("N grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Diagonal sum `Σ s_{k,k}`, accumulated in double-double and rounded once.
pub fn tau_diagonal(s: &CoefficientOperator) -> Complex64 {
    s.diagonal()
        .values()
        .fold(ComplexDd::default(), |acc, &v| acc.add(ComplexDd::from(v)))
        .to_c64()
}

/// `θ_S(x) = Σ s_{n,n} ζ(1+x, n+1+λ)`, i.e. `Tr(Q_λ^{-(1+x)} S)`.
pub fn theta(s: &CoefficientOperator, x: f64, lambda: f64) -> Result<Complex64> {
    check_lambda(lambda)?;
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("theta needs x > 0 (got {x})")));
    }
    s.diagonal().iter().try_fold(Complex64::new(0.0, 0.0), |acc, (&n, &v)| {
        Ok(acc + v * hurwitz_zeta(1.0 + x, n as f64 + 1.0 + lambda)?)
    })
}

/// Residue table `x ↦ x θ_S(x)`, extrapolated to `x = 0`.
pub fn tau_residue(s: &CoefficientOperator, lambda: f64, x_grid: &[f64]) -> Result<ConvergenceTable> {
    check_lambda(lambda)?;
    if x_grid.len() < 3 {
        return Err(Error::Domain(format!(
            "residue extrapolation needs at least 3 grid points (got {})",
            x_grid.len()
        )));
    }
    let rows = x_grid
        .iter()
        .map(|&x| {
            Ok(ConvergenceRow {
                param: x,
                raw: theta(s, x, lambda)? * x,
                accelerated: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::new(format!("residue(lambda={lambda})"), rows).fit_richardson())
}

/// Shell average `w_j(S) = (1/j) Σ_{n<j} s_{n,n}`.
pub fn shell_average(s: &CoefficientOperator, j: usize) -> Result<Complex64> {
    if j == 0 {
        return Err(Error::Domain("shell index j must be at least 1".into()));
    }
    let sum: Complex64 = s.diagonal().range(..j).map(|(_, v)| *v).sum();
    Ok(sum / j as f64)
}

/// `Σ_{j=1}^N w_j(S)` in plain floating point.
pub fn shell_sum(s: &CoefficientOperator, n: usize) -> Complex64 {
    let d = diagonal_vec(s, n);
    let mut prefix = Complex64::new(0.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for (j, dn) in d.iter().enumerate() {
        prefix += dn;
        total += prefix / (j + 1) as f64;
    }
    total
}

/// Energy-shell estimator: raw `(1/log N) Σ_{j≤N} w_j` and the harmonic
/// acceleration `(Σ_{j≤N} w_j + Σ_{n<N} h_n s_{n,n}) / h_N`.
///
/// The harmonic rearrangement makes the accelerated column equal to the
/// diagonal sum over `n < N`; both sides are carried in double-double so the
/// identity survives rounding.
pub fn tau_shell(s: &CoefficientOperator, n_grid: &[usize]) -> Result<ConvergenceTable> {
    validate_n_grid(n_grid)?;
    let n_max = *n_grid.last().expect("validated non-empty");
    let h = HarmonicNumbers::new(n_max);
    let d = diagonal_vec(s, n_max);
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut prefix = ComplexDd::default();
    let mut shell_total = ComplexDd::default();
    let mut weighted = ComplexDd::default();
    let mut next = n_grid.iter().peekable();
    for j in 1..=n_max {
        let dn = ComplexDd::from(d[j - 1]);
        weighted = weighted.add(dn.scale(h.get_dd(j - 1)));
        prefix = prefix.add(dn);
        shell_total = shell_total.add(prefix.div(DoubleDouble::new(j as f64)));
        if next.peek() == Some(&&j) {
            next.next();
            let accelerated = shell_total.add(weighted).div(h.get_dd(j)).to_c64();
            rows.push(ConvergenceRow {
                param: j as f64,
                raw: shell_total.to_c64() / (j as f64).ln(),
                accelerated: Some(accelerated),
            });
        }
    }
    Ok(ConvergenceTable::new("shell", rows).fit_log_inverse())
}

/// Number of basis vectors in the first `shells` energy shells.
pub fn shell_dimension(shells: usize) -> usize {
    shells * (shells + 1) / 2
}

/// Ordered-eigenbasis estimator `(1/log(N+1)) Σ_{r=0}^N ⟨φ_r, Q₀^{-1} S φ_r⟩`.
///
/// Basis vectors are enumerated by increasing shell, then increasing `n`.
/// Each requested `N` is lowered to the last completed shell so that the
/// partial sum does not depend on the order within a shell.
pub fn tau_ordered_basis(s: &CoefficientOperator, n_grid: &[usize]) -> Result<ConvergenceTable> {
    validate_n_grid(n_grid)?;
    let mut warnings = Vec::new();
    let mut checkpoints: Vec<usize> = Vec::new();
    for &n in n_grid {
        let mut shells = ((((8 * (n + 1) + 1) as f64).sqrt() - 1.0) / 2.0).floor() as usize;
        while shell_dimension(shells + 1) <= n + 1 {
            shells += 1;
        }
        while shell_dimension(shells) > n + 1 {
            shells -= 1;
        }
        if shell_dimension(shells) != n + 1 {
            warnings.push(format!(
                "N={n} lowered to N={} (end of shell {shells})",
                shell_dimension(shells) - 1
            ));
        }
        if checkpoints.last() != Some(&shells) {
            checkpoints.push(shells);
        }
    }
    let max_shell = *checkpoints.last().expect("non-empty grid");
    let d = diagonal_vec(s, max_shell);
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut total = Complex64::new(0.0, 0.0);
    let mut next = checkpoints.iter().peekable();
    for shell in 1..=max_shell {
        let inv = 1.0 / shell as f64;
        for dn in &d[..shell] {
            total += dn * inv;
        }
        if next.peek() == Some(&&shell) {
            next.next();
            let count = shell_dimension(shell);
            rows.push(ConvergenceRow {
                param: (count - 1) as f64,
                raw: total / (count as f64).ln(),
                accelerated: None,
            });
        }
    }
    let mut table = ConvergenceTable::new("ordered_basis", rows);
    table.warnings = warnings;
    let counts: Vec<f64> = table.rows.iter().map(|r| r.param + 1.0).collect();
    match log_inverse_fit(&counts, &table.raw()) {
        Ok(fit) => {
            table.model = ExtrapolationModel::LogInverse;
            table.extrapolated = Some(fit.limit);
            table.residual = Some(fit.residual);
        }
        Err(e) => table.warnings.push(format!("no extrapolation: {e}")),
    }
    Ok(table)
}

/// Residue of `Tr(B Q_λ^{-(1+x)} A*)` against the kernel pairing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResiduePair {
    pub table: ConvergenceTable,
    /// `(2πℓ²)⁻¹ ⟨f_A, f_B⟩` by quadrature.
    pub pairing: Complex64,
    /// `Σ conj(a_{j,k}) b_{j,k}`.
    pub coefficient_pairing: Complex64,
    pub gap: f64,
}

pub fn residue_pair(
    a: &CoefficientOperator,
    b: &CoefficientOperator,
    lambda: f64,
    x_grid: &[f64],
    cfg: &MagneticConfig,
    quad: &QuadratureSpec,
) -> Result<ResiduePair> {
    let s = a.adjoint().compose(b);
    let table = tau_residue(&s, lambda, x_grid)?;
    let pairing = kernel_pairing(a, b, cfg, quad)?;
    let coefficient_pairing = a
        .entries()
        .iter()
        .map(|(&(j, k), v)| v.conj() * b.get(j, k))
        .sum();
    let limit = table.extrapolated.unwrap_or_default();
    Ok(ResiduePair {
        gap: (limit - pairing).norm(),
        table,
        pairing,
        coefficient_pairing,
    })
}
