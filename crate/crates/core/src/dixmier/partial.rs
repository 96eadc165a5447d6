use num_complex::Complex64;

use super::spectrum::{SingularSpectrum, SpectralSequence};
use crate::error::{Error, Result};
use crate::trace::{ConvergenceRow, ConvergenceTable};

fn check_range(spec: &dyn SpectralSequence, n: usize) -> Result<()> {
    if n > spec.len() {
        return Err(Error::Range(format!(
            "N = {n} exceeds the retained spectrum ({} values)",
            spec.len()
        )));
    }
    Ok(())
}

/// `σ_N^p = Σ_{n<N} μ_n^p`.
pub fn sigma_p(spec: &SingularSpectrum, n: usize, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("σ^p needs p ≥ 1 (got {p})")));
    }
    check_range(spec, n)?;
    let stored = spec.nonzero_values();
    Ok(stored[..n.min(stored.len())].iter().map(|v| v.powf(p)).sum())
}

/// `γ_N = σ_N^1 / log N`.
pub fn gamma(spec: &SingularSpectrum, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("γ_N needs N ≥ 2 (got {n})")));
    }
    Ok(sigma_p(spec, n, 1.0)? / (n as f64).ln())
}

/// `max_{2 ≤ N ≤ len} γ_N`, a lower bound for the Calderón norm.
pub fn calderon_norm(spec: &SingularSpectrum) -> Result<f64> {
    if spec.len() < 2 {
        return Err(Error::Domain("Calderón norm needs at least 2 values".into()));
    }
    let stored = spec.nonzero_values();
    let mut sum = stored.first().copied().unwrap_or(0.0);
    let mut best: f64 = 0.0;
    // beyond the stored values σ_N is constant and γ_N decreases
    for n in 2..=stored.len().max(2) {
        sum += stored.get(n - 1).copied().unwrap_or(0.0);
        best = best.max(sum / (n as f64).ln());
    }
    Ok(best)
}

/// True when the partial sum up to `n` does not depend on how ties in
/// modulus are ordered.
///
/// Moduli within a relative `1e-10` count as equal: eigenvalue pairs `±v`
/// from a non-symmetric solver rarely agree to the last bit.
pub fn is_tie_safe(spec: &dyn SpectralSequence, n: usize) -> bool {
    n == 0 || n >= spec.len() || spec.modulus(n - 1) > spec.modulus(n) * (1.0 + TIE_TOL)
}

const TIE_TOL: f64 = 1e-10;

/// About `count` geometrically spaced checkpoints in the top eighth of the
/// certified prefix, each moved down to the nearest tie-safe index.
///
/// Shell truncation leaves an `O(N^{-1/2})` correction that the
/// `L + c/log N` model does not describe; after extrapolation its effect
/// scales like `r / ln r` for a checkpoint span `r` in shells, which is
/// smallest for spans near `e`, i.e. a factor of about 8 in `N`.
pub fn default_checkpoints(spec: &dyn SpectralSequence, count: usize) -> Result<Vec<usize>> {
    let hi = spec.certified_len();
    if hi < 16 || count < 3 {
        return Err(Error::Range(format!(
            "certified prefix of {hi} values is too short for {count} checkpoints"
        )));
    }
    let lo = (hi as f64 / 8.0).max(8.0);
    let mut out: Vec<usize> = Vec::new();
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let mut n = (lo * (hi as f64 / lo).powf(t)).round() as usize;
        n = n.clamp(2, hi);
        while n > 2 && !is_tie_safe(spec, n) {
            n -= 1;
        }
        if out.last().is_none_or(|&last| n > last) {
            out.push(n);
        }
    }
    if out.len() < 3 {
        return Err(Error::Range("could not place 3 distinct tie-safe checkpoints".into()));
    }
    Ok(out)
}

/// Dixmier partial sums `Σ_{n<N} v_n / log N` at the checkpoints,
/// extrapolated with `L + c/log N`. Singular input sums `μ_n`, eigenvalue
/// input sums `Re λ_n`.
pub fn dixmier_estimate(spec: &dyn SpectralSequence, checkpoints: &[usize]) -> Result<ConvergenceTable> {
    if checkpoints.len() < 3 {
        return Err(Error::Domain(format!(
            "Dixmier extrapolation needs at least 3 checkpoints (got {})",
            checkpoints.len()
        )));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) || checkpoints[0] < 2 {
        return Err(Error::Domain("checkpoints must be increasing and at least 2".into()));
    }
    let last = *checkpoints.last().expect("non-empty");
    check_range(spec, last)?;
    if last > spec.certified_len() {
        return Err(Error::Range(format!(
            "checkpoint {last} lies beyond the certified prefix ({} values); raise the shell cutoff",
            spec.certified_len()
        )));
    }
    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut sum = 0.0;
    let mut next = checkpoints.iter().peekable();
    for i in 0..last {
        sum += spec.summand(i)?;
        if next.peek() == Some(&&(i + 1)) {
            let n = i + 1;
            next.next();
            if !is_tie_safe(spec, n) {
                warnings.push(format!("checkpoint {n} splits a group of equal moduli"));
            }
            rows.push(ConvergenceRow {
                param: n as f64,
                raw: Complex64::new(sum / (n as f64).ln(), 0.0),
                accelerated: None,
            });
        }
    }
    let mut table = ConvergenceTable::new(format!("dixmier[{}]", spec.describe()), rows).fit_log_inverse();
    table.warnings.extend(warnings);
    Ok(table)
}

/// `ζ_T(x) = Σ μ_n^{1+x}` over the retained values plus the analytic tail.
///
/// Without a tail model the result is a lower bound and `complete` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauberianZeta {
    pub value: f64,
    pub retained: f64,
    pub complete: bool,
}

pub fn tauberian_zeta(spec: &SingularSpectrum, x: f64) -> Result<TauberianZeta> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("ζ_T needs x > 0 (got {x})")));
    }
    let p = 1.0 + x;
    // smallest first, so the long tail of small terms is not swamped
    let retained: f64 = spec.nonzero_values().iter().rev().map(|v| v.powf(p)).sum();
    let tail = spec.tail.zeta_tail(x)?;
    Ok(TauberianZeta {
        value: retained + tail.unwrap_or(0.0),
        retained,
        complete: tail.is_some(),
    })
}

/// Residue table `x ↦ x ζ_T(x)`, extrapolated to `x = 0`.
pub fn tauberian_residue(spec: &SingularSpectrum, x_grid: &[f64]) -> Result<ConvergenceTable> {
    let mut rows = Vec::with_capacity(x_grid.len());
    let mut complete = true;
    for &x in x_grid {
        let z = tauberian_zeta(spec, x)?;
        complete &= z.complete;
        rows.push(ConvergenceRow {
            param: x,
            raw: Complex64::new(x * z.value, 0.0),
            accelerated: None,
        });
    }
    let mut table = ConvergenceTable::new(format!("tauberian[{}]", spec.describe()), rows);
    if x_grid.len() >= 3 {
        table = table.fit_richardson();
    } else {
        return Err(Error::Domain(format!(
            "residue extrapolation needs at least 3 grid points (got {})",
            x_grid.len()
        )));
    }
    if !complete {
        table
            .warnings
            .push("no tail model: ζ_T is a lower bound and the residue is unreliable".into());
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{weighted_product, CoefficientOperator, DiagonalWeight, Form};
    use crate::dixmier::spectrum::{eigen_sequence, singular_spectrum, TailModel, Truncation};
    use crate::trace::HarmonicNumbers;

    fn harmonic(len: usize) -> SingularSpectrum {
        SingularSpectrum::from_values((0..len).map(|n| 1.0 / (n as f64 + 1.0)).collect())
            .unwrap()
            .with_tail(TailModel::PowerLaw { coeff: 1.0, exponent: 1.0, offset: len as f64 + 1.0 })
    }

    #[test]
    fn sigma_examples() {
        let s = harmonic(10);
        assert!((sigma_p(&s, 3, 1.0).unwrap() - 11.0 / 6.0).abs() < 1e-15);
        assert!((sigma_p(&s, 3, 2.0).unwrap() - 49.0 / 36.0).abs() < 1e-15);
        assert_eq!(sigma_p(&s, 0, 1.0).unwrap(), 0.0);
        assert!(matches!(sigma_p(&s, 11, 1.0), Err(Error::Range(_))));
    }

    #[test]
    fn gamma_examples() {
        let s = harmonic(10_000);
        let h = HarmonicNumbers::new(10_000);
        assert!((gamma(&s, 10_000).unwrap() - h.get(10_000) / 10_000f64.ln()).abs() < 1e-13);
        assert!((gamma(&s, 10_000).unwrap() - 1.0627).abs() < 1e-4);
        let geo = SingularSpectrum::from_values((0..2000).map(|n| 0.5f64.powi(n)).collect()).unwrap();
        assert!(gamma(&geo, 2000).unwrap() < 0.27);
        let zero = SingularSpectrum::from_values(vec![0.0; 50]).unwrap();
        assert_eq!(gamma(&zero, 50).unwrap(), 0.0);
        assert!(gamma(&s, 1).is_err());
    }

    #[test]
    fn calderon_examples() {
        assert!(calderon_norm(&harmonic(1000)).unwrap() >= 1.0);
        let mut v = vec![0.0; 100];
        v[0] = 5.0;
        let s = SingularSpectrum::from_values(v).unwrap();
        assert!((calderon_norm(&s).unwrap() - 5.0 / 2f64.ln()).abs() < 1e-12);
        let z = SingularSpectrum::from_values(vec![0.0; 10]).unwrap();
        assert_eq!(calderon_norm(&z).unwrap(), 0.0);
    }

    #[test]
    fn tauberian_examples() {
        let t = tauberian_residue(&harmonic(100), &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!((t.extrapolated.unwrap().re - 1.0).abs() < 1e-3);
        let geo = SingularSpectrum::from_values((0..40).map(|n| 0.5f64.powi(n)).collect())
            .unwrap()
            .with_tail(TailModel::Geometric { first: 0.5f64.powi(40), ratio: 0.5 });
        let t = tauberian_residue(&geo, &[1e-1, 1e-2, 1e-3]).unwrap();
        // Three-point interpolation leaves O(x1 x2 x3) ≈ 1e-6 for a smooth ζ.
        assert!(t.extrapolated.unwrap().norm() < 1e-5);
        let bare = SingularSpectrum::from_values(vec![1.0, 0.5]).unwrap();
        assert!(!tauberian_residue(&bare, &[0.1, 0.01, 0.001]).unwrap().warnings.is_empty());
    }

    #[test]
    fn q_inverse_square_quick() {
        let w = DiagonalWeight::q_power(2.0, 0.0).unwrap();
        let s = singular_spectrum(&w, Truncation::shells(400)).unwrap();
        let cps = default_checkpoints(&s, 8).unwrap();
        assert!(cps.iter().all(|&n| is_tie_safe(&s, n)));
        let t = dixmier_estimate(&s, &cps).unwrap();
        assert!((t.extrapolated.unwrap().re - 0.5).abs() < 1e-2);
        let r = tauberian_residue(&s, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!((r.extrapolated.unwrap().re - 0.5).abs() < 1e-4);
    }

    #[test]
    fn eigen_cancellation_quick() {
        let flip = CoefficientOperator::transition(0, 1).add(&CoefficientOperator::transition(1, 0));
        let p = weighted_product(&flip, Form::Left, 0.0, 0.0, 1.0).unwrap();
        let e = eigen_sequence(&p, Truncation::shells(200)).unwrap();
        let cps = default_checkpoints(&e, 6).unwrap();
        let t = dixmier_estimate(&e, &cps).unwrap();
        assert!(t.extrapolated.unwrap().norm() < 1e-6);
    }

    #[test]
    fn checkpoints_beyond_certified_prefix() {
        let p = weighted_product(&CoefficientOperator::landau_projection(3), Form::Left, 0.0, 0.0, 1.0).unwrap();
        let s = singular_spectrum(&p, Truncation::shells(50)).unwrap();
        assert!(s.certified_len() < s.nonzero_values().len());
        let bad = [10, 20, s.nonzero_values().len()];
        assert!(matches!(dixmier_estimate(&s, &bad), Err(Error::Range(_))));
    }
}
