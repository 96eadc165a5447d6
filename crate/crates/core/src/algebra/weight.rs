use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::CoefficientOperator;
use crate::error::{check_lambda, Error, Result};

/// Operator diagonal in the Laguerre basis, `ψ_{n,m} ↦ value(n,m) ψ_{n,m}`.
#[derive(Clone)]
pub enum DiagonalWeight {
    /// `(Q + λ)^{-s}`: value `(n+m+1+λ)^{-s}`.
    QPower { s: f64, lambda: f64 },
    /// `M^r`: value `(m+1)^r`.
    MPower { r: f64 },
    /// Pointwise product of weights.
    Product(Vec<DiagonalWeight>),
    /// Arbitrary function of the shell `n+m+1`.
    Shell {
        tag: String,
        f: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for DiagonalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::QPower { s, lambda } => write!(f, "QPower {{ s: {s}, lambda: {lambda} }}"),
            Self::MPower { r } => write!(f, "MPower {{ r: {r} }}"),
            Self::Product(ws) => f.debug_tuple("Product").field(ws).finish(),
            Self::Shell { tag, .. } => write!(f, "Shell({tag})"),
        }
    }
}

impl DiagonalWeight {
    pub fn q_power(s: f64, lambda: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Domain(format!("Q-power exponent must be positive (got {s})")));
        }
        check_lambda(lambda)?;
        Ok(Self::QPower { s, lambda })
    }

    pub fn m_power(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::Domain(format!("M-power exponent must be finite (got {r})")));
        }
        Ok(Self::MPower { r })
    }

    pub fn shell_function<F>(tag: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self::Shell {
            tag: tag.into(),
            f: Arc::new(f),
        }
    }

    pub fn value(&self, n: usize, m: usize) -> f64 {
        match self {
            Self::QPower { s, lambda } => ((n + m + 1) as f64 + lambda).powf(-s),
            Self::MPower { r } => ((m + 1) as f64).powf(*r),
            Self::Product(ws) => ws.iter().map(|w| w.value(n, m)).product(),
            Self::Shell { f, .. } => f(n + m + 1),
        }
    }

    /// Human-readable description used in reports.
    pub fn describe(&self) -> String {
        match self {
            Self::QPower { s, lambda } => format!("(Q+{lambda})^-{s}"),
            Self::MPower { r } => format!("M^{r}"),
            Self::Product(ws) => ws.iter().map(|w| w.describe()).collect::<Vec<_>>().join("*"),
            Self::Shell { tag, .. } => format!("shell[{tag}]"),
        }
    }

    /// Decay exponent in `m` at fixed `n`: `value(n,m) ~ m^e`. `None` for
    /// shell functions, whose growth is unknown.
    pub(crate) fn m_exponent(&self) -> Option<f64> {
        match self {
            Self::QPower { s, .. } => Some(-s),
            Self::MPower { r } => Some(*r),
            Self::Product(ws) => ws.iter().map(|w| w.m_exponent()).sum(),
            Self::Shell { .. } => None,
        }
    }
}

/// How the weight `Q_λ^{-s}` is attached to `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// `Q_λ^{-s} S`
    Left,
    /// `S Q_λ^{-s}`
    Right,
    /// `Q_λ^{-s/2} S Q_{λ'}^{-s/2}`
    Split,
}

impl std::str::FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Form::Left),
            "right" => Ok(Form::Right),
            "split" => Ok(Form::Split),
            other => Err(Error::Parse(format!("unknown form '{other}' (left|right|split)"))),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Left => "left",
            Form::Right => "right",
            Form::Split => "split",
        })
    }
}

/// Lazy description of `S` weighted by a power of the shifted oscillator.
///
/// Every such product is block diagonal in the second Laguerre index; block
/// `m` is materialized by [`super::matrix_block`].
#[derive(Debug, Clone)]
pub struct WeightedProduct {
    pub op: CoefficientOperator,
    pub form: Form,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub s: f64,
}

impl WeightedProduct {
    fn q(&self, shell: usize, lambda: f64) -> f64 {
        (shell as f64 + lambda).powf(-self.s)
    }

    /// Block entry at row `n`, column `n2` of block `m`.
    pub fn entry(&self, n: usize, n2: usize, m: usize) -> num_complex::Complex64 {
        let a = self.op.get(n2, n);
        match self.form {
            Form::Left => a * self.q(n + m + 1, self.lambda),
            Form::Right => a * self.q(n2 + m + 1, self.lambda),
            Form::Split => {
                a * (self.q(n + m + 1, self.lambda) * self.q(n2 + m + 1, self.lambda_prime)).sqrt()
            }
        }
    }

    /// Upper bound on the modulus of the weight factor for shells `≥ shell`,
    /// in the same normalization as the entries.
    pub(crate) fn weight_bound(&self, min_shell: usize) -> f64 {
        match self.form {
            Form::Left | Form::Right => self.q(min_shell, self.lambda),
            Form::Split => (self.q(min_shell, self.lambda) * self.q(min_shell, self.lambda_prime)).sqrt(),
        }
    }

    pub fn describe(&self) -> String {
        match self.form {
            Form::Left => format!("(Q+{})^-{} S", self.lambda, self.s),
            Form::Right => format!("S (Q+{})^-{}", self.lambda, self.s),
            Form::Split => format!(
                "(Q+{})^-{} S (Q+{})^-{}",
                self.lambda,
                self.s / 2.0,
                self.lambda_prime,
                self.s / 2.0
            ),
        }
    }
}

/// Attaches `Q_λ^{-s}` to `s_op` in the requested form.
pub fn weighted_product(
    s_op: &CoefficientOperator,
    form: Form,
    lambda: f64,
    lambda_prime: f64,
    s: f64,
) -> Result<WeightedProduct> {
    check_lambda(lambda)?;
    check_lambda(lambda_prime)?;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Domain(format!("weight exponent must be positive (got {s})")));
    }
    Ok(WeightedProduct {
        op: s_op.clone(),
        form,
        lambda,
        lambda_prime,
        s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        let q = DiagonalWeight::q_power(1.0, 0.0).unwrap();
        assert_eq!(q.value(0, 3), 0.25);
        let m = DiagonalWeight::m_power(2.0).unwrap();
        assert_eq!(m.value(7, 4), 25.0);
        let p = DiagonalWeight::Product(vec![q, m]);
        assert_eq!(p.value(0, 4), 5.0);
        let sh = DiagonalWeight::shell_function("sq", |e| (e * e) as f64);
        assert_eq!(sh.value(1, 1), 9.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(DiagonalWeight::q_power(0.0, 0.0).is_err());
        assert!(DiagonalWeight::q_power(1.0, -1.0).is_err());
        let pi0 = CoefficientOperator::landau_projection(0);
        assert!(matches!(weighted_product(&pi0, Form::Left, -1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(weighted_product(&pi0, Form::Split, 0.0, -1.5, 1.0).is_err());
    }

    #[test]
    fn m_exponents() {
        let w = DiagonalWeight::Product(vec![
            DiagonalWeight::m_power(0.3).unwrap(),
            DiagonalWeight::q_power(1.0, 0.0).unwrap(),
        ]);
        assert!((w.m_exponent().unwrap() + 0.7).abs() < 1e-15);
        assert!(DiagonalWeight::shell_function("x", |_| 1.0).m_exponent().is_none());
    }
}
