use super::dd::DoubleDouble;

/// Cached harmonic numbers `h_n = Σ_{k=1}^n 1/k`, `h_0 = 0`, held in
/// double-double precision.
#[derive(Debug, Clone)]
pub struct HarmonicNumbers {
    values: Vec<DoubleDouble>,
}

impl HarmonicNumbers {
    /// Harmonic numbers `h_0, …, h_{n_max}`.
    pub fn new(n_max: usize) -> Self {
        let mut values = Vec::with_capacity(n_max + 1);
        let mut acc = DoubleDouble::ZERO;
        values.push(acc);
        for k in 1..=n_max {
            acc = acc + DoubleDouble::recip(k as f64);
            values.push(acc);
        }
        Self { values }
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `h_n`; panics beyond the cached range.
    pub fn get(&self, n: usize) -> f64 {
        self.values[n].to_f64()
    }

    pub(crate) fn get_dd(&self, n: usize) -> DoubleDouble {
        self.values[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn first_values() {
        let h = HarmonicNumbers::new(4);
        assert_eq!(h.get(0), 0.0);
        assert_eq!(h.get(1), 1.0);
        assert_eq!(h.get(2), 1.5);
        assert!((h.get(4) - 25.0 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn strictly_increasing_and_bracketed() {
        let h = HarmonicNumbers::new(20_000);
        for n in 1..=h.n_max() {
            assert!(h.get(n) > h.get(n - 1));
            if n >= 10 {
                let d = h.get(n) - (n as f64).ln() - EULER_GAMMA;
                assert!(d > 0.0 && d < 1.0 / (2.0 * n as f64), "n={n}: {d}");
            }
        }
        assert!((h.get(10_000) / 10_000f64.ln() - 1.0627).abs() < 1e-4);
    }
}
