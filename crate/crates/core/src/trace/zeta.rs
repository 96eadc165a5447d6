use crate::error::{Error, Result};

/// Bernoulli numbers `B_2, B_4, …, B_24`.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Shift at which the Euler–Maclaurin tail takes over from direct summation.
const EM_START: f64 = 24.0;

/// Hurwitz zeta `ζ(t, q) = Σ_{m≥0} (m + q)^{-t}` for `t > 1`, `q > 0`.
///
/// Terms are summed directly until the shift reaches [`EM_START`]; the rest
/// is the Euler–Maclaurin integral, half-term and twelve Bernoulli
/// corrections, whose remainder is below `1e-16` relative there.
pub fn hurwitz_zeta(t: f64, q: f64) -> Result<f64> {
    if !(t.is_finite() && t > 1.0) {
        return Err(Error::Domain(format!("Hurwitz zeta needs t > 1 (got {t})")));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::Domain(format!("Hurwitz zeta needs q > 0 (got {q})")));
    }
    let direct_terms = (EM_START - q).max(0.0).ceil() as usize;
    let mut head = 0.0;
    for m in (0..direct_terms).rev() {
        head += (m as f64 + q).powf(-t);
    }
    let a = q + direct_terms as f64;
    let a_pow = a.powf(-t);
    let mut tail = a * a_pow / (t - 1.0) + 0.5 * a_pow;
    // B_{2j}/(2j)! · t(t+1)…(t+2j−2) · a^{−t−2j+1}
    let mut rising = t;
    let mut factorial = 2.0;
    let mut power = a_pow / a;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / factorial * rising * power;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
        let k = 2.0 * j as f64 + 2.0;
        rising *= (t + k - 1.0) * (t + k);
        factorial *= (k + 1.0) * (k + 2.0);
        power /= a * a;
    }
    Ok(head + tail)
}
