//! Harmonic numbers and the digamma function.

use super::EULER_GAMMA;

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic_number(n: u64) -> f64 {
    // summing small terms first keeps the rounding error at a few ulps
    (1..=n).rev().map(|i| 1.0 / i as f64).sum()
}

/// Digamma `psi(x)` for `x > 0`.
///
/// Shifts the argument up with `psi(x) = psi(x + 1) - 1/x` until `x >= 10`,
/// then applies the asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli-number coefficients B_2k / (2k)
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    shift + x.ln() - 0.5 / x - series
}

/// Harmonic number of a real argument, `H_x = psi(x + 1) + gamma`; agrees with
/// [`harmonic_number`] on the integers.
pub fn harmonic(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    digamma(x + 1.0) + EULER_GAMMA
}
