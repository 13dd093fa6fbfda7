//! Closed-form analysis of UCR-ApSel networks.
//!
//! The average per-user rate is bounded by the difference between the mean
//! log path gain to the nearest of `(lambda - 1) K_m + 1` serving APs and the
//! mean log path gain to the `K_m`-th nearest interfering user, both computed
//! from order statistics of uniform points in a disk. Plugging this into the
//! energy-efficiency ratio gives a bound that is unimodal in `lambda`, with
//! the maximizer available in closed form through the Lambert W function.

mod lambert;
mod special;

pub use lambert::{lambert_w, lambert_w_asymptotic};
pub use special::{digamma, harmonic, harmonic_number};

use std::f64::consts::{E, LOG2_E};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power::PowerModel;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub l: usize,
    pub k: usize,
    pub m: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub pm: PowerModel,
    /// Disk radius, m.
    pub d: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0) {
            return Err(Error::domain(format!(
                "AP-selection ratio must exceed 1, got {}",
                self.lambda
            )));
        }
        if self.k == 0 || self.m == 0 || self.m > self.k {
            return Err(Error::invalid(format!(
                "need 1 <= M <= K, got M={}, K={}",
                self.m, self.k
            )));
        }
        if self.lambda * self.k as f64 > self.l as f64 * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "AP-selection ratio {} exceeds L/K = {}",
                self.lambda,
                self.l as f64 / self.k as f64
            )));
        }
        if !(self.alpha > 2.0) {
            return Err(Error::invalid(format!(
                "path-loss exponent must exceed 2, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Users per subnetwork for balanced groups, `K / M` (not rounded).
    pub fn users_per_subnetwork(&self) -> f64 {
        self.k as f64 / self.m as f64
    }
}

/// Which energy-efficiency bound expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundForm {
    /// Full expression, keeping the fixed backhaul term and `M / (lambda K)`.
    Exact,
    /// Simplified for `P >> P_fix` and `K >> M`.
    Approximate,
}

/// Upper bound on the average per-user rate, bps/Hz:
/// `(alpha/2) [log2((lambda-1) K/M + 1) - log2(lambda K / L) + gamma log2 e]`.
pub fn avg_rate_upper_bound(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let (k, m, l) = (b.k as f64, b.m as f64, b.l as f64);
    Ok(b.alpha / 2.0
        * (((b.lambda - 1.0) * k / m + 1.0).log2() - (b.lambda * k / l).log2()
            + EULER_GAMMA * LOG2_E))
}

/// Upper bound on the average energy efficiency, bps/Hz/W.
pub fn ee_upper_bound(b: &BoundInputs, form: BoundForm) -> Result<f64> {
    b.validate()?;
    let (k, m, l, lambda) = (b.k as f64, b.m as f64, b.l as f64, b.lambda);
    let scale = 2.0 / b.alpha;
    let pm = &b.pm;
    Ok(match form {
        BoundForm::Exact => {
            let num = ((lambda - 1.0) / lambda + m / (lambda * k)).log2()
                + (l / m).log2()
                + EULER_GAMMA * LOG2_E;
            num / (scale * pm.per_active_ap() * lambda + scale * pm.p_fix * l / k + pm.p_b * num)
        }
        BoundForm::Approximate => {
            let num = (1.0 - 1.0 / lambda).log2() + (l / m).log2() + EULER_GAMMA * LOG2_E;
            num / (scale * (pm.per_active_ap() + pm.p_fix) * lambda + pm.p_b * num)
        }
    })
}

/// Numerator of the derivative of the approximate bound with respect to `lambda`
/// (up to a positive factor). Strictly decreasing, positive near 1 and zero at
/// the optimal ratio.
pub fn phi(lambda: f64, l: usize, m: usize, alpha: f64) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::domain(format!("phi needs lambda > 1, got {lambda}")));
    }
    let ratio = l as f64 / m as f64;
    Ok(alpha / 2.0
        * (LOG2_E / (lambda - 1.0) + (lambda / (lambda - 1.0)).log2()
            - ratio.log2()
            - EULER_GAMMA * LOG2_E))
}

/// Argument of the Lambert W function in the optimal ratio, `(L/M) e^(1+gamma)`.
pub fn optimal_lambda_argument(l: usize, m: usize) -> f64 {
    l as f64 / m as f64 * (1.0 + EULER_GAMMA).exp()
}

/// Energy-efficiency-maximizing AP-selection ratio `W(x) / (W(x) - 1)` with
/// `x = (L/M) e^(1+gamma)`. Depends only on the AP count and subnetwork count.
pub fn optimal_lambda(l: usize, m: usize) -> Result<f64> {
    if m == 0 || l < m {
        return Err(Error::invalid(format!(
            "need L >= M >= 1, got L={l}, M={m}"
        )));
    }
    let w = lambert_w(optimal_lambda_argument(l, m))?;
    if !(w > 1.0) {
        return Err(Error::Invariant(format!(
            "W(x) = {w} <= 1 for L={l}, M={m}"
        )));
    }
    Ok(w / (w - 1.0))
}

/// Same as [`optimal_lambda`] but with the three-term asymptotic W.
pub fn optimal_lambda_asymptotic(l: usize, m: usize) -> Result<f64> {
    if m == 0 || l < m {
        return Err(Error::invalid(format!(
            "need L >= M >= 1, got L={l}, M={m}"
        )));
    }
    let w = lambert_w_asymptotic(optimal_lambda_argument(l, m))?;
    Ok(w / (w - 1.0))
}

/// `E[log2 d^-alpha]` for the nearest of `(lambda-1) K_m + 1` APs uniform in a
/// disk of radius `sqrt(lambda K_m / L) D` around the user:
/// `(alpha/2) [H_n log2 e - log2(lambda K_m D^2 / L)]`, with the harmonic
/// number extended to real `n` through digamma.
pub fn min_distance_log_expectation(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let km = b.users_per_subnetwork();
    let n = (b.lambda - 1.0) * km + 1.0;
    let area = b.lambda * km * b.d * b.d / b.l as f64;
    Ok(b.alpha / 2.0 * (harmonic(n) * LOG2_E - area.log2()))
}

/// Large-`K_m` form of [`min_distance_log_expectation`] with `H_n ~ ln n + gamma`.
pub fn min_distance_log_expectation_asymptotic(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let (k, m, l) = (b.k as f64, b.m as f64, b.l as f64);
    Ok(b.alpha / 2.0
        * (((b.lambda - 1.0) * k / m + 1.0).log2() - (b.lambda * k * b.d * b.d / (l * m)).log2()
            + EULER_GAMMA * LOG2_E))
}

/// `E[log2 d^-alpha]` for the `K_m`-th nearest of `K - 1` users uniform in the
/// disk of radius `D` around the reference user:
/// `-alpha (H_{K_m - 1} - H_{K - 1}) / (2 ln 2) - alpha log2 D`.
pub fn kth_neighbor_log_expectation(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let km = b.users_per_subnetwork();
    let k = b.k as f64;
    Ok(
        -b.alpha * (harmonic(km - 1.0) - harmonic(k - 1.0)) / (2.0 * std::f64::consts::LN_2)
            - b.alpha * b.d.log2(),
    )
}

/// Simplification of [`kth_neighbor_log_expectation`] using
/// `H_{K_m - 1} - H_{K - 1} ~ -ln M`: `(alpha/2) log2 M - alpha log2 D`.
pub fn kth_neighbor_log_expectation_asymptotic(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    Ok(b.alpha / 2.0 * (b.m as f64).log2() - b.alpha * b.d.log2())
}

/// `e^(1 + gamma)`, exposed for callers building their own arguments.
pub fn optimal_lambda_constant() -> f64 {
    E.powf(1.0 + EULER_GAMMA)
}
