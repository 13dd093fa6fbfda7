//! Power consumption and energy-efficiency metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networking::Partition;
use crate::transmission::RateReport;

/// Scalar power parameters. Defaults are the reference values used throughout
/// the experiments (2 W per AP, 38% amplifier efficiency, 1 W circuit,
/// 0.05 W fixed backhaul per deployed AP, 0.1 W per bps/Hz of traffic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Average transmit power per active AP, W.
    pub p_tx: f64,
    /// Power-amplifier efficiency in (0, 1].
    pub tau: f64,
    /// Circuit power per active AP, W.
    pub p_c: f64,
    /// Traffic-independent backhaul power per deployed AP, W.
    pub p_fix: f64,
    /// Traffic-dependent backhaul power, W per bps/Hz.
    pub p_b: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            p_tx: 2.0,
            tau: 0.38,
            p_c: 1.0,
            p_fix: 0.05,
            p_b: 0.1,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_tx", self.p_tx),
            ("tau", self.tau),
            ("p_c", self.p_c),
            ("p_fix", self.p_fix),
            ("p_b", self.p_b),
        ];
        for (name, v) in fields {
            if !(v > 0.0) {
                return Err(Error::invalid(format!(
                    "power parameter {name} must be positive, got {v}"
                )));
            }
        }
        if self.tau > 1.0 {
            return Err(Error::invalid(format!(
                "amplifier efficiency must be at most 1, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    /// Power drawn by one active AP: `P / tau + P_c`.
    pub fn per_active_ap(&self) -> f64 {
        self.p_tx / self.tau + self.p_c
    }
}

/// `(P/tau + P_c) * active + P_fix * deployed + P_b * R_sum`, in watts.
pub fn total_power(active_aps: usize, deployed_aps: usize, sum_rate: f64, pm: &PowerModel) -> f64 {
    pm.per_active_ap() * active_aps as f64 + pm.p_fix * deployed_aps as f64 + pm.p_b * sum_rate
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total_power: f64,
    pub ee: f64,
    pub min_rate: f64,
    /// Mean user rate of every subnetwork that has users.
    pub per_subnetwork_mean_rates: Vec<f64>,
    /// Population variance of `per_subnetwork_mean_rates`.
    pub rate_variance_across_subnetworks: f64,
}

pub fn energy_efficiency(
    rates: &RateReport,
    partition: &Partition,
    pm: &PowerModel,
    deployed_aps: usize,
) -> EnergyReport {
    let total = total_power(partition.active_ap_count, deployed_aps, rates.sum_rate, pm);
    let min_rate = rates
        .per_user_rate
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let means: Vec<f64> = partition
        .subnetworks
        .iter()
        .filter(|s| !s.user_indices.is_empty())
        .map(|s| {
            s.user_indices
                .iter()
                .map(|&u| rates.per_user_rate[u])
                .sum::<f64>()
                / s.num_users() as f64
        })
        .collect();
    EnergyReport {
        total_power: total,
        ee: rates.sum_rate / total,
        min_rate,
        rate_variance_across_subnetworks: population_variance(&means),
        per_subnetwork_mean_rates: means,
    }
}

pub(crate) fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}
