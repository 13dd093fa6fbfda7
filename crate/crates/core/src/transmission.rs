//! Per-subnetwork zero-forcing transmission and ergodic rate estimation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networking::Partition;
use crate::scenario::{sample_small_scale, ComplexMatrix, GainMatrix};

/// Relative threshold on the QR diagonal below which a channel is treated as rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Per subnetwork, the L_m×K_m matrix of unit-norm precoders (one column per user).
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub precoders: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub per_user_rate: Vec<f64>,
    pub sum_rate: f64,
    pub fading_draw_count: usize,
}

impl RateReport {
    pub fn from_rates(per_user_rate: Vec<f64>, fading_draw_count: usize) -> Self {
        let sum_rate = per_user_rate.iter().sum();
        Self {
            per_user_rate,
            sum_rate,
            fading_draw_count,
        }
    }
}

/// Zero-forcing precoders for a K_m×L_m channel.
///
/// The right pseudo-inverse `F = G^H (G G^H)^-1` is formed from the thin QR
/// factorization `G^H = Q R` as `F = Q R^-H`, which avoids squaring the
/// condition number. Columns are normalized to unit length. With fewer APs
/// than users the precoders are all zero.
pub fn zf_precoders(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (users, aps) = g.shape();
    if aps < users {
        return Ok(ComplexMatrix::zeros(aps, users));
    }
    if users == 0 {
        return Ok(ComplexMatrix::zeros(aps, 0));
    }
    let qr = g.adjoint().qr();
    let r = qr.r();
    let max_diag = (0..users).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if !(max_diag > 0.0) || (0..users).any(|i| r[(i, i)].norm() <= RANK_TOL * max_diag) {
        return Err(Error::SingularChannel { users, aps });
    }
    let identity = ComplexMatrix::identity(users, users);
    let r_inv_h = r
        .adjoint()
        .solve_lower_triangular(&identity)
        .ok_or(Error::SingularChannel { users, aps })?;
    let mut f = qr.q() * r_inv_h;
    for mut col in f.column_iter_mut() {
        let norm = col.norm();
        col.unscale_mut(norm);
    }
    Ok(f)
}

/// Equal split of the subnetwork budget `P * L_m` over its `K_m` users.
pub fn allocate_power(p_tx: f64, aps: usize, users: usize) -> Result<f64> {
    if users == 0 {
        return Err(Error::invalid("power allocation over an empty user set"));
    }
    Ok(p_tx * aps as f64 / users as f64)
}

fn submatrix(h: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), cols.len(), |r, c| h[(rows[r], cols[c])])
}

/// Precoders for every subnetwork of `partition` under full channel `g` (K×L).
pub fn build_precoders(partition: &Partition, g: &ComplexMatrix) -> Result<PrecoderSet> {
    let precoders = partition
        .subnetworks
        .iter()
        .map(|s| zf_precoders(&submatrix(g, &s.user_indices, &s.ap_indices)))
        .collect::<Result<_>>()?;
    Ok(PrecoderSet { precoders })
}

/// Instantaneous SINR of every user for one channel draw.
///
/// `g` is the full K×L channel (large-scale times small-scale). Interference
/// at a user is summed over every other subnetwork's beams through the user's
/// actual channel to that subnetwork's APs. Users not covered by the
/// partition get SINR 0.
pub fn instantaneous_sinr(
    partition: &Partition,
    g: &ComplexMatrix,
    precoders: &PrecoderSet,
    p_tx: f64,
    noise_w: f64,
) -> Vec<f64> {
    let k = g.nrows();
    let mut signal = vec![0.0; k];
    let mut received = vec![0.0; k];
    let membership = partition.user_membership(k);

    for (m, (s, w)) in partition
        .subnetworks
        .iter()
        .zip(&precoders.precoders)
        .enumerate()
    {
        if s.user_indices.is_empty() || s.ap_indices.is_empty() {
            continue;
        }
        let per_user = p_tx * s.num_aps() as f64 / s.num_users() as f64;
        // every user's channel to this subnetwork's APs, times its beams: K×K_m
        let to_aps = ComplexMatrix::from_fn(k, s.num_aps(), |r, c| g[(r, s.ap_indices[c])]);
        let response: DMatrix<Complex64> = to_aps * w;
        for u in 0..k {
            if membership[u] == Some(m) {
                let own = s.user_indices.binary_search(&u).expect("member");
                signal[u] = response[(u, own)].norm_sqr() * per_user;
            } else {
                received[u] += response.row(u).iter().map(|z| z.norm_sqr()).sum::<f64>() * per_user;
            }
        }
    }
    signal
        .iter()
        .zip(&received)
        .map(|(s, i)| s / (noise_w + i))
        .collect()
}

/// Ergodic rates `E[log2(1 + SINR)]` averaged over the supplied fading draws,
/// with fresh precoders per draw.
pub fn ergodic_rates_over_draws(
    partition: &Partition,
    large_scale: &GainMatrix,
    draws: &[ComplexMatrix],
    p_tx: f64,
    noise_w: f64,
) -> Result<RateReport> {
    if draws.is_empty() {
        return Err(Error::invalid("need at least one fading draw"));
    }
    let k = large_scale.nrows();
    let mut acc = vec![0.0; k];
    for h in draws {
        if h.shape() != large_scale.shape() {
            return Err(Error::invalid(
                "fading draw shape does not match the gain matrix",
            ));
        }
        let g = ComplexMatrix::from_fn(k, large_scale.ncols(), |r, c| {
            h[(r, c)] * large_scale[(r, c)]
        });
        let precoders = build_precoders(partition, &g)?;
        for (a, sinr) in acc
            .iter_mut()
            .zip(instantaneous_sinr(partition, &g, &precoders, p_tx, noise_w))
        {
            *a += (1.0 + sinr).log2();
        }
    }
    let n = draws.len() as f64;
    Ok(RateReport::from_rates(
        acc.into_iter().map(|a| a / n).collect(),
        draws.len(),
    ))
}

/// Ergodic rates with `n_fading_draws` draws generated from `seed`.
pub fn ergodic_user_rates(
    partition: &Partition,
    large_scale: &GainMatrix,
    n_fading_draws: usize,
    p_tx: f64,
    noise_w: f64,
    seed: u64,
) -> Result<RateReport> {
    let (k, l) = large_scale.shape();
    let draws = sample_small_scale(k, l, n_fading_draws, seed)?;
    ergodic_rates_over_draws(partition, large_scale, &draws, p_tx, noise_w)
}
