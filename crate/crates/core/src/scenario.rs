//! Random deployments and channel generation.
//!
//! APs and users are dropped uniformly over a disk of radius `D`. The
//! large-scale amplitude gain of a link at distance `d` is `d^(-alpha/2)`,
//! optionally multiplied by a log-normal shadowing factor, and small-scale
//! fading is i.i.d. circularly-symmetric complex Gaussian with unit variance.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{child_seed, stream, Purpose};

/// K×L matrix of real large-scale amplitude gains, users on rows.
pub type GainMatrix = DMatrix<f64>;
/// K×L matrix of complex channel coefficients, users on rows.
pub type ComplexMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub ap_positions: Vec<Position>,
    pub user_positions: Vec<Position>,
    pub radius_d: f64,
    pub seed: u64,
}

impl Deployment {
    /// Builds a deployment from explicit coordinates (used for hand-made layouts).
    pub fn from_positions(
        ap_positions: Vec<Position>,
        user_positions: Vec<Position>,
        radius_d: f64,
    ) -> Result<Self> {
        if ap_positions.is_empty() || user_positions.is_empty() {
            return Err(Error::invalid(
                "deployment needs at least one AP and one user",
            ));
        }
        Ok(Self {
            ap_positions,
            user_positions,
            radius_d,
            seed: 0,
        })
    }

    pub fn num_users(&self) -> usize {
        self.user_positions.len()
    }

    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub alpha: f64,
    pub sigma_sh_db: f64,
    pub noise_power_dbm: f64,
    pub min_distance_m: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            alpha: 4.0,
            sigma_sh_db: 0.0,
            noise_power_dbm: -104.0,
            min_distance_m: 1.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) {
            return Err(Error::invalid(format!(
                "path-loss exponent must exceed 2, got {}",
                self.alpha
            )));
        }
        if !(self.sigma_sh_db >= 0.0) {
            return Err(Error::invalid(
                "shadowing standard deviation must be nonnegative",
            ));
        }
        if !(self.min_distance_m > 0.0) {
            return Err(Error::invalid("minimum distance must be positive"));
        }
        Ok(())
    }

    /// Noise power in watts.
    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Large-scale gains plus the small-scale draws generated for them.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub large_scale: GainMatrix,
    pub small_scale_draws: Vec<ComplexMatrix>,
    pub deployment_seed: u64,
}

fn sample_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Position {
    let theta = 2.0 * PI * rng.random::<f64>();
    let r = radius * rng.random::<f64>().sqrt();
    Position::new(r * theta.cos(), r * theta.sin())
}

/// Drops `l` APs and `k` users uniformly over the disk of radius `d`.
///
/// AP and user coordinates come from separate child streams, so user
/// positions for a given seed do not depend on the number of APs.
pub fn sample_deployment(k: usize, l: usize, d: f64, seed: u64) -> Result<Deployment> {
    if k == 0 || l == 0 {
        return Err(Error::invalid(format!(
            "need K >= 1 and L >= 1, got K={k}, L={l}"
        )));
    }
    if !(d > 0.0) {
        return Err(Error::invalid("disk radius must be positive"));
    }
    let mut ap_rng = stream(child_seed(seed, Purpose::ApPositions));
    let mut user_rng = stream(child_seed(seed, Purpose::UserPositions));
    let ap_positions = (0..l).map(|_| sample_in_disk(&mut ap_rng, d)).collect();
    let user_positions = (0..k).map(|_| sample_in_disk(&mut user_rng, d)).collect();
    Ok(Deployment {
        ap_positions,
        user_positions,
        radius_d: d,
        seed,
    })
}

/// Amplitude gain without shadowing for a link of length `distance`.
pub fn path_gain(distance: f64, params: &ChannelParams) -> f64 {
    distance
        .max(params.min_distance_m)
        .powf(-params.alpha / 2.0)
}

/// Builds the K×L large-scale gain matrix.
///
/// With `sigma_sh_db == 0` no randomness is consumed and `seed` is ignored.
/// Otherwise each link gets an independent `c ~ N(0, sigma^2)` dB offset and
/// the gain is `sqrt(d^-alpha * 10^(c/10))`.
pub fn large_scale_matrix(
    dep: &Deployment,
    params: &ChannelParams,
    seed: u64,
) -> Result<GainMatrix> {
    params.validate()?;
    let k = dep.num_users();
    let l = dep.num_aps();
    let mut gains = GainMatrix::from_fn(k, l, |ki, li| {
        path_gain(
            dep.user_positions[ki].distance(&dep.ap_positions[li]),
            params,
        )
    });
    if params.sigma_sh_db > 0.0 {
        let normal =
            Normal::new(0.0, params.sigma_sh_db).map_err(|e| Error::invalid(e.to_string()))?;
        let mut rng = stream(seed);
        for ki in 0..k {
            for li in 0..l {
                let c: f64 = normal.sample(&mut rng);
                gains[(ki, li)] *= 10f64.powf(c / 20.0);
            }
        }
    }
    Ok(gains)
}

/// Draws `n_draws` K×L matrices of i.i.d. CN(0, 1) entries.
///
/// Draws are generated sequentially from one stream, so the first `n` draws
/// for a seed are the same regardless of how many are requested.
pub fn sample_small_scale(
    k: usize,
    l: usize,
    n_draws: usize,
    seed: u64,
) -> Result<Vec<ComplexMatrix>> {
    if n_draws == 0 {
        return Err(Error::invalid("need at least one fading draw"));
    }
    let mut rng = stream(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let draws = (0..n_draws)
        .map(|_| {
            let mut m = ComplexMatrix::zeros(k, l);
            for ki in 0..k {
                for li in 0..l {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    m[(ki, li)] = Complex64::new(re * scale, im * scale);
                }
            }
            m
        })
        .collect();
    Ok(draws)
}

/// Entrywise product of large-scale gains and small-scale fading.
pub fn channel_matrix(
    large_scale: &GainMatrix,
    small_scale: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if large_scale.shape() != small_scale.shape() {
        return Err(Error::invalid(format!(
            "shape mismatch: large-scale {:?} vs small-scale {:?}",
            large_scale.shape(),
            small_scale.shape()
        )));
    }
    Ok(ComplexMatrix::from_fn(
        large_scale.nrows(),
        large_scale.ncols(),
        |r, c| small_scale[(r, c)] * large_scale[(r, c)],
    ))
}

/// Large-scale gains on a dB scale (`20 log10 gamma`), the clustering features.
pub fn gains_db(large_scale: &GainMatrix) -> DMatrix<f64> {
    large_scale.map(|g| 20.0 * g.log10())
}
