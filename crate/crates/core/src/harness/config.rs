//! Experiment configuration.
//!
//! The file format is flat `section.key = value` lines; `#` starts a comment.
//!
//! ```text
//! geometry.D = 1000
//! geometry.K = 100
//! geometry.L = 200
//! networking.algorithm = ucr_apsel
//! networking.M = 4
//! networking.lambda = 1.5
//! montecarlo.n_layouts = 200
//! sweep.parameter = lambda
//! sweep.values = 1.1, 1.2, 1.3
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::BoundInputs;
use crate::error::{Error, Result};
use crate::networking::Algorithm;
use crate::power::PowerModel;
use crate::scenario::ChannelParams;

/// Quantity varied across the rows of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParameter {
    Lambda,
    M,
    L,
    K,
    SigmaShDb,
    Algorithm,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Lambda => "lambda",
            SweepParameter::M => "M",
            SweepParameter::L => "L",
            SweepParameter::K => "K",
            SweepParameter::SigmaShDb => "sigma_sh_db",
            SweepParameter::Algorithm => "algorithm",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "lambda" => SweepParameter::Lambda,
            "M" | "m" => SweepParameter::M,
            "L" | "l" => SweepParameter::L,
            "K" | "k" => SweepParameter::K,
            "sigma_sh_db" | "sigma_sh" => SweepParameter::SigmaShDb,
            "algorithm" => SweepParameter::Algorithm,
            other => return Err(Error::config(format!("unknown sweep parameter '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: SweepParameter,
    /// Raw values, parsed when applied to a configuration.
    pub values: Vec<String>,
}

impl Sweep {
    pub fn new(parameter: SweepParameter, values: &[impl ToString]) -> Self {
        Self {
            parameter,
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    /// Parses a comma-separated value list.
    pub fn parse_values(list: &str) -> Vec<String> {
        list.split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(String::from)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    /// Disk radius, m.
    pub d: f64,
    pub k: usize,
    pub l: usize,
    pub channel: ChannelParams,
    pub power: PowerModel,
    pub algorithm: Algorithm,
    pub m: usize,
    pub lambda: f64,
    pub n_layouts: usize,
    pub n_fading_draws: usize,
    pub master_seed: u64,
    pub sweep: Option<Sweep>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment_id: "exp".into(),
            d: 1000.0,
            k: 100,
            l: 200,
            channel: ChannelParams::default(),
            power: PowerModel::default(),
            algorithm: Algorithm::UcrApSel,
            m: 4,
            lambda: 1.5,
            n_layouts: 200,
            n_fading_draws: 10,
            master_seed: 1,
            sweep: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("bad value '{value}' for {key}")))
}

impl ExperimentConfig {
    /// Parses the key-value format; omitted keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut sweep_param: Option<SweepParameter> = None;
        let mut sweep_values: Option<Vec<String>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key.to_ascii_lowercase().as_str() {
                "experiment.id" => cfg.experiment_id = value.to_string(),
                "geometry.d" => cfg.d = parse_num(key, value)?,
                "geometry.k" => cfg.k = parse_num(key, value)?,
                "geometry.l" => cfg.l = parse_num(key, value)?,
                "channel.alpha" => cfg.channel.alpha = parse_num(key, value)?,
                "channel.sigma_sh_db" => cfg.channel.sigma_sh_db = parse_num(key, value)?,
                "channel.noise_power_dbm" => cfg.channel.noise_power_dbm = parse_num(key, value)?,
                "channel.min_distance_m" => cfg.channel.min_distance_m = parse_num(key, value)?,
                "power.p_tx" => cfg.power.p_tx = parse_num(key, value)?,
                "power.tau" => cfg.power.tau = parse_num(key, value)?,
                "power.p_c" => cfg.power.p_c = parse_num(key, value)?,
                "power.p_fix" => cfg.power.p_fix = parse_num(key, value)?,
                "power.p_b" => cfg.power.p_b = parse_num(key, value)?,
                "networking.algorithm" => cfg.algorithm = value.parse()?,
                "networking.m" => cfg.m = parse_num(key, value)?,
                "networking.lambda" => cfg.lambda = parse_num(key, value)?,
                "montecarlo.n_layouts" => cfg.n_layouts = parse_num(key, value)?,
                "montecarlo.n_fading_draws" => cfg.n_fading_draws = parse_num(key, value)?,
                "montecarlo.master_seed" => cfg.master_seed = parse_num(key, value)?,
                "sweep.parameter" => sweep_param = Some(value.parse()?),
                "sweep.values" => sweep_values = Some(Sweep::parse_values(value)),
                _ => {
                    return Err(Error::config(format!(
                        "line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.sweep = match (sweep_param, sweep_values) {
            (Some(parameter), Some(values)) => Some(Sweep { parameter, values }),
            (None, None) => None,
            _ => {
                return Err(Error::config(
                    "sweep.parameter and sweep.values must be given together",
                ))
            }
        };
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Copy of `self` with one sweep value applied and the sweep removed.
    pub fn with_value(&self, parameter: SweepParameter, value: &str) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.sweep = None;
        let key = parameter.name();
        let value = value.trim();
        match parameter {
            SweepParameter::Lambda => cfg.lambda = parse_num(key, value)?,
            SweepParameter::M => cfg.m = parse_num(key, value)?,
            SweepParameter::L => cfg.l = parse_num(key, value)?,
            SweepParameter::K => cfg.k = parse_num(key, value)?,
            SweepParameter::SigmaShDb => cfg.channel.sigma_sh_db = parse_num(key, value)?,
            SweepParameter::Algorithm => cfg.algorithm = value.parse()?,
        }
        Ok(cfg)
    }

    /// One configuration per sweep value, or just `self` without a sweep.
    pub fn expand(&self) -> Result<Vec<Self>> {
        match &self.sweep {
            None => Ok(vec![self.clone()]),
            Some(sweep) if sweep.values.is_empty() => Err(Error::config("sweep has no values")),
            Some(sweep) => sweep
                .values
                .iter()
                .map(|v| self.with_value(sweep.parameter, v))
                .collect(),
        }
    }

    /// Checks everything a run needs; all failures are configuration errors.
    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::config(other.to_string()),
        };
        self.channel.validate().map_err(as_config)?;
        self.power.validate().map_err(as_config)?;
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(Error::config(format!(
                "geometry.D must be positive, got {}",
                self.d
            )));
        }
        if self.k == 0 || self.l == 0 {
            return Err(Error::config(
                "geometry.K and geometry.L must be at least 1",
            ));
        }
        if self.m == 0 || self.m > self.k {
            return Err(Error::config(format!(
                "networking.M must be in [1, K={}], got {}",
                self.k, self.m
            )));
        }
        if self.n_layouts == 0 || self.n_fading_draws == 0 {
            return Err(Error::config(
                "montecarlo.n_layouts and montecarlo.n_fading_draws must be at least 1",
            ));
        }
        if self.algorithm.uses_lambda() {
            if !(self.lambda > 1.0) {
                return Err(Error::config(format!(
                    "networking.lambda must exceed 1, got {}",
                    self.lambda
                )));
            }
            if self.lambda * self.k as f64 > self.l as f64 + 1e-9 {
                return Err(Error::config(format!(
                    "networking.lambda = {} needs {} APs but L = {}",
                    self.lambda,
                    self.lambda * self.k as f64,
                    self.l
                )));
            }
        }
        match self.algorithm {
            Algorithm::ApCentric if self.m > self.l => Err(Error::config(format!(
                "ap_centric needs M <= L, got M={}, L={}",
                self.m, self.l
            ))),
            Algorithm::GraphPartition if self.l < self.k => Err(Error::config(format!(
                "graph_partition needs L >= K, got L={}, K={}",
                self.l, self.k
            ))),
            _ => Ok(()),
        }
    }

    pub fn bound_inputs(&self) -> BoundInputs {
        BoundInputs {
            l: self.l,
            k: self.k,
            m: self.m,
            lambda: self.lambda,
            alpha: self.channel.alpha,
            pm: self.power,
            d: self.d,
        }
    }
}
