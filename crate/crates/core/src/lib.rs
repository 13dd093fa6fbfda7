//! Clustered cell-free networking with AP selection.
//!
//! Users are grouped into disjoint subnetworks, each served by a selected set
//! of access points with zero-forcing precoding. The crate samples random
//! deployments, builds partitions with UCR-ApSel and several baselines,
//! evaluates ergodic rates and energy efficiency, and provides the closed-form
//! bounds and optimal AP-selection ratio.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod clustering;
pub mod error;
pub mod harness;
pub mod networking;
pub mod power;
pub mod rng;
pub mod scenario;
pub mod transmission;

pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentResult};
pub use networking::{Algorithm, Partition, Subnetwork};
pub use power::{EnergyReport, PowerModel};
pub use scenario::{ChannelParams, ComplexMatrix, Deployment, GainMatrix, Position};
pub use transmission::RateReport;
