//! Asymptotic secret key rates for discrete-modulated measurement-device-
//! independent continuous-variable QKD, with optional zero-photon catalysis
//! on Alice's arm.
//!
//! The pipeline is `modulation` → `zpc` → `channel` → `keyrate`; `optimize`
//! searches over the free parameters and `scenarios` packages the standard
//! sweeps as tables.

// NaN inputs must fail validation, hence `!(x < y)` style checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod keyrate;
pub mod modulation;
pub mod optimize;
pub mod scenario_file;
pub mod scenarios;
pub mod zpc;

pub use channel::{equivalent_channel, fiber_transmittance, EquivalentChannel, Layout, LinkGeometry, RatioDistance, SymmetricDistance};
pub use config::ProtocolConfig;
pub use error::{Error, Result};
pub use keyrate::{final_covariance, secret_key_rate, FinalCovariance, KeyRateResult};
pub use modulation::{correlation_z, AmplitudeSq, ModulationConstants, Scheme};
pub use optimize::{max_distance, minimum_beta, optimize_t, optimize_tv, OptimizationGrid};
pub use scenario_file::{load_scenario_file, parse_scenario, parse_scenario_for, serialize_scenario};
pub use scenarios::{Axis, Case, FigureId, FigureOutput, SweepSpec, Table, Variant};
pub use zpc::{apply_zpc, ZpcSetting};
