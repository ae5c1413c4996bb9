//! Planning and simulation of semi-filterless DWDM metro horseshoes built from
//! wavelength-blocker add/drop nodes.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common cases. Configuration files,
//! reports and the command line work in `f64`.

pub mod ber;
pub mod cli;
pub mod components;
pub mod config;
pub mod design;
pub mod engine;
pub mod network;
pub mod osnr;
pub mod report;
pub mod scalar;
pub mod units;

pub use scalar::Scalar;

/// Double-precision instantiations used by configuration files and reports.
pub type Topology64 = network::Topology<f64>;
pub type ChannelState64 = engine::ChannelState<f64>;
pub type PropagationTrace64 = engine::PropagationTrace<f64>;
pub type DesignInputs64 = design::DesignInputs<f64>;
pub type DesignReport64 = design::DesignReport<f64>;

/// Single-precision instantiations.
pub type Topology32 = network::Topology<f32>;
pub type ChannelState32 = engine::ChannelState<f32>;
pub type PropagationTrace32 = engine::PropagationTrace<f32>;
