//! Distributed mean estimation with side information.
//!
//! Each client holds a vector `x_i` and the server holds a correlated
//! `y_i`. Clients send `r` bits each through a modulo quantizer applied to
//! randomly rotated coordinates. Chained decoding lets a client be decoded
//! against a neighbour's reconstruction when that is closer than its own
//! side information.

pub mod bounds;
pub mod chain;
pub mod codec;
pub mod error;
pub mod harness;
pub mod quantizer;
pub mod rotation;
pub mod seed;
pub mod sim;

pub use bounds::{baseline_bound, proposed_bound, remark1_ratio, BoundReport};
pub use chain::{algorithm1, algorithm2, Chain, DeltaTable, Plan, RegionMode};
pub use codec::{derive_codec_params, CodecParams, Combiner, Message};
pub use error::{Error, Result};
pub use quantizer::{mq_decode, mq_encode, MqParams};
pub use rotation::{sample_rotation, Rotation};
pub use sim::{generate_instance, monte_carlo, run_trial, Instance, InstanceSpec, MseReport};
