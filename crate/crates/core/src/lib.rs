//! Time-of-arrival operators for a particle incident on a square barrier.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod distributions;
pub mod eigenfunctions;
pub mod error;
pub mod kernels;
pub mod numerics;
pub mod ordering;
pub mod par;
pub mod potentials;
pub mod testfns;
pub mod tunneling;
pub mod verify;
pub mod wavepackets;

pub use config::{PhysicalConfig, Tolerance};
pub use error::{Error, Result};
pub use par::Execution;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
