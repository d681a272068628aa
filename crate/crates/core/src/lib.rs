//! System-level simulation of downlink multi-TRP coordination.
//!
//! The crate is `no_std` (it needs `alloc`) and contains the whole
//! simulation: indoor deployment ([`topology`]), channel model
//! ([`channel`]), rank-1 precoding and MMSE-IRC link abstraction ([`phy`]),
//! proportional-fair schedulers for DPS, F-NCJT, NF-NCJT and the
//! uncoordinated baseline ([`scheduler`]), and the TTI loop ([`engine`]).
//! File IO, configuration parsing and the command line live in `ncjt-sim`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod params;
pub mod phy;
pub mod scheduler;
pub mod stats;
pub mod topology;

pub use engine::{run, run_with, Observer, RunOutput, ThroughputSample, World};
pub use error::{Error, Result};
pub use params::{ArrivalScope, SimParams, TrafficParams};
pub use scheduler::Scheme;
