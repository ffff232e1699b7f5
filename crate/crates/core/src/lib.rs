//! Spiking-neural-network sequential modeling engine.
//!
//! From-scratch LIF / ALIF / CE-LIF neuron dynamics with exact hand-written
//! backpropagation through time, benchmark task generators (adding problem,
//! copy memory, pixel-sequential MNIST), gradient-flow probes, a temporal
//! encoding similarity analysis, and a neuromorphic energy-cost estimator.
//!
//! Organization:
//! - [`tensor`], [`rng`], [`optim`]: dense math, deterministic RNG, Adam.
//! - [`neuron`]: per-timestep forward dynamics and the boxcar surrogate.
//! - [`trace`], [`bptt`], [`oracle`]: trace recording, reverse-mode
//!   gradients, and an independent forward-mode differentiation oracle.
//! - [`network`]: layer stacks, readouts, losses.
//! - [`tasks`]: synthetic task generators and IDX/MNIST ingestion.
//! - [`energy`], [`checkpoint`], [`config`], [`train`], [`probe`]: the run
//!   harness.

pub mod bptt;
pub mod checkpoint;
pub mod config;
pub mod energy;
pub mod error;
pub mod network;
pub mod neuron;
pub mod optim;
pub mod oracle;
pub mod probe;
pub mod rng;
pub mod tasks;
pub mod tensor;
pub mod trace;
pub mod train;

pub use error::{Error, Result};
