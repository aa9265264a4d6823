//! Core algorithms for spike-based cognitive-load classification.
//!
//! The pipeline: five physiological features per trial are z-scored and
//! rate-encoded into 16-step binary spike rasters by a leaky
//! integrate-and-fire encoder ([`encoder`]); a one- or two-layer spiking
//! classifier with winner-take-all output inhibition is trained online by
//! the delta rule ([`snn`]); trained weights are quantized to signed 3-bit
//! integers ([`quant`]); the quantized network is expanded onto an emulated
//! mixed-signal substrate with typed parallel synapses and two 20-neuron
//! output populations ([`hwemu`]); and population spike trains are decoded
//! back to class labels by a burst-based rule ([`decode`]). [`eval`] carries
//! metrics and the cross-validation / repeated-inference harnesses,
//! [`baseline`] a logistic-regression reference, and [`data`] ingestion,
//! normalization, splitting, and synthetic dataset generation.
//!
//! The crate is `no_std`-compatible (requires `alloc`). All transcendental
//! math goes through `libm` and all randomness through the seeded generator
//! in [`rng`], so seeded runs are bit-identical across platforms.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![forbid(unsafe_code)]
// Validation deliberately writes `!(x > 0.0)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod baseline;
pub mod data;
pub mod decode;
mod error;
pub mod encoder;
pub mod eval;
pub mod grid;
pub mod hwemu;
pub mod quant;
pub mod rng;
pub mod snn;

pub use error::{Error, Result};
