//! Multiphonon nonradiative decay of colour centres in a single effective
//! vibrational mode, plus the emitter kinetics and photon-counting lifetime
//! fits that sit on top of it.
//!
//! Units are fixed across the crate: energies in meV, mass-weighted
//! coordinates in amu^(1/2)·Å, rates in s⁻¹. Lifetimes are seconds inside
//! the kinetics API and µs in the transient histograms and the CLI.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod error;
pub mod kinetics;
pub mod mode_model;
pub mod oscillator;
pub mod rate_engine;
pub mod transient;

pub use error::{Error, Result};
