//! Optical effects of vacuum, squeezed, thermal and Casimir field
//! fluctuations on a nonlinear medium.
//!
//! Modules, bottom up:
//!
//! - [`units`]: SI ↔ natural-unit conversion with unit-tagged quantities.
//! - [`media`]: susceptibility tensors, refractive index shifts and
//!   expansion validity checks.
//! - [`qstates`]: normally ordered ⟨E²⟩ for squeezed, coherent and mode-sum
//!   states.
//! - [`ambient`]: ⟨E²⟩ from thermal radiation and near a plate.
//! - [`propagate`]: probe-wave propagation through a modulated medium.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod error;
pub mod media;
pub mod propagate;
pub mod qstates;
pub mod units;

pub use error::{Error, Result};
