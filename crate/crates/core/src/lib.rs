//! Numerical engine for detecting edge-magnetoplasmon radiation with a
//! single-electron Mach-Zehnder interferometer used as a quantum radar.
//!
//! Internally every quantity is nondimensional: times in l/v_F, angular
//! frequencies in v_F/l and voltages in ħv_F/(el), with l the coupler length.

pub mod coupler;
pub mod decoherence;
mod error;
pub mod numerics;
pub mod radar;
pub mod radiation;
pub mod toy;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
