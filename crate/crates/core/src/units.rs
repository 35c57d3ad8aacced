//! Physical constants and the length/velocity scales used to nondimensionalise.
//!
//! Inside the engine, time is measured in l/v_F, angular frequency in v_F/l
//! (so ω l/v_F is the dimensionless `x`), and voltage in ħv_F/(e l).

use std::f64::consts::TAU;

/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J·s).
pub const H_PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = H_PLANCK / TAU;
/// Speed of light (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;
/// Fine structure constant.
pub const ALPHA_QED: f64 = 1.0 / 137.035_999;
/// von Klitzing resistance h/e² (Ω).
pub const R_K: f64 = H_PLANCK / (E_CHARGE * E_CHARGE);

/// Coupler length and drift velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    /// Coupler length (m).
    pub l: f64,
    /// Fermi velocity (m/s).
    pub v_f: f64,
}

impl Units {
    pub fn new(l: f64, v_f: f64) -> crate::Result<Self> {
        if !(l > 0.0 && l.is_finite() && v_f > 0.0 && v_f.is_finite()) {
            return Err(crate::Error::Domain(format!(
                "length and velocity must be positive (l = {l}, v_F = {v_f})"
            )));
        }
        Ok(Self { l, v_f })
    }

    /// Time of flight l/v_F (s).
    pub fn time(&self) -> f64 {
        self.l / self.v_f
    }

    /// Angular frequency unit v_F/l (rad/s).
    pub fn frequency(&self) -> f64 {
        self.v_f / self.l
    }

    pub fn to_x(&self, omega: f64) -> f64 {
        omega * self.time()
    }

    pub fn from_x(&self, x: f64) -> f64 {
        x * self.frequency()
    }

    pub fn to_tau(&self, t: f64) -> f64 {
        t / self.time()
    }

    pub fn from_tau(&self, tau: f64) -> f64 {
        tau * self.time()
    }

    /// Voltage unit ħv_F/(e l) (V).
    pub fn voltage(&self) -> f64 {
        HBAR / (E_CHARGE * self.time())
    }

    /// Quantum capacitance e² l/(h v_F) of one channel of length l (F).
    pub fn quantum_capacitance(&self) -> f64 {
        E_CHARGE * E_CHARGE * self.time() / H_PLANCK
    }

    /// Energy unit ħ v_F/l (J).
    pub fn energy(&self) -> f64 {
        HBAR * self.frequency()
    }
}
