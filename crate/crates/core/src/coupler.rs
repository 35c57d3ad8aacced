//! Radiation-coupler models and their edge-magnetoplasmon scattering matrices.
//!
//! All functions take the dimensionless frequency `x = ω l/v_F` and
//! dimensionless times `τ v_F/l`; see [`crate::units`].

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{quad_damped_with, ComplexTable, QuadOptions};
use crate::units::{Units, E_CHARGE, H_PLANCK, R_K};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// f(X) = (e^{iX} − 1)/(iX), with f(0) = 1.
pub fn f_factor(x: f64) -> Complex64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        Complex64::new(1.0 - x2 / 6.0 + x2 * x2 / 120.0, x / 2.0 - x * x2 / 24.0)
    } else {
        (Complex64::from_polar(1.0, x) - 1.0) / (I * x)
    }
}

/// Geometry and coupling of a capacitive coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    pub l: f64,
    pub v_f: f64,
    /// α = e² l/(h v_F C_g).
    pub alpha: f64,
}

impl CouplerParams {
    pub fn new(l: f64, v_f: f64, alpha: f64) -> Result<Self> {
        Units::new(l, v_f)?;
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
        }
        Ok(Self { l, v_f, alpha })
    }

    pub fn units(&self) -> Units {
        Units { l: self.l, v_f: self.v_f }
    }
}

/// Coupler with S(ω) given on a grid, validated for energy conservation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCoupler {
    units: Units,
    s_bb: ComplexTable,
    s_ba: ComplexTable,
}

impl TabulatedCoupler {
    /// `omega` in rad/s, strictly increasing; s_aa = s_bb and s_ab = s_ba are implied.
    pub fn new(
        units: Units,
        omega: &[f64],
        s_bb: Vec<Complex64>,
        s_ba: Vec<Complex64>,
    ) -> Result<Self> {
        if omega.first().is_some_and(|&w| w < 0.0) {
            return Err(Error::Table("tabulated frequencies must be non-negative".into()));
        }
        for (k, (b, a)) in s_bb.iter().zip(&s_ba).enumerate() {
            let norm = b.norm_sqr() + a.norm_sqr();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Table(format!(
                    "|S_bb|² + |S_ba|² = {norm} at row {k} (ω = {})",
                    omega[k]
                )));
            }
        }
        let x: Vec<f64> = omega.iter().map(|&w| units.to_x(w)).collect();
        Ok(Self {
            units,
            s_bb: ComplexTable::new(x.clone(), s_bb)?,
            s_ba: ComplexTable::new(x, s_ba)?,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.s_bb.max()
    }

    pub fn x_min(&self) -> f64 {
        self.s_bb.min()
    }
}

/// Radiation coupler variants.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplerModel {
    /// Two counter-propagating channels in total mutual influence.
    CounterPropagating(CouplerParams),
    /// Top gate over the target branch, driven by a classical voltage.
    TopGate(CouplerParams),
    /// Voltage applied directly along the channel (dispersionless).
    DirectDrive(Units),
    Tabulated(TabulatedCoupler),
}

/// 2×2 EMP scattering matrix at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub s_aa: Complex64,
    pub s_ab: Complex64,
    pub s_ba: Complex64,
    pub s_bb: Complex64,
}

impl SMatrix {
    /// Largest deviation of the row norms from 1.
    pub fn unitarity_defect(&self) -> f64 {
        let r1 = self.s_aa.norm_sqr() + self.s_ab.norm_sqr();
        let r2 = self.s_ba.norm_sqr() + self.s_bb.norm_sqr();
        (r1 - 1.0).abs().max((r2 - 1.0).abs())
    }
}

/// t(ω) = e^{iX}(1 + αf*(X))/(1 + αf(X)).
pub fn topgate_transmission(params: &CouplerParams, x: f64) -> Complex64 {
    let f = f_factor(x);
    Complex64::from_polar(1.0, x) * (ONE + params.alpha * f.conj()) / (ONE + params.alpha * f)
}

fn counter_propagating_s_ba(alpha: f64, x: f64) -> Complex64 {
    let f = f_factor(x);
    -I * x * f / (2.0 + alpha * f)
}

impl CouplerModel {
    pub fn units(&self) -> Units {
        match self {
            Self::CounterPropagating(p) | Self::TopGate(p) => p.units(),
            Self::DirectDrive(u) => *u,
            Self::Tabulated(t) => t.units,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::CounterPropagating(p) | Self::TopGate(p) => Some(p.alpha),
            _ => None,
        }
    }

    /// Highest dimensionless frequency at which the model can be evaluated.
    pub fn x_max(&self) -> f64 {
        match self {
            Self::Tabulated(t) => t.x_max(),
            _ => f64::INFINITY,
        }
    }

    pub fn s_matrix(&self, x: f64) -> Result<SMatrix> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::Domain(format!("frequency must be non-negative, got {x}")));
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self {
            Self::CounterPropagating(p) => {
                let s_ba = counter_propagating_s_ba(p.alpha, x);
                let s_bb = ONE - s_ba;
                SMatrix { s_aa: s_bb, s_ab: s_ba, s_ba, s_bb }
            }
            Self::TopGate(p) => SMatrix {
                s_aa: ONE,
                s_ab: zero,
                s_ba: zero,
                s_bb: topgate_transmission(p, x),
            },
            Self::DirectDrive(_) => SMatrix {
                s_aa: ONE,
                s_ab: zero,
                s_ba: zero,
                s_bb: Complex64::from_polar(1.0, x),
            },
            Self::Tabulated(t) => {
                let s_bb = t.s_bb.eval(x)?;
                let s_ba = t.s_ba.eval(x)?;
                SMatrix { s_aa: s_bb, s_ab: s_ba, s_ba, s_bb }
            }
        })
    }

    pub fn s_bb(&self, x: f64) -> Result<Complex64> {
        Ok(self.s_matrix(x)?.s_bb)
    }

    pub fn s_ba(&self, x: f64) -> Result<Complex64> {
        Ok(self.s_matrix(x)?.s_ba)
    }

    /// Dimensionless admittance R_K·Y(ω) seen by an external drive: S_ba for
    /// two-channel couplers, 1 − s_bb for gate-type couplers.
    pub fn drive_response(&self, x: f64) -> Result<Complex64> {
        let s = self.s_matrix(x)?;
        Ok(match self {
            Self::CounterPropagating(_) | Self::Tabulated(_) => s.s_ba,
            Self::TopGate(_) | Self::DirectDrive(_) => ONE - s.s_bb,
        })
    }

    /// Γ̃(x) = R(x)/(−ix), the Fourier transform of the windowing kernel Γ(τ),
    /// with its finite x → 0 limit.
    pub fn gamma_spectrum(&self, x: f64) -> Result<Complex64> {
        if x == 0.0 {
            return Ok(I * self.drive_response_slope()?);
        }
        Ok(self.drive_response(x)? / (-I * x))
    }

    /// dR/dx at x = 0.
    pub fn drive_response_slope(&self) -> Result<Complex64> {
        match self {
            Self::CounterPropagating(p) => Ok(-I / (2.0 + p.alpha)),
            Self::TopGate(p) => Ok(-I / (1.0 + p.alpha)),
            Self::DirectDrive(_) => Ok(-I),
            Self::Tabulated(t) => table_slope_at_zero(&t.s_ba),
        }
    }

    /// dS_bb/dx at x = 0⁺: analytic for built-in models, finite differences otherwise.
    pub fn s_bb_slope_at_zero(&self) -> Result<Complex64> {
        match self {
            Self::CounterPropagating(p) => Ok(I / (2.0 + p.alpha)),
            Self::TopGate(p) => Ok(I / (1.0 + p.alpha)),
            Self::DirectDrive(_) => Ok(I),
            Self::Tabulated(t) => table_slope_at_zero(&t.s_bb),
        }
    }
}

/// Slope of a tabulated function at ω = 0 from its interpolant.
fn table_slope_at_zero(t: &ComplexTable) -> Result<Complex64> {
    if t.min() > 0.0 {
        return Err(Error::Precondition("tabulated coupler must start at ω = 0".into()));
    }
    t.eval_derivative(0.0)
}

/// Y = (e²/h)(1 − t) in siemens, for a unit-modulus transmission `t`.
pub fn admittance_from_t(t: Complex64) -> Result<Complex64> {
    if (t.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!("|t| = {} is not 1", t.norm())));
    }
    Ok((ONE - t) * (E_CHARGE * E_CHARGE / H_PLANCK))
}

/// Low-frequency RC equivalent of a coupler admittance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcCircuit {
    /// Electrochemical capacitance (F).
    pub c_mu: f64,
    /// Resistance (Ω).
    pub r: f64,
}

impl RcCircuit {
    /// R_K C_μ (s).
    pub fn rk_c_mu(&self) -> f64 {
        R_K * self.c_mu
    }
}

/// Fits Y(ω) = −iC_μω + RC_μ²ω² + O(ω³) by Richardson extrapolation of
/// finite differences of the drive response.
///
/// Uses R(−x) = R(x)* so that Im R(h)/h and Re R(h)/h² are even in h.
pub fn rc_expansion(model: &CouplerModel) -> Result<RcCircuit> {
    let h0 = match model {
        CouplerModel::Tabulated(t) => {
            let g = t.s_ba.grid();
            let step = g.get(1).map_or(f64::INFINITY, |x| x - g[0]);
            (8.0 * step).min(0.1)
        }
        _ => 0.1,
    };
    if !(h0 > 0.0 && h0 < model.x_max()) {
        return Err(Error::Solver("grid too coarse for an RC expansion".into()));
    }
    let levels = 6;
    let mut c_col = Vec::with_capacity(levels);
    let mut q_col = Vec::with_capacity(levels);
    for k in 0..levels {
        let h = h0 / f64::powi(2.0, k as i32);
        let r = model.drive_response(h)?;
        c_col.push(-r.im / h);
        q_col.push(r.re / (h * h));
    }
    let c = richardson_h2(&c_col);
    let q = richardson_h2(&q_col);
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Solver(format!("non-positive capacitance coefficient {c}")));
    }
    let units = model.units();
    Ok(RcCircuit {
        c_mu: c * units.quantum_capacitance(),
        r: q / (c * c) * R_K,
    })
}

/// Extrapolates a sequence sampled at h, h/2, h/4, … to h → 0 assuming an
/// error expansion in powers of h².
fn richardson_h2(samples: &[f64]) -> f64 {
    let mut t = samples.to_vec();
    let n = t.len();
    for level in 1..n {
        let factor = f64::powi(4.0, level as i32);
        for i in (level..n).rev() {
            t[i] = (factor * t[i] - t[i - 1]) / (factor - 1.0);
        }
    }
    t[n - 1]
}

/// Transmission phase and dynamical quantum capacitance of a directly driven channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectDriveResponse {
    pub phase: Complex64,
    /// C_q(ω) (F).
    pub c_q_dyn: Complex64,
}

pub fn direct_drive_response(units: &Units, x: f64) -> Result<DirectDriveResponse> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::Domain(format!("frequency must be non-negative, got {x}")));
    }
    Ok(DirectDriveResponse {
        phase: Complex64::from_polar(1.0, x),
        c_q_dyn: f_factor(x) * units.quantum_capacitance(),
    })
}

/// U_eff(ω) = V_g(ω)/(1 + αf(ωl/v_F)) on a dimensionless frequency grid.
pub fn effective_gate_voltage(
    params: &CouplerParams,
    x: &[f64],
    v_g: &[Complex64],
) -> Result<Vec<Complex64>> {
    if x.len() != v_g.len() {
        return Err(Error::Domain("frequency and voltage arrays differ in length".into()));
    }
    Ok(x
        .iter()
        .zip(v_g)
        .map(|(&xi, &v)| v / (ONE + params.alpha * f_factor(xi.abs())))
        .collect())
}

/// Γ(τ) = ∫₀^∞ Γ̃(x)e^{−ixτ}dx/2π + c.c. on a grid of dimensionless times.
///
/// The conditionally convergent integral is regularised by e^{−ηx}, which
/// smooths Γ over a time η (default 10⁻² l/v_F).
pub fn gamma_ba(model: &CouplerModel, tau_grid: &[f64]) -> Result<ComplexTable> {
    gamma_ba_with(model, tau_grid, 1e-2)
}

pub fn gamma_ba_with(model: &CouplerModel, tau_grid: &[f64], eta: f64) -> Result<ComplexTable> {
    let slope = model.drive_response_slope()?;
    if !(slope.re.is_finite() && slope.im.is_finite()) {
        return Err(Error::Precondition("S_ba/ω does not converge at ω → 0".into()));
    }
    let x_cut = 40.0 / eta;
    if x_cut > model.x_max() {
        return Err(Error::Precondition(format!(
            "regularised Γ needs the coupler up to x = {x_cut}, table ends at {}",
            model.x_max()
        )));
    }
    let values = tau_grid
        .iter()
        .map(|&tau| {
            let period = TAU / tau.abs().max(1.0);
            let r = quad_damped_with(
                |x| {
                    model.gamma_spectrum(x).unwrap_or(Complex64::new(f64::NAN, 0.0))
                        * Complex64::new(-eta * x, -x * tau).exp()
                },
                eta,
                period.min(1.0),
                QuadOptions::tol(1e-9, 1e-12),
            )?;
            Ok(Complex64::new(2.0 * r.value.re / TAU, 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexTable::new(tau_grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(alpha: f64) -> CouplerModel {
        CouplerModel::CounterPropagating(CouplerParams::new(10e-6, 1e5, alpha).unwrap())
    }

    #[test]
    fn f_factor_branches_agree() {
        for x in [9.99e-4, 1.001e-3] {
            let taylor = Complex64::new(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
            assert!((f_factor(x) - taylor).norm() < 1e-12);
        }
        assert!(f_factor(TAU).norm() < 1e-15);
    }

    #[test]
    fn counter_propagating_limits() {
        let s0 = cp(0.2).s_matrix(0.0).unwrap();
        assert_eq!(s0.s_ba, Complex64::new(0.0, 0.0));
        assert_eq!(s0.s_bb, ONE);
        let s = cp(0.0).s_matrix(std::f64::consts::PI).unwrap();
        assert!((s.s_ba - ONE).norm() < 1e-15);
        assert!(s.s_bb.norm() < 1e-15);
        let s = cp(15.0).s_matrix(0.5).unwrap();
        assert!(((s.s_ba - 0.5).norm() - 0.5).abs() < 1e-14);
        assert!(cp(1.0).s_matrix(-1.0).is_err());
    }

    #[test]
    fn topgate_examples() {
        let p = CouplerParams::new(1e-6, 1e5, 0.0).unwrap();
        assert!((topgate_transmission(&p, 1.3) - Complex64::from_polar(1.0, 1.3)).norm() < 1e-15);
        let p = CouplerParams::new(1e-6, 1e5, 15.0).unwrap();
        assert!((topgate_transmission(&p, 0.5).norm() - 1.0).abs() < 1e-12);
        assert_eq!(topgate_transmission(&p, 0.0), ONE);
    }

    #[test]
    fn admittance_examples() {
        let g = E_CHARGE * E_CHARGE / H_PLANCK;
        assert_eq!(admittance_from_t(ONE).unwrap(), Complex64::new(0.0, 0.0));
        assert!((admittance_from_t(-ONE).unwrap() - 2.0 * g).norm() < 1e-18);
        let x = 1e-4;
        let y = admittance_from_t(Complex64::from_polar(1.0, x)).unwrap();
        assert!((y / g - Complex64::new(0.0, -x)).norm() < x * x);
        assert!(admittance_from_t(Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn rc_counter_propagating() {
        for alpha in [0.0, 2.0] {
            let m = cp(alpha);
            let rc = rc_expansion(&m).unwrap();
            let cq = m.units().quantum_capacitance();
            assert!((rc.c_mu / (cq / (2.0 + alpha)) - 1.0).abs() < 1e-8);
            assert!((rc.r / R_K - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rc_top_gate() {
        let p = CouplerParams::new(10e-6, 1e5, 1.0).unwrap();
        let rc = rc_expansion(&CouplerModel::TopGate(p)).unwrap();
        assert!((rc.rk_c_mu() / (p.l / (2.0 * p.v_f)) - 1.0).abs() < 1e-8);
        assert!((rc.r / (R_K / 2.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn direct_drive_examples() {
        let u = Units::new(1e-6, 1e5).unwrap();
        let cq = u.quantum_capacitance();
        let r = direct_drive_response(&u, 0.0).unwrap();
        assert_eq!(r.phase, ONE);
        assert!((r.c_q_dyn - cq).norm() < 1e-30);
        let r = direct_drive_response(&u, TAU).unwrap();
        assert!((r.phase - ONE).norm() < 1e-14);
        assert!(r.c_q_dyn.norm() / cq < 1e-15);
        let r = direct_drive_response(&u, std::f64::consts::PI).unwrap();
        assert!((r.c_q_dyn.norm() / cq - 2.0 / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn gate_voltage_filtering() {
        let p0 = CouplerParams::new(1e-6, 1e5, 0.0).unwrap();
        let v = vec![Complex64::new(1.0, 0.5); 3];
        let x = [0.0, 1.0, 3.0];
        assert_eq!(effective_gate_voltage(&p0, &x, &v).unwrap(), v);
        let p = CouplerParams::new(1e-6, 1e5, 15.0).unwrap();
        let u = effective_gate_voltage(&p, &[0.0, TAU], &v[..2]).unwrap();
        assert!((u[0] - v[0] / 16.0).norm() < 1e-15);
        assert!((u[1] - v[1]).norm() < 1e-14);
    }

    #[test]
    fn tabulated_validates_unitarity() {
        let u = Units::new(1e-6, 1e5).unwrap();
        let w = [0.0, 1e9, 2e9];
        let bad = TabulatedCoupler::new(
            u,
            &w,
            vec![ONE; 3],
            vec![Complex64::new(0.1, 0.0); 3],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn gamma_of_decoupled_model_vanishes() {
        let u = Units::new(1e-6, 1e5).unwrap();
        let w: Vec<f64> = (0..=4000).map(|k| u.from_x(k as f64 * 0.25)).collect();
        let n = w.len();
        let t = TabulatedCoupler::new(u, &w, vec![ONE; n], vec![Complex64::new(0.0, 0.0); n])
            .unwrap();
        let g = gamma_ba_with(&CouplerModel::Tabulated(t), &[-1.0, 0.0, 2.0], 0.1).unwrap();
        assert!(g.values().iter().all(|v| v.norm() == 0.0));
    }
}
