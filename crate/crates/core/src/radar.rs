//! The interference observable X₊^(dc): Leviton probe, decoherence filter
//! f_{τe,τ2}(Ω), vacuum baseline, radar signal for any Franck-Condon factor,
//! its kernel approximation, and time- and frequency-domain views.
//!
//! With s = t_e + τ₂, X₊^(dc) = ∫F̃(Ω)e^{−iΩs}f(Ω)dΩ/2π where
//! f(Ω) = 4πτ_e∫_{|Ω|/2}^∞ Z̃₁(ω−Ω/2)e^{−2ωτ_e}e^{−i(ω−Ω/2)τ₂}dω/2π.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decoherence::ElasticAmplitude;
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_breaks, panel_breaks, ComplexTable, QuadOptions};
use crate::radiation::FranckCondonFactor;
use crate::units::E_CHARGE;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Leviton wavepacket φ(t) = √(τ_e/π)/(τ_e + i(t − t_e)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevitonProbe {
    pub tau_e: f64,
    pub t_e: f64,
}

impl LevitonProbe {
    pub fn new(tau_e: f64, t_e: f64) -> Result<Self> {
        if !(tau_e > 0.0 && tau_e.is_finite() && t_e.is_finite()) {
            return Err(Error::Domain(format!("Leviton width must be positive, got {tau_e}")));
        }
        Ok(Self { tau_e, t_e })
    }

    /// φ̃(ω) = √(4πτ_e) Θ(ω) e^{−ωτ_e} e^{iωt_e}.
    pub fn phi_freq(&self, w: f64) -> Complex64 {
        if w < 0.0 {
            return ZERO;
        }
        (4.0 * PI * self.tau_e).sqrt() * (-w * self.tau_e).exp() * Complex64::from_polar(1.0, w * self.t_e)
    }

    pub fn phi_time(&self, t: f64) -> Complex64 {
        (self.tau_e / PI).sqrt() / Complex64::new(self.tau_e, t - self.t_e)
    }
}

/// Gaussian wavepacket φ̃(ω) = N e^{−(ω−ω_e)²/2γ_e²} e^{iωt_e}, N² = √(4π)/γ_e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProbe {
    pub omega_e: f64,
    pub gamma_e: f64,
    pub t_e: f64,
}

impl GaussianProbe {
    /// Requires ω_e ≥ 6γ_e so that the negative-energy weight is negligible.
    pub fn new(omega_e: f64, gamma_e: f64, t_e: f64) -> Result<Self> {
        if !(gamma_e > 0.0 && omega_e >= 6.0 * gamma_e) {
            return Err(Error::Domain(format!(
                "Gaussian probe needs ω_e ≥ 6γ_e > 0, got ω_e = {omega_e}, γ_e = {gamma_e}"
            )));
        }
        Ok(Self { omega_e, gamma_e, t_e })
    }

    fn norm(&self) -> f64 {
        ((4.0 * PI).sqrt() / self.gamma_e).sqrt()
    }

    pub fn phi_freq(&self, w: f64) -> Complex64 {
        let d = (w - self.omega_e) / self.gamma_e;
        self.norm() * (-0.5 * d * d).exp() * Complex64::from_polar(1.0, w * self.t_e)
    }

    pub fn phi_time(&self, t: f64) -> Complex64 {
        let u = t - self.t_e;
        self.norm() * self.gamma_e / TAU.sqrt()
            * (-0.5 * (self.gamma_e * u).powi(2)).exp()
            * Complex64::from_polar(1.0, -self.omega_e * u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wavepacket {
    Leviton(LevitonProbe),
    Gaussian(GaussianProbe),
}

impl Wavepacket {
    pub fn phi_time(&self, t: f64) -> Complex64 {
        match self {
            Self::Leviton(p) => p.phi_time(t),
            Self::Gaussian(p) => p.phi_time(t),
        }
    }

    fn t_e(&self) -> f64 {
        match self {
            Self::Leviton(p) => p.t_e,
            Self::Gaussian(p) => p.t_e,
        }
    }

    fn duration(&self) -> f64 {
        match self {
            Self::Leviton(p) => p.tau_e,
            Self::Gaussian(p) => 1.0 / p.gamma_e,
        }
    }
}

/// Negative-Ω filter evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    /// Quadrature of Z̃₁ over [|Ω|, ∞).
    #[default]
    Exact,
    /// f(Ω<0) ≈ e^{−|Ω|τ_e}e^{−i|Ω|τ₂₁}f(0).
    Adiabatic,
}

/// f_{τe,τ2}(Ω) for one elastic amplitude, with f(0) cached.
#[derive(Debug, Clone)]
pub struct LevitonFilter<'a> {
    z: &'a ElasticAmplitude,
    pub tau_e: f64,
    pub tau2: f64,
    /// τ₂₁ = τ₂ − τ₁.
    pub tau21: f64,
    f0: Complex64,
}

impl<'a> LevitonFilter<'a> {
    pub fn new(z: &'a ElasticAmplitude, tau_e: f64, tau2: f64) -> Result<Self> {
        if !(tau_e > 0.0 && tau2.is_finite()) {
            return Err(Error::Domain(format!("need τ_e > 0 and finite τ₂, got {tau_e}, {tau2}")));
        }
        let weight = (-2.0 * tau_e * z.x_max()).exp();
        if weight > 1e-8 {
            return Err(Error::Precondition(format!(
                "ω_max = {} too small for τ_e = {tau_e} (Leviton weight {weight:e} beyond the table)",
                z.x_max()
            )));
        }
        if weight > 1e-15 {
            log::warn!("Leviton weight beyond ω_max is {weight:e}");
        }
        let f0 = 2.0 * tau_e * z.laplace(Complex64::new(2.0 * tau_e, tau2), 0.0)?;
        Ok(Self { z, tau_e, tau2, tau21: tau2 - z.tau1, f0 })
    }

    pub fn amplitude(&self) -> &ElasticAmplitude {
        self.z
    }

    /// f(0), the vacuum baseline.
    pub fn at_zero(&self) -> Complex64 {
        self.f0
    }

    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        if omega >= 0.0 {
            return Ok((-omega * self.tau_e).exp() * self.f0);
        }
        let w = -omega;
        let p = Complex64::new(2.0 * self.tau_e, self.tau2);
        // 2τ_e e^{wτ_e}∫_w^∞ Z̃₁ e^{−pω}dω, with the exponentials recombined.
        let shifted = self.z.laplace(p, w)? * (p * w).exp();
        Ok(2.0 * self.tau_e * shifted * (Complex64::new(-self.tau_e, -self.tau2) * w).exp())
    }

    pub fn eval_adiabatic(&self, omega: f64) -> Complex64 {
        if omega >= 0.0 {
            return (-omega * self.tau_e).exp() * self.f0;
        }
        let w = -omega;
        self.f0 * (-w * self.tau_e).exp() * Complex64::from_polar(1.0, -w * self.tau21)
    }

    pub fn eval_mode(&self, omega: f64, mode: FilterMode) -> Result<Complex64> {
        match mode {
            FilterMode::Exact => self.eval(omega),
            FilterMode::Adiabatic => Ok(self.eval_adiabatic(omega)),
        }
    }

    /// |f_exact − f_adiabatic|/|f(0)|.
    pub fn adiabatic_discrepancy(&self, omega: f64) -> Result<f64> {
        Ok((self.eval(omega)? - self.eval_adiabatic(omega)).norm() / self.f0.norm())
    }

    /// Time-domain filter k(u) = ∫f(Ω)e^{−iΩu}dΩ/2π
    /// = τ_e/(π(τ_e + iu)) ∫₀^∞ Z̃₁(ω)e^{−ω(τ_e − i(u − τ₂))}dω.
    pub fn kernel(&self, u: f64) -> Result<Complex64> {
        let l = self.z.laplace(Complex64::new(self.tau_e, -(u - self.tau2)), 0.0)?;
        Ok(self.tau_e * l / (PI * Complex64::new(self.tau_e, u)))
    }

    /// k(u) tabulated on [−half_width, half_width], dense near the two peaks.
    fn kernel_table(&self, half_width: f64) -> Result<ComplexTable> {
        let te = self.tau_e;
        let lo = self.tau21.min(0.0) - 12.0 * te;
        let hi = self.tau21.max(0.0) + 12.0 * te;
        let h = te / 16.0;
        let n = ((hi - lo) / h).ceil() as usize;
        let mut grid: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
        let mut u = hi;
        while u < half_width {
            u += h.max(0.04 * (u - hi + 12.0 * te));
            grid.push(u);
        }
        let mut u = lo;
        let mut left = Vec::new();
        while u > -half_width {
            u -= h.max(0.04 * (lo - u + 12.0 * te));
            left.push(u);
        }
        left.reverse();
        left.extend(grid);
        let values = left.iter().map(|&u| self.kernel(u)).collect::<Result<Vec<_>>>()?;
        ComplexTable::new(left, values)
    }
}

pub fn filter_f(z: &ElasticAmplitude, tau_e: f64, tau2: f64, omega: f64) -> Result<Complex64> {
    LevitonFilter::new(z, tau_e, tau2)?.eval(omega)
}

pub fn filter_f_adiabatic(z: &ElasticAmplitude, tau_e: f64, tau2: f64, omega: f64) -> Result<Complex64> {
    Ok(LevitonFilter::new(z, tau_e, tau2)?.eval_adiabatic(omega))
}

/// [X₊^(dc)] with vacuum in the radiation channel, f(0).
pub fn vacuum_baseline(z: &ElasticAmplitude, tau_e: f64, tau2: f64) -> Result<Complex64> {
    Ok(LevitonFilter::new(z, tau_e, tau2)?.at_zero())
}

/// Baseline without decoherence, 2τ_e/(2τ_e + iτ₂₁).
pub fn ballistic_baseline(tau_e: f64, tau21: f64) -> Complex64 {
    2.0 * tau_e / Complex64::new(2.0 * tau_e, tau21)
}

/// τ₂ maximising |vacuum_baseline|: a coarse scan around τ₁ refined by
/// golden-section search.
pub fn optimal_tau2(z: &ElasticAmplitude, tau_e: f64) -> Result<f64> {
    let objective = |t2: f64| -> Result<f64> { Ok(vacuum_baseline(z, tau_e, t2)?.norm()) };
    let half = 2.0 + 5.0 * tau_e;
    let n = 200;
    let step = 2.0 * half / n as f64;
    let mut best = (z.tau1, f64::NEG_INFINITY);
    for k in 0..=n {
        let t2 = z.tau1 - half + k as f64 * step;
        let v = objective(t2)?;
        if v > best.1 {
            best = (t2, v);
        }
    }
    golden_max(objective, best.0 - step, best.0 + step, 1e-8).map(|(x, _)| x)
}

/// Golden-section maximisation of a unimodal function on [a, b].
pub fn golden_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Parameters echoed with every result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarParams {
    pub tau_e: f64,
    pub t_e: f64,
    pub tau2: f64,
    pub tau1: f64,
    pub mode: FilterMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarResult {
    pub x_dc: Complex64,
    pub baseline: Complex64,
    /// x_dc / baseline; exactly 1 for vacuum.
    pub relative: Complex64,
    pub params: RadarParams,
}

enum Path {
    Unit,
    /// F_n f(2nω₀) and ω₀.
    Harmonics { omega0: f64, weights: Vec<(i64, Complex64)> },
    Transient { delta: ComplexTable, kernel: Option<ComplexTable> },
}

/// Evaluates X₊^(dc) for one (Z̃₁, τ_e, τ₂, F) at many emission times.
pub struct RadarEvaluator<'a> {
    filter: LevitonFilter<'a>,
    mode: FilterMode,
    path: Path,
}

impl<'a> RadarEvaluator<'a> {
    pub fn new(
        z: &'a ElasticAmplitude,
        tau_e: f64,
        tau2: f64,
        fc: &FranckCondonFactor,
        mode: FilterMode,
    ) -> Result<Self> {
        let filter = LevitonFilter::new(z, tau_e, tau2)?;
        let path = match fc {
            FranckCondonFactor::UnitConstant => Path::Unit,
            FranckCondonFactor::Harmonics { omega0, coeffs } => {
                if coeffs.n_max > 0 && 2.0 * coeffs.n_max as f64 * omega0 > z.x_max() {
                    return Err(Error::Precondition(format!(
                        "harmonics reach Ω = {} beyond the solved range {}",
                        2.0 * coeffs.n_max as f64 * omega0,
                        z.x_max()
                    )));
                }
                let weights = coeffs
                    .iter()
                    .map(|(n, c)| Ok((n, c * filter.eval_mode(2.0 * n as f64 * omega0, mode)?)))
                    .collect::<Result<Vec<_>>>()?;
                Path::Harmonics { omega0: *omega0, weights }
            }
            FranckCondonFactor::Transient { table } => {
                let delta = table.map(|_, v| v - ONE)?;
                let kernel = match mode {
                    FilterMode::Adiabatic => None,
                    FilterMode::Exact => {
                        let span = table.max() - table.min();
                        let reach = table.max().abs().max(table.min().abs());
                        Some(filter.kernel_table(2.0 * span + reach + 100.0 * tau_e)?)
                    }
                };
                Path::Transient { delta, kernel }
            }
        };
        Ok(Self { filter, mode, path })
    }

    pub fn filter(&self) -> &LevitonFilter<'a> {
        &self.filter
    }

    pub fn baseline(&self) -> Complex64 {
        self.filter.at_zero()
    }

    pub fn at(&self, t_e: f64) -> Result<RadarResult> {
        let f0 = self.filter.at_zero();
        let s = t_e + self.filter.tau2;
        let (x_dc, relative) = match &self.path {
            Path::Unit => (f0, ONE),
            Path::Harmonics { omega0, weights } => {
                let x: Complex64 = weights
                    .iter()
                    .map(|&(n, w)| w * Complex64::from_polar(1.0, -2.0 * n as f64 * omega0 * s))
                    .sum();
                (x, x / f0)
            }
            Path::Transient { delta, kernel } => {
                let k = |u: f64| -> Complex64 {
                    match kernel {
                        None => f0 * leviton_kernel(self.filter.tau_e, self.filter.tau21, u),
                        Some(tab) if tab.contains(u) => tab.eval(u).unwrap_or(ZERO),
                        Some(_) => self.filter.kernel(u).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                    }
                };
                let x = f0 + convolve(delta, s, self.filter.tau_e, self.filter.tau21, k)?;
                (x, x / f0)
            }
        };
        Ok(RadarResult {
            x_dc,
            baseline: f0,
            relative,
            params: RadarParams {
                tau_e: self.filter.tau_e,
                t_e,
                tau2: self.filter.tau2,
                tau1: self.filter.amplitude().tau1,
                mode: self.mode,
            },
        })
    }
}

/// ∫ΔF(t) k(s − t) dt over the table of ΔF.
fn convolve(
    delta: &ComplexTable,
    s: f64,
    tau_e: f64,
    tau21: f64,
    k: impl Fn(f64) -> Complex64,
) -> Result<Complex64> {
    let (a, b) = (delta.min(), delta.max());
    let mut breaks = panel_breaks(a, b, 1.0, 4);
    for c in [s, s - tau21] {
        for m in [0.0, 1.0, 3.0, 10.0, 30.0] {
            breaks.push(c - m * tau_e);
            breaks.push(c + m * tau_e);
        }
    }
    let r = integrate_with_breaks(
        |t| delta.eval(t).unwrap_or(ZERO) * k(s - t),
        a,
        b,
        &breaks,
        QuadOptions::tol(1e-10, 1e-14),
    )?;
    Ok(r.value)
}

/// Radar signal with the exact negative-Ω filter.
pub fn xplus_dc(
    z: &ElasticAmplitude,
    probe: LevitonProbe,
    tau2: f64,
    fc: &FranckCondonFactor,
) -> Result<RadarResult> {
    xplus_dc_with(z, probe, tau2, fc, FilterMode::Exact)
}

pub fn xplus_dc_with(
    z: &ElasticAmplitude,
    probe: LevitonProbe,
    tau2: f64,
    fc: &FranckCondonFactor,
    mode: FilterMode,
) -> Result<RadarResult> {
    RadarEvaluator::new(z, probe.tau_e, tau2, fc, mode)?.at(probe.t_e)
}

/// K(τ) = (1/π)(τ_e + iτ₂₁/2)/((τ_e + iτ₂₁/2)² + (τ − τ₂₁/2)²).
pub fn leviton_kernel(tau_e: f64, tau21: f64, u: f64) -> Complex64 {
    let c = Complex64::new(tau_e, 0.5 * tau21);
    c / (PI * (c * c + (u - 0.5 * tau21).powi(2)))
}

/// ∫_a^b K(τ)dτ from the antiderivative (i/2π)[Log(τ_e − i(τ−τ₂₁)) − Log(τ_e + iτ)].
/// Infinite bounds are allowed.
pub fn leviton_kernel_mass(tau_e: f64, tau21: f64, a: f64, b: f64) -> Complex64 {
    let anti = |u: f64| -> Complex64 {
        if u == f64::INFINITY {
            return I / TAU * Complex64::new(0.0, -PI);
        }
        if u == f64::NEG_INFINITY {
            return I / TAU * Complex64::new(0.0, PI);
        }
        I / TAU * (Complex64::new(tau_e, -(u - tau21)).ln() - Complex64::new(tau_e, u).ln())
    };
    anti(b) - anti(a)
}

/// Adiabatic convolution route: baseline · (K ⋆ F)(t_e + τ₂), computed by
/// direct numerical convolution in time.
pub fn xplus_dc_kernel(
    z: &ElasticAmplitude,
    probe: LevitonProbe,
    tau2: f64,
    fc: &FranckCondonFactor,
) -> Result<Complex64> {
    let f0 = vacuum_baseline(z, probe.tau_e, tau2)?;
    let tau21 = tau2 - z.tau1;
    let te = probe.tau_e;
    let s = probe.t_e + tau2;
    let k = |u: f64| leviton_kernel(te, tau21, u);
    match fc {
        FranckCondonFactor::UnitConstant => Ok(f0),
        FranckCondonFactor::Harmonics { omega0, coeffs } => {
            let f_mean = coeffs.get(0);
            if coeffs.n_max == 0 || *omega0 == 0.0 {
                return Ok(f0 * f_mean);
            }
            let reach = 5000.0 * te.max(1.0);
            let period = PI / (coeffs.n_max as f64 * omega0);
            let mut breaks = panel_breaks(-reach, reach, 0.5 * period, 16);
            for c in [0.0, tau21] {
                for m in [0.0, 1.0, 3.0, 10.0] {
                    breaks.extend([c - m * te, c + m * te]);
                }
            }
            let osc = integrate_with_breaks(
                |u| k(u) * (coeffs.evaluate(*omega0, s - u) - f_mean),
                -reach,
                reach,
                &breaks,
                QuadOptions::tol(1e-12, 1e-15),
            )?;
            Ok(f0 * (f_mean + osc.value))
        }
        FranckCondonFactor::Transient { table } => {
            let delta = table.map(|_, v| v - ONE)?;
            Ok(f0 * (ONE + convolve(&delta, s, te, tau21, k)?))
        }
    }
}

// ---------------------------------------------------------------------------
// Time domain

/// ψ(t) = ∫Z̃₁(ω)φ̃(ω)e^{−iωt}dω/2π, the probe wavepacket after the target branch.
enum Outgoing<'a> {
    Leviton { z: &'a ElasticAmplitude, probe: LevitonProbe },
    Tabulated { spectrum: ComplexTable, t_e: f64 },
}

impl<'a> Outgoing<'a> {
    fn new(z: &'a ElasticAmplitude, wp: &Wavepacket) -> Result<Self> {
        match wp {
            Wavepacket::Leviton(p) => Ok(Self::Leviton { z, probe: *p }),
            Wavepacket::Gaussian(p) => {
                let lo = (p.omega_e - 10.0 * p.gamma_e).max(0.0);
                let hi = p.omega_e + 10.0 * p.gamma_e;
                if hi > z.x_max() {
                    return Err(Error::Precondition("Gaussian probe exceeds the solved range".into()));
                }
                let n = 800;
                let grid = ComplexTable::uniform_grid(lo, hi, n + 1);
                let shifted = GaussianProbe { t_e: 0.0, ..*p };
                let values = grid
                    .iter()
                    .map(|&w| Ok(z.eval(w)? * shifted.phi_freq(w)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::Tabulated { spectrum: ComplexTable::new(grid, values)?, t_e: p.t_e })
            }
        }
    }

    fn eval(&self, t: f64) -> Result<Complex64> {
        match self {
            Self::Leviton { z, probe } => Ok((probe.tau_e / PI).sqrt()
                * z.laplace(Complex64::new(probe.tau_e, t - probe.t_e), 0.0)?),
            Self::Tabulated { spectrum, t_e } => {
                Ok(spectrum.integrate_exp_full(Complex64::new(0.0, -(t - t_e))) / TAU)
            }
        }
    }
}

/// X₊(t) = F(t) ψ(t) φ*(t − τ₂) on `t_grid`.
pub fn xplus_time_domain(
    z: &ElasticAmplitude,
    wp: &Wavepacket,
    tau2: f64,
    fc: &FranckCondonFactor,
    t_grid: &[f64],
) -> Result<ComplexTable> {
    let psi = Outgoing::new(z, wp)?;
    let values = t_grid
        .iter()
        .map(|&t| Ok(fc.eval(t) * psi.eval(t)? * wp.phi_time(t - tau2).conj()))
        .collect::<Result<Vec<_>>>()?;
    ComplexTable::new(t_grid.to_vec(), values)
}

/// ∫_a^b X₊(t)dt, the interference part of the transferred charge.
pub fn xplus_time_integral(
    z: &ElasticAmplitude,
    wp: &Wavepacket,
    tau2: f64,
    fc: &FranckCondonFactor,
    window: (f64, f64),
) -> Result<Complex64> {
    let psi = Outgoing::new(z, wp)?;
    let d = wp.duration();
    let mut breaks = Vec::new();
    for c in [wp.t_e(), wp.t_e() + z.tau1, wp.t_e() + tau2] {
        for m in [0.0, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0] {
            breaks.extend([c - m * d, c + m * d]);
        }
    }
    let r = integrate_with_breaks(
        |t| {
            let v = psi.eval(t).unwrap_or(Complex64::new(f64::NAN, 0.0));
            fc.eval(t) * v * wp.phi_time(t - tau2).conj()
        },
        window.0,
        window.1,
        &breaks,
        QuadOptions::tol(1e-9, 1e-14),
    )?;
    Ok(r.value)
}

// ---------------------------------------------------------------------------
// Frequency domain

/// A frequency-domain amplitude split into a regular part and δ-comb terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    pub regular: Complex64,
    /// (frequency, weight) of terms weight·δ(ν − frequency).
    pub comb: Vec<(f64, Complex64)>,
}

/// R̃(ω₊, ω₋) = F̃(ω₊ − ω₋) Z̃₁(ω₋). The constant and periodic parts of F give
/// δ-terms located at ω₊ = ω₋ + 2nω₀; a transient remainder gives the
/// regular part at the requested ω₊.
pub fn effective_scattering_frequency(
    z: &ElasticAmplitude,
    fc: &FranckCondonFactor,
    omega_plus: f64,
    omega_minus: f64,
) -> Result<SpectralAmplitude> {
    if omega_minus < 0.0 {
        return Err(Error::OutOfRange { x: omega_minus, lo: 0.0, hi: z.x_max() });
    }
    let zm = z.eval(omega_minus)?;
    Ok(match fc {
        FranckCondonFactor::UnitConstant => {
            SpectralAmplitude { regular: ZERO, comb: vec![(omega_minus, TAU * zm)] }
        }
        FranckCondonFactor::Harmonics { omega0, coeffs } => SpectralAmplitude {
            regular: ZERO,
            comb: coeffs
                .iter()
                .map(|(n, c)| (omega_minus + 2.0 * n as f64 * omega0, TAU * c * zm))
                .collect(),
        },
        FranckCondonFactor::Transient { table } => {
            let delta = table.map(|_, v| v - ONE)?;
            let ft = delta.integrate_exp_full(Complex64::new(0.0, omega_plus - omega_minus));
            SpectralAmplitude { regular: ft * zm, comb: vec![(omega_minus, TAU * zm)] }
        }
    })
}

/// Narrow-probe signal X̃₊(ω) ≈ (γ_e/√π)e^{−iω_eτ₂}R̃(ω + ω_e, ω_e); comb
/// positions are expressed in ω.
pub fn xplus_energy_resolved(
    z: &ElasticAmplitude,
    fc: &FranckCondonFactor,
    omega_e: f64,
    gamma_e: f64,
    tau2: f64,
    omega: f64,
) -> Result<SpectralAmplitude> {
    if gamma_e > 0.1 * omega_e {
        log::warn!("narrow-probe limit used with γ_e/ω_e = {}", gamma_e / omega_e);
    }
    let pref = gamma_e / PI.sqrt() * Complex64::from_polar(1.0, -omega_e * tau2);
    let r = effective_scattering_frequency(z, fc, omega + omega_e, omega_e)?;
    Ok(SpectralAmplitude {
        regular: pref * r.regular,
        comb: r.comb.into_iter().map(|(w, c)| (w - omega_e, pref * c)).collect(),
    })
}

/// Average current in amperes,
/// −e f_m [R_AR_B + T_AT_B + 2√(R_AT_AR_BT_B) Re(e^{iφ_AB}X)].
pub fn dc_current(x: Complex64, f_m: f64, phi_ab: f64, t_a: f64, t_b: f64) -> Result<f64> {
    if !((0.0..=1.0).contains(&t_a) && (0.0..=1.0).contains(&t_b)) {
        return Err(Error::Domain(format!("transmissions must lie in [0, 1], got {t_a}, {t_b}")));
    }
    let (r_a, r_b) = (1.0 - t_a, 1.0 - t_b);
    let k = (r_a * t_a * r_b * t_b).sqrt();
    let interference = (Complex64::from_polar(1.0, phi_ab) * x).re;
    Ok(-E_CHARGE * f_m * (r_a * r_b + t_a * t_b + 2.0 * k * interference))
}

// ---------------------------------------------------------------------------
// Squeezing analytics

/// η = e^{−2ω₀τ_e}|cos(ω₀τ₂₁)|.
pub fn squeezing_eta(omega0: f64, tau_e: f64, tau21: f64) -> f64 {
    (-2.0 * omega0 * tau_e).exp() * (omega0 * tau21).cos().abs()
}

/// F_η(z) = η ch(2|z|)sh(2|z|) − sh²(2|z|); max_{t_e}|relative| ≈ 1 + ΛF_η(z).
pub fn squeezing_gain(eta: f64, z: f64) -> f64 {
    let (sh, ch) = ((2.0 * z).sinh(), (2.0 * z).cosh());
    eta * ch * sh - sh * sh
}

/// |z|_opt = arctanh(η)/4.
pub fn optimal_squeezing(eta: f64) -> f64 {
    eta.atanh() / 4.0
}

/// max over one period of a periodic function: `samples` uniform points,
/// then golden-section refinement of the best one.
pub fn maximize_periodic(f: impl Fn(f64) -> Result<f64>, period: f64, samples: usize) -> Result<(f64, f64)> {
    let h = period / samples as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..samples {
        let t = k as f64 * h;
        let v = f(t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    golden_max(&f, best.0 - h, best.0 + h, 1e-10 * period.max(1.0))
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanVariable {
    EmissionTime,
    TauE,
    Tau2,
    Squeezing,
    Omega0,
}

impl ScanVariable {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EmissionTime => "t_e",
            Self::TauE => "tau_e",
            Self::Tau2 => "tau_2",
            Self::Squeezing => "z",
            Self::Omega0 => "omega_0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub result: RadarResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: ScanVariable,
    pub points: Vec<SweepPoint>,
}

fn arg_extreme(points: &[SweepPoint], key: impl Fn(&RadarResult) -> f64, max: bool) -> Option<(f64, f64)> {
    points
        .iter()
        .map(|p| (p.value, key(&p.result)))
        .reduce(|a, b| if (b.1 > a.1) == max && b.1 != a.1 { b } else { a })
}

impl SweepTable {
    /// (scan value, |relative|) at the maximum of |relative|.
    pub fn max_relative(&self) -> Option<(f64, f64)> {
        arg_extreme(&self.points, |r| r.relative.norm(), true)
    }

    pub fn min_relative(&self) -> Option<(f64, f64)> {
        arg_extreme(&self.points, |r| r.relative.norm(), false)
    }

    pub fn max_abs_x(&self) -> Option<(f64, f64)> {
        arg_extreme(&self.points, |r| r.x_dc.norm(), true)
    }

    pub fn max_baseline(&self) -> Option<(f64, f64)> {
        arg_extreme(&self.points, |r| r.baseline.norm(), true)
    }

    /// `scan_value,x_re,x_im,abs_x,baseline_abs,relative_abs`, 17 significant
    /// digits, preceded by `# comment` lines.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: &str, scale: f64) -> io::Result<()> {
        for line in comment.lines() {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "scan_value,x_re,x_im,abs_x,baseline_abs,relative_abs")?;
        for p in &self.points {
            let r = &p.result;
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.value * scale,
                r.x_dc.re,
                r.x_dc.im,
                r.x_dc.norm(),
                r.baseline.norm(),
                r.relative.norm()
            )?;
        }
        Ok(())
    }
}

/// Evaluates `eval` on every grid value in parallel; rows keep grid order.
pub fn contrast_sweep<F>(variable: ScanVariable, grid: &[f64], eval: F) -> Result<SweepTable>
where
    F: Fn(f64) -> Result<RadarResult> + Sync,
{
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("sweep grid must be finite".into()));
    }
    let points = grid
        .par_iter()
        .map(|&value| Ok(SweepPoint { value, result: eval(value)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { variable, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ballistic(tau1: f64) -> ElasticAmplitude {
        ElasticAmplitude::ballistic(tau1, 400.0, 0.01).unwrap()
    }

    #[test]
    fn ballistic_baseline_closed_form() {
        let z = ballistic(0.4);
        for t2 in [-1.0, 0.1, 0.4, 0.9, 2.0] {
            let b = vacuum_baseline(&z, 0.1, t2).unwrap();
            let e = ballistic_baseline(0.1, t2 - 0.4);
            assert!((b - e).norm() < 1e-10 * e.norm(), "{t2}: {b} vs {e}");
        }
    }

    #[test]
    fn ballistic_filter_is_adiabatic() {
        let z = ballistic(0.4);
        let f = LevitonFilter::new(&z, 0.1, 0.7).unwrap();
        for w in [0.3, 2.0, 10.0] {
            assert!(f.adiabatic_discrepancy(-w).unwrap() < 1e-10);
        }
    }

    #[test]
    fn kernel_mass_is_one() {
        let m = leviton_kernel_mass(0.1, 0.35, f64::NEG_INFINITY, f64::INFINITY);
        assert!((m - ONE).norm() < 1e-14);
    }

    #[test]
    fn vacuum_relative_is_one() {
        let z = ballistic(0.4);
        let r = xplus_dc(&z, LevitonProbe::new(0.1, 2.0).unwrap(), 0.5, &FranckCondonFactor::UnitConstant).unwrap();
        assert_eq!(r.relative, ONE);
        assert_eq!(r.x_dc, r.baseline);
    }

    #[test]
    fn dc_current_limits() {
        let q = E_CHARGE * 1e9;
        assert!((dc_current(ZERO, 1e9, 0.0, 0.5, 0.5).unwrap() + q / 2.0).abs() < 1e-12 * q);
        assert!(dc_current(ONE, 1e9, PI, 0.5, 0.5).unwrap().abs() < 1e-12 * q);
        assert!((dc_current(ONE, 1e9, 0.0, 0.5, 0.5).unwrap() + q).abs() < 1e-12 * q);
        assert!(dc_current(ONE, 1e9, 0.0, 1.5, 0.5).is_err());
    }

    #[test]
    fn optimal_tau2_ballistic() {
        let z = ballistic(0.4);
        assert!((optimal_tau2(&z, 0.1).unwrap() - 0.4).abs() < 1e-6);
    }
}
