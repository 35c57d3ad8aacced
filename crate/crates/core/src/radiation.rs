//! Franck-Condon factors F(t) of the supported radiation states, and the
//! single-EMP noise diagnostics (x(t), Wigner function of the excess current
//! noise, heat current).
//!
//! Times are in l/v_F, angular frequencies in v_F/l, voltages in ħv_F/(el).
//! Periodic factors use the convention F(t) = Σ F_n e^{−2inω₀t}.

use std::f64::consts::{LN_10, PI, TAU};

use num_complex::Complex64;

use crate::coupler::CouplerModel;
use crate::error::{Error, Result};
use crate::numerics::{
    bessel_i, fourier_coeffs_periodic, integrate_with_breaks, laguerre, panel_breaks,
    ComplexTable, PeriodicCoefficients, QuadOptions,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Ratio of the radar signal with and without radiation, as a function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum FranckCondonFactor {
    /// F ≡ 1 (vacuum).
    UnitConstant,
    /// Periodic factor with period π/ω₀.
    Harmonics { omega0: f64, coeffs: PeriodicCoefficients },
    /// Tabulated transient; F = 1 outside the table.
    Transient { table: ComplexTable },
}

impl FranckCondonFactor {
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Self::UnitConstant => ONE,
            Self::Harmonics { omega0, coeffs } => coeffs.evaluate(*omega0, t),
            Self::Transient { table } => {
                if table.contains(t) {
                    table.eval(t).unwrap_or(ONE)
                } else {
                    ONE
                }
            }
        }
    }

    /// Harmonic view: (ω₀, F_n). The unit factor is the single harmonic F₀ = 1.
    pub fn harmonics(&self) -> Option<(f64, PeriodicCoefficients)> {
        match self {
            Self::UnitConstant => Some((0.0, PeriodicCoefficients::new(vec![ONE]))),
            Self::Harmonics { omega0, coeffs } => Some((*omega0, coeffs.clone())),
            Self::Transient { .. } => None,
        }
    }

    /// Samples F on `grid`.
    pub fn tabulate(&self, grid: &[f64]) -> Result<ComplexTable> {
        ComplexTable::from_fn(grid.to_vec(), |t| self.eval(t))
    }

    /// Pointwise product of two periodic (or unit) factors with the same ω₀.
    pub fn product(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::UnitConstant, x) | (x, Self::UnitConstant) => Ok(x.clone()),
            (
                Self::Harmonics { omega0: w1, coeffs: a },
                Self::Harmonics { omega0: w2, coeffs: b },
            ) => {
                let omega0 = if a.n_max == 0 {
                    *w2
                } else if b.n_max == 0 || (w1 - w2).abs() <= 1e-12 * w1.abs() {
                    *w1
                } else {
                    return Err(Error::Precondition(format!(
                        "harmonic factors at ω₀ = {w1} and {w2} cannot be multiplied"
                    )));
                };
                let n_max = a.n_max + b.n_max;
                let mut out = vec![ZERO; 2 * n_max + 1];
                for (n, x) in a.iter() {
                    for (m, y) in b.iter() {
                        out[(n + m + n_max as i64) as usize] += x * y;
                    }
                }
                Ok(Self::Harmonics { omega0, coeffs: PeriodicCoefficients::new(out) })
            }
            _ => Err(Error::Precondition(
                "transient factors are combined by tabulating them".into(),
            )),
        }
    }
}

pub fn fc_vacuum() -> FranckCondonFactor {
    FranckCondonFactor::UnitConstant
}

/// Photo-assisted amplitudes F_n of a periodic factor.
pub fn photo_assisted_coefficients(f: &FranckCondonFactor) -> Result<PeriodicCoefficients> {
    f.harmonics()
        .map(|(_, c)| c)
        .ok_or_else(|| Error::Precondition("transient Franck-Condon factor is not periodic".into()))
}

// ---------------------------------------------------------------------------
// Classical drive

/// One component A cos(ωt + φ) of a periodic gate voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Gate voltage V_g(t).
#[derive(Debug, Clone, PartialEq)]
pub enum Drive {
    /// offset + Σ A_k cos(ω_k t + φ_k); all ω_k must be multiples of the lowest.
    Harmonic { offset: f64, tones: Vec<Tone> },
    /// Sampled pulse, zero outside the sampled window.
    Series(ComplexTable),
}

impl Drive {
    pub fn series(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let values = v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        Ok(Self::Series(ComplexTable::new(t, values)?))
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Harmonic { offset, tones } => {
                offset + tones.iter().map(|k| k.amplitude * (k.omega * t + k.phase).cos()).sum::<f64>()
            }
            Self::Series(tab) => {
                if tab.contains(t) {
                    tab.eval(t).map(|v| v.re).unwrap_or(0.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// ∫_a^b V_g(τ) dτ.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Harmonic { offset, tones } => {
                offset * (b - a)
                    + tones
                        .iter()
                        .map(|k| {
                            if k.omega == 0.0 {
                                k.amplitude * k.phase.cos() * (b - a)
                            } else {
                                k.amplitude / k.omega
                                    * ((k.omega * b + k.phase).sin() - (k.omega * a + k.phase).sin())
                            }
                        })
                        .sum::<f64>()
            }
            Self::Series(tab) => {
                let (lo, hi) = (a.min(b), a.max(b));
                let (lo, hi) = (lo.max(tab.min()), hi.min(tab.max()));
                if hi <= lo {
                    return 0.0;
                }
                let v = tab.integrate_exp(ZERO, lo, hi).map(|v| v.re).unwrap_or(0.0);
                if b >= a {
                    v
                } else {
                    -v
                }
            }
        }
    }

    /// Lowest tone frequency, after checking that the tones share it as a fundamental.
    fn fundamental(tones: &[Tone]) -> Result<Option<f64>> {
        let Some(w) = tones.iter().map(|k| k.omega).filter(|&w| w > 0.0).reduce(f64::min) else {
            return Ok(None);
        };
        for k in tones {
            if k.omega < 0.0 {
                return Err(Error::Domain(format!("negative tone frequency {}", k.omega)));
            }
            let ratio = k.omega / w;
            if k.omega > 0.0 && (ratio - ratio.round()).abs() > 1e-9 * ratio {
                return Err(Error::Domain(format!(
                    "tone at {} is not a harmonic of the fundamental {w}",
                    k.omega
                )));
            }
        }
        Ok(Some(w))
    }
}

/// Phase θ(t) = ∫Γ(t − τ)V_g(τ)dτ of a harmonic drive.
fn harmonic_phase(model: &CouplerModel, offset: f64, tones: &[Tone]) -> Result<impl Fn(f64) -> f64> {
    let dc = offset * model.gamma_spectrum(0.0)?.re;
    let parts = tones
        .iter()
        .map(|k| {
            let g = model.gamma_spectrum(k.omega)?;
            Ok((k.omega, k.phase, k.amplitude * g.conj()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(move |t: f64| {
        dc + parts
            .iter()
            .map(|&(w, ph, c)| (c * Complex64::from_polar(1.0, w * t + ph)).re)
            .sum::<f64>()
    })
}

/// F(t) = exp[i∫Γ(t − τ)V_g(τ)dτ], with Γ the coupler's windowing kernel.
///
/// Harmonic drives give a periodic factor (ω₀ = half the fundamental); sampled
/// pulses give a transient table, which must return to F = 1 after the pulse.
pub fn fc_classical(model: &CouplerModel, drive: &Drive) -> Result<FranckCondonFactor> {
    match drive {
        Drive::Harmonic { offset, tones } => {
            let theta = harmonic_phase(model, *offset, tones)?;
            match Drive::fundamental(tones)? {
                None => {
                    let th = theta(0.0);
                    if th == 0.0 {
                        Ok(FranckCondonFactor::UnitConstant)
                    } else {
                        Ok(FranckCondonFactor::Harmonics {
                            omega0: 0.0,
                            coeffs: PeriodicCoefficients::new(vec![Complex64::from_polar(1.0, th)]),
                        })
                    }
                }
                Some(w) => {
                    let coeffs =
                        fourier_coeffs_periodic(|t| Complex64::from_polar(1.0, theta(t)), TAU / w)?;
                    Ok(FranckCondonFactor::Harmonics { omega0: 0.5 * w, coeffs })
                }
            }
        }
        Drive::Series(v) => classical_transient(model, v),
    }
}

fn classical_transient(model: &CouplerModel, v: &ComplexTable) -> Result<FranckCondonFactor> {
    let (t0, t1) = (v.min(), v.max());
    let tc = 0.5 * (t0 + t1);
    let dt_min = v.grid().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let x_max = (PI / dt_min).min(200.0).min(model.x_max());
    let half_span = 0.5 * (t1 - t0) + 10.0;
    let dx = (0.25 / half_span).min(0.02);
    let n = (x_max / dx).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| k as f64 * x_max / n as f64).collect();
    let v_centred: Vec<Complex64> = grid
        .iter()
        .map(|&x| v.integrate_exp_full(Complex64::new(0.0, x)) * Complex64::from_polar(1.0, -x * tc))
        .collect();
    let peak = v_centred.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let edge = v_centred[n].norm();
    if peak > 0.0 && edge > 1e-6 * peak {
        return Err(Error::Precondition(format!(
            "drive spectrum not resolved below x = {x_max} (edge/peak = {:e})",
            edge / peak
        )));
    }
    let product = grid
        .iter()
        .zip(&v_centred)
        .map(|(&x, &vx)| Ok(model.gamma_spectrum(x)? * vx))
        .collect::<Result<Vec<_>>>()?;
    let spectral = ComplexTable::new(grid, product)?;
    let dt = dt_min.clamp(1e-3, 0.05);
    let (a, b) = (t0 - 10.0, t1 + 20.0);
    let m = ((b - a) / dt).ceil() as usize;
    let times: Vec<f64> = (0..=m).map(|k| a + (b - a) * k as f64 / m as f64).collect();
    let values: Vec<Complex64> = times
        .iter()
        .map(|&t| {
            let theta = spectral.integrate_exp_full(Complex64::new(0.0, -(t - tc))).re / PI;
            Complex64::from_polar(1.0, theta)
        })
        .collect();
    let end = (values[0] - ONE).norm().max((values[m] - ONE).norm());
    if end > 1e-6 {
        return Err(Error::Precondition(format!(
            "pulse leaves a net phase (|F − 1| = {end:e} at the window edge)"
        )));
    }
    Ok(FranckCondonFactor::Transient { table: ComplexTable::new(times, values)? })
}

// ---------------------------------------------------------------------------
// Squeezed radiation

/// Squeezing parameter |z| for a quadrature noise reduction of `db` decibels,
/// using the compression factor e^{−4|z|}.
pub fn squeezing_from_db(db: f64) -> f64 {
    db * LN_10 / 40.0
}

/// Two-mode squeezed noise in a narrow band of width γ₀ = ω₀/Q₀ around ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedNarrowband {
    pub omega0: f64,
    pub q0: f64,
    pub z: Complex64,
    /// S_ba(ω₀) of the coupler.
    pub s_ba: Complex64,
    /// Overrides φ₀ = 2 Arg S_ba(ω₀) + Arg z.
    pub phi0: Option<f64>,
}

impl SqueezedNarrowband {
    pub fn new(omega0: f64, q0: f64, z: Complex64, s_ba: Complex64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::Domain(format!("ω₀ must be positive, got {omega0}")));
        }
        if !(q0 > 1.0) {
            return Err(Error::Domain(format!("narrowband squeezing needs Q₀ > 1, got {q0}")));
        }
        Ok(Self { omega0, q0, z, s_ba, phi0: None })
    }

    pub fn from_model(model: &CouplerModel, omega0: f64, q0: f64, z: Complex64) -> Result<Self> {
        Self::new(omega0, q0, z, model.s_ba(omega0)?)
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.phi0 = Some(phi0);
        self
    }

    /// Λ = |S_ba(ω₀)|²/Q₀.
    pub fn lambda(&self) -> f64 {
        self.s_ba.norm_sqr() / self.q0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0.unwrap_or_else(|| {
            let arg_z = if self.z == ZERO { 0.0 } else { self.z.arg() };
            2.0 * self.s_ba.arg() + arg_z
        })
    }

    fn sh_ch(&self) -> (f64, f64) {
        let r = 2.0 * self.z.norm();
        (r.sinh(), r.cosh())
    }

    /// (min_t F, max_t F) in closed form.
    pub fn extrema(&self) -> (f64, f64) {
        let l = self.lambda();
        let r = self.z.norm();
        let (sh, _) = self.sh_ch();
        ((-0.5 * l * ((4.0 * r).exp() - 1.0)).exp(), (l * sh * (-2.0 * r).exp()).exp())
    }
}

/// F(t) = exp{Λ sh(2|z|)[ch(2|z|)cos(2ω₀t − φ₀) − sh(2|z|)]}.
pub fn fc_squeezed_exact(s: &SqueezedNarrowband, t: f64) -> f64 {
    let (sh, ch) = s.sh_ch();
    (s.lambda() * sh * (ch * (2.0 * s.omega0 * t - s.phi0()).cos() - sh)).exp()
}

/// Modified-Bessel ladder F_n = e^{−N} I_|n|(a) e^{inψ} of exp(a cos(2ω₀t − ψ) − N).
fn bessel_ladder(n_mean: f64, a: f64, psi: f64, omega0: f64) -> Result<FranckCondonFactor> {
    let pref = (-n_mean).exp();
    let mut mags = vec![pref * bessel_i(0, a)?];
    if a > 0.0 {
        for n in 1..=2000u32 {
            let v = pref * bessel_i(n, a)?;
            if v < 1e-14 * mags[0] {
                break;
            }
            mags.push(v);
        }
    }
    let n_max = mags.len() - 1;
    let coeffs = (-(n_max as i64)..=n_max as i64)
        .map(|n| mags[n.unsigned_abs() as usize] * Complex64::from_polar(1.0, n as f64 * psi))
        .collect();
    Ok(FranckCondonFactor::Harmonics { omega0, coeffs: PeriodicCoefficients::new(coeffs) })
}

/// Harmonics F_n = e^{−Λ sh²} I_|n|(Λ ch sh) e^{inφ₀}.
pub fn fc_squeezed_harmonics(s: &SqueezedNarrowband) -> Result<FranckCondonFactor> {
    let (sh, ch) = s.sh_ch();
    let l = s.lambda();
    bessel_ladder(l * sh * sh, l * ch * sh, s.phi0(), s.omega0)
}

/// Effective photon number and pair amplitude seen through the coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMoments {
    pub n_eff: f64,
    pub xi_eff: Complex64,
}

/// N_eff = ∫|S_ba(ω)|² n̄(ω)/ω dω and
/// ξ_eff = ∫ S_ba(ω₀+Ω)S_ba(ω₀−Ω) ξ(Ω)/√(ω₀²−Ω²) dΩ,
/// where ξ(Ω) is the pair correlation between ω₀ ± Ω.
///
/// `nbar_support` bounds the band where n̄ ≠ 0 and `xi_half_width` the range
/// |Ω| where ξ ≠ 0; discontinuities should sit on these bounds.
pub fn squeezing_effective_moments(
    model: &CouplerModel,
    omega0: f64,
    nbar: &dyn Fn(f64) -> f64,
    nbar_support: (f64, f64),
    xi: &dyn Fn(f64) -> Complex64,
    xi_half_width: f64,
) -> Result<EffectiveMoments> {
    let opts = QuadOptions::tol(1e-10, 1e-15);
    let (lo, hi) = (nbar_support.0.max(0.0), nbar_support.1);
    let n_eff = if hi > lo {
        integrate_with_breaks(
            |w| {
                if w <= 0.0 {
                    return ZERO;
                }
                let s = model.s_ba(w).unwrap_or(ZERO);
                Complex64::new(s.norm_sqr() * nbar(w) / w, 0.0)
            },
            lo,
            hi,
            &[],
            opts,
        )?
        .value
        .re
    } else {
        0.0
    };
    let half = xi_half_width.min(omega0);
    let xi_eff = if half > 0.0 {
        integrate_with_breaks(
            |o| {
                let d = omega0 * omega0 - o * o;
                if d <= 0.0 {
                    return ZERO;
                }
                let sp = model.s_ba(omega0 + o).unwrap_or(ZERO);
                let sm = model.s_ba((omega0 - o).max(0.0)).unwrap_or(ZERO);
                sp * sm * xi(o) / d.sqrt()
            },
            -half,
            half,
            &[0.0],
            opts,
        )?
        .value
    } else {
        ZERO
    };
    Ok(EffectiveMoments { n_eff, xi_eff })
}

/// Two-mode squeezing with the same |z| for every pair ω₀ ± Ω, |Ω| ≤ γ₀/2:
/// n̄ = sh²(2|z|) on the band and ξ = e^{i Arg z} sh(4|z|)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxcarSqueezing {
    pub omega0: f64,
    pub gamma0: f64,
    pub z: Complex64,
}

impl BoxcarSqueezing {
    pub fn moments(&self, model: &CouplerModel) -> Result<EffectiveMoments> {
        let r = 2.0 * self.z.norm();
        let nb = r.sinh().powi(2);
        let phase = if self.z == ZERO { 0.0 } else { self.z.arg() };
        let xi = Complex64::from_polar(0.5 * (2.0 * r).sinh(), phase);
        let h = 0.5 * self.gamma0;
        squeezing_effective_moments(
            model,
            self.omega0,
            &|_| nb,
            (self.omega0 - h, self.omega0 + h),
            &|_| xi,
            h,
        )
    }
}

/// Gaussian-state factor |F(t)| = exp(Re[ξ_eff e^{−2iω₀t}] − N_eff), with the
/// mean-field phase left to [`FranckCondonFactor::product`].
pub fn fc_gaussian(moments: EffectiveMoments, omega0: f64) -> Result<FranckCondonFactor> {
    let psi = if moments.xi_eff == ZERO { 0.0 } else { moments.xi_eff.arg() };
    bessel_ladder(moments.n_eff, moments.xi_eff.norm(), psi, omega0)
}

// ---------------------------------------------------------------------------
// Single edge-magnetoplasmon

/// Lorentzian mode χ(ω) = √γ₀/(ω − ω₀ + iγ₀/2), truncated to (0, ω_cut] and
/// renormalised to ∫|χ|²dω/2π = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianMode {
    pub omega0: f64,
    pub gamma0: f64,
    pub omega_cut: f64,
    norm: f64,
}

impl LorentzianMode {
    /// Mode with the default cutoff ω_cut = 2ω₀.
    pub fn new(omega0: f64, gamma0: f64) -> Result<Self> {
        Self::with_cutoff(omega0, gamma0, 2.0 * omega0)
    }

    pub fn with_cutoff(omega0: f64, gamma0: f64, omega_cut: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && omega0 > gamma0 && omega0.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < γ₀ < ω₀, got γ₀ = {gamma0}, ω₀ = {omega0}"
            )));
        }
        if !(omega_cut > omega0) {
            return Err(Error::Domain("cutoff must lie above ω₀".into()));
        }
        let norm = (((2.0 * (omega_cut - omega0) / gamma0).atan())
            + (2.0 * omega0 / gamma0).atan())
            / PI;
        Ok(Self { omega0, gamma0, omega_cut, norm })
    }

    /// Fraction of the untruncated Lorentzian norm kept by the truncation.
    pub fn renormalization(&self) -> f64 {
        self.norm
    }

    pub fn chi(&self, w: f64) -> Complex64 {
        if w <= 0.0 || w > self.omega_cut {
            return ZERO;
        }
        self.gamma0.sqrt() / Complex64::new(w - self.omega0, 0.5 * self.gamma0) / self.norm.sqrt()
    }

    /// Default transient window [−5/γ₀, 12/γ₀] with step min(0.05, 1/ω₀).
    pub fn transient_grid(&self) -> Vec<f64> {
        let (a, b) = (-5.0 / self.gamma0, 12.0 / self.gamma0);
        let dt = 0.05f64.min(1.0 / self.omega0);
        let n = ((b - a) / dt).ceil() as usize;
        (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
    }

    fn peak_breaks(&self, lo: f64, hi: f64, centre: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for k in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            for s in [-1.0, 1.0] {
                let x = centre + s * k * self.gamma0;
                if x > lo && x < hi {
                    out.push(x);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

fn quad_breaks(lo: f64, hi: f64, t: f64, extra: Vec<f64>) -> Vec<f64> {
    let period = if t == 0.0 { f64::INFINITY } else { TAU / t.abs() };
    let mut b = panel_breaks(lo, hi, period, 4);
    b.extend(extra);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// x(t) = 2π|∫₀^∞ (S_ba(ω)/√ω) e^{−iωt} χ(ω) dω/2π|², by adaptive quadrature.
pub fn fock_overlap_x(model: &CouplerModel, mode: &LorentzianMode, t: f64) -> Result<f64> {
    let hi = mode.omega_cut;
    let breaks = quad_breaks(0.0, hi, t, mode.peak_breaks(0.0, hi, mode.omega0));
    let r = integrate_with_breaks(
        |w| {
            if w <= 0.0 {
                return ZERO;
            }
            let s = model.s_ba(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
            s / w.sqrt() * mode.chi(w) * Complex64::from_polar(1.0, -w * t)
        },
        0.0,
        hi,
        &breaks,
        QuadOptions::tol(1e-11, 1e-16),
    )?;
    Ok(TAU * (r.value / TAU).norm_sqr())
}

/// x(t) through time-frequency filtering of the single-EMP excess noise:
/// x = (1/2π)∫dω∫dΩ Ŵ_Γ(Ω, ω) ΔŴ(Ω, ω) e^{−iΩt}, with
/// Ŵ_Γ = Γ̃(ω+Ω/2)Γ̃*(ω−Ω/2) the Ville transform of Γ_ba and
/// ΔŴ = √(ω²−Ω²/4) χ(ω+Ω/2)χ*(ω−Ω/2) the Wigner kernel of the noise (e = 1).
pub fn fock_x_wigner(model: &CouplerModel, mode: &LorentzianMode, t: f64) -> Result<f64> {
    let cut = mode.omega_cut;
    let inner = |big: f64| -> Complex64 {
        let h = 0.5 * big.abs();
        let (lo, hi) = (h, cut - h);
        if hi <= lo {
            return ZERO;
        }
        let mut br = mode.peak_breaks(lo, hi, mode.omega0 - 0.5 * big);
        br.extend(mode.peak_breaks(lo, hi, mode.omega0 + 0.5 * big));
        br.sort_by(f64::total_cmp);
        br.dedup();
        integrate_with_breaks(
            |w| {
                let (w1, w2) = (w + 0.5 * big, w - 0.5 * big);
                if w1 <= 0.0 || w2 <= 0.0 {
                    return ZERO;
                }
                let g1 = model.gamma_spectrum(w1).unwrap_or(Complex64::new(f64::NAN, 0.0));
                let g2 = model.gamma_spectrum(w2).unwrap_or(Complex64::new(f64::NAN, 0.0));
                let root = (w * w - 0.25 * big * big).max(0.0).sqrt();
                g1 * g2.conj() * root * mode.chi(w1) * mode.chi(w2).conj()
            },
            lo,
            hi,
            &br,
            QuadOptions::tol(1e-12, 1e-18),
        )
        .map(|r| r.value)
        .unwrap_or(Complex64::new(f64::NAN, 0.0))
    };
    let span = 2.0 * cut;
    let mut br = quad_breaks(-span * 0.5, span * 0.5, t, mode.peak_breaks(-cut, cut, 0.0));
    br.retain(|&x| x > -cut && x < cut);
    let r = integrate_with_breaks(
        |big| inner(big) * Complex64::from_polar(1.0, -big * t),
        -cut,
        cut,
        &br,
        QuadOptions::tol(1e-10, 1e-16),
    )?;
    if !r.value.re.is_finite() {
        return Err(Error::Evaluation("Wigner-route quadrature failed".into()));
    }
    Ok(r.value.re / TAU)
}

/// x(t) on `t_grid` from a tabulated integrand, integrated exactly against
/// e^{−iωt}; intended for long transient tables.
pub fn fock_x_table(model: &CouplerModel, mode: &LorentzianMode, t_grid: &[f64]) -> Result<ComplexTable> {
    let h = (mode.gamma0 / 20.0).min(0.01);
    let n = (mode.omega_cut / h).ceil() as usize;
    let step = mode.omega_cut / n as f64;
    // Geometric refinement of the first cell resolves the √ω behaviour at 0.
    let mut grid: Vec<f64> = (1..=40).rev().map(|k| step * 0.5f64.powi(k)).collect();
    grid.insert(0, 0.0);
    grid.extend((1..=n).map(|k| k as f64 * step));
    let values = grid
        .iter()
        .map(|&w| {
            if w <= 0.0 {
                return Ok(ZERO);
            }
            Ok(model.s_ba(w)? / w.sqrt() * mode.chi(w))
        })
        .collect::<Result<Vec<_>>>()?;
    let integrand = ComplexTable::new(grid, values)?;
    let xs = t_grid
        .iter()
        .map(|&t| {
            let a = integrand.integrate_exp_full(Complex64::new(0.0, -t)) / TAU;
            Complex64::new(TAU * a.norm_sqr(), 0.0)
        })
        .collect();
    ComplexTable::new(t_grid.to_vec(), xs)
}

/// Narrowband estimate x(t) ≈ 2π|S_ba(ω₀)|²(γ₀/ω₀)Θ(t)e^{−γ₀t}.
pub fn fock_x_narrowband(model: &CouplerModel, mode: &LorentzianMode, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Ok(0.0);
    }
    let s = model.s_ba(mode.omega0)?;
    Ok(TAU * s.norm_sqr() * mode.gamma0 / mode.omega0 * (-mode.gamma0 * t).exp())
}

fn x_decay_check(x: &ComplexTable) -> Result<()> {
    let peak = x.max_abs();
    let v = x.values();
    let end = v[0].norm().max(v[v.len() - 1].norm());
    if peak > 0.0 && end > 1e-3 * peak {
        return Err(Error::InsufficientDecay { ratio: end / peak });
    }
    if peak > 0.0 && end > 1e-6 * peak {
        log::warn!("x(t) has only decayed to {:e} of its peak at the table edge", end / peak);
    }
    Ok(())
}

/// F(t) = L_N(x(t)) for the Fock state |N; χ⟩.
pub fn fc_fock(n: u32, x: &ComplexTable) -> Result<FranckCondonFactor> {
    fc_mixture_inner(&[(n, 1.0)], x)
}

/// F(t) = Σ p_N L_N(x(t)).
pub fn fc_mixture(probabilities: &[f64], x: &ComplexTable) -> Result<FranckCondonFactor> {
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-12 || probabilities.iter().any(|&p| p < 0.0) {
        return Err(Error::Domain(format!("probabilities must be ≥ 0 and sum to 1 (sum = {total})")));
    }
    let pairs: Vec<(u32, f64)> = probabilities
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(n, &p)| (n as u32, p))
        .collect();
    fc_mixture_inner(&pairs, x)
}

fn fc_mixture_inner(pairs: &[(u32, f64)], x: &ComplexTable) -> Result<FranckCondonFactor> {
    if pairs.iter().all(|&(n, _)| n == 0) {
        return Ok(FranckCondonFactor::UnitConstant);
    }
    x_decay_check(x)?;
    let values = x
        .values()
        .iter()
        .map(|v| {
            let mut f = 0.0;
            for &(n, p) in pairs {
                f += p * laguerre(n, v.re)?;
            }
            Ok(Complex64::new(f, 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FranckCondonFactor::Transient { table: ComplexTable::new(x.grid().to_vec(), values)? })
}

/// Branch of the single-EMP Wigner noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerBranch {
    /// Direct Ω-quadrature of the Wigner function.
    Exact,
    /// Θ(t)(ω₀/2π) 4γ₀t sinc(2(|ω|−ω₀)t) e^{−γ₀t}, valid for γ₀/ω₀ ≤ 0.2.
    Approximate,
}

/// Wigner function ΔW(t, ω) of the excess current noise of |1; χ⟩, in units
/// of e²·v_F/l.
pub fn wigner_noise_single_emp(
    mode: &LorentzianMode,
    t: f64,
    w: f64,
    branch: WignerBranch,
) -> Result<f64> {
    let aw = w.abs();
    match branch {
        WignerBranch::Approximate => {
            if mode.gamma0 / mode.omega0 > 0.2 {
                return Err(Error::Precondition(format!(
                    "approximate branch needs γ₀/ω₀ ≤ 0.2, got {}",
                    mode.gamma0 / mode.omega0
                )));
            }
            if t < 0.0 {
                return Ok(0.0);
            }
            let arg = 2.0 * (aw - mode.omega0) * t;
            let sinc = if arg.abs() < 1e-12 { 1.0 } else { arg.sin() / arg };
            Ok(mode.omega0 / TAU * 4.0 * mode.gamma0 * t * sinc * (-mode.gamma0 * t).exp())
        }
        WignerBranch::Exact => {
            let lim = (2.0 * aw).min(2.0 * (mode.omega_cut - aw));
            if lim <= 0.0 {
                return Ok(0.0);
            }
            let breaks = quad_breaks(-lim, lim, t, mode.peak_breaks(-lim, lim, 2.0 * (mode.omega0 - aw)));
            let mut br = breaks;
            br.extend(mode.peak_breaks(-lim, lim, -2.0 * (mode.omega0 - aw)));
            br.sort_by(f64::total_cmp);
            br.dedup();
            let r = integrate_with_breaks(
                |o| {
                    let root = (aw * aw - 0.25 * o * o).max(0.0).sqrt();
                    Complex64::from_polar(1.0, -o * t)
                        * root
                        * mode.chi(aw + 0.5 * o)
                        * mode.chi(aw - 0.5 * o).conj()
                },
                -lim,
                lim,
                &br,
                QuadOptions::tol(1e-10, 1e-16),
            )?;
            Ok(r.value.re / (TAU * TAU))
        }
    }
}

// ---------------------------------------------------------------------------
// Radiation states

/// Incoming radiation in the coupler's external channel.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiationState {
    Vacuum,
    ClassicalDrive(Drive),
    SqueezedNarrowband(SqueezedNarrowband),
    FockLorentzian { n: u32, mode: LorentzianMode },
    FockMixture { probabilities: Vec<f64>, mode: LorentzianMode },
}

impl RadiationState {
    /// Franck-Condon factor of the state seen through `model`. Fock factors
    /// are tabulated on the mode's default transient window.
    pub fn franck_condon(&self, model: &CouplerModel) -> Result<FranckCondonFactor> {
        match self {
            Self::Vacuum => Ok(fc_vacuum()),
            Self::ClassicalDrive(d) => fc_classical(model, d),
            Self::SqueezedNarrowband(s) => fc_squeezed_harmonics(s),
            Self::FockLorentzian { n, mode } => {
                if *n == 0 {
                    return Ok(FranckCondonFactor::UnitConstant);
                }
                fc_fock(*n, &fock_x_table(model, mode, &mode.transient_grid())?)
            }
            Self::FockMixture { probabilities, mode } => {
                fc_mixture(probabilities, &fock_x_table(model, mode, &mode.transient_grid())?)
            }
        }
    }

    /// ⟨N⟩ for Fock states and mixtures.
    pub fn mean_photon_number(&self) -> Option<f64> {
        match self {
            Self::FockLorentzian { n, .. } => Some(*n as f64),
            Self::FockMixture { probabilities, .. } => {
                Some(probabilities.iter().enumerate().map(|(n, p)| n as f64 * p).sum())
            }
            _ => None,
        }
    }
}

/// ⟨J_Q(t)⟩ = ⟨N⟩ω₀γ₀e^{−γ₀t}Θ(t), in units of ħ(v_F/l)².
pub fn heat_current(state: &RadiationState, t: f64) -> Result<f64> {
    let (n, mode) = match state {
        RadiationState::FockLorentzian { mode, .. } | RadiationState::FockMixture { mode, .. } => {
            (state.mean_photon_number().unwrap_or(0.0), mode)
        }
        _ => {
            return Err(Error::Precondition(
                "heat current is defined for Fock states and mixtures".into(),
            ))
        }
    };
    if t < 0.0 {
        return Ok(0.0);
    }
    Ok(n * mode.omega0 * mode.gamma0 * (-mode.gamma0 * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupler::CouplerParams;

    fn cp(alpha: f64) -> CouplerModel {
        CouplerModel::CounterPropagating(CouplerParams::new(10e-6, 1e5, alpha).unwrap())
    }

    #[test]
    fn vacuum_views() {
        let f = fc_vacuum();
        assert_eq!(f.eval(3.2), ONE);
        let (_, c) = f.harmonics().unwrap();
        assert_eq!(c.n_max, 0);
        assert_eq!(c.get(0), ONE);
        let tab = f.tabulate(&[0.0, 1.0, 2.0]).unwrap();
        assert!(tab.values().iter().all(|&v| v == ONE));
    }

    #[test]
    fn zero_drive_is_unit() {
        let d = Drive::Harmonic { offset: 0.0, tones: vec![] };
        assert_eq!(fc_classical(&cp(0.2), &d).unwrap(), FranckCondonFactor::UnitConstant);
        let d = Drive::Harmonic {
            offset: 0.0,
            tones: vec![Tone { omega: 2.0, amplitude: 0.0, phase: 0.0 }],
        };
        let c = photo_assisted_coefficients(&fc_classical(&cp(0.2), &d).unwrap()).unwrap();
        assert!((c.get(0) - 1.0).norm() < 1e-14);
        assert!(c.power() - 1.0 < 1e-14);
    }

    #[test]
    fn locked_constant_voltage() {
        let tg = CouplerModel::TopGate(CouplerParams::new(10e-6, 1e5, 0.0).unwrap());
        let d = Drive::Harmonic { offset: 0.7, tones: vec![] };
        let f = fc_classical(&tg, &d).unwrap();
        assert!((f.eval(5.0) - Complex64::from_polar(1.0, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn squeezed_min_closed_form() {
        let s = SqueezedNarrowband::new(2.0, 5.0, Complex64::new(2f64.ln() / 4.0, 0.0), ONE).unwrap();
        assert!((s.lambda() - 0.2).abs() < 1e-15);
        let (mn, _) = s.extrema();
        assert!((mn - (-0.1f64).exp()).abs() < 1e-12);
        let t_min = (s.phi0() + PI) / (2.0 * s.omega0);
        assert!((fc_squeezed_exact(&s, t_min) - mn).abs() < 1e-12);
    }

    #[test]
    fn squeezed_harmonics_rebuild_exact() {
        let s = SqueezedNarrowband::new(PI, 5.0, Complex64::from_polar(0.17, 0.4), Complex64::from_polar(0.9, -0.3))
            .unwrap();
        let f = fc_squeezed_harmonics(&s).unwrap();
        for k in 0..40 {
            let t = 0.037 * k as f64;
            assert!((f.eval(t) - fc_squeezed_exact(&s, t)).norm() < 1e-12);
        }
    }

    #[test]
    fn mode_is_normalised() {
        let m = LorentzianMode::new(2.0, 0.1).unwrap();
        let r = integrate_with_breaks(
            |w| Complex64::new(m.chi(w).norm_sqr() / TAU, 0.0),
            0.0,
            m.omega_cut,
            &m.peak_breaks(0.0, m.omega_cut, m.omega0),
            QuadOptions::tol(1e-12, 1e-16),
        )
        .unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-10);
        assert!(m.renormalization() < 1.0);
    }

    #[test]
    fn fock_zero_is_vacuum() {
        let m = LorentzianMode::new(2.0, 0.1).unwrap();
        let s = RadiationState::FockLorentzian { n: 0, mode: m };
        assert_eq!(s.franck_condon(&cp(0.2)).unwrap(), FranckCondonFactor::UnitConstant);
    }

    #[test]
    fn heat_current_support() {
        let m = LorentzianMode::new(2.0, 0.1).unwrap();
        let s = RadiationState::FockLorentzian { n: 1, mode: m };
        assert_eq!(heat_current(&s, -1.0).unwrap(), 0.0);
        assert!(heat_current(&RadiationState::Vacuum, 1.0).is_err());
    }
}
