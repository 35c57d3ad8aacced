//! Closed-form toy models: the Coulomb collision phase between two edge
//! channels, the single-electron Mach-Zehnder interferometer under a classical
//! voltage, and the generalized Elitzur-Vaidman detector.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_with_breaks, panel_breaks, QuadOptions};
use crate::units::{ALPHA_QED, C_LIGHT};

/// Two parallel edge channels of length `l` at distance `d` (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionGeometry {
    pub l: f64,
    pub d: f64,
    pub eps_r: f64,
    pub v_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionPhase {
    pub alpha_eff: f64,
    /// δφ in radians.
    pub delta_phi: f64,
}

/// α_eff = (α_qed/ε_r)(c/v_F) and δφ = α_eff·arcsinh(l/d).
pub fn collision_phase(g: CollisionGeometry) -> Result<CollisionPhase> {
    if [g.l, g.d, g.eps_r, g.v_f].iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!("collision geometry must be positive: {g:?}")));
    }
    let alpha_eff = ALPHA_QED / g.eps_r * C_LIGHT / g.v_f;
    Ok(CollisionPhase { alpha_eff, delta_phi: alpha_eff * (g.l / g.d).asinh() })
}

/// Transmission probabilities of the two electronic beam splitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitters {
    pub t_a: f64,
    pub t_b: f64,
}

impl BeamSplitters {
    pub const BALANCED: Self = Self { t_a: 0.5, t_b: 0.5 };

    pub fn new(t_a: f64, t_b: f64) -> Result<Self> {
        if !((0.0..=1.0).contains(&t_a) && (0.0..=1.0).contains(&t_b)) {
            return Err(Error::Domain(format!("transmissions must lie in [0, 1], got {t_a}, {t_b}")));
        }
        Ok(Self { t_a, t_b })
    }

    /// K = √(R_A T_A R_B T_B).
    pub fn k(&self) -> f64 {
        ((1.0 - self.t_a) * self.t_a * (1.0 - self.t_b) * self.t_b).sqrt()
    }

    fn classical(&self) -> f64 {
        (1.0 - self.t_a) * (1.0 - self.t_b) + self.t_a * self.t_b
    }
}

/// Integration window and resolution for the overlap integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziWindow {
    pub start: f64,
    pub end: f64,
    /// Maximal panel width, e.g. a fraction of the drive period.
    pub panel: f64,
    /// Extra break points (wavepacket centres).
    pub centres: [f64; 2],
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziProbabilities {
    pub p_1out: f64,
    pub p_q: f64,
    /// ∫φ(t−τ₁) e^{i∫_{t−τ₁}^t U} φ*(t−τ₂) dt.
    pub overlap: Complex64,
}

/// Single electron in a MZI whose branch 1 sees the potential U (times in
/// l/v_F, U in ħv_F/(el)): p(1_out) = R_AR_B + T_AT_B + P_q with
/// P_q = 2K Re(e^{iφ_AB} ∫φ(t−τ₁)e^{i∫_{t−τ₁}^t U}φ*(t−τ₂)dt).
///
/// `u_integral(a, b)` must return ∫_a^b U.
#[allow(clippy::too_many_arguments)]
pub fn classical_mzi_pq(
    phi: impl Fn(f64) -> Complex64,
    u_integral: impl Fn(f64, f64) -> f64,
    tau1: f64,
    tau2: f64,
    splitters: BeamSplitters,
    phi_ab: f64,
    window: MziWindow,
) -> Result<MziProbabilities> {
    let mut breaks = panel_breaks(window.start, window.end, window.panel, 4);
    for c in window.centres {
        for m in [0.0, 1.0, 3.0, 10.0, 30.0, 100.0] {
            breaks.extend([c - m * window.width, c + m * window.width]);
        }
    }
    let r = integrate_with_breaks(
        |t| phi(t - tau1) * Complex64::from_polar(1.0, u_integral(t - tau1, t)) * phi(t - tau2).conj(),
        window.start,
        window.end,
        &breaks,
        QuadOptions { rel_tol: 1e-11, abs_tol: 1e-15, max_panels: 8_000_000 },
    )?;
    let p_q = 2.0 * splitters.k() * (Complex64::from_polar(1.0, phi_ab) * r.value).re;
    Ok(MziProbabilities { p_1out: splitters.classical() + p_q, p_q, overlap: r.value })
}

/// Short-pulse phase e^{iδφ_U(t_e)}, δφ_U = ∫_{t_e}^{t_e+τ₁} U.
pub fn short_pulse_phase(u_integral: impl Fn(f64, f64) -> f64, t_e: f64, tau1: f64) -> Complex64 {
    Complex64::from_polar(1.0, u_integral(t_e, t_e + tau1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvProbabilities {
    pub p_none: f64,
    pub p_1out: f64,
    pub p_2out: f64,
    pub p_q: f64,
}

/// Generalized Elitzur-Vaidman detector: `a1` is the amplitude for the photon
/// to cross the bomb arm without being absorbed, `overlap_bomb` = ⟨Idle|Fizzled⟩
/// and `overlap_photon` = ⟨Ψ|Ψ′⟩.
pub fn elitzur_vaidman(
    a1: Complex64,
    overlap_bomb: Complex64,
    overlap_photon: Complex64,
    phi_ab: f64,
) -> Result<EvProbabilities> {
    if a1.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("|A₁| = {} exceeds 1", a1.norm())));
    }
    if overlap_bomb.norm() > 1.0 + 1e-12 || overlap_photon.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain("state overlaps must not exceed 1 in modulus".into()));
    }
    let a2 = a1.norm_sqr();
    let p_q = 0.5 * (a1 * Complex64::from_polar(1.0, phi_ab) * overlap_bomb * overlap_photon).re;
    Ok(EvProbabilities {
        p_none: 0.5 * (1.0 - a2),
        p_1out: 0.25 * (1.0 + a2) - p_q,
        p_2out: 0.25 * (1.0 + a2) + p_q,
        p_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collision_phase_unit_case() {
        let g = CollisionGeometry { l: 1.0, d: 1.0, eps_r: ALPHA_QED * C_LIGHT, v_f: 1.0 };
        let p = collision_phase(g).unwrap();
        assert!((p.alpha_eff - 1.0).abs() < 1e-12);
        assert!((p.delta_phi - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn ev_reference_points() {
        let one = Complex64::new(1.0, 0.0);
        let p = elitzur_vaidman(Complex64::new(0.0, 0.0), one, one, 0.0).unwrap();
        assert_eq!((p.p_none, p.p_1out, p.p_2out), (0.5, 0.25, 0.25));
        let p = elitzur_vaidman(one, one, one, 0.0).unwrap();
        assert_eq!((p.p_none, p.p_1out, p.p_2out), (0.0, 0.0, 1.0));
        let p = elitzur_vaidman(one, one, one, std::f64::consts::PI).unwrap();
        assert!(p.p_none.abs() < 1e-15 && (p.p_1out - 1.0).abs() < 1e-15 && p.p_2out.abs() < 1e-15);
        assert!(elitzur_vaidman(Complex64::new(1.1, 0.0), one, one, 0.0).is_err());
    }
}
