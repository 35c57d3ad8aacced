use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use eqradar_core::coupler::{CouplerModel, CouplerParams};
use eqradar_core::decoherence::{solve_elastic_amplitude, ElasticAmplitude, SolverSettings};
use eqradar_core::numerics::{integrate, ComplexTable, QuadOptions};
use eqradar_core::radar::{
    effective_scattering_frequency, filter_f, optimal_tau2, xplus_dc, xplus_energy_resolved, xplus_time_integral,
    FilterMode, GaussianProbe, LevitonFilter, LevitonProbe, RadarEvaluator, Wavepacket,
};
use eqradar_core::radiation::{fc_squeezed_harmonics, fc_vacuum, FranckCondonFactor, SqueezedNarrowband};
use eqradar_core::Complex64;

const PULSE: f64 = 0.3;

fn amplitude() -> &'static ElasticAmplitude {
    static Z: OnceLock<ElasticAmplitude> = OnceLock::new();
    Z.get_or_init(|| {
        let model = CouplerModel::CounterPropagating(CouplerParams::new(1.0, 1.0, 0.2).unwrap());
        solve_elastic_amplitude(&model, SolverSettings::new(120.0, 0.01)).unwrap()
    })
}

fn pulse_amplitude() -> Complex64 {
    Complex64::from_polar(PULSE, 0.5)
}

/// F(t) = 1 + c·e^{−t²}, whose Fourier transform is c√π e^{−Ω²/4}.
fn gaussian_pulse() -> FranckCondonFactor {
    let grid = ComplexTable::uniform_grid(-8.0, 8.0, 3201);
    let table = ComplexTable::from_fn(grid, |t| 1.0 + pulse_amplitude() * (-t * t).exp()).unwrap();
    FranckCondonFactor::Transient { table }
}

fn pulse_spectrum(omega: f64) -> Complex64 {
    pulse_amplitude() * PI.sqrt() * (-0.25 * omega * omega).exp()
}

#[test]
fn transient_signal_matches_literal_frequency_integral() {
    let z = amplitude();
    let (tau_e, tau2) = (0.3, 0.6);
    let fc = gaussian_pulse();
    let eval = RadarEvaluator::new(z, tau_e, tau2, &fc, FilterMode::Exact).unwrap();
    let f0 = eval.baseline();
    for t_e in [-1.0, -0.4, 0.0, 0.5] {
        let s = t_e + tau2;
        let literal = f0
            + integrate(
                |w| pulse_spectrum(w) * Complex64::from_polar(1.0, -w * s) * filter_f(z, tau_e, tau2, w).unwrap(),
                -14.0,
                14.0,
                QuadOptions::tol(1e-11, 1e-14),
            )
            .unwrap()
            .value
                / TAU;
        let x = eval.at(t_e).unwrap().x_dc;
        assert!((x - literal).norm() < 1e-5, "t_e = {t_e}: {x} vs {literal}");
    }
}

#[test]
fn time_integral_reproduces_dc_signal() {
    let z = amplitude();
    let tau_e = 0.3;
    let tau2 = optimal_tau2(z, tau_e).unwrap();
    for (fc, t_e) in [(fc_vacuum(), 0.0), (gaussian_pulse(), -0.5)] {
        let probe = LevitonProbe::new(tau_e, t_e).unwrap();
        let dc = xplus_dc(z, probe, tau2, &fc).unwrap().x_dc;
        let integral = xplus_time_integral(z, &Wavepacket::Leviton(probe), tau2, &fc, (-1e4, 1e4)).unwrap();
        assert!((dc - integral).norm() < 0.01 * dc.norm(), "{dc} vs {integral}");
    }
}

#[test]
fn energy_resolved_limit_matches_gaussian_wavepacket() {
    let z = amplitude();
    let (omega_e, gamma_e, tau2) = (5.0, 0.1, 1.1);
    let probe = GaussianProbe::new(omega_e, gamma_e, 0.0).unwrap();
    let fc = fc_vacuum();
    let integral = xplus_time_integral(z, &Wavepacket::Gaussian(probe), tau2, &fc, (-150.0, 150.0)).unwrap();
    let r = xplus_energy_resolved(z, &fc, omega_e, gamma_e, tau2, 0.0).unwrap();
    let (w, weight) = r.comb[0];
    assert_eq!(w, 0.0);
    let predicted = weight / (2.0 * PI.sqrt() * gamma_e);
    assert!((predicted - integral).norm() < 0.05 * integral.norm(), "{predicted} vs {integral}");
}

#[test]
fn regular_spectral_part_is_pulse_transform_times_amplitude() {
    let z = amplitude();
    let fc = gaussian_pulse();
    for (wp, wm) in [(3.0, 2.0), (1.0, 2.5), (4.0, 4.0)] {
        let r = effective_scattering_frequency(z, &fc, wp, wm).unwrap();
        let want = pulse_spectrum(wp - wm) * z.eval(wm).unwrap();
        assert!((r.regular - want).norm() < 1e-8, "({wp}, {wm})");
        assert_eq!(r.comb.len(), 1);
        assert!((r.comb[0].1 - TAU * z.eval(wm).unwrap()).norm() < 1e-14);
    }
}

#[test]
fn adiabatic_filter_is_close_for_slow_radiation() {
    let z = amplitude();
    let tau_e = 0.1;
    let tau2 = optimal_tau2(z, tau_e).unwrap();
    let filter = LevitonFilter::new(z, tau_e, tau2).unwrap();
    let d = filter.adiabatic_discrepancy(-0.1).unwrap();
    assert!(d < 0.05, "discrepancy {d}");
}

#[test]
fn emission_time_average_is_baseline_times_dc_harmonic() {
    let z = amplitude();
    let (tau_e, omega0) = (0.15, PI);
    let tau2 = optimal_tau2(z, tau_e).unwrap();
    let s = SqueezedNarrowband::new(omega0, 10.0, Complex64::new(0.2, 0.0), Complex64::new(0.6, -0.4)).unwrap();
    let fc = fc_squeezed_harmonics(&s).unwrap();
    let f0 = match &fc {
        FranckCondonFactor::Harmonics { coeffs, .. } => coeffs.get(0),
        _ => unreachable!(),
    };
    let eval = RadarEvaluator::new(z, tau_e, tau2, &fc, FilterMode::Exact).unwrap();
    let n = 128;
    let period = PI / omega0;
    let mean: Complex64 =
        (0..n).map(|k| eval.at(period * k as f64 / n as f64).unwrap().x_dc).sum::<Complex64>() / n as f64;
    let want = eval.baseline() * f0;
    assert!((mean - want).norm() < 1e-8 * want.norm(), "{mean} vs {want}");
}

#[test]
fn single_photon_dip_scales_with_mean_number() {
    use eqradar_core::radiation::{fc_fock, fc_mixture};
    let z = amplitude();
    let tau_e = 0.2;
    let tau2 = optimal_tau2(z, tau_e).unwrap();
    let grid = ComplexTable::uniform_grid(-8.0, 8.0, 1601);
    let x = ComplexTable::from_fn(grid, |t| Complex64::new(0.01 * (-t * t).exp(), 0.0)).unwrap();
    let p = [0.4, 0.3, 0.2, 0.1];
    let mean: f64 = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
    let dip = |fc: &FranckCondonFactor| {
        let r = RadarEvaluator::new(z, tau_e, tau2, fc, FilterMode::Exact).unwrap().at(-tau2).unwrap();
        1.0 - r.relative
    };
    let single = dip(&fc_fock(1, &x).unwrap());
    let mixed = dip(&fc_mixture(&p, &x).unwrap());
    assert!(single.norm() > 1e-3);
    assert!((mixed - mean * single).norm() < 0.02 * mixed.norm(), "{mixed} vs {}", mean * single);
}
