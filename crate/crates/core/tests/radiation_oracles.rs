use std::f64::consts::PI;

use eqradar_core::coupler::{CouplerModel, CouplerParams, TabulatedCoupler};
use eqradar_core::numerics::ComplexTable;
use eqradar_core::radiation::{
    fc_fock, fc_gaussian, fc_mixture, fc_squeezed_exact, fock_overlap_x, fock_x_table, heat_current,
    wigner_noise_single_emp, BoxcarSqueezing, EffectiveMoments, LorentzianMode, RadiationState, SqueezedNarrowband,
    WignerBranch,
};
use eqradar_core::units::Units;
use eqradar_core::Complex64;

fn flat_coupler(s_ba: Complex64) -> CouplerModel {
    let w: Vec<f64> = (0..=200).map(|k| 0.1 * k as f64).collect();
    let s_bb = Complex64::new((1.0 - s_ba.norm_sqr()).sqrt(), 0.0);
    let t = TabulatedCoupler::new(Units::new(1.0, 1.0).unwrap(), &w, vec![s_bb; w.len()], vec![s_ba; w.len()]).unwrap();
    CouplerModel::Tabulated(t)
}

fn bessel_j0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -(x * x) / (4.0 * (k * k) as f64);
        sum += term;
    }
    sum
}

fn gaussian_x_table(peak: f64) -> ComplexTable {
    let grid = ComplexTable::uniform_grid(-7.0, 7.0, 1401);
    ComplexTable::from_fn(grid, |t| Complex64::new(peak * (-t * t).exp(), 0.0)).unwrap()
}

#[test]
fn boxcar_moments_match_closed_integrals() {
    let s = Complex64::new(0.6, -0.3);
    let model = flat_coupler(s);
    let (omega0, gamma0) = (3.0, 0.4);
    let z = Complex64::from_polar(0.1, 0.8);
    let m = BoxcarSqueezing { omega0, gamma0, z }.moments(&model).unwrap();
    let (sh, ch) = ((0.2f64).sinh(), (0.2f64).cosh());
    let h = 0.5 * gamma0;
    let n_eff = s.norm_sqr() * sh * sh * ((omega0 + h) / (omega0 - h)).ln();
    let xi_eff = s * s * Complex64::from_polar(sh * ch, 0.8) * 2.0 * (h / omega0).asin();
    assert!((m.n_eff - n_eff).abs() < 1e-10 * n_eff);
    assert!((m.xi_eff - xi_eff).norm() < 1e-10 * xi_eff.norm());
}

#[test]
fn gaussian_factor_reproduces_squeezed_closed_form() {
    let s = SqueezedNarrowband::new(PI, 20.0, Complex64::from_polar(0.15, 1.1), Complex64::new(0.5, 0.4)).unwrap();
    let (sh, ch) = ((0.3f64).sinh(), (0.3f64).cosh());
    let l = s.lambda();
    let moments = EffectiveMoments { n_eff: l * sh * sh, xi_eff: Complex64::from_polar(l * sh * ch, s.phi0()) };
    let f = fc_gaussian(moments, PI).unwrap();
    for k in 0..50 {
        let t = 0.021 * k as f64;
        assert!((f.eval(t).re - fc_squeezed_exact(&s, t)).abs() < 1e-10);
        assert!(f.eval(t).im.abs() < 1e-10);
    }
}

#[test]
fn poisson_mixture_sums_to_bessel() {
    let nbar: f64 = 0.7;
    let mut p = Vec::new();
    let mut w = (-nbar).exp();
    for n in 0..40 {
        p.push(w);
        w *= nbar / (n + 1) as f64;
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    let x = gaussian_x_table(0.8);
    let f = fc_mixture(&p, &x).unwrap();
    for &t in &[-2.0, -0.5, 0.0, 0.3, 1.0, 3.0] {
        let xt = 0.8 * (-t * t as f64).exp();
        let want = bessel_j0(2.0 * (nbar * xt).sqrt());
        assert!((f.eval(t).re - want).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn mixture_is_linear_in_probabilities() {
    let x = gaussian_x_table(0.3);
    let p = [0.2, 0.5, 0.3];
    let mix = fc_mixture(&p, &x).unwrap();
    let parts: Vec<_> = (0..3).map(|n| fc_fock(n as u32, &x).unwrap()).collect();
    for &t in &[-1.0, 0.0, 0.4, 2.0] {
        let sum: Complex64 = parts.iter().zip(p).map(|(f, w)| f.eval(t) * w).sum();
        assert!((mix.eval(t) - sum).norm() < 1e-14);
    }
    assert!(fc_mixture(&[0.5, 0.6], &x).is_err());
}

#[test]
fn wigner_branches_agree_for_sharp_mode() {
    let mode = LorentzianMode::new(5.0, 0.1).unwrap();
    for gt in [0.5, 1.0, 2.0, 3.0] {
        let t = gt / mode.gamma0;
        let exact = wigner_noise_single_emp(&mode, t, mode.omega0, WignerBranch::Exact).unwrap();
        let approx = wigner_noise_single_emp(&mode, t, mode.omega0, WignerBranch::Approximate).unwrap();
        assert!((exact - approx).abs() < 0.1 * exact.abs(), "γ₀t = {gt}: {exact} vs {approx}");
    }
}

#[test]
fn tabulated_fock_x_matches_pointwise_overlap() {
    let model = CouplerModel::CounterPropagating(CouplerParams::new(1.0, 1.0, 0.2).unwrap());
    let mode = LorentzianMode::new(2.0, 0.2).unwrap();
    let ts = [-1.0, 0.5, 2.0, 5.0, 12.0];
    let table = fock_x_table(&model, &mode, &ts).unwrap();
    for (k, &t) in ts.iter().enumerate() {
        let direct = fock_overlap_x(&model, &mode, t).unwrap();
        let tabulated = table.values()[k].re;
        assert!((direct - tabulated).abs() < 1e-4 * direct.abs().max(1e-3), "t = {t}: {direct} vs {tabulated}");
    }
}

#[test]
fn heat_current_integrates_to_photon_energy() {
    let mode = LorentzianMode::new(2.0, 0.1).unwrap();
    let state = RadiationState::FockMixture { probabilities: vec![0.25, 0.5, 0.25], mode };
    let h = 0.01;
    let energy: f64 = (0..20_000).map(|k| heat_current(&state, (k as f64 + 0.5) * h).unwrap() * h).sum();
    assert!((energy - 2.0).abs() < 1e-4, "∫J dt = {energy}");
    assert_eq!(heat_current(&state, -0.1).unwrap(), 0.0);
}
