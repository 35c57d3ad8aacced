use eqradar_core::coupler::{CouplerModel, TabulatedCoupler};
use eqradar_core::decoherence::{solve_elastic_amplitude, Kernel, SolverSettings};
use eqradar_core::numerics::{integrate, QuadOptions};
use eqradar_core::units::Units;
use eqradar_core::Complex64;

fn tabulated(x_max: f64, h: f64, s_bb: impl Fn(f64) -> Complex64, s_ba: impl Fn(f64) -> Complex64) -> CouplerModel {
    let n = (x_max / h).round() as usize;
    let w: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let units = Units::new(1.0, 1.0).unwrap();
    let t = TabulatedCoupler::new(units, &w, w.iter().map(|&x| s_bb(x)).collect(), w.iter().map(|&x| s_ba(x)).collect())
        .unwrap();
    CouplerModel::Tabulated(t)
}

#[test]
fn pure_delay_is_reproduced_by_convolution_kernel() {
    let tau = 0.7;
    let model = tabulated(30.0, 0.005, |x| Complex64::from_polar(1.0, x * tau), |_| Complex64::new(0.0, 0.0));
    let z = solve_elastic_amplitude(&model, SolverSettings::new(20.0, 0.01)).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..=1000 {
        let x = 0.01 * k as f64;
        worst = worst.max((z.eval(x).unwrap() - Complex64::from_polar(1.0, x * tau)).norm());
    }
    assert!(worst < 1e-4, "pure delay deviation {worst:e}");
    approx::assert_abs_diff_eq!(z.tau1, tau, epsilon = 1e-4);
}

#[test]
fn printed_kernel_departs_from_pure_delay_at_third_order() {
    let tau = 0.7;
    let model = tabulated(30.0, 0.005, |x| Complex64::from_polar(1.0, x * tau), |_| Complex64::new(0.0, 0.0));
    let z = solve_elastic_amplitude(&model, SolverSettings::new(5.0, 0.001).kernel(Kernel::AsPrinted)).unwrap();
    let dev = |x: f64| (z.eval(x).unwrap() - Complex64::from_polar(1.0, x * tau)).norm();
    let ratio = dev(0.4) / dev(0.2);
    assert!((6.5..9.5).contains(&ratio), "deviation ratio {ratio}, expected about 8");
    assert!(dev(2.0) > 1e-2);
}

#[test]
fn weak_coupling_matches_first_born_approximation() {
    let mut residuals = Vec::new();
    for eps in [0.2, 0.1] {
        let s_ba = move |x: f64| Complex64::new(0.0, eps * x * (-x).exp());
        let s_bb = move |x: f64| Complex64::new((1.0 - s_ba(x).norm_sqr()).sqrt(), 0.0);
        let model = tabulated(30.0, 0.005, s_bb, s_ba);
        let z = solve_elastic_amplitude(&model, SolverSettings::new(20.0, 0.005)).unwrap();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for x in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let born = 1.0
                + integrate(|w| (s_bb(w) - 1.0) / w, 1e-12, x, QuadOptions::tol(1e-12, 1e-16)).unwrap().value;
            let zx = z.eval(x).unwrap();
            worst = worst.max((zx - born).norm());
            scale = scale.max((zx - 1.0).norm());
        }
        assert!(worst < 0.05 * scale, "eps = {eps}: Born residual {worst:e} vs |Z − 1| {scale:e}");
        residuals.push(worst);
    }
    // The second-order remainder is O(D²) = O(ε⁴).
    let ratio = residuals[0] / residuals[1];
    assert!((10.0..22.0).contains(&ratio), "Born remainder ratio {ratio}");
}
