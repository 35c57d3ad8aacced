use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
pub(crate) const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

// Kronrod 15-point nodes (non-negative half) and weights; odd indices are the Gauss 7-point nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            max_panels: 200_000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn tol(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let err = ((kronrod - gauss) * h).norm();
    (kronrod * h, err)
}

/// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand over
/// `[a, b]`, starting from the panels delimited by `breaks` (sorted, inside
/// `[a, b]`). The panel with the largest error is bisected until the total
/// error estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_with_breaks<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, panels: 0 });
    }
    if a > b {
        let r = integrate_with_breaks(f, b, a, breaks, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in pts.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        total += v;
        total_err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut panels = heap.len();
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if !total_err.is_finite() {
            return Err(Error::Evaluation("non-finite error estimate".into()));
        }
        if total_err <= target {
            // Incremental updates can leave round-off from discarded panels.
            total_err = heap.iter().map(|p| p.error).sum();
            if total_err <= target {
                break;
            }
        }
        if panels >= opts.max_panels {
            return Err(Error::NonConvergence {
                value: format!("{total}"),
                estimate: total_err,
            });
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Panel cannot be split further in floating point.
            heap.push(Panel { error: 0.0, ..p });
            total_err -= p.error;
            continue;
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
        panels += 1;
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::Evaluation("non-finite integrand".into()));
    }
    // Re-sum to limit round-off accumulated by incremental updates.
    let value: Complex64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error, panels })
}

/// Adaptive integration over `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    integrate_with_breaks(f, a, b, &[], opts)
}

/// ∫₀^∞ f(ω) dω for integrands decaying at least like e^{−damping_rate·ω}.
///
/// The range is truncated at 40/damping_rate and pre-split into panels no
/// wider than `oscillation_period_hint`, so every period receives at least
/// 15 Kronrod nodes before adaptive refinement.
pub fn quad_damped<F: Fn(f64) -> Complex64>(
    f: F,
    damping_rate: f64,
    oscillation_period_hint: f64,
) -> Result<QuadResult> {
    quad_damped_with(f, damping_rate, oscillation_period_hint, QuadOptions::default())
}

pub fn quad_damped_with<F: Fn(f64) -> Complex64>(
    f: F,
    damping_rate: f64,
    oscillation_period_hint: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(damping_rate > 0.0 && damping_rate.is_finite()) {
        return Err(Error::Domain(format!("damping rate must be positive, got {damping_rate}")));
    }
    let upper = 40.0 / damping_rate;
    let breaks = panel_breaks(0.0, upper, oscillation_period_hint, 16);
    integrate_with_breaks(f, 0.0, upper, &breaks, opts)
}

/// Interior break points splitting `[a, b]` into panels of width at most `period`
/// (and into at least `min_panels` panels).
pub fn panel_breaks(a: f64, b: f64, period: f64, min_panels: usize) -> Vec<f64> {
    let span = b - a;
    let mut n = min_panels.max(1);
    if period.is_finite() && period > 0.0 {
        n = n.max((span / period).ceil() as usize);
    }
    let n = n.min(1_000_000);
    (1..n).map(|i| a + span * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn damped_exponential() {
        let r = quad_damped(|w| c((-2.0 * w).exp(), 0.0), 2.0, f64::INFINITY).unwrap();
        assert!((r.value - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn damped_oscillatory() {
        let r = quad_damped(|w| (c(-2.0, -1.0) * w).exp(), 2.0, std::f64::consts::TAU).unwrap();
        assert!((r.value - c(0.4, -0.2)).norm() < 1e-12, "{}", r.value);
    }

    #[test]
    fn gamma_two() {
        let r = quad_damped(|w| c(w * (-w).exp(), 0.0), 1.0, f64::INFINITY).unwrap();
        assert!((r.value - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions { rel_tol: 1e-14, abs_tol: 0.0, max_panels: 4 };
        let r = integrate(|x| c(1.0 / x.abs().sqrt().max(1e-300), 0.0), -1.0, 1.0, opts);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
