use std::f64::consts::TAU;

use num_complex::Complex64;

use super::table::ComplexTable;
use crate::error::{Error, Result};

/// Fourier coefficients F_n, n ∈ [−n_max, n_max], of a periodic function
/// written as F(t) = Σ F_n e^{−2inω₀t} with ω₀ = π/T.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCoefficients {
    pub n_max: usize,
    /// `coeffs[k]` holds F_{k − n_max}.
    pub coeffs: Vec<Complex64>,
}

impl PeriodicCoefficients {
    pub fn new(coeffs_by_n: Vec<Complex64>) -> Self {
        assert!(coeffs_by_n.len() % 2 == 1, "coefficient list must be symmetric");
        Self { n_max: coeffs_by_n.len() / 2, coeffs: coeffs_by_n }
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(n + self.n_max as i64) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (k as i64 - self.n_max as i64, c))
    }

    /// Σ F_n e^{−2inω₀t}.
    pub fn evaluate(&self, omega0: f64, t: f64) -> Complex64 {
        self.iter()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -2.0 * n as f64 * omega0 * t))
            .sum()
    }

    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

const TRUNCATION: f64 = 1e-14;

/// Coefficients of a `period`-periodic `f`, using the trapezoidal rule on
/// M equispaced samples (spectrally accurate for smooth periodic functions).
/// M doubles until the coefficient set is stable and the tail is below 10⁻¹⁴.
pub fn fourier_coeffs_periodic<F: Fn(f64) -> Complex64>(
    f: F,
    period: f64,
) -> Result<PeriodicCoefficients> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Domain(format!("period must be positive, got {period}")));
    }
    let mut m = 64usize;
    let mut prev: Option<Vec<Complex64>> = None;
    while m <= 1 << 16 {
        let samples: Vec<Complex64> =
            (0..m).map(|k| f(period * k as f64 / m as f64)).collect();
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::Evaluation("non-finite periodic function sample".into()));
        }
        let half = m / 4;
        let coeffs: Vec<Complex64> = (-(half as i64)..=half as i64)
            .map(|n| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, s) in samples.iter().enumerate() {
                    let phase = TAU * ((n * k as i64).rem_euclid(m as i64)) as f64 / m as f64;
                    acc += s * Complex64::from_polar(1.0, phase);
                }
                acc / m as f64
            })
            .collect();
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        let tail_ok = coeffs[0].norm() < TRUNCATION * scale.max(1.0)
            && coeffs[coeffs.len() - 1].norm() < TRUNCATION * scale.max(1.0);
        let stable = prev.as_ref().is_some_and(|p| {
            let ph = p.len() / 2;
            (0..p.len()).all(|i| (p[i] - coeffs[i + half - ph]).norm() < 1e-13 * scale.max(1.0))
        });
        if tail_ok && stable {
            return Ok(trim(coeffs, scale));
        }
        prev = Some(coeffs);
        m *= 2;
    }
    Err(Error::NonConvergence {
        value: "periodic Fourier series".into(),
        estimate: f64::NAN,
    })
}

fn trim(coeffs: Vec<Complex64>, scale: f64) -> PeriodicCoefficients {
    let half = coeffs.len() / 2;
    let mut n_max = 0;
    for k in 0..=half {
        if coeffs[half + k].norm() >= TRUNCATION * scale.max(1.0)
            || coeffs[half - k].norm() >= TRUNCATION * scale.max(1.0)
        {
            n_max = k;
        }
    }
    let kept = coeffs[half - n_max..=half + n_max].to_vec();
    PeriodicCoefficients { n_max, coeffs: kept }
}

/// F̃(Ω) = ∫ f(t) e^{iΩt} dt of a tabulated transient, integrating the cubic
/// interpolant exactly on every segment.
pub fn fourier_transform_transient(f: &ComplexTable, omegas: &[f64]) -> Result<ComplexTable> {
    let peak = f.max_abs();
    if peak > 0.0 {
        let v = f.values();
        let end = v[0].norm().max(v[v.len() - 1].norm());
        if end >= 1e-6 * peak {
            return Err(Error::InsufficientDecay { ratio: end / peak });
        }
    }
    let values = omegas
        .iter()
        .map(|&w| f.integrate_exp_full(Complex64::new(0.0, w)))
        .collect();
    ComplexTable::new(omegas.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function() {
        let c = fourier_coeffs_periodic(|_| Complex64::new(1.0, 0.0), 2.0).unwrap();
        assert_eq!(c.n_max, 0);
        assert!((c.get(0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn cosine() {
        let period = 0.7;
        let w0 = std::f64::consts::PI / period;
        let c = fourier_coeffs_periodic(|t| Complex64::new((2.0 * w0 * t).cos(), 0.0), period)
            .unwrap();
        assert!((c.get(1) - 0.5).norm() < 1e-14);
        assert!((c.get(-1) - 0.5).norm() < 1e-14);
        assert!(c.get(0).norm() < 1e-14);
        assert!(c.get(2).norm() < 1e-14);
    }

    #[test]
    fn rejects_slow_decay() {
        let grid = ComplexTable::uniform_grid(-1.0, 1.0, 11);
        let t = ComplexTable::from_fn(grid, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            fourier_transform_transient(&t, &[0.0]),
            Err(Error::InsufficientDecay { .. })
        ));
    }

    #[test]
    fn zero_transient() {
        let grid = ComplexTable::uniform_grid(-1.0, 1.0, 11);
        let t = ComplexTable::from_fn(grid, |_| Complex64::new(0.0, 0.0)).unwrap();
        let ft = fourier_transform_transient(&t, &[0.0, 3.0]).unwrap();
        assert!(ft.values().iter().all(|v| v.norm() == 0.0));
    }
}
