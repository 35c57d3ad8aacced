//! Elastic single-electron scattering amplitude Z̃₁(ω) of the target branch.
//!
//! Z̃₁(ω) = 1 + ∫₀^ω B, where B solves the Volterra equation
//! ωB(ω) = D(ω) + ∫₀^ω B(ω′) D(ω − ω′) dω′ with D = S_bb − 1 and
//! B(0⁺) = S_bb′(0). [`Kernel::AsPrinted`] replaces D(ω − ω′) by D(ω′).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::coupler::CouplerModel;
use crate::error::{Error, Result};
use crate::numerics::ComplexTable;

/// Kernel of the Volterra equation for B(ω).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    /// ∫₀^ω B(ω′)(S_bb(ω − ω′) − 1) dω′.
    #[default]
    Convolution,
    /// ∫₀^ω B(ω′)(S_bb(ω′) − 1) dω′.
    AsPrinted,
}

/// Discretisation of the elastic-amplitude solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Upper end of the frequency table, in v_F/l.
    pub x_max: f64,
    /// Uniform frequency step.
    pub step: f64,
    pub kernel: Kernel,
    /// Also solve with step/2 and reject the result if the sup-norm change
    /// exceeds `convergence_tol`.
    pub verify_convergence: bool,
    pub convergence_tol: f64,
}

impl SolverSettings {
    pub fn new(x_max: f64, step: f64) -> Self {
        Self {
            x_max,
            step,
            kernel: Kernel::Convolution,
            verify_convergence: false,
            convergence_tol: 1e-6,
        }
    }

    /// ω_max = 40/(2τ_e) for the shortest Leviton width to be used.
    pub fn for_leviton(tau_e_min: f64, step: f64) -> Self {
        Self::new(20.0 / tau_e_min, step)
    }

    pub fn kernel(mut self, kernel: Kernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn verified(mut self) -> Self {
        self.verify_convergence = true;
        self
    }
}

/// Z̃₁ tabulated on a uniform grid of x = ωl/v_F.
#[derive(Debug, Clone)]
pub struct ElasticAmplitude {
    table: ComplexTable,
    b: Vec<Complex64>,
    /// Wigner-Smith delay τ₁ in l/v_F.
    pub tau1: f64,
    pub step: f64,
    pub kernel: Kernel,
    /// sup |Z_h − Z_{h/2}| when convergence was verified.
    pub refinement_delta: Option<f64>,
    source: Option<CouplerModel>,
}

impl ElasticAmplitude {
    pub fn table(&self) -> &ComplexTable {
        &self.table
    }

    /// B(ω) = dZ̃₁/dω on the grid.
    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn source_model(&self) -> Option<&CouplerModel> {
        self.source.as_ref()
    }

    pub fn x_max(&self) -> f64 {
        self.table.max()
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.table.eval(x)
    }

    /// Z̃₁(x) = e^{ixτ₁} (no decoherence), tabulated with the given step.
    pub fn ballistic(tau1: f64, x_max: f64, step: f64) -> Result<Self> {
        let i = Complex64::new(0.0, 1.0);
        Self::from_fn_with_derivative(
            |x| Complex64::from_polar(1.0, x * tau1),
            |x| i * tau1 * Complex64::from_polar(1.0, x * tau1),
            x_max,
            step,
        )
    }

    /// Tabulates an arbitrary amplitude; τ₁ is obtained by finite differences.
    pub fn from_fn(z: impl Fn(f64) -> Complex64, x_max: f64, step: f64) -> Result<Self> {
        let n = grid_points(x_max, step)?;
        let grid: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
        let values: Vec<Complex64> = grid.iter().map(|&x| z(x)).collect();
        let b = derivative_on_grid(&values, step);
        Self::assemble(grid, values, b, step)
    }

    /// Tabulates an amplitude together with its exact derivative.
    pub fn from_fn_with_derivative(
        z: impl Fn(f64) -> Complex64,
        dz: impl Fn(f64) -> Complex64,
        x_max: f64,
        step: f64,
    ) -> Result<Self> {
        let n = grid_points(x_max, step)?;
        let grid: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
        let values: Vec<Complex64> = grid.iter().map(|&x| z(x)).collect();
        let b: Vec<Complex64> = grid.iter().map(|&x| dz(x)).collect();
        Self::assemble(grid, values, b, step)
    }

    fn assemble(
        grid: Vec<f64>,
        values: Vec<Complex64>,
        b: Vec<Complex64>,
        step: f64,
    ) -> Result<Self> {
        let table = ComplexTable::with_slopes(grid, values, b.clone())?;
        let mut out = Self {
            table,
            b,
            tau1: 0.0,
            step,
            kernel: Kernel::Convolution,
            refinement_delta: None,
            source: None,
        };
        out.tau1 = wigner_smith_delay(&out)?;
        Ok(out)
    }

    /// ∫_from^∞ Z̃₁(x) e^{−qx} dx for Re q > 0.
    ///
    /// Beyond the table end, Z̃₁ is continued with its local logarithmic slope,
    /// which is exact for Z̃₁ = e^{ixτ₀}.
    pub fn laplace(&self, q: Complex64, from: f64) -> Result<Complex64> {
        let t = &self.table;
        let x_end = t.max();
        let z_end = *t.values().last().expect("non-empty table");
        let kappa = if z_end.norm() > 0.0 {
            let k = t.slopes()[t.len() - 1] / z_end;
            Complex64::new(k.re.min(0.0), k.im)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let tail = z_end * (-q * x_end).exp() / (q - kappa);
        if from >= x_end {
            let z_from = z_end * (kappa * (from - x_end)).exp();
            return Ok(z_from * (-q * from).exp() / (q - kappa));
        }
        Ok(t.integrate_exp(-q, from.max(0.0), x_end)? + tail)
    }

    /// σ_in(x) = 1 − |Z̃₁(x)|², clamped to [0, 1] within 10⁻⁹.
    pub fn inelastic_probability(&self, x: f64) -> Result<f64> {
        inelastic_probability(self, x)
    }
}

fn grid_points(x_max: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    if !(x_max > step && x_max.is_finite()) {
        return Err(Error::Domain(format!("x_max must exceed the step, got {x_max}")));
    }
    Ok((x_max / step).round() as usize)
}

fn derivative_on_grid(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    if n >= 3 {
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    }
    d
}

fn sample_d(model: &CouplerModel, n: usize, step: f64) -> Result<Vec<Complex64>> {
    (0..=n)
        .map(|k| Ok(model.s_bb(k as f64 * step)? - 1.0))
        .collect()
}

/// Trapezoidal product-integration stepping; D(0) = 0 makes every step explicit.
fn step_volterra(d: &[Complex64], b0: Complex64, h: f64, kernel: Kernel) -> Vec<Complex64> {
    let n = d.len() - 1;
    let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
    b[0] = b0;
    match kernel {
        Kernel::Convolution => {
            for m in 1..=n {
                let mut acc = 0.5 * b0 * d[m];
                for k in 1..m {
                    acc += b[k] * d[m - k];
                }
                b[m] = (d[m] + h * acc) / (m as f64 * h);
            }
        }
        Kernel::AsPrinted => {
            let mut running = 0.5 * b0 * d[0];
            for m in 1..=n {
                let w = m as f64 * h;
                b[m] = (d[m] + h * running) / (w - 0.5 * h * d[m]);
                running += b[m] * d[m];
            }
        }
    }
    b
}

fn cumulative_z(b: &[Complex64], h: f64) -> Vec<Complex64> {
    let mut z = Vec::with_capacity(b.len());
    let mut acc = Complex64::new(1.0, 0.0);
    z.push(acc);
    for w in b.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        z.push(acc);
    }
    z
}

fn check_bound(z: &[Complex64], h: f64) -> Result<()> {
    if let Some((k, v)) = z.iter().enumerate().find(|(_, v)| v.norm() > 1.0 + 1e-6) {
        return Err(Error::Solver(format!(
            "|Z̃₁| = {} exceeds 1 at x = {}",
            v.norm(),
            k as f64 * h
        )));
    }
    if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Solver("non-finite elastic amplitude".into()));
    }
    Ok(())
}

fn raw_solve(
    model: &CouplerModel,
    settings: &SolverSettings,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let h = settings.step;
    if h > TAU / 16.0 {
        return Err(Error::Precondition(format!(
            "step {h} resolves fewer than 16 points per 2π of phase"
        )));
    }
    let n = grid_points(settings.x_max, h)?;
    if n as f64 * h > model.x_max() + 1e-12 {
        return Err(Error::Precondition(format!(
            "coupler defined up to x = {}, solve requested up to {}",
            model.x_max(),
            n as f64 * h
        )));
    }
    let d = sample_d(model, n, h)?;
    let b0 = model.s_bb_slope_at_zero()?;
    let b = step_volterra(&d, b0, h, settings.kernel);
    let z = cumulative_z(&b, h);
    Ok((b, z))
}

/// Solves for Z̃₁ on [0, x_max] with the given step.
pub fn solve_elastic_amplitude(
    model: &CouplerModel,
    settings: SolverSettings,
) -> Result<ElasticAmplitude> {
    let h = settings.step;
    let (b, z) = raw_solve(model, &settings)?;
    check_bound(&z, h)?;
    let refinement_delta = if settings.verify_convergence {
        let fine = SolverSettings { step: 0.5 * h, ..settings };
        let (_, zf) = raw_solve(model, &fine)?;
        let delta = z
            .iter()
            .enumerate()
            .map(|(k, v)| (v - zf[2 * k]).norm())
            .fold(0.0, f64::max);
        if delta > settings.convergence_tol {
            return Err(Error::NonConvergence {
                value: format!("step halving from {h}"),
                estimate: delta,
            });
        }
        Some(delta)
    } else {
        None
    };
    let grid: Vec<f64> = (0..z.len()).map(|k| k as f64 * h).collect();
    let mut out = ElasticAmplitude {
        table: ComplexTable::with_slopes(grid, z, b.clone())?,
        b,
        tau1: 0.0,
        step: h,
        kernel: settings.kernel,
        refinement_delta,
        source: Some(model.clone()),
    };
    out.tau1 = wigner_smith_delay(&out)?;
    log::debug!(
        "elastic amplitude: {} points, step {h}, tau1 = {}",
        out.table.len(),
        out.tau1
    );
    Ok(out)
}

/// Successive substitution for the same discretised equation; converges to
/// the stepping solution. Returns the solution and the number of sweeps.
pub fn picard_elastic_amplitude(
    model: &CouplerModel,
    settings: SolverSettings,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, usize)> {
    let h = settings.step;
    let n = grid_points(settings.x_max, h)?;
    let d = sample_d(model, n, h)?;
    let b0 = model.s_bb_slope_at_zero()?;
    let mut b: Vec<Complex64> = (0..=n)
        .map(|m| if m == 0 { b0 } else { d[m] / (m as f64 * h) })
        .collect();
    for iter in 1..=max_iter {
        let mut next = vec![b0; n + 1];
        for m in 1..=n {
            let w = m as f64 * h;
            next[m] = match settings.kernel {
                Kernel::Convolution => {
                    let mut acc = 0.5 * b0 * d[m];
                    for k in 1..m {
                        acc += b[k] * d[m - k];
                    }
                    (d[m] + h * acc) / w
                }
                Kernel::AsPrinted => {
                    let mut acc = 0.5 * b0 * d[0] + 0.5 * b[m] * d[m];
                    for k in 1..m {
                        acc += b[k] * d[k];
                    }
                    (d[m] + h * acc) / w
                }
            };
        }
        let change = next
            .iter()
            .zip(&b)
            .map(|(a, c)| (a - c).norm())
            .fold(0.0, f64::max);
        b = next;
        if change < tol {
            return Ok((cumulative_z(&b, h), iter));
        }
    }
    Err(Error::Solver(format!("Picard iteration did not converge in {max_iter} sweeps")))
}

/// σ_in(x) = 1 − |Z̃₁(x)|².
pub fn inelastic_probability(z: &ElasticAmplitude, x: f64) -> Result<f64> {
    let s = 1.0 - z.eval(x)?.norm_sqr();
    if !(-1e-9..=1.0 + 1e-9).contains(&s) {
        return Err(Error::Solver(format!("σ_in = {s} outside [0, 1]")));
    }
    Ok(s.clamp(0.0, 1.0))
}

/// τ₁ = d arg Z̃₁/dω at ω = 0, by Richardson extrapolation of arg Z̃₁(x_k)/x_k
/// over the first grid nodes x_k = 2^k h.
pub fn wigner_smith_delay(z: &ElasticAmplitude) -> Result<f64> {
    let h = z.step;
    let values = z.table.values();
    let mut samples = Vec::new();
    let mut k = 1usize;
    while k < values.len() && samples.len() < 5 {
        samples.push((k as f64 * h, values[k].arg() / (k as f64 * h)));
        k *= 2;
    }
    if samples.len() < 2 {
        return Err(Error::Precondition("table too short for a delay estimate".into()));
    }
    // Neville extrapolation to x = 0 of a polynomial through the samples.
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut p: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in (level..n).rev() {
            p[i] = (xs[i] * p[i - 1] - xs[i - level] * p[i]) / (xs[i] - xs[i - level]);
        }
    }
    let tau = p[n - 1];
    if !tau.is_finite() {
        return Err(Error::Evaluation("noisy Wigner-Smith derivative".into()));
    }
    Ok(tau)
}

/// Z₁(τ) = ∫₀^∞ Z̃₁(x) e^{−ηx} e^{−ixτ} dx/2π.
///
/// Beyond the table end, Z̃₁ is continued with its local logarithmic slope,
/// which is exact for Z̃₁ = e^{ixτ₀}.
pub fn elastic_amplitude_time(
    z: &ElasticAmplitude,
    tau_grid: &[f64],
    eta: f64,
) -> Result<ComplexTable> {
    if !(eta > 0.0) {
        return Err(Error::Domain("regularisation η must be positive".into()));
    }
    let values = tau_grid
        .iter()
        .map(|&tau| Ok(z.laplace(Complex64::new(eta, tau), 0.0)? / TAU))
        .collect::<Result<Vec<_>>>()?;
    ComplexTable::new(tau_grid.to_vec(), values)
}

/// Writes `omega,z_re,z_im,sigma_in` rows (ω in rad/s given the frequency unit).
pub fn dump_csv(z: &ElasticAmplitude, frequency_unit: f64) -> String {
    let mut out = String::from("omega,z_re,z_im,sigma_in\n");
    for (x, v) in z.table.grid().iter().zip(z.table.values()) {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            x * frequency_unit,
            v.re,
            v.im,
            (1.0 - v.norm_sqr()).max(0.0)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupler::CouplerParams;

    fn cp(alpha: f64) -> CouplerModel {
        CouplerModel::CounterPropagating(CouplerParams::new(1e-5, 1e5, alpha).unwrap())
    }

    #[test]
    fn starts_at_one_and_stays_bounded() {
        let z = solve_elastic_amplitude(&cp(0.2), SolverSettings::new(40.0, 0.02)).unwrap();
        assert!((z.eval(0.0).unwrap() - 1.0).norm() < 1e-12);
        assert!(z.table().values().iter().all(|v| v.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn delay_matches_analytic_slope() {
        for alpha in [0.2, 1.0, 15.0] {
            let z = solve_elastic_amplitude(&cp(alpha), SolverSettings::new(10.0, 0.01)).unwrap();
            assert!((z.tau1 - 1.0 / (2.0 + alpha)).abs() < 1e-5, "{alpha}: {}", z.tau1);
        }
    }

    #[test]
    fn ballistic_delay() {
        let z = ElasticAmplitude::ballistic(0.37, 10.0, 0.01).unwrap();
        assert!((z.tau1 - 0.37).abs() < 1e-10);
        let one = ElasticAmplitude::from_fn(|_| Complex64::new(1.0, 0.0), 5.0, 0.01).unwrap();
        assert_eq!(one.tau1, 0.0);
    }

    #[test]
    fn rejects_coarse_steps() {
        assert!(solve_elastic_amplitude(&cp(1.0), SolverSettings::new(10.0, 0.5)).is_err());
    }

    #[test]
    fn inelastic_probability_range() {
        let z = solve_elastic_amplitude(&cp(1.0), SolverSettings::new(10.0, 0.01)).unwrap();
        assert_eq!(z.inelastic_probability(0.0).unwrap(), 0.0);
        let s = z.inelastic_probability(5.0).unwrap();
        assert!(s > 0.0 && s < 1.0);
        assert!(z.inelastic_probability(11.0).is_err());
    }

    #[test]
    fn time_kernel_of_unit_amplitude() {
        let z = ElasticAmplitude::from_fn(|_| Complex64::new(1.0, 0.0), 50.0, 0.05).unwrap();
        let eta = 1e-3;
        let k = elastic_amplitude_time(&z, &[-2.0, 0.0, 0.5], eta).unwrap();
        for (&tau, v) in k.grid().iter().zip(k.values()) {
            let want = 1.0 / (TAU * Complex64::new(eta, tau));
            assert!((v - want).norm() < 1e-9 * want.norm(), "{tau}: {v} vs {want}");
        }
    }
}
