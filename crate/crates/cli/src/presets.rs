//! Built-in scenarios reproducing the published figures.

use std::f64::consts::PI;

use crate::config::{
    AnalysisSpec, CouplerSpec, FilterSpec, PlotSpec, ProbeSpec, RadiationSpec, RunConfig, Scenario, SolverSpec,
    Spacing, SweepVariable, UnitsSpec,
};
use crate::error::CliError;

pub const NAMES: &[&str] = &["fig4", "fig6", "fig7", "fig8", "fig10", "fig12", "squeeze-min", "emp-heat"];

const L: f64 = 10e-6;
const V_F: f64 = 1e5;
/// l/v_F for the default sample (s).
const T0: f64 = L / V_F;

fn units() -> UnitsSpec {
    UnitsSpec { length_m: L, fermi_velocity_m_per_s: V_F }
}

fn cp(alpha: f64) -> CouplerSpec {
    CouplerSpec::CounterPropagating { alpha }
}

fn plot(y: &str, x_label: &str, y_label: &str) -> Option<PlotSpec> {
    Some(PlotSpec {
        y: y.into(),
        one_minus: false,
        log_x: false,
        x_label: Some(x_label.into()),
        y_label: Some(y_label.into()),
    })
}

fn label(v: f64) -> String {
    format!("{v}").replace('.', "p")
}

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let cfg = match name {
        "fig4" => fig4(),
        "fig6" => squeezing_figure("fig6", 15e-12),
        "fig7" => squeezing_figure("fig7", 2.5e-12),
        "fig8" => fig8(),
        "fig10" => spectrum_figure("fig10", true),
        "fig12" => spectrum_figure("fig12", false),
        "squeeze-min" => squeeze_min(),
        "emp-heat" => emp_heat(),
        _ => {
            return Err(CliError::Schema(format!("unknown preset {name:?}; known: {}", NAMES.join(", "))));
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Vacuum contrast max_τ₂|X| against τ_e for α = 1/5, 1, 15.
fn fig4() -> RunConfig {
    let scenarios = [0.2, 1.0, 15.0]
        .into_iter()
        .map(|alpha| Scenario {
            name: format!("alpha_{}", label(alpha)),
            coupler: cp(alpha),
            probe: Some(ProbeSpec { tau_e_s: 0.1 * T0, tau2_s: None, filter: FilterSpec::Exact }),
            radiation: RadiationSpec::Vacuum,
            analysis: AnalysisSpec::ContrastSweep {
                variable: SweepVariable::TauE,
                unit: "s".into(),
                start: 0.05 * T0,
                stop: 2.0 * T0,
                points: 25,
                spacing: Spacing::Log,
                emission_time_s: 0.0,
                maximize_over_emission_time: false,
            },
        })
        .collect();
    RunConfig {
        name: "fig4".into(),
        units: units(),
        solver: SolverSpec::default(),
        scenarios,
        plot: Some(PlotSpec { log_x: true, ..plot("abs_x", "tau_e (s)", "|X+dc|").unwrap() }),
    }
}

/// Contrast against emission time for 1.25 and 3 dB squeezing at ω₀l/v_F = 1, 2, π.
fn squeezing_figure(name: &str, tau_e: f64) -> RunConfig {
    let mut scenarios = Vec::new();
    for (tag, x0) in [("1", 1.0), ("2", 2.0), ("pi", PI)] {
        for db in [1.25, 3.0] {
            scenarios.push(Scenario {
                name: format!("w0_{tag}_db_{}", label(db)),
                coupler: cp(0.2),
                probe: Some(ProbeSpec { tau_e_s: tau_e, tau2_s: None, filter: FilterSpec::Exact }),
                radiation: RadiationSpec::Squeezed {
                    omega0_rad_per_s: x0 / T0,
                    quality_factor: 5.0,
                    squeezing_db: db,
                    squeezing_phase_rad: 0.0,
                    phi0_rad: None,
                    s_ba_override: None,
                },
                analysis: AnalysisSpec::ContrastSweep {
                    variable: SweepVariable::EmissionTime,
                    unit: "s".into(),
                    start: 0.0,
                    stop: 2.0 * T0,
                    points: 201,
                    spacing: Spacing::Linear,
                    emission_time_s: 0.0,
                    maximize_over_emission_time: false,
                },
            });
        }
    }
    RunConfig {
        name: name.into(),
        units: units(),
        solver: SolverSpec { omega_step_rad_per_s: Some(0.01 / T0), ..SolverSpec::default() },
        scenarios,
        plot: plot("abs_x", "t_e (s)", "|X+dc|"),
    }
}

/// Relative contrast decrease for a single EMP against emission time.
fn fig8() -> RunConfig {
    let mut scenarios = Vec::new();
    for alpha in [0.1, 15.0] {
        for x0 in [2.0, 5.5, 10.0] {
            scenarios.push(Scenario {
                name: format!("alpha_{}_w0_{}", label(alpha), label(x0)),
                coupler: cp(alpha),
                probe: Some(ProbeSpec { tau_e_s: 10e-12, tau2_s: None, filter: FilterSpec::Exact }),
                radiation: RadiationSpec::Fock { n: 1, omega0_rad_per_s: x0 / T0, gamma0_per_s: 1e9 },
                analysis: AnalysisSpec::ContrastSweep {
                    variable: SweepVariable::EmissionTime,
                    unit: "s".into(),
                    start: -6.0 * T0,
                    stop: 24.0 * T0,
                    points: 301,
                    spacing: Spacing::Linear,
                    emission_time_s: 0.0,
                    maximize_over_emission_time: false,
                },
            });
        }
    }
    RunConfig {
        name: "fig8".into(),
        units: units(),
        solver: SolverSpec::default(),
        scenarios,
        plot: Some(PlotSpec { one_minus: true, ..plot("relative_abs", "t_e (s)", "1 - |relative|").unwrap() }),
    }
}

/// Coupler phase plots for α = 1/5 and 15: Arg t(ω) of the top gate or ϑ(ω) of the counter-propagating pair.
fn spectrum_figure(name: &str, top_gate: bool) -> RunConfig {
    let scenarios = [0.2, 15.0]
        .into_iter()
        .map(|alpha| Scenario {
            name: format!("alpha_{}", label(alpha)),
            coupler: if top_gate { CouplerSpec::TopGate { alpha } } else { cp(alpha) },
            probe: None,
            radiation: RadiationSpec::Vacuum,
            analysis: AnalysisSpec::CouplerSpectrum { omega_max_rad_per_s: 2.0 * PI * 3.0 / T0, points: 601 },
        })
        .collect();
    let (y, y_label) = if top_gate { ("arg_s_bb", "Arg t") } else { ("theta", "theta") };
    RunConfig { name: name.into(), units: units(), solver: SolverSpec::default(), scenarios, plot: plot(y, "omega l / 2 pi v_F", y_label) }
}

/// Closed-form extrema of |F| for Q₀ = 5 and |S_ba|² = 1 against squeezing.
fn squeeze_min() -> RunConfig {
    RunConfig {
        name: "squeeze-min".into(),
        units: units(),
        solver: SolverSpec::default(),
        scenarios: vec![Scenario {
            name: "q0_5".into(),
            coupler: cp(0.2),
            probe: None,
            radiation: RadiationSpec::Squeezed {
                omega0_rad_per_s: 2.0 / T0,
                quality_factor: 5.0,
                squeezing_db: 0.0,
                squeezing_phase_rad: 0.0,
                phi0_rad: Some(0.0),
                s_ba_override: Some([1.0, 0.0]),
            },
            analysis: AnalysisSpec::SqueezingExtrema { start_db: 0.0, stop_db: 6.0, points: 61 },
        }],
        plot: plot("max_abs_f", "squeezing (dB)", "max |F|"),
    }
}

/// Heat current and overlap x(t) of a single EMP with γ₀ = 10⁹ s⁻¹.
fn emp_heat() -> RunConfig {
    RunConfig {
        name: "emp-heat".into(),
        units: units(),
        solver: SolverSpec::default(),
        scenarios: vec![Scenario {
            name: "w0_2".into(),
            coupler: cp(0.1),
            probe: None,
            radiation: RadiationSpec::Fock { n: 1, omega0_rad_per_s: 2.0 / T0, gamma0_per_s: 1e9 },
            analysis: AnalysisSpec::HeatCurrent { start_s: -1e-9, stop_s: 10e-9, points: 221 },
        }],
        plot: plot("heat_current_w", "t (s)", "heat current (W)"),
    }
}
