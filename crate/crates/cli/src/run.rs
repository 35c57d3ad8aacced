//! Scenario execution: coupler → Z̃₁ → radiation → radar, and output files.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use eqradar_core::coupler::{rc_expansion, CouplerModel, CouplerParams};
use eqradar_core::decoherence::{solve_elastic_amplitude, SolverSettings};
use eqradar_core::radar::{
    contrast_sweep, maximize_periodic, optimal_tau2, FilterMode, RadarEvaluator, RadarResult, ScanVariable, SweepTable,
};
use eqradar_core::radiation::{
    fock_overlap_x, heat_current, squeezing_from_db, Drive, FranckCondonFactor, LorentzianMode, RadiationState,
    SqueezedNarrowband, Tone,
};
use eqradar_core::units::{Units, R_K};
use eqradar_core::Complex64;
use log::info;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{grid, AnalysisSpec, CouplerSpec, FilterSpec, RadiationSpec, RunConfig, Scenario, SweepVariable};
use crate::error::CliError;
use crate::svg;
use crate::tables;

/// Default frequency step of the Z̃₁ solve, in v_F/l.
const DEFAULT_STEP: f64 = 0.02;
/// Default ω_max·τ_e,min; Leviton weights e^{−2ωτ_e} fall to 4·10⁻¹⁸ there.
const DEFAULT_RANGE: f64 = 20.0;
/// Emission times sampled per period before refining a maximum.
const PERIOD_SAMPLES: usize = 200;

#[derive(Debug, Clone)]
pub struct Outputs {
    pub csv: Vec<PathBuf>,
    pub svg: Option<PathBuf>,
    pub manifest: PathBuf,
}

/// One finished scenario: CSV text plus diagnostics for the manifest.
pub struct ScenarioOutput {
    pub csv: String,
    pub diagnostics: Value,
}

/// Runs every scenario of `cfg`; relative data paths are resolved against `base_dir`.
pub fn execute(cfg: &RunConfig, base_dir: &Path, out: &Path, plot: bool) -> Result<Outputs, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let units = Units::new(cfg.units.length_m, cfg.units.fermi_velocity_m_per_s)?;
    let mut csv_paths = Vec::new();
    let mut records = Vec::new();
    for sc in &cfg.scenarios {
        info!("scenario {}", sc.name);
        let result = run_scenario(cfg, sc, units, base_dir)?;
        let path = out.join(format!("{}.csv", sc.name));
        write(&path, &result.csv)?;
        records.push(json!({ "name": sc.name, "csv": file_name(&path), "diagnostics": result.diagnostics }));
        csv_paths.push(path);
    }
    let svg_path = if plot {
        let spec = cfg.plot.clone().unwrap_or_else(|| default_plot(cfg));
        let series = cfg
            .scenarios
            .iter()
            .zip(&csv_paths)
            .map(|(sc, p)| svg::read_series(p, &sc.name, &spec.y, spec.one_minus))
            .collect::<Result<Vec<_>, _>>()?;
        let x_label = spec.x_label.clone().unwrap_or_else(|| "scan value".into());
        let y_label = spec.y_label.clone().unwrap_or_else(|| spec.y.clone());
        let text = svg::render(&series, &cfg.name, &x_label, &y_label, spec.log_x)?;
        let p = out.join(format!("{}.svg", cfg.name));
        write(&p, &text)?;
        Some(p)
    } else {
        None
    };
    let manifest = json!({
        "tool": "eqradar",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "svg": svg_path.as_deref().map(file_name),
        "scenarios": records,
    });
    let manifest_path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    write(&manifest_path, &(text + "\n"))?;
    Ok(Outputs { csv: csv_paths, svg: svg_path, manifest: manifest_path })
}

fn default_plot(cfg: &RunConfig) -> crate::config::PlotSpec {
    let y = match cfg.scenarios[0].analysis {
        AnalysisSpec::ContrastSweep { .. } => "abs_x",
        AnalysisSpec::CouplerSpectrum { .. } => "arg_s_bb",
        AnalysisSpec::HeatCurrent { .. } => "heat_current_w",
        AnalysisSpec::SqueezingExtrema { .. } => "max_abs_f",
    };
    crate::config::PlotSpec { y: y.into(), one_minus: false, log_x: false, x_label: None, y_label: None }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn run_scenario(cfg: &RunConfig, sc: &Scenario, units: Units, base: &Path) -> Result<ScenarioOutput, CliError> {
    let model = coupler(&sc.coupler, units, base)?;
    let header = format!(
        "eqradar {} run {} scenario {}\nl = {} m, v_F = {} m/s, l/v_F = {} s\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.name,
        sc.name,
        units.l,
        units.v_f,
        units.time(),
        serde_json::to_string(sc).map_err(|e| CliError::Io(e.to_string()))?
    );
    match &sc.analysis {
        AnalysisSpec::ContrastSweep { .. } => contrast(cfg, sc, &model, units, base, &header),
        AnalysisSpec::CouplerSpectrum { omega_max_rad_per_s, points } => {
            spectrum(&model, units, *omega_max_rad_per_s, *points, &header)
        }
        AnalysisSpec::HeatCurrent { start_s, stop_s, points } => {
            heat(sc, &model, units, base, (*start_s, *stop_s, *points), &header)
        }
        AnalysisSpec::SqueezingExtrema { start_db, stop_db, points } => {
            extrema(sc, &model, units, base, (*start_db, *stop_db, *points), &header)
        }
    }
}

pub fn coupler(spec: &CouplerSpec, units: Units, base: &Path) -> Result<CouplerModel, CliError> {
    Ok(match spec {
        CouplerSpec::CounterPropagating { alpha } => {
            CouplerModel::CounterPropagating(CouplerParams::new(units.l, units.v_f, *alpha)?)
        }
        CouplerSpec::TopGate { alpha } => CouplerModel::TopGate(CouplerParams::new(units.l, units.v_f, *alpha)?),
        CouplerSpec::DirectDrive => CouplerModel::DirectDrive(units),
        CouplerSpec::Tabulated { path } => CouplerModel::Tabulated(tables::read_coupler(&base.join(path), units)?),
    })
}

/// Radiation in internal units; `omega0` (v_F/l) and `db` override the spec.
pub fn radiation(
    spec: &RadiationSpec,
    model: &CouplerModel,
    units: Units,
    base: &Path,
    omega0: Option<f64>,
    db: Option<f64>,
) -> Result<RadiationState, CliError> {
    Ok(match spec {
        RadiationSpec::Vacuum => RadiationState::Vacuum,
        RadiationSpec::Classical { offset_v, tones } => RadiationState::ClassicalDrive(Drive::Harmonic {
            offset: offset_v / units.voltage(),
            tones: tones
                .iter()
                .map(|t| Tone {
                    omega: units.to_x(TAU * t.frequency_hz),
                    amplitude: t.amplitude_v / units.voltage(),
                    phase: t.phase_rad,
                })
                .collect(),
        }),
        RadiationSpec::ClassicalSeries { path } => {
            RadiationState::ClassicalDrive(tables::read_drive(&base.join(path), units)?)
        }
        RadiationSpec::Squeezed { omega0_rad_per_s, quality_factor, squeezing_db, squeezing_phase_rad, phi0_rad, s_ba_override } => {
            let x0 = omega0.unwrap_or_else(|| units.to_x(*omega0_rad_per_s));
            let z = Complex64::from_polar(squeezing_from_db(db.unwrap_or(*squeezing_db)), *squeezing_phase_rad);
            let mut s = match s_ba_override {
                Some([re, im]) => SqueezedNarrowband::new(x0, *quality_factor, z, Complex64::new(*re, *im))?,
                None => SqueezedNarrowband::from_model(model, x0, *quality_factor, z)?,
            };
            if let Some(p) = phi0_rad {
                s = s.with_phi0(*p);
            }
            RadiationState::SqueezedNarrowband(s)
        }
        RadiationSpec::Fock { n, omega0_rad_per_s, gamma0_per_s } => {
            let x0 = omega0.unwrap_or_else(|| units.to_x(*omega0_rad_per_s));
            RadiationState::FockLorentzian { n: *n, mode: LorentzianMode::new(x0, units.to_x(*gamma0_per_s))? }
        }
        RadiationSpec::FockMixture { probabilities, omega0_rad_per_s, gamma0_per_s } => {
            let x0 = omega0.unwrap_or_else(|| units.to_x(*omega0_rad_per_s));
            RadiationState::FockMixture {
                probabilities: probabilities.clone(),
                mode: LorentzianMode::new(x0, units.to_x(*gamma0_per_s))?,
            }
        }
    })
}

fn scan_variable(v: SweepVariable) -> ScanVariable {
    match v {
        SweepVariable::EmissionTime => ScanVariable::EmissionTime,
        SweepVariable::TauE => ScanVariable::TauE,
        SweepVariable::Tau2 => ScanVariable::Tau2,
        SweepVariable::Squeezing => ScanVariable::Squeezing,
        SweepVariable::Omega0 => ScanVariable::Omega0,
    }
}

/// SI value of one internal unit of the scanned quantity.
fn scan_scale(v: SweepVariable, units: Units) -> f64 {
    match v {
        SweepVariable::EmissionTime | SweepVariable::TauE | SweepVariable::Tau2 => units.time(),
        SweepVariable::Squeezing => 1.0,
        SweepVariable::Omega0 => units.frequency(),
    }
}

/// Evaluates at `t_e`, or at the emission time maximizing |relative| over one period.
fn evaluate(ev: &RadarEvaluator, fc: &FranckCondonFactor, t_e: f64, maximize: bool) -> eqradar_core::Result<RadarResult> {
    let period = match fc.harmonics() {
        Some((w0, _)) if maximize && w0 > 0.0 => std::f64::consts::PI / w0,
        _ => return ev.at(t_e),
    };
    let (t, _) = maximize_periodic(|t| Ok(ev.at(t)?.relative.norm()), period, PERIOD_SAMPLES)?;
    ev.at(t)
}

fn contrast(
    cfg: &RunConfig,
    sc: &Scenario,
    model: &CouplerModel,
    units: Units,
    base: &Path,
    header: &str,
) -> Result<ScenarioOutput, CliError> {
    let AnalysisSpec::ContrastSweep { variable, start, stop, points, spacing, emission_time_s, maximize_over_emission_time, .. } =
        &sc.analysis
    else {
        unreachable!("contrast called for a different analysis")
    };
    let probe = sc.probe.expect("validated: contrast sweeps have a probe");
    let scale = scan_scale(*variable, units);
    let values: Vec<f64> = grid(*start, *stop, *points, *spacing).into_iter().map(|v| v / scale).collect();
    let tau_e0 = units.to_tau(probe.tau_e_s);
    let tau_e_min = if *variable == SweepVariable::TauE { values.iter().copied().fold(f64::INFINITY, f64::min) } else { tau_e0 };
    let x_max = cfg.solver.omega_max_rad_per_s.map_or(DEFAULT_RANGE / tau_e_min, |w| units.to_x(w));
    let step = cfg.solver.omega_step_rad_per_s.map_or(DEFAULT_STEP, |w| units.to_x(w));
    let mut settings = SolverSettings::new(x_max, step);
    if cfg.solver.verify_convergence {
        settings = settings.verified();
    }
    let z = solve_elastic_amplitude(model, settings)?;
    info!("solved Z on [0, {x_max}] with step {step}; tau1 = {}", z.tau1);
    let mode = match probe.filter {
        FilterSpec::Exact => FilterMode::Exact,
        FilterSpec::Adiabatic => FilterMode::Adiabatic,
    };
    let fixed_tau2 = probe.tau2_s.map(|t| units.to_tau(t));
    let tau2_for = |tau_e: f64| fixed_tau2.map_or_else(|| optimal_tau2(&z, tau_e), Ok);
    let t_e = units.to_tau(*emission_time_s);
    let maximize = *maximize_over_emission_time;
    let var = scan_variable(*variable);

    let table: SweepTable = match variable {
        SweepVariable::EmissionTime => {
            let fc = radiation(&sc.radiation, model, units, base, None, None)?.franck_condon(model)?;
            let ev = RadarEvaluator::new(&z, tau_e0, tau2_for(tau_e0)?, &fc, mode)?;
            contrast_sweep(var, &values, |t| ev.at(t))?
        }
        SweepVariable::TauE => {
            let fc = radiation(&sc.radiation, model, units, base, None, None)?.franck_condon(model)?;
            contrast_sweep(var, &values, |te| {
                let ev = RadarEvaluator::new(&z, te, tau2_for(te)?, &fc, mode)?;
                evaluate(&ev, &fc, t_e, maximize)
            })?
        }
        SweepVariable::Tau2 => {
            let fc = radiation(&sc.radiation, model, units, base, None, None)?.franck_condon(model)?;
            contrast_sweep(var, &values, |t2| {
                let ev = RadarEvaluator::new(&z, tau_e0, t2, &fc, mode)?;
                evaluate(&ev, &fc, t_e, maximize)
            })?
        }
        SweepVariable::Squeezing | SweepVariable::Omega0 => {
            let tau2 = tau2_for(tau_e0)?;
            let states = values
                .iter()
                .map(|&v| match variable {
                    SweepVariable::Squeezing => radiation(&sc.radiation, model, units, base, None, Some(v)),
                    _ => radiation(&sc.radiation, model, units, base, Some(v), None),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let index: Vec<f64> = (0..values.len()).map(|k| k as f64).collect();
            let mut t = contrast_sweep(var, &index, |k| {
                let fc = states[k as usize].franck_condon(model)?;
                let ev = RadarEvaluator::new(&z, tau_e0, tau2, &fc, mode)?;
                evaluate(&ev, &fc, t_e, maximize)
            })?;
            for (p, &v) in t.points.iter_mut().zip(&values) {
                p.value = v;
            }
            t
        }
    };

    let mut csv = Vec::new();
    let comment = format!(
        "{header}\nscan {} ({}); tau1 = {} s; omega_max = {} rad/s; omega_step = {} rad/s",
        var.name(),
        variable.unit(),
        units.from_tau(z.tau1),
        units.from_x(x_max),
        units.from_x(step)
    );
    table.write_csv(&mut csv, &comment, scale)?;
    let csv = String::from_utf8(csv).map_err(|e| CliError::Io(e.to_string()))?;
    let pair = |p: Option<(f64, f64)>| p.map(|(v, y)| json!([v * scale, y]));
    let diagnostics = json!({
        "rows": table.points.len(),
        "tau1_s": units.from_tau(z.tau1),
        "omega_max_rad_per_s": units.from_x(x_max),
        "omega_step_rad_per_s": units.from_x(step),
        "refinement_delta": z.refinement_delta,
        "tau2_s": fixed_tau2.map(|t| units.from_tau(t)),
        "max_relative": pair(table.max_relative()),
        "min_relative": pair(table.min_relative()),
        "max_abs_x": pair(table.max_abs_x()),
        "max_baseline": pair(table.max_baseline()),
    });
    Ok(ScenarioOutput { csv, diagnostics })
}

fn spectrum(model: &CouplerModel, units: Units, omega_max: f64, points: usize, header: &str) -> Result<ScenarioOutput, CliError> {
    let rc = rc_expansion(model)?;
    let c = rc.c_mu / units.quantum_capacitance();
    let r = rc.r / R_K;
    let x_max = units.to_x(omega_max);
    let mut csv = String::new();
    for line in header.lines() {
        writeln!(csv, "# {line}").unwrap();
    }
    writeln!(csv, "# RC fit: C_mu = {} F, R = {} ohm", rc.c_mu, rc.r).unwrap();
    writeln!(
        csv,
        "x_over_2pi,s_bb_re,s_bb_im,s_ba_re,s_ba_im,arg_s_bb,abs_one_minus_s_bb,theta,abs_s_ba_sq,rc_arg_s_bb,rc_abs_one_minus_s_bb,rc_theta,rc_abs_s_ba_sq"
    )
    .unwrap();
    for k in 0..points {
        let x = x_max * k as f64 / (points - 1) as f64;
        let s = model.s_matrix(x)?;
        let rky = Complex64::new(0.0, -c * x) / Complex64::new(1.0, -r * c * x);
        let one = Complex64::new(1.0, 0.0);
        let cols = [
            x / TAU,
            s.s_bb.re,
            s.s_bb.im,
            s.s_ba.re,
            s.s_ba.im,
            s.s_bb.arg(),
            (one - s.s_bb).norm(),
            (one - 2.0 * s.s_ba).arg(),
            s.s_ba.norm_sqr(),
            (one - rky).arg(),
            rky.norm(),
            (one - 2.0 * rky).arg(),
            rky.norm_sqr(),
        ];
        writeln!(csv, "{}", cols.map(num).join(",")).unwrap();
    }
    let diagnostics = json!({ "rows": points, "c_mu_f": rc.c_mu, "r_ohm": rc.r });
    Ok(ScenarioOutput { csv, diagnostics })
}

fn heat(
    sc: &Scenario,
    model: &CouplerModel,
    units: Units,
    base: &Path,
    (start, stop, points): (f64, f64, usize),
    header: &str,
) -> Result<ScenarioOutput, CliError> {
    let state = radiation(&sc.radiation, model, units, base, None, None)?;
    let mode = match &state {
        RadiationState::FockLorentzian { mode, .. } | RadiationState::FockMixture { mode, .. } => *mode,
        _ => unreachable!("validated: heat_current needs Fock radiation"),
    };
    let watts = units.energy() * units.frequency();
    let times = grid(start, stop, points, crate::config::Spacing::Linear);
    let rows = times
        .par_iter()
        .map(|&t| {
            let tau = units.to_tau(t);
            Ok([t, heat_current(&state, tau)? * watts, fock_overlap_x(model, &mode, tau)?])
        })
        .collect::<eqradar_core::Result<Vec<_>>>()?;
    let mut csv = String::new();
    for line in header.lines() {
        writeln!(csv, "# {line}").unwrap();
    }
    writeln!(csv, "# mean photon number {}", state.mean_photon_number().unwrap_or(0.0)).unwrap();
    writeln!(csv, "time_s,heat_current_w,x_overlap").unwrap();
    for r in &rows {
        writeln!(csv, "{}", r.map(num).join(",")).unwrap();
    }
    let energy = state.mean_photon_number().unwrap_or(0.0) * mode.omega0 * units.energy();
    Ok(ScenarioOutput { csv, diagnostics: json!({ "rows": points, "emitted_energy_j": energy }) })
}

fn extrema(
    sc: &Scenario,
    model: &CouplerModel,
    units: Units,
    base: &Path,
    (start, stop, points): (f64, f64, usize),
    header: &str,
) -> Result<ScenarioOutput, CliError> {
    let mut csv = String::new();
    for line in header.lines() {
        writeln!(csv, "# {line}").unwrap();
    }
    writeln!(csv, "squeezing_db,z_abs,lambda,min_abs_f,max_abs_f").unwrap();
    for db in grid(start, stop, points, crate::config::Spacing::Linear) {
        let RadiationState::SqueezedNarrowband(s) = radiation(&sc.radiation, model, units, base, None, Some(db))? else {
            unreachable!("validated: squeezing_extrema needs squeezed radiation")
        };
        let (lo, hi) = s.extrema();
        writeln!(csv, "{}", [db, s.z.norm(), s.lambda(), lo, hi].map(num).join(",")).unwrap();
    }
    Ok(ScenarioOutput { csv, diagnostics: json!({ "rows": points }) })
}
