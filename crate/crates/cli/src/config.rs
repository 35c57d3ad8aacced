//! Scenario files: JSON with SI quantities whose unit is part of every key.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub units: UnitsSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    pub scenarios: Vec<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PlotSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSpec {
    pub length_m: f64,
    pub fermi_velocity_m_per_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    /// Defaults to 20/τ_e,min in units of v_F/l.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max_rad_per_s: Option<f64>,
    /// Defaults to 0.02 v_F/l.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_step_rad_per_s: Option<f64>,
    #[serde(default)]
    pub verify_convergence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub coupler: CouplerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSpec>,
    #[serde(default)]
    pub radiation: RadiationSpec,
    pub analysis: AnalysisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplerSpec {
    CounterPropagating { alpha: f64 },
    TopGate { alpha: f64 },
    DirectDrive,
    /// CSV with columns omega_rad_per_s,s_bb_re,s_bb_im,s_ba_re,s_ba_im.
    Tabulated { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub tau_e_s: f64,
    /// Omitted: the τ₂ maximizing the vacuum contrast.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau2_s: Option<f64>,
    #[serde(default)]
    pub filter: FilterSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterSpec {
    #[default]
    Exact,
    Adiabatic,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiationSpec {
    #[default]
    Vacuum,
    Classical {
        #[serde(default)]
        offset_v: f64,
        tones: Vec<ToneSpec>,
    },
    /// CSV with columns time_s,voltage_v.
    ClassicalSeries { path: String },
    Squeezed {
        omega0_rad_per_s: f64,
        quality_factor: f64,
        squeezing_db: f64,
        #[serde(default)]
        squeezing_phase_rad: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi0_rad: Option<f64>,
        /// Replaces S_ba(ω₀) of the coupler, as [re, im].
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s_ba_override: Option<[f64; 2]>,
    },
    Fock {
        n: u32,
        omega0_rad_per_s: f64,
        gamma0_per_s: f64,
    },
    FockMixture {
        probabilities: Vec<f64>,
        omega0_rad_per_s: f64,
        gamma0_per_s: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneSpec {
    pub frequency_hz: f64,
    pub amplitude_v: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisSpec {
    ContrastSweep {
        variable: SweepVariable,
        unit: String,
        start: f64,
        stop: f64,
        points: usize,
        #[serde(default)]
        spacing: Spacing,
        /// Emission time used when it is not the scanned variable.
        #[serde(default)]
        emission_time_s: f64,
        /// Report max over one radiation period of |relative| at each point.
        #[serde(default)]
        maximize_over_emission_time: bool,
    },
    CouplerSpectrum {
        omega_max_rad_per_s: f64,
        points: usize,
    },
    HeatCurrent {
        start_s: f64,
        stop_s: f64,
        points: usize,
    },
    SqueezingExtrema {
        start_db: f64,
        stop_db: f64,
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    EmissionTime,
    TauE,
    Tau2,
    Squeezing,
    Omega0,
}

impl SweepVariable {
    pub fn unit(self) -> &'static str {
        match self {
            Self::EmissionTime | Self::TauE | Self::Tau2 => "s",
            Self::Squeezing => "dB",
            Self::Omega0 => "rad/s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    /// CSV column drawn on the vertical axis.
    pub y: String,
    #[serde(default)]
    pub one_minus: bool,
    #[serde(default)]
    pub log_x: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_label: Option<String>,
}

pub fn grid(start: f64, stop: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let n = (points - 1) as f64;
    (0..points)
        .map(|k| {
            let s = k as f64 / n;
            match spacing {
                Spacing::Linear => start + (stop - start) * s,
                Spacing::Log => start * (stop / start).powf(s),
            }
        })
        .collect()
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Schema(msg));
        if !valid_name(&self.name) {
            return bad(format!("run name {:?} must be a non-empty [A-Za-z0-9_.-] string", self.name));
        }
        if !(positive(self.units.length_m) && positive(self.units.fermi_velocity_m_per_s)) {
            return bad("units.length_m and units.fermi_velocity_m_per_s must be positive".into());
        }
        for v in [self.solver.omega_max_rad_per_s, self.solver.omega_step_rad_per_s].into_iter().flatten() {
            if !positive(v) {
                return bad(format!("solver frequencies must be positive, got {v}"));
            }
        }
        if self.scenarios.is_empty() {
            return bad("at least one scenario is required".into());
        }
        let mut names: Vec<&str> = self.scenarios.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("scenario names must be unique".into());
        }
        self.scenarios.iter().try_for_each(Scenario::validate)
    }
}

impl Scenario {
    fn validate(&self) -> Result<(), CliError> {
        let ctx = |msg: String| Err(CliError::Schema(format!("scenario {:?}: {msg}", self.name)));
        if !valid_name(&self.name) {
            return ctx("name must be a non-empty [A-Za-z0-9_.-] string".into());
        }
        match self.coupler {
            CouplerSpec::CounterPropagating { alpha } | CouplerSpec::TopGate { alpha } if !(alpha >= 0.0 && alpha.is_finite()) => {
                return ctx(format!("alpha must be non-negative, got {alpha}"));
            }
            _ => {}
        }
        if let Some(p) = &self.probe {
            if !positive(p.tau_e_s) || p.tau2_s.is_some_and(|t| !t.is_finite()) {
                return ctx("probe.tau_e_s must be positive and tau2_s finite".into());
            }
        }
        match &self.analysis {
            AnalysisSpec::ContrastSweep { variable, unit, start, stop, points, spacing, maximize_over_emission_time, .. } => {
                if self.probe.is_none() {
                    return ctx("contrast_sweep needs a probe".into());
                }
                if unit != variable.unit() {
                    return ctx(format!("sweep over {variable:?} must use unit {:?}, got {unit:?}", variable.unit()));
                }
                if *points == 0 || !start.is_finite() || !stop.is_finite() {
                    return ctx("sweep needs finite bounds and at least one point".into());
                }
                if *spacing == Spacing::Log && !(*start > 0.0 && *stop > 0.0) {
                    return ctx("log spacing needs positive bounds".into());
                }
                if matches!(variable, SweepVariable::TauE | SweepVariable::Omega0) && !(*start > 0.0 && *stop > 0.0) {
                    return ctx("tau_e and omega0 sweeps need positive bounds".into());
                }
                let periodic = matches!(self.radiation, RadiationSpec::Squeezed { .. } | RadiationSpec::Classical { .. });
                if *maximize_over_emission_time && (!periodic || *variable == SweepVariable::EmissionTime) {
                    return ctx("maximize_over_emission_time needs periodic radiation and a non-time sweep".into());
                }
                let needs = match variable {
                    SweepVariable::Squeezing => matches!(self.radiation, RadiationSpec::Squeezed { .. }),
                    SweepVariable::Omega0 => matches!(
                        self.radiation,
                        RadiationSpec::Squeezed { .. } | RadiationSpec::Fock { .. } | RadiationSpec::FockMixture { .. }
                    ),
                    _ => true,
                };
                if !needs {
                    return ctx(format!("cannot sweep {variable:?} for this radiation kind"));
                }
            }
            AnalysisSpec::CouplerSpectrum { omega_max_rad_per_s, points } => {
                if !positive(*omega_max_rad_per_s) || *points < 2 {
                    return ctx("coupler_spectrum needs a positive omega_max and ≥ 2 points".into());
                }
            }
            AnalysisSpec::HeatCurrent { start_s, stop_s, points } => {
                if !matches!(self.radiation, RadiationSpec::Fock { .. } | RadiationSpec::FockMixture { .. }) {
                    return ctx("heat_current needs Fock radiation".into());
                }
                if !(stop_s > start_s) || *points < 2 {
                    return ctx("heat_current needs stop_s > start_s and ≥ 2 points".into());
                }
            }
            AnalysisSpec::SqueezingExtrema { start_db, stop_db, points } => {
                if !matches!(self.radiation, RadiationSpec::Squeezed { .. }) {
                    return ctx("squeezing_extrema needs squeezed radiation".into());
                }
                if !(start_db.is_finite() && stop_db.is_finite()) || *points == 0 {
                    return ctx("squeezing_extrema needs finite bounds and at least one point".into());
                }
            }
        }
        match &self.radiation {
            RadiationSpec::Squeezed { omega0_rad_per_s, quality_factor, .. } => {
                if !(positive(*omega0_rad_per_s) && positive(*quality_factor)) {
                    return ctx("squeezed radiation needs positive omega0 and quality factor".into());
                }
            }
            RadiationSpec::Fock { omega0_rad_per_s, gamma0_per_s, .. }
            | RadiationSpec::FockMixture { omega0_rad_per_s, gamma0_per_s, .. } => {
                if !(positive(*gamma0_per_s) && omega0_rad_per_s > gamma0_per_s) {
                    return ctx("Fock radiation needs 0 < gamma0 < omega0".into());
                }
            }
            RadiationSpec::Classical { tones, .. } => {
                if tones.iter().any(|t| !positive(t.frequency_hz)) {
                    return ctx("tone frequencies must be positive".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}
