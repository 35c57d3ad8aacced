//! Tabulated inputs: coupler scattering matrices and sampled drive voltages.

use std::path::Path;

use eqradar_core::coupler::TabulatedCoupler;
use eqradar_core::radiation::Drive;
use eqradar_core::units::Units;
use eqradar_core::Complex64;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplerRow {
    omega_rad_per_s: f64,
    s_bb_re: f64,
    s_bb_im: f64,
    s_ba_re: f64,
    s_ba_im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriveRow {
    time_s: f64,
    voltage_v: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let rows = reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    if rows.len() < 2 {
        return Err(CliError::Schema(format!("{}: need at least two rows", path.display())));
    }
    Ok(rows)
}

/// Columns `omega_rad_per_s,s_bb_re,s_bb_im,s_ba_re,s_ba_im`; the grid must start at ω = 0.
pub fn read_coupler(path: &Path, units: Units) -> Result<TabulatedCoupler, CliError> {
    let rows: Vec<CouplerRow> = read_rows(path)?;
    let omega: Vec<f64> = rows.iter().map(|r| r.omega_rad_per_s).collect();
    let s_bb = rows.iter().map(|r| Complex64::new(r.s_bb_re, r.s_bb_im)).collect();
    let s_ba = rows.iter().map(|r| Complex64::new(r.s_ba_re, r.s_ba_im)).collect();
    TabulatedCoupler::new(units, &omega, s_bb, s_ba).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

/// Columns `time_s,voltage_v`; the pulse is taken as zero outside the table.
pub fn read_drive(path: &Path, units: Units) -> Result<Drive, CliError> {
    let rows: Vec<DriveRow> = read_rows(path)?;
    let t = rows.iter().map(|r| units.to_tau(r.time_s)).collect();
    let v = rows.iter().map(|r| r.voltage_v / units.voltage()).collect();
    Drive::series(t, v).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}
