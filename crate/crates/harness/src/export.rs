//! Re-export of persisted sweep rows for plotting tools.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::persist::{read_json, write_atomic, write_json};
use crate::sweep::{rows_csv, SweepReport, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    SvgData,
}

impl FromStr for ExportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            "svg-data" => Ok(ExportFormat::SvgData),
            other => Err(HarnessError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
            ExportFormat::SvgData => "svg-data",
        })
    }
}

#[derive(Serialize)]
struct Series {
    name: &'static str,
    points: Vec<[f64; 2]>,
}

/// Point series keyed on noise level; any plotting tool can draw them.
#[derive(Serialize)]
struct PlotData {
    x: &'static str,
    series: Vec<Series>,
    empirical_threshold: Option<f64>,
    theoretical_threshold: f64,
}

/// Writes `<run_dir>/export/{rows.csv | rows.json | series.json}` and
/// returns the path.
pub fn export(run_dir: &Path, format: ExportFormat) -> Result<PathBuf> {
    let rows_path = run_dir.join("rows.json");
    if !rows_path.is_file() {
        return Err(HarnessError::MissingRun(run_dir.to_path_buf()));
    }
    let rows: Vec<SweepRow> = read_json(&rows_path, "sweep rows")?;
    let out = run_dir.join("export");
    match format {
        ExportFormat::Csv => {
            let path = out.join("rows.csv");
            write_atomic(&path, &rows_csv(&rows))?;
            Ok(path)
        }
        ExportFormat::Json => {
            let path = out.join("rows.json");
            write_json(&path, &rows)?;
            Ok(path)
        }
        ExportFormat::SvgData => {
            let report: SweepReport = read_json(&run_dir.join("report.json"), "sweep report")?;
            let series = |name, f: fn(&SweepRow) -> f64| Series {
                name,
                points: rows.iter().map(|r| [r.p, f(r)]).collect(),
            };
            let data = PlotData {
                x: "p",
                series: vec![
                    series("entropy", |r| r.entropy),
                    series("bias", |r| r.bias),
                    series("mps_equals_ds", |r| f64::from(u8::from(r.mps_equals_ds))),
                ],
                empirical_threshold: report.empirical_threshold,
                theoretical_threshold: report.thresholds.average,
            };
            let path = out.join("series.json");
            write_json(&path, &data)?;
            Ok(path)
        }
    }
}
