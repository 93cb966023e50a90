//! Report persistence: `{experiment}.csv` with one row per cell and
//! `{experiment}.json` with the versioned summary. Files carry no
//! timestamps or other run-varying content.

use std::path::{Path, PathBuf};

use serde_json::json;

use super::{HarnessError, RunReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub(crate) fn paths(out_dir: &Path, experiment: &str) -> ReportPaths {
    ReportPaths {
        csv: out_dir.join(format!("{experiment}.csv")),
        json: out_dir.join(format!("{experiment}.json")),
    }
}

pub(crate) fn write_report(out_dir: &Path, report: &RunReport) -> Result<ReportPaths, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let p = paths(out_dir, &report.experiment);

    let mut csv = String::new();
    csv.push_str(report.output.csv_header);
    csv.push('\n');
    for row in &report.output.csv_rows {
        csv.push_str(row);
        csv.push('\n');
    }
    std::fs::write(&p.csv, csv)?;

    let doc = json!({
        "schema_version": 1,
        "experiment": report.experiment,
        "config": report.config_echo,
        "summary": report.output.summary,
        "claim": report.claim,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| HarnessError::Computation(format!("report serialization: {e}")))?;
    text.push('\n');
    std::fs::write(&p.json, text)?;

    Ok(p)
}
