//! One module per subcommand plus the table plumbing they share.

pub mod calibrate;
pub mod diagnose;
pub mod evaluate;
pub mod report;
pub mod synth;

use std::collections::BTreeMap;
use std::path::Path;

use shiftcal::dataset::{parse_dataset, DataFormat, DomainDataset};
use shiftcal::metrics::{improvement_ratio, ReportRecord};

use crate::error::CliError;

pub(crate) fn load_dataset(path: &Path, format: DataFormat) -> Result<DomainDataset, CliError> {
    parse_dataset(path, format).map_err(|e| CliError::from(e).at(path))
}

pub(crate) fn path_string(path: &Path) -> String {
    path.display().to_string()
}

/// Fills in missing improvement ratios wherever a target domain's table has
/// both reference rows (first `source_only` and first `target_oracle` win).
/// Rows whose ratio is already set keep it.
pub(crate) fn fill_improvement_ratios(records: &mut [ReportRecord]) {
    let mut refs: BTreeMap<String, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for r in records.iter() {
        let entry = refs.entry(r.target_domain.clone()).or_default();
        if r.method == "source_only" && entry.0.is_none() {
            entry.0 = Some(r.ece_mean);
        }
        if r.method == "target_oracle" && entry.1.is_none() {
            entry.1 = Some(r.ece_mean);
        }
    }
    for r in records.iter_mut() {
        if r.ir.is_some() {
            continue;
        }
        if let Some(&(Some(src), Some(oracle))) = refs.get(&r.target_domain) {
            // A zero source-to-oracle gap leaves the ratio undefined; the
            // cell stays empty rather than failing the command.
            r.ir = improvement_ratio(src, oracle, r.ece_mean).ok();
        }
    }
}

/// Report rows as CSV bytes, preceded by the provenance comment line.
pub(crate) fn records_to_csv(
    run_config: &serde_json::Value,
    records: &[ReportRecord],
) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    buf.extend_from_slice(format!("# run_config: {run_config}\n").as_bytes());
    let mut w = csv::Writer::from_writer(buf);
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::validation(e.to_string()))
}

/// Report rows as a pretty JSON document carrying the same provenance.
pub(crate) fn records_to_json(
    run_config: &serde_json::Value,
    records: &[ReportRecord],
) -> Result<String, CliError> {
    let doc = serde_json::json!({ "run_config": run_config, "records": records });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::validation(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
