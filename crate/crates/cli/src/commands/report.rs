use shiftcal::metrics::ReportRecord;

use crate::commands::{fill_improvement_ratios, path_string, records_to_csv, records_to_json};
use crate::error::{write_file, CliError};
use crate::{OutFormatArg, ReportArgs};

pub fn run(args: ReportArgs) -> Result<(), CliError> {
    let mut records: Vec<ReportRecord> = Vec::new();
    for path in &args.inputs {
        let file = std::fs::File::open(path).map_err(|e| CliError::from(e).at(path))?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(file);
        for row in reader.deserialize() {
            records.push(row.map_err(|e| CliError::from(e).at(path))?);
        }
    }
    if records.is_empty() {
        return Err(CliError::validation(
            "the input tables contain no rows".to_string(),
        ));
    }
    // Stable sort keeps input order within (domain, method) duplicates.
    records.sort_by(|a, b| {
        a.target_domain
            .cmp(&b.target_domain)
            .then_with(|| a.method.cmp(&b.method))
    });
    fill_improvement_ratios(&mut records);

    let run_config = serde_json::json!({
        "command": "report",
        "inputs": args.inputs.iter().map(|p| path_string(p)).collect::<Vec<_>>(),
        "format": args.format.name(),
        "out": path_string(&args.out),
    });
    match args.format {
        OutFormatArg::Csv => write_file(&args.out, records_to_csv(&run_config, &records)?)?,
        OutFormatArg::Json => write_file(&args.out, records_to_json(&run_config, &records)?)?,
    }
    println!(
        "merged {} rows from {} tables into {}",
        records.len(),
        args.inputs.len(),
        args.out.display()
    );
    Ok(())
}
