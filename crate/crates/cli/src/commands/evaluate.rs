use serde::Serialize;
use shiftcal::calibrators::Calibrator;
use shiftcal::metrics::{bootstrap_eval, BootstrapConfig, ReportRecord};

use crate::commands::{
    fill_improvement_ratios, load_dataset, path_string, records_to_csv, records_to_json,
};
use crate::envelope::ModelEnvelope;
use crate::error::{write_file, CliError};
use crate::{EvaluateArgs, OutFormatArg};

#[derive(Serialize)]
struct PerBinRow {
    method: String,
    bin: usize,
    lower: f64,
    upper: f64,
    count: usize,
    accuracy: f64,
    mean_confidence: f64,
}

pub fn run(args: EvaluateArgs) -> Result<(), CliError> {
    let ds = load_dataset(&args.input, args.data_format.into())?;
    let trial_size = args.trial_size.unwrap_or_else(|| ds.len().min(1500));
    if trial_size >= ds.len() && !args.with_replacement {
        eprintln!(
            "warning: trial_size {} covers the whole dataset without replacement, so every trial \
             scores the same subsample and ece_std will be ~0; pass --trial-size below {} or \
             --with-replacement for a real bootstrap spread",
            trial_size,
            ds.len()
        );
    }
    let config = BootstrapConfig {
        n_trials: args.n_trials,
        trial_size,
        bins: args.bins,
        seed: args.seed,
        with_replacement: args.with_replacement,
    };

    // The uncalibrated baseline always leads; models follow in flag order.
    let mut envelopes = vec![ModelEnvelope::new(Calibrator::Uncalibrated, None)];
    for path in &args.models {
        envelopes.push(ModelEnvelope::load(path)?);
    }

    let target_domain = ds.domains().collect::<Vec<_>>().join("+");
    let mut records = Vec::new();
    let mut per_bin_rows = Vec::new();
    for env in &envelopes {
        // One seed for every method: each trial draws the same subsample
        // across methods, so per-trial comparisons are paired.
        let report = bootstrap_eval(&ds, &config, |s| env.apply(s))?;
        let method = env.calibrator.kind_name().to_string();
        println!(
            "{method}: ece_mean={:.6} ece_std={:.6} accuracy={:.4}",
            report.ece_mean, report.ece_std, report.accuracy_mean
        );
        if args.per_bin_out.is_some() {
            for (bin, b) in report.per_bin.iter().enumerate() {
                per_bin_rows.push(PerBinRow {
                    method: method.clone(),
                    bin,
                    lower: b.lower,
                    upper: b.upper,
                    count: b.count,
                    accuracy: b.accuracy,
                    mean_confidence: b.mean_confidence,
                });
            }
        }
        records.push(ReportRecord {
            method,
            target_domain: target_domain.clone(),
            ece_mean: report.ece_mean,
            ece_std: report.ece_std,
            percentile_2_5: report.percentile_2_5,
            percentile_97_5: report.percentile_97_5,
            accuracy: report.accuracy_mean,
            ir: None,
        });
    }
    fill_improvement_ratios(&mut records);

    let run_config = serde_json::json!({
        "command": "evaluate",
        "input": path_string(&args.input),
        "data_format": args.data_format.name(),
        "models": args.models.iter().map(|p| path_string(p)).collect::<Vec<_>>(),
        "bins": args.bins,
        "n_trials": args.n_trials,
        "trial_size": trial_size,
        "with_replacement": args.with_replacement,
        "seed": args.seed,
        "format": args.format.name(),
        "per_bin_out": args.per_bin_out.as_deref().map(path_string),
        "out": path_string(&args.out),
    });
    match args.format {
        OutFormatArg::Csv => write_file(&args.out, records_to_csv(&run_config, &records)?)?,
        OutFormatArg::Json => write_file(&args.out, records_to_json(&run_config, &records)?)?,
    }
    println!("wrote {} ({} methods)", args.out.display(), records.len());

    if let Some(pb_path) = &args.per_bin_out {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &per_bin_rows {
            w.serialize(row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::validation(e.to_string()))?;
        write_file(pb_path, bytes)?;
        println!("wrote {} ({} bins)", pb_path.display(), per_bin_rows.len());
    }
    Ok(())
}
