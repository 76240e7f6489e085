use shiftcal::calibrators::{
    fit_cluster_nn, fit_cluster_regression, fit_ensemble, fit_set_level, fit_source_only,
    fit_target_oracle, Calibrator, DomainWeighting, FitOptions,
};

use crate::commands::load_dataset;
use crate::envelope::{ModelEnvelope, Standardization};
use crate::error::CliError;
use crate::{CalibrateArgs, MethodArg};

/// Surfaced on stderr so fallbacks and boundary hits are visible without
/// opening the model file; everything here is also stored in the JSON.
fn warnings(c: &Calibrator) -> Vec<String> {
    fn temp_warning(out: &mut Vec<String>, context: String, w: &Option<String>) {
        if let Some(w) = w {
            out.push(format!("{context}: {w}"));
        }
    }
    let mut out = Vec::new();
    match c {
        Calibrator::Uncalibrated => {}
        Calibrator::SourceOnly { temp }
        | Calibrator::TargetOracle { temp }
        | Calibrator::SetLevel { temp } => {
            temp_warning(&mut out, "temperature fit".into(), &temp.warning)
        }
        Calibrator::ClusterNn {
            temps,
            fallback_clusters,
            ..
        } => {
            if !fallback_clusters.is_empty() {
                out.push(format!(
                    "clusters {fallback_clusters:?} are below the size threshold and use the pooled temperature"
                ));
            }
            for (j, t) in temps.iter().enumerate() {
                temp_warning(&mut out, format!("cluster {j}"), &t.warning);
            }
        }
        Calibrator::ClusterRegression {
            temps, regression, ..
        } => {
            for (j, t) in temps.iter().enumerate() {
                temp_warning(&mut out, format!("cluster {j}"), &t.warning);
            }
            temp_warning(&mut out, "regression".into(), &regression.warning);
        }
        Calibrator::Ensemble { members } => {
            for m in members {
                for w in warnings(m) {
                    out.push(format!("{}: {w}", m.kind_name()));
                }
            }
        }
    }
    out
}

pub fn run(args: CalibrateArgs) -> Result<(), CliError> {
    if !args.tol.is_finite() || args.tol <= 0.0 {
        return Err(CliError::validation(format!(
            "--tol must be a positive number, got {}",
            args.tol
        )));
    }
    let ds = load_dataset(&args.input, args.data_format.into())?;
    let standardization = if args.standardize {
        Some(Standardization::fit(&ds))
    } else {
        None
    };
    let fit_ds = match &standardization {
        Some(st) => st.transform_dataset(&ds)?,
        None => ds,
    };
    let opts = FitOptions {
        bounds: args.bounds,
        tol: args.tol,
        weighting: if args.per_domain {
            DomainWeighting::PerDomain
        } else {
            DomainWeighting::PerSample
        },
        k: args.k,
        seed: args.seed,
        min_cluster_size: args.min_cluster_size,
        ridge_lambda: args.ridge,
    };
    let calibrator = match args.method {
        MethodArg::Uncalibrated => Calibrator::Uncalibrated,
        MethodArg::SourceOnly => fit_source_only(&fit_ds, &opts)?,
        MethodArg::TargetOracle => fit_target_oracle(&fit_ds, &opts)?,
        MethodArg::SetLevel => fit_set_level(&fit_ds, &opts)?,
        MethodArg::ClusterNn => fit_cluster_nn(&fit_ds, &opts)?,
        MethodArg::ClusterRegression => fit_cluster_regression(&fit_ds, &opts)?,
        MethodArg::Ensemble => fit_ensemble(&fit_ds, &opts)?,
    };
    for w in warnings(&calibrator) {
        eprintln!("warning: {w}");
    }
    let kind = calibrator.kind_name();
    ModelEnvelope::new(calibrator, standardization).save(&args.out)?;
    println!(
        "wrote {kind} model to {} (fit on {} samples)",
        args.out.display(),
        fit_ds.len()
    );
    Ok(())
}
