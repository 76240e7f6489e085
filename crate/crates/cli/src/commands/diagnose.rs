use serde::{Deserialize, Serialize};
use shiftcal::diagnostics::{
    calibration_gap_bound, density_ratio_stats, induce_histogram_pair, DiscreteDistributionPair,
};

use crate::commands::{load_dataset, path_string};
use crate::error::{read_to_string, write_file, CliError};
use crate::DiagnoseArgs;

/// One discrete distribution on a named support.
#[derive(Deserialize)]
struct DistFile {
    support: Vec<String>,
    p: Vec<f64>,
}

/// The diagnostics document. Bound fields are null when the density ratio
/// is unbounded (target mass where the calibration set has none); that case
/// is a reportable outcome, not an error.
#[derive(Serialize)]
struct DiagnosticsFile {
    run_config: serde_json::Value,
    unbounded_ratio: bool,
    var_w: Option<f64>,
    d2: Option<f64>,
    gap: Option<f64>,
    cs_bound: Option<f64>,
    amgm_bound: Option<f64>,
    weight_mse: Option<f64>,
    loss_second_moment: Option<f64>,
    support: Vec<String>,
    p_target: Vec<f64>,
    p_cal: Vec<f64>,
}

fn load_dist(path: &std::path::Path) -> Result<DistFile, CliError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::from(e).at(path))
}

pub fn run(args: DiagnoseArgs) -> Result<(), CliError> {
    let pair = match (&args.target, &args.cal, &args.target_dist, &args.cal_dist) {
        (Some(target), Some(cal), None, None) => {
            let tds = load_dataset(target, args.data_format.into())?;
            let cds = load_dataset(cal, args.data_format.into())?;
            for (ds, path) in [(&tds, target), (&cds, cal)] {
                if args.projection >= ds.feature_dim() {
                    return Err(CliError::validation(format!(
                        "{}: projection {} is out of range for feature dimension {}",
                        path.display(),
                        args.projection,
                        ds.feature_dim()
                    )));
                }
            }
            let tv: Vec<f64> = tds
                .samples()
                .iter()
                .map(|s| s.feature[args.projection])
                .collect();
            let cv: Vec<f64> = cds
                .samples()
                .iter()
                .map(|s| s.feature[args.projection])
                .collect();
            induce_histogram_pair(&tv, &cv, args.bins, args.smoothing)?
        }
        (None, None, Some(target_dist), Some(cal_dist)) => {
            let t = load_dist(target_dist)?;
            let c = load_dist(cal_dist)?;
            if t.support != c.support {
                return Err(CliError::validation(
                    "the two distribution files have different supports".to_string(),
                ));
            }
            DiscreteDistributionPair::new(t.support, t.p, c.p)?
        }
        _ => {
            return Err(CliError::validation(
                "provide either --target/--cal datasets or --target-dist/--cal-dist files"
                    .to_string(),
            ))
        }
    };

    let losses: Vec<f64> = match &args.losses {
        Some(path) => {
            let text = read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| CliError::from(e).at(path))?
        }
        None => vec![0.0; pair.len()],
    };

    let run_config = serde_json::json!({
        "command": "diagnose",
        "target": args.target.as_deref().map(path_string),
        "cal": args.cal.as_deref().map(path_string),
        "target_dist": args.target_dist.as_deref().map(path_string),
        "cal_dist": args.cal_dist.as_deref().map(path_string),
        "data_format": args.data_format.name(),
        "projection": args.projection,
        "bins": args.bins,
        "smoothing": args.smoothing,
        "losses": args.losses.as_deref().map(path_string),
        "out": path_string(&args.out),
    });

    let doc = if pair.support_violation().is_some() {
        println!("unbounded density ratio: target mass where the calibration set has none");
        DiagnosticsFile {
            run_config,
            unbounded_ratio: true,
            var_w: None,
            d2: None,
            gap: None,
            cs_bound: None,
            amgm_bound: None,
            weight_mse: None,
            loss_second_moment: None,
            support: pair.support().to_vec(),
            p_target: pair.p_target().to_vec(),
            p_cal: pair.p_cal().to_vec(),
        }
    } else {
        let (var_w, d2) = density_ratio_stats(&pair)?;
        let bound = calibration_gap_bound(&pair, &losses)?;
        println!(
            "var_w={var_w:.6} d2={d2:.6} gap={:.6} cs_bound={:.6} amgm_bound={:.6}",
            bound.gap, bound.cs_bound, bound.amgm_bound
        );
        DiagnosticsFile {
            run_config,
            unbounded_ratio: false,
            var_w: Some(var_w),
            d2: Some(d2),
            gap: Some(bound.gap),
            cs_bound: Some(bound.cs_bound),
            amgm_bound: Some(bound.amgm_bound),
            weight_mse: Some(bound.weight_mse),
            loss_second_moment: Some(bound.loss_second_moment),
            support: pair.support().to_vec(),
            p_target: pair.p_target().to_vec(),
            p_cal: pair.p_cal().to_vec(),
        }
    };
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::validation(e.to_string()))?;
    text.push('\n');
    write_file(&args.out, text)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
