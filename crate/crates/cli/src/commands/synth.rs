use shiftcal::synth::{make_scenario, preset, SynthConfig};

use crate::commands::path_string;
use crate::error::{read_to_string, write_file, CliError};
use crate::SynthArgs;

pub fn run(args: SynthArgs) -> Result<(), CliError> {
    let mut cfg: SynthConfig = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => {
            toml::from_str(&read_to_string(path)?).map_err(|e| CliError::from(e).at(path))?
        }
        _ => unreachable!("clap enforces exactly one of --preset/--config"),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let scenario = make_scenario(&cfg)?;

    std::fs::create_dir_all(&args.out).map_err(|e| CliError::from(e).at(&args.out))?;
    let ext = args.data_format.extension();
    let splits = [
        ("source_large", &scenario.source_large),
        ("source_small", &scenario.source_small),
        ("cal_small", &scenario.cal_small),
        ("target_large", &scenario.target_large),
        ("target_small", &scenario.target_small),
    ];
    for (name, ds) in splits {
        let path = args.out.join(format!("{name}.{ext}"));
        shiftcal::dataset::write_dataset(ds, &path, args.data_format.into())
            .map_err(|e| CliError::from(e).at(&path))?;
        println!("wrote {} ({} samples)", path.display(), ds.len());
    }

    let config_path = args.out.join("config.toml");
    let config_text =
        toml::to_string_pretty(&cfg).map_err(|e| CliError::validation(e.to_string()))?;
    write_file(&config_path, config_text)?;
    println!("wrote {}", config_path.display());

    let run_config = serde_json::json!({
        "command": "synth",
        "preset": args.preset,
        "config": args.config.as_deref().map(path_string),
        "seed": cfg.seed,
        "data_format": args.data_format.name(),
        "out": path_string(&args.out),
    });
    let rc_path = args.out.join("run_config.json");
    let mut rc_text = serde_json::to_string_pretty(&run_config)
        .map_err(|e| CliError::validation(e.to_string()))?;
    rc_text.push('\n');
    write_file(&rc_path, rc_text)?;
    println!("wrote {}", rc_path.display());
    Ok(())
}
