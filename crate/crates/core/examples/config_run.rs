//! Drive the command layer from a TOML string, the way the binary does
//! from a file.

use kickwalk::cli::{cmd_search, ExperimentConfig};

fn main() -> kickwalk::Result<()> {
    let out = std::env::temp_dir().join("kickwalk-config-run");
    let mut cfg = ExperimentConfig::from_toml_str(
        r#"
        k = 0.8
        kicks = 15
        window = "auto"
        preset = "b"
        target = -7
        wcut = 3
        strategy = "subtract"
        "#,
    )?;
    cfg.out = out.clone();
    cfg.validate()?;
    let summary = cmd_search(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&summary.estimates)?);
    println!("files in {}", out.display());
    Ok(())
}
