//! Runs a harness experiment from an inline TOML document and lists what it
//! would write.

use orlicz_stokes::harness::{run, ExperimentConfig};

const CONFIG: &str = r#"
experiment = "hammer-sweep"
seed = 11

[sweep]
p = [1.5, 2.5]
kappa = [0.0]
models = ["carreau", "arc-sinh"]
samples = 10000
"#;

fn main() -> orlicz_stokes::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG, None)?;
    let report = run(&cfg)?;
    print!("{}", report.summary());
    for t in &report.tables {
        println!("{:<24} {:>8} bytes  sha256 {}", t.name, t.bytes.len(), t.sha256());
    }
    Ok(())
}
