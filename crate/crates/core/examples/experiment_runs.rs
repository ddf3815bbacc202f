//! Run the three experiments at reduced scale and write their artifacts.

use lifting_layers::experiments::{run_fit1d, run_fit2d, run_robust, ExperimentConfig};

fn main() -> lifting_layers::Result<()> {
    let dir = std::env::temp_dir().join("lifting-experiment-runs");

    let cfg = ExperimentConfig { seed: 2, epochs: 200, ..ExperimentConfig::fit1d() };
    let r = run_fit1d(&cfg)?;
    for (k, v) in r.summary() {
        println!("fit1d  {k:<26} {v:.6}");
    }
    r.write_outputs(&cfg, &dir)?;

    let cfg = ExperimentConfig { epochs: 20, ..ExperimentConfig::fit2d() };
    let r = run_fit2d(&cfg)?;
    for (k, v) in r.summary() {
        println!("fit2d  {k:<26} {v:.6}");
    }
    r.write_outputs(&cfg, &dir)?;

    let cfg = ExperimentConfig { seed: 2, epochs: 500, ..ExperimentConfig::robust() };
    let r = run_robust(&cfg)?;
    for (k, v) in r.summary() {
        println!("robust {k:<26} {v:.6}");
    }
    let files = r.write_outputs(&cfg, &dir)?;
    println!("artifacts in {} ({} files from the robust run)", dir.display(), files.len());
    Ok(())
}
