//! Drive a full experiment from a declarative config and write the
//! reproducible report bundle: report.json plus one CSV table per
//! operation. Rerunning the same config reproduces every byte.
//!
//!     cargo run --example experiment_run

use koenigs::driver::{run, ExperimentConfig, OpSpec};

fn main() {
    let out_dir = std::env::temp_dir().join("koenigs-experiment-demo");
    let _ = std::fs::remove_dir_all(&out_dir);

    let validate = OpSpec::named("validate");
    let mut koenigs_op = OpSpec::named("koenigs");
    koenigs_op.tol = Some(1e-10);
    let mut residual = OpSpec::named("schroder-residual");
    residual.radius = Some(0.7);
    let mut compare = OpSpec::named("compare-known-koenigs");
    compare.radius = Some(0.8);
    let mut check_a = OpSpec::named("check-a");
    check_a.alpha = Some(1.0);
    check_a.m = Some(0);
    let mut seminorm = OpSpec::named("seminorm");
    seminorm.alpha = Some(2.0);
    seminorm.target = Some("koenigs:moebius(0.5)".to_string());

    let mut config = ExperimentConfig::single("moebius(0.5)", validate);
    config
        .ops
        .extend([koenigs_op, residual, compare, check_a, seminorm]);
    config.output_dir = Some(out_dir.display().to_string());

    println!(
        "config:\n{}\n",
        serde_json::to_string_pretty(&config).unwrap()
    );

    let (bundle, summary) = run(&config).unwrap();
    println!(
        "ran {} ops (tool {} / config hash {})",
        bundle.results.len(),
        bundle.metadata.tool_version,
        bundle.metadata.config_hash
    );
    for result in &bundle.results {
        println!(
            "  {:>22} -> {:?}  csv: {:?}",
            result.op, result.status, result.csv_files
        );
    }
    println!(
        "\nexit code would be {} (fail_on_violation = {})",
        summary.exit_code(config.fail_on_violation),
        config.fail_on_violation
    );

    println!("\nartifacts in {}:", out_dir.display());
    let mut names: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for name in names {
        let len = std::fs::metadata(out_dir.join(&name)).unwrap().len();
        println!("  {name} ({len} bytes)");
    }

    // The same run through the CLI:
    println!("\nequivalent CLI invocation:");
    println!(
        "  koenigs report --config config.json --out {}",
        out_dir.display()
    );
}
