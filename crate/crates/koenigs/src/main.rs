//! Thin command-line front end: flag parsing and serialization only, all
//! logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use koenigs::driver::{self, ExperimentConfig, OpSpec};

#[derive(Parser)]
#[command(
    name = "koenigs",
    version,
    about = "Königs eigenfunctions of (weighted) composition operators on the disk: \
             construction, Bloch-type norms, and hypothesis checks"
)]
struct Cli {
    /// Directory for report.json and CSV tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 2 when any check reports a violation.
    #[arg(long, global = true)]
    fail_on_violation: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a map fixes the origin, contracts there, and stays
    /// inside the disk on the standard grid. Exits 2 when not admissible.
    Validate {
        /// Catalog name or expression in z.
        #[arg(long, visible_alias = "expr")]
        map: String,
        #[arg(long)]
        grid_depth: Option<usize>,
    },
    /// Converge the Königs iterate and report depth, gap, and lambda.
    Koenigs {
        #[arg(long)]
        map: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        control_radius: Option<f64>,
        /// Also report the Schröder residual on |z| <= radius.
        #[arg(long)]
        residual_radius: Option<f64>,
        /// Also compare against the closed-form limit when the catalog
        /// knows one.
        #[arg(long)]
        compare_known: bool,
    },
    /// Converge the weighted principal eigenfunction and report the
    /// weighted residual.
    Weighted {
        #[arg(long)]
        map: String,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        control_radius: Option<f64>,
        #[arg(long)]
        residual_radius: Option<f64>,
    },
    /// Bloch-type seminorm sup (1-|z|^2)^alpha |f'(z)| of a function
    /// target.
    Seminorm {
        /// Target: raw expression/catalog name, `koenigs:<map>`,
        /// `eigen:<map>:<n>`, or `weighted:<map>:<weight>:<n>`.
        #[arg(long = "map-fn")]
        map_fn: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Lipschitz-type norm sup (1-|z|^2)^(alpha-1) |f(z)| (alpha > 1).
    Lipnorm {
        #[arg(long = "map-fn")]
        map_fn: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Sup-norm estimate on boundary-approaching circles.
    Supnorm {
        #[arg(long = "map-fn")]
        map_fn: String,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Bracket the Bloch number over an alpha grid.
    BlochNumber {
        #[arg(long = "map-fn")]
        map_fn: String,
        /// Comma-separated ascending alphas, e.g. 0.5,0.75,1.0.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Iterate-shifted hyperbolic bound at level alpha and shift m.
    CheckA {
        #[arg(long)]
        map: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long)]
        grid_depth: Option<usize>,
    },
    /// Log-weighted hyperbolic bound, pointwise on the grid.
    CheckEq12 {
        #[arg(long)]
        map: String,
        #[arg(long)]
        grid_depth: Option<usize>,
    },
    /// Boundedness quantities for the (weighted) composition operator.
    CheckZh21 {
        #[arg(long)]
        map: String,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        alpha: f64,
    },
    /// Compactness diagnostics over boundary shells.
    CheckCompact {
        #[arg(long)]
        map: String,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        alpha: f64,
        /// Comma-separated descending shell widths.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
    /// Radial growth conditions coupling M_r and a_r.
    CheckTh23 {
        #[arg(long)]
        map: String,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        epsilon: f64,
        /// Comma-separated ascending radii.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Search for an iterate whose probe-circle sup drops below 1.
    CheckItsup {
        #[arg(long)]
        map: String,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        r_probe: Option<f64>,
    },
    /// Weighted beta-ratio hypothesis, plain or log-weighted.
    CheckWbeta {
        #[arg(long)]
        map: String,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        beta: f64,
        /// "plain" (default) or "log-weighted".
        #[arg(long)]
        variant: Option<String>,
        #[arg(long)]
        grid_depth: Option<usize>,
    },
    /// Run a JSON experiment config and write the full report bundle.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's map.
        #[arg(long)]
        map: Option<String>,
        /// Overrides the config's weight.
        #[arg(long)]
        weight: Option<String>,
    },
}

fn main() -> ExitCode {
    // Usage errors exit 4 (the exit-code contract reserves 2 for check
    // violations); help and version stay successful.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(4);
        }
    };
    match build_and_run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}

fn build_and_run(cli: Cli) -> Result<u8, driver::ConfigError> {
    let mut fail_on_violation = cli.fail_on_violation;
    let mut config = match cli.command {
        Command::Validate { map, grid_depth } => {
            // Admissibility failures are violations of the working
            // hypotheses, and validate exists to surface them.
            fail_on_violation = true;
            let mut config = ExperimentConfig::single(&map, OpSpec::named("validate"));
            if let Some(depth) = grid_depth {
                config.grid_depth = depth;
            }
            config
        }
        Command::Koenigs {
            map,
            tol,
            k_max,
            control_radius,
            residual_radius,
            compare_known,
        } => {
            let mut op = OpSpec::named("koenigs");
            op.tol = tol;
            op.k_max = k_max;
            op.control_radius = control_radius;
            let mut config = ExperimentConfig::single(&map, op);
            if let Some(radius) = residual_radius {
                let mut res = OpSpec::named("schroder-residual");
                res.radius = Some(radius);
                res.tol = tol;
                res.k_max = k_max;
                config.ops.push(res);
            }
            if compare_known {
                let mut cmp = OpSpec::named("compare-known-koenigs");
                cmp.tol = tol;
                cmp.k_max = k_max;
                config.ops.push(cmp);
            }
            config
        }
        Command::Weighted {
            map,
            weight,
            tol,
            k_max,
            control_radius,
            residual_radius,
        } => {
            let mut op = OpSpec::named("weighted");
            op.tol = tol;
            op.k_max = k_max;
            op.control_radius = control_radius;
            let mut config = ExperimentConfig::single(&map, op).with_weight(&weight);
            if let Some(radius) = residual_radius {
                let mut res = OpSpec::named("weighted-residual");
                res.radius = Some(radius);
                res.tol = tol;
                res.k_max = k_max;
                config.ops.push(res);
            }
            config
        }
        Command::Seminorm {
            map_fn,
            alpha,
            max_depth,
        } => {
            let mut op = OpSpec::named("seminorm");
            op.alpha = Some(alpha);
            norm_config(&map_fn, op, max_depth)
        }
        Command::Lipnorm {
            map_fn,
            alpha,
            max_depth,
        } => {
            let mut op = OpSpec::named("lipnorm");
            op.alpha = Some(alpha);
            norm_config(&map_fn, op, max_depth)
        }
        Command::Supnorm { map_fn, max_depth } => {
            norm_config(&map_fn, OpSpec::named("supnorm"), max_depth)
        }
        Command::BlochNumber {
            map_fn,
            alphas,
            max_depth,
        } => {
            let mut op = OpSpec::named("bloch-number");
            op.alphas = Some(alphas);
            norm_config(&map_fn, op, max_depth)
        }
        Command::CheckA {
            map,
            alpha,
            m,
            grid_depth,
        } => {
            let mut op = OpSpec::named("check-a");
            op.alpha = Some(alpha);
            op.m = Some(m);
            let mut config = ExperimentConfig::single(&map, op);
            if let Some(depth) = grid_depth {
                config.grid_depth = depth;
            }
            config
        }
        Command::CheckEq12 { map, grid_depth } => {
            let mut config = ExperimentConfig::single(&map, OpSpec::named("check-eq12"));
            if let Some(depth) = grid_depth {
                config.grid_depth = depth;
            }
            config
        }
        Command::CheckZh21 { map, weight, alpha } => {
            let mut op = OpSpec::named("check-zh21");
            op.alpha = Some(alpha);
            let mut config = ExperimentConfig::single(&map, op);
            config.weight = weight;
            config
        }
        Command::CheckCompact {
            map,
            weight,
            alpha,
            deltas,
        } => {
            let mut op = OpSpec::named("check-compact");
            op.alpha = Some(alpha);
            op.deltas = deltas;
            let mut config = ExperimentConfig::single(&map, op);
            config.weight = weight;
            config
        }
        Command::CheckTh23 {
            map,
            weight,
            epsilon,
            radii,
        } => {
            let mut op = OpSpec::named("check-th23");
            op.epsilon = Some(epsilon);
            op.radii = radii;
            let mut config = ExperimentConfig::single(&map, op);
            config.weight = weight;
            config
        }
        Command::CheckItsup {
            map,
            k_max,
            r_probe,
        } => {
            let mut op = OpSpec::named("check-itsup");
            op.k_max = k_max;
            op.r_probe = r_probe;
            ExperimentConfig::single(&map, op)
        }
        Command::CheckWbeta {
            map,
            weight,
            beta,
            variant,
            grid_depth,
        } => {
            let mut op = OpSpec::named("check-wbeta");
            op.beta = Some(beta);
            op.variant = variant;
            let mut config = ExperimentConfig::single(&map, op);
            config.weight = weight;
            if let Some(depth) = grid_depth {
                config.grid_depth = depth;
            }
            config
        }
        Command::Report {
            config,
            map,
            weight,
        } => {
            let mut loaded = driver::load_config(&config)?;
            if let Some(map) = map {
                loaded.map = map;
            }
            if let Some(weight) = weight {
                loaded.weight = Some(weight);
            }
            loaded
        }
    };

    // Flags override file values.
    if fail_on_violation {
        config.fail_on_violation = true;
    }
    if let Some(out) = &cli.out {
        config.output_dir = Some(out.display().to_string());
    }

    let (bundle, summary) = driver::run(&config)?;
    let text = if bundle.results.len() == 1 {
        serde_json::to_string_pretty(&bundle.results[0])
    } else {
        serde_json::to_string_pretty(&bundle)
    }
    .map_err(|e| driver::ConfigError::Json(e.to_string()))?;
    println!("{text}");
    Ok(summary.exit_code(config.fail_on_violation) as u8)
}

fn norm_config(map_fn: &str, op: OpSpec, max_depth: Option<usize>) -> ExperimentConfig {
    let mut config = ExperimentConfig::single(map_fn, op);
    if let Some(depth) = max_depth {
        config.refinement = Some(koenigs::norms::RefinementPolicy::default().with_max_depth(depth));
    }
    config
}
