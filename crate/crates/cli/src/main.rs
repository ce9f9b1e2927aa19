//! Command-line front end: table generators, the minibatch variance protocol,
//! experiment runs from TOML configs, envelope slices and vector smoothing.

use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lapsmooth::data_io::{filter_classes, load_idx, synthetic_blobs};
use lapsmooth::harness::{
    beta_table, envelope_slice, run_experiment, slice_to_csv, smooth_csv, var_bound_table,
    variance_protocol, vector_to_csv, ExperimentConfig, HarnessError, VarianceProtocol,
};

#[derive(Debug, Parser)]
#[command(name = "lapsmooth", version, about = "Laplacian smoothing experiments")]
struct Cli {
    /// Seed for randomized commands; for `run` it replaces the config's seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write CSV output here instead of standard output.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Experiment config (TOML) for `run`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Averaged inverse-spectrum constant β for each (m, σ).
    BetaTable {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0, 4.0, 5.0])]
        sigmas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1000, 10000, 100000])]
        ms: Vec<usize>,
    },
    /// Variance-reduction bound for each (n, σ).
    VarBoundTable {
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
        orders: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0, 4.0, 5.0])]
        sigmas: Vec<f64>,
        #[arg(long, default_value_t = 10000)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
    },
    /// Maximum minibatch gradient variance along a full-batch descent path.
    VarMeasure(VarMeasureArgs),
    /// Runs every (variant, method, seed) cell of `--config`.
    Run,
    /// Hopf-Lax envelope of the radial test function along a ray.
    EnvelopeSlice {
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-6, 0.5, 1.0, 2.0, 4.0])]
        t_values: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        max_radius: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Smooths a one-column CSV vector and reports the sum check on stderr.
    Smooth {
        /// Input file; standard input when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long)]
        sigma: f64,
    },
}

#[derive(Debug, Args)]
struct VarMeasureArgs {
    /// IDX image file; with `--labels`, digits 1 and 2 are used instead of
    /// the synthetic binary blobs.
    #[arg(long, requires = "labels")]
    images: Option<PathBuf>,
    #[arg(long, requires = "images")]
    labels: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 5, 10, 20, 50])]
    batch_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0, 3.0])]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    replicas: usize,
    #[arg(long, default_value_t = 20)]
    path_length: usize,
    #[arg(long, default_value_t = 0.5)]
    path_lr: f64,
}

fn emit(out_dir: Option<&Path>, name: &str, csv: &str) -> Result<(), HarnessError> {
    match out_dir {
        Some(dir) => {
            let path = dir.join(name);
            std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(&path, csv))
                .map_err(|e| HarnessError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn read_input(path: Option<&Path>) -> Result<String, HarnessError> {
    let mut text = String::new();
    let (name, res) = match path {
        Some(p) => (
            p.display().to_string(),
            std::fs::read_to_string(p).map(|t| text = t),
        ),
        None => (
            "<stdin>".to_string(),
            std::io::stdin().read_to_string(&mut text).map(|_| ()),
        ),
    };
    res.map_err(|e| HarnessError::Io {
        path: name,
        message: e.to_string(),
    })?;
    Ok(text)
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let out_dir = cli.out_dir.as_deref();
    match cli.command {
        Command::BetaTable { sigmas, ms } => {
            emit(out_dir, "beta_table.csv", &beta_table(&sigmas, &ms)?)
        }
        Command::VarBoundTable {
            orders,
            sigmas,
            m,
            kappa,
        } => emit(
            out_dir,
            "var_bound_table.csv",
            &var_bound_table(&orders, &sigmas, m, kappa)?,
        ),
        Command::VarMeasure(args) => {
            let dataset = match (&args.images, &args.labels) {
                (Some(images), Some(labels)) => {
                    filter_classes(&load_idx(images, labels)?, &[1, 2])?
                }
                _ => synthetic_blobs(2, 500, 64, 1.0, cli.seed.unwrap_or(0))?,
            };
            let protocol = VarianceProtocol {
                batch_sizes: args.batch_sizes,
                sigmas: args.sigmas,
                path_length: args.path_length,
                path_lr: args.path_lr,
                replicas: args.replicas,
                seed: cli.seed.unwrap_or(0),
                ..VarianceProtocol::default()
            };
            let report = variance_protocol(&dataset, &protocol)?;
            emit(out_dir, "var_measure.csv", &report.to_csv())
        }
        Command::Run => {
            let path = cli
                .config
                .ok_or_else(|| HarnessError::Config("`run` needs --config <file>".into()))?;
            let mut config = ExperimentConfig::from_path(&path)?;
            if let Some(seed) = cli.seed {
                config.seeds = vec![seed];
            }
            let dir = out_dir
                .map(Path::to_path_buf)
                .or_else(|| config.output_dir.as_ref().map(PathBuf::from));
            let outcome = run_experiment(&config, dir.as_deref())?;
            match dir {
                Some(d) => println!(
                    "{}",
                    d.join(format!("{}_summary.csv", config.experiment))
                        .display()
                ),
                None => print!("{}", outcome.summary_csv),
            }
            Ok(())
        }
        Command::EnvelopeSlice {
            dim,
            sigma,
            t_values,
            max_radius,
            points,
        } => {
            if points < 2 || max_radius.is_nan() || max_radius <= 0.0 {
                return Err(HarnessError::Config(
                    "need at least 2 points and a positive max radius".into(),
                ));
            }
            let radii: Vec<f64> = (0..points)
                .map(|i| max_radius * i as f64 / (points - 1) as f64)
                .collect();
            let rows = envelope_slice(dim, &t_values, sigma, &radii)?;
            emit(out_dir, "envelope_slice.csv", &slice_to_csv(&rows))
        }
        Command::Smooth {
            input,
            order,
            sigma,
        } => {
            let text = read_input(input.as_deref())?;
            let out = smooth_csv(&text, order, sigma)?;
            eprintln!(
                "sum in {} sum out {} difference {:e}",
                out.input_sum,
                out.output_sum,
                out.output_sum - out.input_sum
            );
            emit(out_dir, "smoothed.csv", &vector_to_csv(&out.values))
        }
    }
}

fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_line("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            ExitCode::FAILURE
        }
    }
}
