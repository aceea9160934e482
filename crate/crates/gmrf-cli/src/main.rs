//! Batch front door for the estimation library: simulate AR datasets,
//! estimate shrinkage covariances and sparse precisions, select Markov
//! orders, and run the Monte-Carlo benchmarks.
//!
//! Machine-readable results go to files or standard output; diagnostics go
//! to standard error. Exit codes: 2 invalid arguments or malformed input,
//! 3 non-stationary model, 4 insufficient samples, 5 numerical failure of an
//! estimator (singular block, non-SPD estimate), 1 anything else.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gmrf::bench::{run_benchmark, write_benchmark_csv, BenchmarkConfig, BenchmarkScale, ExperimentKind};
use gmrf::{
    cov_shrink_identity, cov_shrink_spd, prec_sparse, read_dataset_csv,
    read_pattern_matrix_market, select_markov_order, simulate_ar, simulate_mixed_effect_ar,
    write_dataset_csv, write_sparse_matrix_market, ArProcessSpec, Error, MixedEffectArSpec,
    PrecisionOptions, StopRule,
};

#[derive(Parser)]
#[command(name = "gmrf", version, about = "Sparse precision and shrinkage covariance estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// Stationary AR(p) with stationary initialization.
    Ar,
    /// Mixed-effect AR(p): shared U(0,1) random effect per time point.
    Mixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Diagonal,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Exhaustive,
    FirstRise,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Dimension,
    Samplesize,
    Arorder,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Desk,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset of independent realisations, one per CSV row.
    Simulate {
        #[arg(long, value_enum)]
        model: Model,
        /// Autoregressive order.
        #[arg(long)]
        order: usize,
        /// Comma-separated lag coefficients, length must equal the order.
        /// Omit for order 0.
        #[arg(long, value_delimiter = ',')]
        coeffs: Option<Vec<f64>>,
        /// Number of realisations (rows).
        #[arg(long)]
        n: usize,
        /// Time points per realisation (columns).
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shrinkage covariance estimate; prints the fitted intensity.
    Shrink {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Diagonal)]
        target: Target,
        /// Output covariance, headerless CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Graph-constrained sparse precision estimate (Matrix Market output).
    Estimate {
        #[arg(long)]
        data: PathBuf,
        /// Neighbourhood graph, Matrix Market coordinate format.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        markov_order: usize,
        #[arg(long)]
        no_shrinkage: bool,
        #[arg(long)]
        no_symmetrize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Markov-order search; prints an order,nll,aic table and the selection.
    SelectOrder {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = Rule::Exhaustive)]
        rule: Rule,
    },
    /// Monte-Carlo benchmark of the four estimators against AR oracles.
    Benchmark {
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Scale::Desk)]
        scale: Scale,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::Parse(_) => 2,
        Error::NonStationary(_) => 3,
        Error::InsufficientSamples { .. } => 4,
        Error::SingularBlock { .. }
        | Error::NotPositiveDefinite(_)
        | Error::DegenerateConditional { .. } => 5,
        Error::Io(_) | Error::Numeric(_) => 1,
    }
}

fn run(cli: Cli) -> gmrf::Result<()> {
    match cli.command {
        Command::Simulate {
            model,
            order,
            coeffs,
            n,
            t,
            seed,
            out,
        } => {
            let coeffs = coeffs.unwrap_or_default();
            if coeffs.len() != order {
                return Err(Error::InvalidArgument(format!(
                    "--order {order} requires {order} coefficients, got {}",
                    coeffs.len()
                )));
            }
            let data = match model {
                Model::Ar => simulate_ar(&ArProcessSpec::new(coeffs, t), n, seed)?,
                Model::Mixed => simulate_mixed_effect_ar(&MixedEffectArSpec {
                    coefficients: coeffs,
                    horizon: t,
                    realisations: n,
                    seed,
                    u_seed: None,
                })?,
            };
            write_dataset_csv(&out, &data)
        }
        Command::Shrink { data, target, out } => {
            let x = read_dataset_csv(&data)?;
            let est = match target {
                Target::Diagonal => cov_shrink_spd(&x)?,
                Target::Identity => cov_shrink_identity(&x)?,
            };
            println!("lambda={}", est.lambda);
            if let Some(nu) = est.nu {
                println!("nu={nu}");
            }
            write_dataset_csv(&out, est.covariance.as_array())
        }
        Command::Estimate {
            data,
            graph,
            markov_order,
            no_shrinkage,
            no_symmetrize,
            out,
        } => {
            let x = read_dataset_csv(&data)?;
            let g = read_pattern_matrix_market(&graph)?;
            let opts = PrecisionOptions {
                markov_order,
                shrinkage: !no_shrinkage,
                symmetrize: !no_symmetrize,
            };
            let est = prec_sparse(&x, &g, &opts)?;
            write_sparse_matrix_market(&out, &est)
        }
        Command::SelectOrder {
            data,
            graph,
            max_order,
            rule,
        } => {
            let x = read_dataset_csv(&data)?;
            let g = read_pattern_matrix_market(&graph)?;
            let rule = match rule {
                Rule::Exhaustive => StopRule::Exhaustive,
                Rule::FirstRise => StopRule::FirstRise,
            };
            let trace = select_markov_order(&x, &g, max_order, rule)?;
            println!("order,nll,aic");
            let mut evals = trace.evaluations.iter().peekable();
            let mut skipped = trace.skipped.iter().peekable();
            loop {
                match (evals.peek(), skipped.peek()) {
                    (Some(e), Some(&&s)) if s < e.order => {
                        println!("{s},nan,nan");
                        skipped.next();
                    }
                    (Some(e), _) => {
                        println!("{},{:.16e},{:.16e}", e.order, e.nll, e.aic);
                        evals.next();
                    }
                    (None, Some(&&s)) => {
                        println!("{s},nan,nan");
                        skipped.next();
                    }
                    (None, None) => break,
                }
            }
            println!("selected={}", trace.selected);
            Ok(())
        }
        Command::Benchmark {
            experiment,
            reps,
            seed,
            scale,
            out,
        } => {
            let cfg = BenchmarkConfig {
                experiment: match experiment {
                    Experiment::Dimension => ExperimentKind::Dimension,
                    Experiment::Samplesize => ExperimentKind::SampleSize,
                    Experiment::Arorder => ExperimentKind::ArOrder,
                },
                reps,
                seed,
                scale: match scale {
                    Scale::Desk => BenchmarkScale::Desk,
                    Scale::Paper => BenchmarkScale::Paper,
                },
            };
            let records = run_benchmark(&cfg)?;
            let mut w = BufWriter::new(File::create(&out)?);
            write_benchmark_csv(&records, &mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
