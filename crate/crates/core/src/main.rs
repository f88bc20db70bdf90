use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use pointvar::estimate::{
    condition_number, mcle, standard_errors, vare, vare_with_covariance, TestFnKind, TestFunction,
};
use pointvar::harness::{
    load_config, run_experiment, run_scaling, write_results_file, ExperimentConfig, QuadratureKind, ScalingConfig,
};
use pointvar::{builtin, Covariate, Error, Grid, GridCovariate, ModelId, PointPattern, ProcessKind, ProcessSpec, Simulator, Window};

#[derive(Parser)]
#[command(name = "pointvar", version, about = "Intensity estimation for log-linear spatial point processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one point pattern and write it to a file.
    Simulate {
        /// poisson, lgcp1, lgcp2, thomas1 or thomas2
        #[arg(long)]
        process: String,
        /// 1, 2, 3, 4 or sine
        #[arg(long)]
        model: ModelId,
        /// Box as `lo1,lo2..hi1,hi2`
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Expected number of points
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated parameter vector (defaults to the study value)
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate theta from a pattern file; prints one CSV line.
    Estimate {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long = "test-fn", default_value = "div-z")]
        test_fn: TestFnKind,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        model: ModelId,
        /// Cells per axis of the MCLE quadrature grid
        #[arg(long, default_value_t = 80)]
        grid: usize,
        /// Use a gridded covariate file instead of the analytic model
        #[arg(long)]
        covariate: Option<PathBuf>,
        /// Append standard errors (Poisson assumption)
        #[arg(long)]
        ci: bool,
    },
    /// Run a replication experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// AMSE ratio MCLE/VARE and timings for the sine model on [-1,1]^d.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,4,10")]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 2000.0)]
        mu: f64,
        #[arg(long, default_value_t = 200)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "berman-turner")]
        quadrature: QuadratureArg,
        /// Run replications one at a time (cleaner timings)
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Vare,
    Mcle,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuadratureArg {
    Midpoint,
    BermanTurner,
}

/// Failures while reading or validating an experiment config.
struct ConfigError(Error);

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Experiment {
            config,
            workers,
            seed,
            out,
        } => match experiment_config(config, workers, seed, out) {
            Ok((cfg, out)) => run_experiment(&cfg).and_then(|rows| write_results_file(&rows, out)),
            Err(ConfigError(e)) => {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
        },
        other => run(other),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn experiment_config(
    config: PathBuf,
    workers: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(ExperimentConfig, PathBuf), ConfigError> {
    let mut cfg = load_config(&config)?;
    if workers.is_some() {
        cfg.workers = workers;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let out = out
        .or_else(|| cfg.output.clone().map(PathBuf::from))
        .ok_or_else(|| Error::Parse {
            location: "output".into(),
            message: "no output path (use --out or the `output` key)".into(),
        })?;
    Ok((cfg, out))
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Parse {
            location: "theta".into(),
            message: e.to_string(),
        }))
        .collect()
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate {
            process,
            model,
            window,
            mu,
            seed,
            theta,
            out,
        } => {
            let window = Window::from_compact(&window)?;
            let kind: ProcessKind = process.parse()?;
            let z: Arc<dyn Covariate> = Arc::new(builtin(model, window.dim())?);
            let theta = match theta {
                Some(t) => parse_list(&t)?,
                None => model.true_theta(window.dim()),
            };
            if theta.len() != z.p() {
                return Err(Error::DimensionMismatch {
                    expected: z.p(),
                    got: theta.len(),
                });
            }
            let spec = ProcessSpec::new(kind, z, 0.0, theta).calibrated(&window, mu);
            let mut x = Simulator::new(&spec, &window)?.simulate_seeded(seed)?;
            x.process = process;
            x.write_to(BufWriter::new(File::create(out)?))
        }
        Command::Estimate {
            method,
            test_fn,
            eps,
            pattern,
            model,
            grid,
            covariate,
            ci,
        } => {
            let x = PointPattern::read_from(BufReader::new(File::open(pattern)?))?;
            let z: Box<dyn Covariate> = match covariate {
                Some(path) => Box::new(GridCovariate::read_from(BufReader::new(File::open(path)?))?),
                None => Box::new(builtin(model, x.dim())?),
            };
            let mut fields: Vec<f64> = Vec::new();
            match method {
                MethodArg::Vare => {
                    let h = TestFunction::new(test_fn, x.window(), eps)?;
                    let r = if ci { vare_with_covariance(&x, z.as_ref(), &h)? } else { vare(&x, z.as_ref(), &h)? };
                    fields.extend(r.theta_hat.iter());
                    fields.push(r.condition_number);
                    if let Some(cov) = &r.covariance {
                        fields.extend(standard_errors(cov));
                    }
                }
                MethodArg::Mcle => {
                    let r = mcle(&x, z.as_ref(), &Grid::uniform(x.window(), grid)?)?;
                    fields.extend(r.theta_hat.iter());
                    fields.push(condition_number(&r.hessian));
                    fields.push(r.beta_hat);
                    if ci {
                        // inverse observed information of the Poisson likelihood
                        let p = r.theta_hat.len();
                        let inv = (-r.hessian.clone())
                            .try_inverse()
                            .ok_or_else(|| Error::SingularSystem("observed information".into()))?;
                        fields.extend(standard_errors(&inv.view((1, 1), (p, p)).into_owned()));
                    }
                }
            }
            let line: Vec<String> = fields.iter().map(f64::to_string).collect();
            writeln!(io::stdout(), "{}", line.join(","))?;
            Ok(())
        }
        Command::Experiment { .. } => unreachable!("handled in main"),
        Command::Scaling {
            dims,
            taus,
            mu,
            reps,
            seed,
            quadrature,
            serial,
        } => {
            let mut cfg = ScalingConfig::new(dims, taus, mu, reps, seed);
            cfg.quadrature = match quadrature {
                QuadratureArg::Midpoint => QuadratureKind::Midpoint,
                QuadratureArg::BermanTurner => QuadratureKind::BermanTurner,
            };
            cfg.parallel = !serial;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "d,tau,n_dummy,amse_vare,amse_mcle,ratio,time_vare_s,time_mcle_s")?;
            for r in run_scaling(&cfg)? {
                writeln!(
                    stdout,
                    "{},{},{},{},{},{},{},{}",
                    r.d,
                    r.tau,
                    r.n_dummy,
                    r.amse_vare,
                    r.amse_mcle,
                    r.ratio(),
                    r.time_vare,
                    r.time_mcle
                )?;
            }
            Ok(())
        }
    }
}
