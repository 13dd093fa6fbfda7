use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellfree_core::analysis::{
    avg_rate_upper_bound, ee_upper_bound, optimal_lambda, BoundForm, BoundInputs,
};
use cellfree_core::harness::{render_results, run_sweep, ExperimentConfig, OutputFormat, Sweep};
use cellfree_core::power::PowerModel;
use cellfree_core::Error;

#[derive(Parser)]
#[command(
    name = "cellfree",
    version,
    about = "Clustered cell-free networking simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file (including its sweep, if any).
    Simulate(RunArgs),
    /// Run a sweep over one parameter, overriding the config's sweep section.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// lambda, M, L, K, sigma_sh_db or algorithm
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long)]
        values: String,
    },
    /// Print the optimal AP-selection ratio and the analytical bounds.
    Analyze {
        #[arg(long = "L")]
        l: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "K", default_value_t = 100)]
        k: usize,
        /// Ratio at which to evaluate the bounds; defaults to the optimum
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; results go to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Number of layouts override
    #[arg(long)]
    layouts: Option<usize>,
    /// Fading draws per layout override
    #[arg(long)]
    draws: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> Result<(ExperimentConfig, OutputFormat), Error> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(n) = self.layouts {
            cfg.n_layouts = n;
        }
        if let Some(n) = self.draws {
            cfg.n_fading_draws = n;
        }
        Ok((cfg, self.format.parse()?))
    }

    fn execute(&self, cfg: &ExperimentConfig, format: OutputFormat) -> Result<(), Error> {
        let rows = run_sweep(cfg)?;
        let text = render_results(&rows, format)?;
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn analyze(l: usize, m: usize, k: usize, lambda: Option<f64>, alpha: f64) -> Result<(), Error> {
    let star = optimal_lambda(l, m).map_err(|e| Error::Config(e.to_string()))?;
    let lambda = lambda.unwrap_or(star);
    let b = BoundInputs {
        l,
        k,
        m,
        lambda,
        alpha,
        pm: PowerModel::default(),
        d: 1000.0,
    };
    b.validate().map_err(|e| Error::Config(e.to_string()))?;
    println!("lambda_star = {star:.9}");
    println!("lambda = {lambda:.9}");
    println!("avg_rate_upper_bound = {:.9}", avg_rate_upper_bound(&b)?);
    println!(
        "ee_upper_bound_exact = {:.9}",
        ee_upper_bound(&b, BoundForm::Exact)?
    );
    println!(
        "ee_upper_bound_approx = {:.9}",
        ee_upper_bound(&b, BoundForm::Approximate)?
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(args) => {
            let (cfg, format) = args.load()?;
            args.execute(&cfg, format)
        }
        Command::Sweep { run, param, values } => {
            let (mut cfg, format) = run.load()?;
            cfg.sweep = Some(Sweep {
                parameter: param.parse()?,
                values: Sweep::parse_values(&values),
            });
            run.execute(&cfg, format)
        }
        Command::Analyze {
            l,
            m,
            k,
            lambda,
            alpha,
        } => analyze(l, m, k, lambda, alpha),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
