use std::path::PathBuf;
use std::process::ExitCode;

use anderson_lab::cli::{self, CommandOutput, Format, PotentialSource, RunConfig, TGrid};
use anderson_lab::selftest::SelftestOptions;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "anderson-lab",
    version,
    about = "Good and bad potentials of the Anderson model on torus grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one potential as good or bad.
    Classify(Common),
    /// IPR sweep over a t grid (CSV t,k,lambda,log_ipr).
    Heatmap(Common),
    /// Exact bad probability on a prime cycle.
    Exact {
        #[arg(long = "L")]
        length: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Inclusion-exclusion lower bound on the bad probability.
    Bound(Common),
    /// Exhaustive enumeration of all ±1 potentials.
    Enumerate(Common),
    /// Seeded Monte Carlo estimate of the bad fraction.
    Mc(Common),
    /// Minimal paths and path sums on the grid Laplacian.
    Paths {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Distinct diagonal entries, comma separated (default 0,1,...,n-1).
        #[arg(long, allow_hyphen_values = true)]
        diag: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Reduced-scale acceptance checks.
    Selftest {
        /// Override the eigensolver tolerance (for negative testing).
        #[arg(long, hide = true)]
        inject_eigh_tol: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "")]
    dims: String,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// bernoulli:P or uniform:A,B
    #[arg(long, allow_hyphen_values = true)]
    dist: Option<String>,
    /// Inline potential, comma separated in vertex index order.
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    #[arg(long)]
    potential_file: Option<PathBuf>,
    /// start:stop:count
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long, default_value_t = anderson_lab::classify::DEFAULT_T_SAMPLES)]
    t_samples: usize,
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long)]
    entry_tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

impl Common {
    fn config(&self, default_format: Format) -> anderson_lab::Result<RunConfig> {
        let potential = match (&self.potential, &self.potential_file, &self.dist) {
            (Some(s), _, _) => Some(PotentialSource::Inline(cli::parse_reals(s)?)),
            (None, Some(path), _) => Some(PotentialSource::File(path.clone())),
            (None, None, Some(d)) => Some(PotentialSource::Sampled(cli::parse_dist(d)?)),
            (None, None, None) => None,
        };
        let cfg = RunConfig {
            dims: if self.dims.is_empty() {
                Vec::new()
            } else {
                cli::parse_dims(&self.dims)?
            },
            p: self.p,
            potential,
            t_grid: self.t_grid.as_deref().map(str::parse::<TGrid>).transpose()?,
            t_samples: self.t_samples,
            gap_tol: self.gap_tol,
            entry_tol: self.entry_tol,
            seed: self.seed,
            trials: self.trials,
            format: self
                .format
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or(default_format),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(cli::THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run(command: Command) -> anderson_lab::Result<(CommandOutput, Option<PathBuf>)> {
    Ok(match command {
        Command::Classify(c) => (cli::cmd_classify(&c.config(Format::Json)?)?, c.out),
        Command::Heatmap(mut c) => {
            if c.potential.is_none() && c.potential_file.is_none() && c.dist.is_none() {
                c.dist = Some("uniform:-1,1".into());
            }
            (cli::cmd_heatmap(&c.config(Format::Csv)?)?, c.out)
        }
        Command::Exact { length, common } => (cli::cmd_exact(length, &common.config(Format::Json)?)?, common.out),
        Command::Bound(c) => (cli::cmd_bound(&c.config(Format::Json)?)?, c.out),
        Command::Enumerate(c) => (cli::cmd_enumerate(&c.config(Format::Json)?)?, c.out),
        Command::Mc(c) => (cli::cmd_mc(&c.config(Format::Json)?)?, c.out),
        Command::Paths { from, to, diag, common } => {
            let diag = diag.as_deref().map(cli::parse_reals).transpose()?;
            (
                cli::cmd_paths(&common.config(Format::Json)?, diag, from, to)?,
                common.out,
            )
        }
        Command::Selftest { inject_eigh_tol } => {
            let mut opts = SelftestOptions::default();
            if let Some(tol) = inject_eigh_tol {
                opts.eigh_tol = tol;
            }
            (cli::cmd_selftest(&opts), None)
        }
    })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    configure_threads();
    match run(args.command) {
        Ok((output, path)) => match output.emit(path.as_deref()) {
            Ok(()) => ExitCode::from(output.exit_code as u8),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(cli::EXIT_USAGE as u8)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::EXIT_USAGE as u8)
        }
    }
}
