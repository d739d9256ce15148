//! Command-line front end; all computation lives in the library.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minload::cli::{self, OutputRecord};
use minload::exact::DEFAULT_BUDGET;
use minload::Error;

#[derive(Parser)]
#[command(name = "minload", version, about = "Minimum-load occupancy for balls into bins")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    format: Format,
}

#[derive(Args)]
struct Format {
    /// Emit one JSON record
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV with a header row
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Exponential base b(alpha, d)
    Base { alpha: f64, d: u32 },
    /// Grid of b(alpha, d) over integer alpha and d
    Table {
        #[arg(long, default_value_t = 5)]
        alpha_max: u32,
        #[arg(long, default_value_t = 5)]
        d_max: u32,
    },
    /// Exact probability for n bins and m balls
    Exact {
        n: u64,
        m: u64,
        d: u32,
        /// Cap on n*m generating-function coefficients
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Monte Carlo estimate for n bins and m balls
    Simulate {
        n: u64,
        m: u64,
        d: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Random when omitted; always reported
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores); does not change results
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Exact probability over a list of n, divided by b^n
    Verify {
        alpha: f64,
        d: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

fn run(cmd: Command) -> Result<OutputRecord, Error> {
    match cmd {
        Command::Base { alpha, d } => cli::cmd_base(alpha, d),
        Command::Table { alpha_max, d_max } => cli::cmd_table(alpha_max, d_max),
        Command::Exact { n, m, d, budget } => cli::cmd_exact(n, m, d, budget),
        Command::Simulate {
            n,
            m,
            d,
            trials,
            seed,
            threads,
        } => {
            let seed = seed.unwrap_or_else(rand::random);
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(t) = threads {
                pool = pool.num_threads(t);
            }
            let pool = pool
                .build()
                .map_err(|e| Error::Convergence(format!("thread pool: {e}")))?;
            pool.install(|| cli::cmd_simulate(n, m, d, trials, seed))
        }
        Command::Verify {
            alpha,
            d,
            n_list,
            budget,
        } => cli::cmd_verify(alpha, d, &n_list, budget),
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(rec) => {
            if args.format.json {
                println!("{}", rec.to_json());
            } else if args.format.csv {
                print!("{}", rec.to_csv());
            } else {
                print!("{}", rec.to_text());
                for (k, v) in &rec.metadata {
                    eprintln!("# {k} = {v}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("minload: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
