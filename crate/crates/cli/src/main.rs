mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "kergrad", version, about = "Exact kernel gradients of group-ring operators")]
struct Cli {
    /// output format; each command has its own default
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// leave out the generation timestamp
    #[arg(long, global = true)]
    no_meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OperatorArgs {
    /// preset (`lamplighter`, `halved:<preset>`) or an expression such as `t + t^-1 + t u + u t^-1`
    #[arg(long, default_value = "lamplighter")]
    pub operator: String,
    /// group for expressions, as `d:m`: `d` shifts and `m` finite bits with all automorphisms
    #[arg(long, default_value = "1:0")]
    pub group: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// dim ker of the compression to each box of a schedule
    Estimate {
        #[command(flatten)]
        op: OperatorArgs,
        /// 0 for the rationals, otherwise an odd prime
        #[arg(long, default_value_t = 0)]
        field: u64,
        #[arg(long, default_value = "2:2,4:4,6:6,8:8,10:8")]
        boxes: String,
    },
    /// T-graph components seeded from the configurations of a window
    Census {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long, default_value_t = 3)]
        field: u64,
    },
    /// kernel dimensions of the labeled graph families
    Families {
        /// compare the closed forms with elimination
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
        #[arg(long, default_value_t = 33)]
        lmax: usize,
        /// characteristics, 0 meaning the rationals
        #[arg(long, default_value = "0,3,5,7,11,13", value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// exact closed-form values
    ClosedForm {
        #[command(subcommand)]
        which: ClosedForm,
    },
    /// runs a verification suite
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// closed-form values for a list of primes
    Table {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// kernel dimension of a family graph or of an operator on one box
    Kernel {
        /// `G1:k`, `G2:l`, `G3:k:l` or `Path:k`
        #[arg(long, conflicts_with = "operator")]
        family: Option<String>,
        #[arg(long)]
        operator: Option<String>,
        #[arg(long, default_value = "1:0")]
        group: String,
        /// box `n:m`, for operators
        #[arg(long, default_value = "4:4")]
        r#box: String,
        #[arg(long, default_value_t = 0)]
        field: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ClosedForm {
    Thm13 {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        with_1344: bool,
    },
    Thm12 {
        #[arg(long, default_value_t = 6)]
        trunc: u64,
    },
    Sigma {
        /// comma-separated elements, may be empty
        #[arg(long, default_value = "")]
        set: String,
    },
    /// truncated three-family series for GF(p)
    Thm58 {
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 60)]
        kmax: u64,
        #[arg(long, default_value_t = 60)]
        lmax: u64,
    },
}

pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<kergrad::Error> for CliError {
    fn from(e: kergrad::Error) -> Self {
        match e {
            kergrad::Error::Parse(_)
            | kergrad::Error::BadCharacteristic(_)
            | kergrad::Error::CharacteristicTwo
            | kergrad::Error::Invalid(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn configure_workers() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("KERGRAD_WORKERS") {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("KERGRAD_WORKERS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_workers()?;
    let (report, config, default_format) = match cli.command {
        Command::Estimate { op, field, boxes } => commands::estimate(&op, field, &boxes)?,
        Command::Census { op, window, field } => commands::census(&op, window, field)?,
        Command::Families { check, kmax, lmax, primes } => commands::families(check, kmax, lmax, &primes)?,
        Command::ClosedForm { which } => commands::closed_form(which)?,
        Command::Verify { suite } => verify::run(&suite)?,
        Command::Table { primes } => commands::table(&primes)?,
        Command::Kernel { family, operator, group, r#box, field } => {
            commands::kernel(family.as_deref(), operator.as_deref(), &group, &r#box, field)?
        }
    };
    let text = output::render(&report, cli.format.unwrap_or(default_format), &config, cli.no_meta)?;
    output::emit(&text, cli.output.as_deref())?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
