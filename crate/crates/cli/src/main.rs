use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use gapscale_cli::dictionary;
use gapscale_cli::report::Report;
use gapscale_cli::run;
use gapscale_cli::scenario::{parse_asym, parse_suite, parse_values, ConfigFile, Format, Kind, Params};
use gapscale_cli::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "gapscale",
    version,
    about = "Gap probabilities of the sine process and their Toeplitz analogues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// log det(I - K_sine) on s*A by Nystrom quadrature
    Fredholm,
    /// log of the Toeplitz determinant of the scaled arc indicator
    Toeplitz,
    /// Asymptotic formula with its term breakdown
    Asym { variant: String },
    /// Verification suite; exits 2 when a residual exceeds its limit
    Verify { suite: String },
    /// Evaluate a kind over --axis/--values in parallel
    Sweep {
        /// fredholm, toeplitz, asym-<variant> or verify-<suite>; defaults to the config kind
        kind: Option<String>,
    },
}

#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long, global = true)]
    s: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    nodes: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Write the report here and a column dictionary beside it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// TOML scenario file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    axis: Option<String>,
    /// Comma-separated sweep values, e.g. 4,8,12
    #[arg(long, global = true, allow_hyphen_values = true)]
    values: Option<String>,
}

impl Flags {
    fn params(&self) -> Params {
        Params {
            s: self.s,
            alpha: self.alpha,
            beta: self.beta,
            nu: self.nu,
            n: self.n,
            nodes: self.nodes,
            k: self.k,
        }
    }
}

fn dictionary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.dictionary.csv"))
}

fn emit(report: &Report, out: Option<&Path>, format: Format) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(&mut w, format)?;
            w.flush()?;
            let mut d = BufWriter::new(File::create(dictionary_path(path))?);
            dictionary::for_columns(&report.columns).write_csv(&mut d)?;
            d.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(&mut lock, format)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> CliResult<(Kind, Report)> {
    let config = match &cli.flags.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let params = config.parameters.overridden_by(cli.flags.params());
    let format = match &cli.flags.format {
        Some(f) => f.parse()?,
        None => config.output.format.unwrap_or_default(),
    };
    let out = cli.flags.out.clone().or(config.output.path.clone());

    let (kind, report) = match &cli.command {
        Command::Fredholm => (Kind::Fredholm, run::run(Kind::Fredholm, params)?),
        Command::Toeplitz => (Kind::Toeplitz, run::run(Kind::Toeplitz, params)?),
        Command::Asym { variant } => {
            let kind = Kind::Asym(parse_asym(variant)?);
            (kind, run::run(kind, params)?)
        }
        Command::Verify { suite } => {
            let kind = Kind::Verify(parse_suite(suite)?);
            (kind, run::run(kind, params)?)
        }
        Command::Sweep { kind } => {
            let name = kind
                .clone()
                .or(config.kind.clone())
                .ok_or_else(|| CliError::Config("sweep needs a kind argument or a config 'kind'".into()))?;
            let kind: Kind = name.parse()?;
            let axis = cli
                .flags
                .axis
                .clone()
                .or(config.sweep.axis.clone())
                .ok_or_else(|| CliError::Config("sweep needs --axis".into()))?;
            let values = match &cli.flags.values {
                Some(text) => parse_values(text)?,
                None => config.sweep.values.clone().unwrap_or_default(),
            };
            (kind, run::sweep(kind, params, &axis, &values)?)
        }
    };
    emit(&report, out.as_deref(), format)?;
    Ok((kind, report))
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors; 2 is reserved for verification breaches
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let start = Instant::now();
    let result = execute(&cli);
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok((Kind::Verify(_), report)) if report.any_breach() => {
            eprintln!("verification failed: at least one residual exceeds its limit");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
