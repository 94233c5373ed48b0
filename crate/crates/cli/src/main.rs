use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use groves_cli::commands::{self, SearchKind, SettingArgs};
use groves_cli::{CliError, CliResult, Report};
use groves_core::rational::parse_rational_list;
use groves_core::{parse_rational, GridSpec, Rational, Setting};

#[derive(Parser)]
#[command(
    name = "groves",
    version,
    about = "Exact evaluation and comparison of Groves mechanisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Taxes and rebates at one profile or over a grid.
    Evaluate {
        #[command(flatten)]
        setting: SettingFlags,
        #[arg(long)]
        mech: String,
        /// Comma-separated reports, one per agent.
        #[arg(long, value_parser = rational_list, allow_hyphen_values = true)]
        profile: Option<List>,
        #[command(flatten)]
        grid: GridFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Does mechanism B dominate or welfare dominate mechanism A on the grid?
    Compare {
        #[command(flatten)]
        setting: SettingFlags,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        grid: GridFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Reproduce the embedded four-bidder table example.
    #[command(visible_alias = "tables")]
    Fixture {
        /// Replacement table for r.
        #[arg(long = "r")]
        r: Option<PathBuf>,
        /// Replacement table for r'.
        #[arg(long = "r-prime")]
        r_prime: Option<PathBuf>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Feasible, undominated or dominated, for a linear rebate a0,a1,...
    Classify {
        #[command(flatten)]
        setting: SettingFlags,
        #[arg(long, value_parser = rational_list, allow_hyphen_values = true)]
        coeffs: List,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// LP search for an anonymous improvement on the grid.
    Search {
        #[command(flatten)]
        setting: SettingFlags,
        #[arg(long)]
        mech: String,
        #[arg(long, value_enum, default_value = "welfare")]
        kind: Kind,
        /// Keep every improved tax nonpositive (dominance only).
        #[arg(long)]
        pay_only: bool,
        #[command(flatten)]
        grid: GridFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
}

#[derive(Args)]
struct SettingFlags {
    #[arg(long, default_value = "auction")]
    domain: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "L", value_parser = rational, allow_hyphen_values = true)]
    lower: Option<Rational>,
    #[arg(long = "U", value_parser = rational, allow_hyphen_values = true)]
    upper: Option<Rational>,
    #[arg(long, value_parser = rational)]
    cost: Option<Rational>,
    #[arg(long, value_parser = rational_list)]
    shares: Option<List>,
}

#[derive(Args)]
struct GridFlags {
    /// Uniform grid with this many points.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Explicit grid points.
    #[arg(long, value_parser = rational_list, allow_hyphen_values = true, conflicts_with = "grid_points")]
    grid: Option<List>,
}

#[derive(Args)]
struct OutputFlags {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Add rounded decimal columns with this many places.
    #[arg(long)]
    decimal: Option<usize>,
    /// Omit runtime and timestamp so output is byte-stable.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Welfare,
    Dominance,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A comma-separated list kept as one clap value.
#[derive(Clone)]
struct List(Vec<Rational>);

fn rational_list(s: &str) -> Result<List, String> {
    parse_rational_list(s).map(List).map_err(|e| e.to_string())
}

impl SettingFlags {
    fn build(&self) -> CliResult<Setting> {
        commands::build_setting(&SettingArgs {
            domain: self.domain.clone(),
            n: self.n,
            m: self.m,
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            cost: self.cost.clone(),
            shares: self.shares.clone().map(|l| l.0),
        })
    }
}

impl GridFlags {
    fn build(&self, setting: &Setting) -> CliResult<GridSpec> {
        commands::build_grid(
            setting,
            self.grid.as_ref().map(|l| l.0.as_slice()),
            self.grid_points,
            4,
        )
    }

    fn given(&self) -> bool {
        self.grid.is_some() || self.grid_points.is_some()
    }
}

fn configure_workers() -> CliResult<()> {
    let Ok(raw) = std::env::var("GROVES_WORKERS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "GROVES_WORKERS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_workers()?;
    let start = Instant::now();
    let (mut report, output): (Report, &OutputFlags) = match &cli.command {
        Command::Evaluate {
            setting,
            mech,
            profile,
            grid,
            output,
        } => {
            let s = setting.build()?;
            let g = if profile.is_none() || grid.given() {
                Some(grid.build(&s)?)
            } else {
                None
            };
            (
                commands::evaluate(
                    &s,
                    mech,
                    profile.clone().map(|l| l.0),
                    g.as_ref(),
                    output.decimal,
                )?,
                output,
            )
        }
        Command::Compare {
            setting,
            a,
            b,
            grid,
            output,
        } => {
            let s = setting.build()?;
            let g = grid.build(&s)?;
            (
                commands::compare_specs(&s, a, b, &g, output.decimal)?,
                output,
            )
        }
        Command::Fixture { r, r_prime, output } => {
            (commands::fixture(r.as_deref(), r_prime.as_deref())?, output)
        }
        Command::Classify {
            setting,
            coeffs,
            output,
        } => (
            commands::classify(&setting.build()?, coeffs.0.clone())?,
            output,
        ),
        Command::Search {
            setting,
            mech,
            kind,
            pay_only,
            grid,
            output,
        } => {
            let s = setting.build()?;
            let g = grid.build(&s)?;
            let kind = match kind {
                Kind::Welfare => SearchKind::Welfare,
                Kind::Dominance => SearchKind::Dominance,
            };
            (commands::search(&s, mech, &g, kind, *pay_only)?, output)
        }
    };
    if !output.no_timestamp {
        report.runtime_ms = Some(start.elapsed().as_millis() as u64);
        report.timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match output.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv => report.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("groves: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
