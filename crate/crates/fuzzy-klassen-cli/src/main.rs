use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fuzzy_klassen_cli::commands::{self, CommandOutput};
use fuzzy_klassen_cli::config::{
    apply_config_file, apply_key, parse_sector_breakpoints, RunConfig, CONFIG_ENV,
};
use fuzzy_klassen_cli::error::CliError;

/// Fuzzy-Klassen disparity analysis over regional GRDP sectors.
///
/// Per-sector Mamdani fuzzy systems turn two-year observations into growth
/// (RD) and contribution (RC) scores, which are compared district-vs-
/// reference under Klassen typology rules (quadrants K1..K4), alongside the
/// traditional crisp classification.
#[derive(Parser)]
#[command(name = "fuzzy-klassen", version, max_term_width = 100)]
struct Cli {
    /// Config file with `key = value` lines (default: $KLASSEN_FIS_CONFIG)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Number locale of data files: dot (296121.45) or comma (296.121,45)
    #[arg(long, global = true, value_name = "LOCALE")]
    locale: Option<String>,

    /// Report format: table (aligned text) or json (machine-readable)
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<String>,

    /// Rule file overriding the built-in Klassen rule table
    #[arg(long, global = true, value_name = "FILE")]
    rules: Option<PathBuf>,

    /// Output grid, e.g. 1..100
    #[arg(long, global = true, value_name = "MIN..MAX")]
    grid: Option<String>,

    /// Operator set: and,implication,aggregation,defuzzifier
    /// (e.g. min,min,max,centroid)
    #[arg(long, global = true, value_name = "SPEC")]
    ops: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// District raw GRDP data CSV (region,sector,year,value)
    #[arg(long, value_name = "FILE")]
    district: Option<PathBuf>,

    /// Analyzed year t
    #[arg(long, value_name = "YEAR")]
    year_t: Option<i32>,

    /// Comparison year t-1
    #[arg(long, value_name = "YEAR")]
    year_prev: Option<i32>,

    /// Per-sector breakpoint override (repeatable)
    #[arg(long = "breakpoints", value_name = "SECTOR=A,B,C")]
    breakpoints: Vec<String>,

    /// RD output ramp feet
    #[arg(long, value_name = "A,B")]
    rd_feet: Option<String>,

    /// RC output ramp feet
    #[arg(long, value_name = "A,B")]
    rc_feet: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compare fuzzy and traditional Klassen classifications per sector
    Analyze {
        #[command(flatten)]
        data: DataArgs,

        /// District replay scores CSV (region,sector,rd,rc)
        #[arg(long, value_name = "FILE")]
        district_scores: Option<PathBuf>,

        /// Reference raw GRDP data CSV
        #[arg(long, value_name = "FILE")]
        reference: Option<PathBuf>,

        /// Reference replay scores CSV (region,sector,rd,rc)
        #[arg(long, value_name = "FILE")]
        reference_scores: Option<PathBuf>,

        /// Reference-only breakpoint override (repeatable)
        #[arg(long = "reference-breakpoints", value_name = "SECTOR=A,B,C")]
        reference_breakpoints: Vec<String>,

        /// Write the report here instead of stdout
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Print one sector's membership degrees at a crisp value
    Fuzzify {
        #[command(flatten)]
        data: DataArgs,
        /// Sector id (e.g. V1)
        sector: String,
        /// Crisp input value, in the configured locale
        value: String,
    },
    /// Emit membership, per-rule and aggregate curves as CSV
    Curves {
        #[command(flatten)]
        data: DataArgs,
        /// Sector id (e.g. V1)
        sector: String,
        /// Write the CSV here instead of stdout
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Validate a rule file against the Klassen schema
    RulesCheck {
        /// Rule file to check
        rule_file: PathBuf,
    },
}

fn merge_globals(config: &mut RunConfig, cli: &Cli) -> Result<(), CliError> {
    if let Some(locale) = &cli.locale {
        apply_key(config, "locale", locale, None)?;
    }
    if let Some(format) = &cli.format {
        apply_key(config, "format", format, None)?;
    }
    if let Some(rules) = &cli.rules {
        config.rules = Some(rules.clone());
    }
    if let Some(grid) = &cli.grid {
        apply_key(config, "grid", grid, None)?;
    }
    if let Some(ops) = &cli.ops {
        apply_key(config, "ops", ops, None)?;
    }
    Ok(())
}

fn merge_data_args(config: &mut RunConfig, data: &DataArgs) -> Result<(), CliError> {
    if let Some(district) = &data.district {
        config.district = Some(district.clone());
    }
    if let Some(year_t) = data.year_t {
        config.year_t = Some(year_t);
    }
    if let Some(year_prev) = data.year_prev {
        config.year_prev = Some(year_prev);
    }
    for spec in &data.breakpoints {
        let (sector, bp) = parse_sector_breakpoints(spec)?;
        config.breakpoints.insert(sector, bp);
    }
    if let Some(feet) = &data.rd_feet {
        apply_key(config, "rd_feet", feet, None)?;
    }
    if let Some(feet) = &data.rc_feet {
        apply_key(config, "rc_feet", feet, None)?;
    }
    Ok(())
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::default();
    let config_path = cli
        .config
        .clone()
        .or_else(|| env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(path) = config_path {
        apply_config_file(&mut config, &path)?;
    }
    merge_globals(&mut config, cli)?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    let mut config = build_config(cli)?;
    match &cli.command {
        Command::Analyze {
            data,
            district_scores,
            reference,
            reference_scores,
            reference_breakpoints,
            output,
        } => {
            merge_data_args(&mut config, data)?;
            if let Some(path) = district_scores {
                config.district_scores = Some(path.clone());
            }
            if let Some(path) = reference {
                config.reference = Some(path.clone());
            }
            if let Some(path) = reference_scores {
                config.reference_scores = Some(path.clone());
            }
            for spec in reference_breakpoints {
                let (sector, bp) = parse_sector_breakpoints(spec)?;
                config.reference_breakpoints.insert(sector, bp);
            }
            if let Some(path) = output {
                config.output = Some(path.clone());
            }
            commands::analyze(&config)
        }
        Command::Fuzzify {
            data,
            sector,
            value,
        } => {
            merge_data_args(&mut config, data)?;
            config.output = None;
            commands::fuzzify(&config, sector, value)
        }
        Command::Curves {
            data,
            sector,
            output,
        } => {
            merge_data_args(&mut config, data)?;
            if let Some(path) = output {
                config.output = Some(path.clone());
            }
            commands::curves(&config, sector)
        }
        Command::RulesCheck { rule_file } => {
            config.output = None;
            commands::rules_check(rule_file)
        }
    }
    .and_then(|out| deliver(&config, out))
}

fn deliver(config: &RunConfig, out: CommandOutput) -> Result<CommandOutput, CliError> {
    if let Some(path) = &config.output {
        fs::write(path, &out.stdout)
            .map_err(|e| CliError::config(format!("cannot write '{}': {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
        Ok(CommandOutput {
            stdout: String::new(),
            exit: out.exit,
        })
    } else {
        Ok(out)
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.exit as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
