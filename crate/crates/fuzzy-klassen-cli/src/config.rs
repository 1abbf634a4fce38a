//! Run configuration: defaults, `key = value` config files and command-line
//! overrides (command line wins).
//!
//! Paths inside a config file are resolved relative to the file's directory;
//! paths given on the command line are relative to the working directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fuzzy_klassen::ops::OperatorSet;
use fuzzy_klassen::pipeline::{AnalysisConfig, Breakpoints};
use fuzzy_klassen::rulebase::{parse_rules, RuleSchema};

use crate::error::CliError;
use crate::ingest::Locale;

/// Environment variable naming a default config file, used when `--config`
/// is not given.
pub const CONFIG_ENV: &str = "KLASSEN_FIS_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Self::Table),
            "json" | "json-like" => Ok(Self::Json),
            other => Err(format!(
                "unknown format '{other}' (expected 'json' or 'table')"
            )),
        }
    }
}

/// The fully merged run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub district: Option<PathBuf>,
    pub district_scores: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub reference_scores: Option<PathBuf>,
    pub year_t: Option<i32>,
    pub year_prev: Option<i32>,
    pub locale: Locale,
    pub format: ReportFormat,
    pub rules: Option<PathBuf>,
    pub grid: (i64, i64),
    pub ops: OperatorSet,
    pub rd_feet: (f64, f64),
    pub rc_feet: (f64, f64),
    pub breakpoints: BTreeMap<String, Breakpoints>,
    pub reference_breakpoints: BTreeMap<String, Breakpoints>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let analysis = AnalysisConfig::default();
        Self {
            district: None,
            district_scores: None,
            reference: None,
            reference_scores: None,
            year_t: None,
            year_prev: None,
            locale: Locale::DotDecimal,
            format: ReportFormat::Table,
            rules: None,
            grid: analysis.grid,
            ops: analysis.ops,
            rd_feet: analysis.rd_feet,
            rc_feet: analysis.rc_feet,
            breakpoints: BTreeMap::new(),
            reference_breakpoints: BTreeMap::new(),
            output: None,
        }
    }
}

impl RunConfig {
    /// Selected years as a pair, when both are set. A single one set is a
    /// config error; both unset means "infer from the data file".
    pub fn years(&self) -> Result<Option<(i32, i32)>, CliError> {
        match (self.year_t, self.year_prev) {
            (Some(t), Some(p)) if t == p => Err(CliError::config(format!(
                "year_t and year_prev must differ, both are {t}"
            ))),
            (Some(t), Some(p)) => Ok(Some((t, p))),
            (None, None) => Ok(None),
            _ => Err(CliError::config(
                "year_t and year_prev must be given together",
            )),
        }
    }

    /// Resolve the effective analysis configuration, loading the rule file
    /// if one is configured.
    pub fn to_analysis_config(&self) -> Result<AnalysisConfig, CliError> {
        let mut analysis = AnalysisConfig {
            breakpoints: self.breakpoints.clone(),
            reference_breakpoints: self.reference_breakpoints.clone(),
            rd_feet: self.rd_feet,
            rc_feet: self.rc_feet,
            grid: self.grid,
            ops: self.ops,
            ..AnalysisConfig::default()
        };
        if let Some(path) = &self.rules {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::config(format!("cannot read rule file '{}': {e}", path.display()))
            })?;
            analysis.rules = parse_rules(&text, &RuleSchema::klassen())
                .map_err(|e| CliError::data(format!("rule file '{}': {e}", path.display())))?;
        }
        Ok(analysis)
    }
}

/// Merge `key = value` lines from `path` into `config`. `#` starts a
/// comment; unknown keys are config errors so typos surface immediately.
pub fn apply_config_file(config: &mut RunConfig, path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::config(format!("cannot read config file '{}': {e}", path.display()))
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::config(format!(
                "{}:{line_no}: expected 'key = value', found '{line}'",
                path.display()
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        apply_key(config, key, value, Some(base)).map_err(|e| {
            CliError::config(format!("{}:{line_no}: {}", path.display(), e.message))
        })?;
    }
    Ok(())
}

/// Apply one configuration key. `base` rebases relative paths for values
/// coming from a config file.
pub fn apply_key(
    config: &mut RunConfig,
    key: &str,
    value: &str,
    base: Option<&Path>,
) -> Result<(), CliError> {
    let path_value = |value: &str| -> PathBuf {
        let p = PathBuf::from(value);
        match base {
            Some(base) if p.is_relative() => base.join(p),
            _ => p,
        }
    };
    match key {
        "district" => config.district = Some(path_value(value)),
        "district_scores" => config.district_scores = Some(path_value(value)),
        "reference" => config.reference = Some(path_value(value)),
        "reference_scores" => config.reference_scores = Some(path_value(value)),
        "rules" => config.rules = Some(path_value(value)),
        "output" => config.output = Some(path_value(value)),
        "year_t" => {
            config.year_t = Some(
                value
                    .parse()
                    .map_err(|_| CliError::config(format!("cannot parse year_t '{value}'")))?,
            )
        }
        "year_prev" => {
            config.year_prev = Some(
                value
                    .parse()
                    .map_err(|_| CliError::config(format!("cannot parse year_prev '{value}'")))?,
            )
        }
        "locale" => config.locale = value.parse().map_err(CliError::config)?,
        "format" => config.format = value.parse().map_err(CliError::config)?,
        "grid" => config.grid = parse_grid(value)?,
        "ops" => {
            config.ops =
                OperatorSet::parse_spec(value).map_err(|e| CliError::config(e.to_string()))?
        }
        "rd_feet" => config.rd_feet = parse_feet("rd_feet", value)?,
        "rc_feet" => config.rc_feet = parse_feet("rc_feet", value)?,
        _ => {
            if let Some(sector) = key.strip_prefix("breakpoints.") {
                let bp = parse_breakpoints(value)?;
                config.breakpoints.insert(sector.to_string(), bp);
            } else if let Some(sector) = key.strip_prefix("reference_breakpoints.") {
                let bp = parse_breakpoints(value)?;
                config.reference_breakpoints.insert(sector.to_string(), bp);
            } else {
                return Err(CliError::config(format!("unknown config key '{key}'")));
            }
        }
    }
    Ok(())
}

/// `min..max` (both inclusive).
pub fn parse_grid(value: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::config(format!("cannot parse grid '{value}' (expected 'min..max')"));
    let (min, max) = value.split_once("..").ok_or_else(bad)?;
    let min: i64 = min.trim().parse().map_err(|_| bad())?;
    let max: i64 = max.trim().parse().map_err(|_| bad())?;
    if min > max {
        return Err(bad());
    }
    Ok((min, max))
}

/// `a,b` ramp feet.
pub fn parse_feet(name: &str, value: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::config(format!("cannot parse {name} '{value}' (expected 'a,b')"));
    let (a, b) = value.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(bad());
    }
    Ok((a, b))
}

/// `a,b,c` breakpoint triple (dot-decimal).
pub fn parse_breakpoints(value: &str) -> Result<Breakpoints, CliError> {
    let bad = || {
        CliError::config(format!(
            "cannot parse breakpoints '{value}' (expected 'a,b,c' with a < b < c)"
        ))
    };
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    Breakpoints::new(nums[0], nums[1], nums[2]).map_err(|_| bad())
}

/// `SECTOR=a,b,c` command-line override.
pub fn parse_sector_breakpoints(value: &str) -> Result<(String, Breakpoints), CliError> {
    let (sector, triple) = value.split_once('=').ok_or_else(|| {
        CliError::config(format!(
            "cannot parse breakpoint override '{value}' (expected 'SECTOR=a,b,c')"
        ))
    })?;
    Ok((sector.trim().to_string(), parse_breakpoints(triple.trim())?))
}
