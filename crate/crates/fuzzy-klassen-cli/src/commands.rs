//! Command implementations. Each returns the text destined for stdout (or
//! the output file) plus an exit code; diagnostics go to stderr in `main`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use fuzzy_klassen::pipeline::{
    build_sector_fis, compare_methods, default_breakpoints, Breakpoints, RegionInput,
};
use fuzzy_klassen::rulebase::{
    parse_rules, validate_rulebase, RuleSchema, VAR_CURRENT, VAR_PREVIOUS,
};
use fuzzy_klassen::GrdpDataset;

use crate::config::{ReportFormat, RunConfig};
use crate::error::CliError;
use crate::ingest::{ingest, parse_number, read_scores};
use crate::report::{render_json, render_table};

/// What a command wants written to stdout and which code to exit with.
pub struct CommandOutput {
    pub stdout: String,
    pub exit: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit: 0 }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read '{}': {e}", path.display())))
}

/// Load one region's raw dataset from a data CSV, requiring the file to
/// contain exactly one region.
fn load_dataset(config: &RunConfig, path: &Path) -> Result<GrdpDataset, CliError> {
    let text = read_file(path)?;
    let years = config.years()?;
    let mut datasets = ingest(&text, config.locale, years)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if datasets.len() != 1 {
        let regions: Vec<&str> = datasets.iter().map(|d| d.region()).collect();
        return Err(CliError::data(format!(
            "{}: expected exactly one region per file, found [{}]",
            path.display(),
            regions.join(", ")
        )));
    }
    Ok(datasets.remove(0))
}

fn load_scores(config: &RunConfig, path: &Path) -> Result<RegionInput, CliError> {
    let text = read_file(path)?;
    let mut regions = read_scores(&text, config.locale)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if regions.len() != 1 {
        let names: Vec<&str> = regions.iter().map(|r| r.region.as_str()).collect();
        return Err(CliError::data(format!(
            "{}: expected exactly one region per score file, found [{}]",
            path.display(),
            names.join(", ")
        )));
    }
    Ok(RegionInput::Scores(regions.remove(0)))
}

fn load_side(
    config: &RunConfig,
    side: &str,
    raw: &Option<std::path::PathBuf>,
    scores: &Option<std::path::PathBuf>,
) -> Result<RegionInput, CliError> {
    match (raw, scores) {
        (Some(_), Some(_)) => Err(CliError::config(format!(
            "give either {side} data or {side} scores, not both"
        ))),
        (Some(path), None) => Ok(RegionInput::Raw(load_dataset(config, path)?)),
        (None, Some(path)) => load_scores(config, path),
        (None, None) => Err(CliError::config(format!(
            "no {side} input: set '{side}' (raw data CSV) or '{side}_scores' (replay scores CSV)"
        ))),
    }
}

/// Run the full comparison and render the report.
pub fn analyze(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let district = load_side(
        config,
        "district",
        &config.district,
        &config.district_scores,
    )?;
    let reference = load_side(
        config,
        "reference",
        &config.reference,
        &config.reference_scores,
    )?;
    let analysis = config.to_analysis_config()?;
    let mut report = compare_methods(&district, &reference, &analysis)
        .map_err(|e| CliError::data(e.to_string()))?;
    // kept out of the canonical body; surfaces only in logs
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default();
    log::info!(
        "analysis of '{}' vs '{}' at unix {stamp}, digest {}",
        report.district,
        report.reference,
        report.metadata.config_digest
    );
    report.metadata.generated_at = Some(stamp);
    let rendered = match config.format {
        ReportFormat::Json => render_json(&report),
        ReportFormat::Table => render_table(&report),
    };
    Ok(CommandOutput::ok(rendered))
}

/// Resolve the breakpoints used for `sector`: explicit override first, then
/// derivation from the district data file.
fn sector_breakpoints(config: &RunConfig, sector: &str) -> Result<Breakpoints, CliError> {
    if let Some(bp) = config.breakpoints.get(sector) {
        return Ok(*bp);
    }
    if let Some(path) = &config.district {
        let dataset = load_dataset(config, path)?;
        let obs = dataset.get(sector).ok_or_else(|| {
            CliError::config(format!(
                "sector '{sector}' not found in '{}'",
                path.display()
            ))
        })?;
        return default_breakpoints(&[obs.value_t, obs.value_t1])
            .map_err(|e| CliError::data(e.to_string()));
    }
    Err(CliError::config(format!(
        "no breakpoints for sector '{sector}': set breakpoints.{sector} or provide a district file"
    )))
}

/// Print one line with the sector's membership degrees at `value`.
pub fn fuzzify(config: &RunConfig, sector: &str, value: &str) -> Result<CommandOutput, CliError> {
    let crisp = parse_number(value, config.locale)
        .ok_or_else(|| CliError::data(format!("cannot parse number '{value}'")))?;
    let bp = sector_breakpoints(config, sector)?;
    let analysis = config.to_analysis_config()?;
    let fis = build_sector_fis(&analysis, sector, bp).map_err(|e| CliError::data(e.to_string()))?;
    let fuzzified = fis.inputs()[0]
        .fuzzify(crisp)
        .map_err(|e| CliError::data(e.to_string()))?;
    let line = fuzzified
        .iter()
        .map(|(label, degree)| format!("{label}={degree:.4}"))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(CommandOutput::ok(format!("{line}\n")))
}

/// Emit per-grid-point curves for one sector: output membership functions,
/// each rule's implicated set and the aggregate, as CSV for external
/// plotting.
pub fn curves(config: &RunConfig, sector: &str) -> Result<CommandOutput, CliError> {
    let path = config.district.as_ref().ok_or_else(|| {
        CliError::config("curves needs a district data file (raw values drive the rules)")
    })?;
    let dataset = load_dataset(config, path)?;
    let obs = dataset.get(sector).ok_or_else(|| {
        CliError::config(format!(
            "sector '{sector}' not found in '{}'",
            path.display()
        ))
    })?;
    let bp = match config.breakpoints.get(sector) {
        Some(bp) => *bp,
        None => default_breakpoints(&[obs.value_t, obs.value_t1])
            .map_err(|e| CliError::data(e.to_string()))?,
    };
    let analysis = config.to_analysis_config()?;
    let fis = build_sector_fis(&analysis, sector, bp).map_err(|e| CliError::data(e.to_string()))?;
    let inputs = std::collections::HashMap::from([
        (VAR_CURRENT.to_string(), obs.value_t),
        (VAR_PREVIOUS.to_string(), obs.value_t1),
    ]);
    let trace = fis
        .trace(&inputs)
        .map_err(|e| CliError::data(e.to_string()))?;

    let mut header = vec!["point".to_string()];
    for (out_var, out_trace) in fis.outputs().iter().zip(&trace.outputs) {
        for label in out_var.labels() {
            header.push(format!("{}.{label}", out_var.name()));
        }
        for rule_no in 1..=out_trace.implicated.len() {
            header.push(format!("{}.rule{rule_no}", out_var.name()));
        }
        header.push(format!("{}.aggregate", out_var.name()));
    }

    let grid = trace.outputs[0].aggregate.grid().to_vec();
    let mut csv = header.join(",");
    csv.push('\n');
    for (row, &point) in grid.iter().enumerate() {
        let mut cells = vec![point.to_string()];
        for (out_var, out_trace) in fis.outputs().iter().zip(&trace.outputs) {
            for label in out_var.labels() {
                let mf = out_var.mf(label).expect("labels enumerate their own mfs");
                cells.push(format!("{:.6}", mf.eval(point as f64)));
            }
            for implicated in &out_trace.implicated {
                cells.push(format!("{:.6}", implicated.memberships()[row]));
            }
            cells.push(format!("{:.6}", out_trace.aggregate.memberships()[row]));
        }
        let _ = writeln!(csv, "{}", cells.join(","));
    }

    if trace
        .outputs
        .iter()
        .all(|out| out.aggregate.max_membership() == 0.0)
    {
        eprintln!(
            "warning: no rule fires above 0 for sector '{sector}'; aggregate curves are all zero"
        );
    }

    Ok(CommandOutput::ok(csv))
}

/// Parse a rule file and list validation findings. Exit 0 only when the
/// file is valid and complete.
pub fn rules_check(rule_file: &Path) -> Result<CommandOutput, CliError> {
    let text = read_file(rule_file)?;
    let schema = RuleSchema::klassen();
    let rules = parse_rules(&text, &schema)
        .map_err(|e| CliError::data(format!("{}: {e}", rule_file.display())))?;
    let findings = validate_rulebase(&rules, &schema);
    if findings.is_empty() {
        Ok(CommandOutput::ok(format!(
            "{}: OK ({} rules, complete over the input label product)\n",
            rule_file.display(),
            rules.len()
        )))
    } else {
        let mut out = format!("{}: {} finding(s)\n", rule_file.display(), findings.len());
        for finding in &findings {
            let _ = writeln!(out, "  - {finding}");
        }
        Ok(CommandOutput {
            stdout: out,
            exit: 1,
        })
    }
}
