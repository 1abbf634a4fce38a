//! End-to-end fuzzy-Klassen analysis: build per-sector fuzzy systems,
//! compute RD/RC scores for a district and a reference region, classify
//! quadrants and compare against the traditional crisp method.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::data::GrdpDataset;
use crate::engine::{EngineError, FuzzySystem};
use crate::klassen::{self, classify_quadrant, KlassenError, Quadrant, SectorIndicators};
use crate::membership::{MembershipError, MembershipFunction};
use crate::ops::OperatorSet;
use crate::rulebase::{
    default_klassen_rules, format_rules, validate_rulebase, RuleBase, RuleSchema, VAR_CONTRIBUTION,
    VAR_CURRENT, VAR_GROWTH, VAR_PREVIOUS,
};
use crate::variable::{FuzzyVariable, Universe, VariableError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("breakpoint series is empty")]
    EmptySeries,
    #[error("breakpoints must be positive and ordered a < b < c, got ({a}, {b}, {c})")]
    BadBreakpoints { a: f64, b: f64, c: f64 },
    #[error("no breakpoints available for sector '{sector}'")]
    MissingBreakpoints { sector: String },
    #[error("output feet must satisfy a < b within the grid, got ({a}, {b})")]
    BadFeet { a: f64, b: f64 },
    #[error("grid must satisfy min <= max, got {min}..{max}")]
    BadGrid { min: i64, max: i64 },
    #[error("rule base fails validation: {findings}")]
    InvalidRuleBase { findings: String },
    #[error("sector '{sector}': {source}")]
    Sector {
        sector: String,
        #[source]
        source: Box<PipelineError>,
    },
    #[error("injected scores for region '{region}' are missing sector '{sector}'")]
    MissingScore { region: String, sector: String },
    #[error("regions cover different sectors: only in '{district}': [{district_only}]; only in '{reference}': [{reference_only}]")]
    MismatchedSectors {
        district: String,
        reference: String,
        district_only: String,
        reference_only: String,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Variable(#[from] VariableError),
    #[error(transparent)]
    Membership(#[from] MembershipError),
    #[error(transparent)]
    Klassen(#[from] KlassenError),
}

/// The low/medium/high anchor points of one sector's input variables:
/// low ramps down over `[a, b]`, medium peaks at `b` inside `[a, c]`, high
/// ramps up over `[b, c]`. The three shapes form a partition of unity on
/// `[a, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoints {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Breakpoints {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, PipelineError> {
        if a.is_finite() && b.is_finite() && c.is_finite() && a < b && b < c {
            Ok(Self { a, b, c })
        } else {
            Err(PipelineError::BadBreakpoints { a, b, c })
        }
    }
}

/// Derive breakpoints from an observed series.
///
/// The midpoint of the series range becomes `b`; the half-width is the
/// larger of the spread on either side and a 25% relative floor, doubled
/// outward, so every observed value falls strictly inside `(a, c)`. `a` is
/// floored at zero. Exact replays override this heuristic per sector.
pub fn default_breakpoints(series: &[f64]) -> Result<Breakpoints, PipelineError> {
    if series.is_empty() {
        return Err(PipelineError::EmptySeries);
    }
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !min.is_finite() || min <= 0.0 || !max.is_finite() {
        return Err(PipelineError::BadBreakpoints {
            a: min,
            b: min,
            c: max,
        });
    }
    let b = (min + max) / 2.0;
    let w = (b - min).max(max - b).max(0.25 * b);
    let a = (b - 2.0 * w).max(0.0);
    let c = b + 2.0 * w;
    Breakpoints::new(a, b, c)
}

/// Everything needed to build and run the per-sector fuzzy systems.
///
/// `breakpoints` are per-sector overrides shared by both regions;
/// `reference_breakpoints` override them for the reference region only.
/// Sectors without an override get [`default_breakpoints`] derived from the
/// district's observed series (the reference reuses those by default).
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub breakpoints: BTreeMap<String, Breakpoints>,
    pub reference_breakpoints: BTreeMap<String, Breakpoints>,
    /// Feet of the RD output ramps (low ramps down, high ramps up).
    pub rd_feet: (f64, f64),
    /// Feet of the RC output ramps.
    pub rc_feet: (f64, f64),
    /// Inclusive integer output grid.
    pub grid: (i64, i64),
    pub ops: OperatorSet,
    pub rules: RuleBase,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            breakpoints: BTreeMap::new(),
            reference_breakpoints: BTreeMap::new(),
            rd_feet: (30.0, 79.0),
            rc_feet: (33.0, 72.0),
            grid: (1, 100),
            ops: OperatorSet::default(),
            rules: default_klassen_rules(),
        }
    }
}

impl AnalysisConfig {
    /// SHA-256 digest of the effective configuration, stable across runs.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_text().as_bytes());
        format!("sha256:{:x}", hasher.finalize())
    }

    fn canonical_text(&self) -> String {
        let mut text = String::new();
        let _ = writeln!(text, "ops = {}", self.ops);
        let _ = writeln!(text, "grid = {}..{}", self.grid.0, self.grid.1);
        let _ = writeln!(text, "rd_feet = {},{}", self.rd_feet.0, self.rd_feet.1);
        let _ = writeln!(text, "rc_feet = {},{}", self.rc_feet.0, self.rc_feet.1);
        for (sector, bp) in &self.breakpoints {
            let _ = writeln!(text, "breakpoints.{sector} = {},{},{}", bp.a, bp.b, bp.c);
        }
        for (sector, bp) in &self.reference_breakpoints {
            let _ = writeln!(
                text,
                "reference_breakpoints.{sector} = {},{},{}",
                bp.a, bp.b, bp.c
            );
        }
        text.push_str("rules:\n");
        text.push_str(&format_rules(&self.rules));
        text
    }

    fn resolve_breakpoints(
        &self,
        sector: &str,
        reference_side: bool,
        district: Option<&GrdpDataset>,
        own: Option<&GrdpDataset>,
    ) -> Result<Breakpoints, PipelineError> {
        if reference_side {
            if let Some(bp) = self.reference_breakpoints.get(sector) {
                return Ok(*bp);
            }
        }
        if let Some(bp) = self.breakpoints.get(sector) {
            return Ok(*bp);
        }
        // derive from the district series when it exists, else our own
        let source = district.or(own);
        let obs = source.and_then(|ds| ds.get(sector)).ok_or_else(|| {
            PipelineError::MissingBreakpoints {
                sector: sector.to_string(),
            }
        })?;
        default_breakpoints(&[obs.value_t, obs.value_t1])
    }
}

/// Crisp defuzzified scores of one sector's fuzzy system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdRc {
    pub rd: f64,
    pub rc: f64,
}

/// Build the two-input/two-output fuzzy system for one sector: inputs `Vt`
/// and `Vt1` share the sector's breakpoint triple, outputs `RD` and `RC`
/// carry low/high ramp pairs on the configured grid. Errors carry the
/// sector id.
pub fn build_sector_fis(
    cfg: &AnalysisConfig,
    sector: &str,
    bp: Breakpoints,
) -> Result<FuzzySystem, PipelineError> {
    build_fis(cfg, bp).map_err(|e| PipelineError::Sector {
        sector: sector.to_string(),
        source: Box::new(e),
    })
}

fn build_fis(cfg: &AnalysisConfig, bp: Breakpoints) -> Result<FuzzySystem, PipelineError> {
    let findings = validate_rulebase(&cfg.rules, &RuleSchema::klassen());
    if !findings.is_empty() {
        return Err(PipelineError::InvalidRuleBase {
            findings: findings
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        });
    }
    let (gmin, gmax) = cfg.grid;
    if gmin > gmax {
        return Err(PipelineError::BadGrid {
            min: gmin,
            max: gmax,
        });
    }
    let sector_input = |name: &str| -> Result<FuzzyVariable, PipelineError> {
        let universe =
            Universe::continuous(bp.a, bp.c).map_err(|_| PipelineError::BadBreakpoints {
                a: bp.a,
                b: bp.b,
                c: bp.c,
            })?;
        Ok(FuzzyVariable::new(
            name,
            universe,
            vec![
                ("low".into(), MembershipFunction::ramp_down(bp.a, bp.b)?),
                (
                    "medium".into(),
                    MembershipFunction::triangle(bp.a, bp.b, bp.c)?,
                ),
                ("high".into(), MembershipFunction::ramp_up(bp.b, bp.c)?),
            ],
        )?)
    };
    let score_output = |name: &str, feet: (f64, f64)| -> Result<FuzzyVariable, PipelineError> {
        let (fa, fb) = feet;
        if !fa.is_finite() || !fb.is_finite() || fa >= fb || fa < gmin as f64 || fb > gmax as f64 {
            return Err(PipelineError::BadFeet { a: fa, b: fb });
        }
        Ok(FuzzyVariable::new(
            name,
            Universe::grid(gmin, gmax).map_err(|_| PipelineError::BadGrid {
                min: gmin,
                max: gmax,
            })?,
            vec![
                ("low".into(), MembershipFunction::ramp_down(fa, fb)?),
                ("high".into(), MembershipFunction::ramp_up(fa, fb)?),
            ],
        )?)
    };
    Ok(FuzzySystem::new(
        vec![sector_input(VAR_CURRENT)?, sector_input(VAR_PREVIOUS)?],
        vec![
            score_output(VAR_GROWTH, cfg.rd_feet)?,
            score_output(VAR_CONTRIBUTION, cfg.rc_feet)?,
        ],
        cfg.rules.clone(),
        cfg.ops,
    )?)
}

/// Run one sector's system on its two-year observation.
pub fn compute_rd_rc(fis: &FuzzySystem, v_t: f64, v_t1: f64) -> Result<RdRc, PipelineError> {
    let inputs = HashMap::from([
        (VAR_CURRENT.to_string(), v_t),
        (VAR_PREVIOUS.to_string(), v_t1),
    ]);
    let outputs = fis.infer(&inputs)?;
    let lookup = |name: &str| {
        outputs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .expect("sector systems always carry RD and RC")
    };
    Ok(RdRc {
        rd: lookup(VAR_GROWTH),
        rc: lookup(VAR_CONTRIBUTION),
    })
}

/// Injected per-sector scores for a region whose raw data is unavailable.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionScores {
    pub region: String,
    pub scores: Vec<(String, RdRc)>,
}

impl RegionScores {
    pub fn get(&self, sector: &str) -> Option<RdRc> {
        self.scores
            .iter()
            .find(|(s, _)| s == sector)
            .map(|(_, v)| *v)
    }
}

/// One side of a comparison: either raw observations (scores are computed)
/// or externally supplied scores (replay mode).
#[derive(Debug, Clone)]
pub enum RegionInput {
    Raw(GrdpDataset),
    Scores(RegionScores),
}

impl RegionInput {
    pub fn region(&self) -> &str {
        match self {
            Self::Raw(ds) => ds.region(),
            Self::Scores(sc) => &sc.region,
        }
    }

    fn sectors(&self) -> Vec<String> {
        match self {
            Self::Raw(ds) => ds.sectors().map(str::to_string).collect(),
            Self::Scores(sc) => sc.scores.iter().map(|(s, _)| s.clone()).collect(),
        }
    }

    fn raw(&self) -> Option<&GrdpDataset> {
        match self {
            Self::Raw(ds) => Some(ds),
            Self::Scores(_) => None,
        }
    }
}

/// Compute a region's per-sector RD/RC scores.
fn region_scores(
    input: &RegionInput,
    reference_side: bool,
    district: Option<&GrdpDataset>,
    cfg: &AnalysisConfig,
) -> Result<Vec<(String, RdRc)>, PipelineError> {
    match input {
        RegionInput::Scores(scores) => Ok(scores.scores.clone()),
        RegionInput::Raw(ds) => ds
            .observations()
            .iter()
            .map(|(sector, obs)| {
                let in_sector = |e: PipelineError| PipelineError::Sector {
                    sector: sector.clone(),
                    source: Box::new(e),
                };
                let bp = cfg
                    .resolve_breakpoints(sector, reference_side, district, Some(ds))
                    .map_err(in_sector)?;
                for value in [obs.value_t, obs.value_t1] {
                    if value < bp.a || value > bp.c {
                        log::warn!(
                            "region '{}', sector '{}': value {} outside [{}, {}], clamped",
                            ds.region(),
                            sector,
                            value,
                            bp.a,
                            bp.c
                        );
                    }
                }
                // build_sector_fis already tags its errors with the sector
                let fis = build_sector_fis(cfg, sector, bp)?;
                let scores = compute_rd_rc(&fis, obs.value_t, obs.value_t1).map_err(in_sector)?;
                Ok((sector.clone(), scores))
            })
            .collect(),
    }
}

/// Classify every sector by comparing fuzzy scores district-vs-reference.
///
/// The quadrant predicate is the crisp Klassen one with (rd, rc) in place of
/// (growth rate, contribution share); equality counts toward K1.
pub fn fuzzy_klassen(
    district: &GrdpDataset,
    reference: &GrdpDataset,
    cfg: &AnalysisConfig,
) -> Result<Vec<(String, Quadrant)>, PipelineError> {
    let report = compare_methods(
        &RegionInput::Raw(district.clone()),
        &RegionInput::Raw(reference.clone()),
        cfg,
    )?;
    Ok(report
        .rows
        .into_iter()
        .map(|row| (row.sector, row.fuzzy))
        .collect())
}

fn classify_scores(district: RdRc, reference: RdRc) -> Quadrant {
    classify_quadrant(
        SectorIndicators {
            growth_rate: district.rd,
            contribution: district.rc,
        },
        SectorIndicators {
            growth_rate: reference.rd,
            contribution: reference.rc,
        },
    )
}

/// One sector's line in the disparity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorDisparity {
    pub sector: String,
    pub district: RdRc,
    pub reference: RdRc,
    pub fuzzy: Quadrant,
    /// Crisp classification; absent when either side lacks raw data.
    pub traditional: Option<Quadrant>,
    /// Whether fuzzy and traditional agree; absent with `traditional`.
    pub agreement: Option<bool>,
}

/// Quadrant counts and agreement statistics over all sectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub fuzzy_counts: BTreeMap<String, usize>,
    pub traditional_counts: Option<BTreeMap<String, usize>>,
    pub agreement_percent: Option<f64>,
    pub disagreements: Vec<String>,
}

/// Run metadata. The generation timestamp is deliberately excluded from the
/// serialized (canonical) form so identical inputs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub config_digest: String,
    #[serde(skip)]
    pub generated_at: Option<String>,
}

/// The joined per-sector comparison of both classification methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityReport {
    pub district: String,
    pub reference: String,
    pub rows: Vec<SectorDisparity>,
    pub summary: ReportSummary,
    pub metadata: ReportMetadata,
}

/// Compare the fuzzy-Klassen and traditional classifications sector by
/// sector. Either side may be raw data or injected scores; the traditional
/// column appears only when both sides are raw.
pub fn compare_methods(
    district: &RegionInput,
    reference: &RegionInput,
    cfg: &AnalysisConfig,
) -> Result<DisparityReport, PipelineError> {
    let d_sectors = district.sectors();
    let r_sectors = reference.sectors();
    let district_only: Vec<&String> = d_sectors
        .iter()
        .filter(|s| !r_sectors.contains(s))
        .collect();
    let reference_only: Vec<&String> = r_sectors
        .iter()
        .filter(|s| !d_sectors.contains(s))
        .collect();
    if !district_only.is_empty() || !reference_only.is_empty() {
        return Err(PipelineError::MismatchedSectors {
            district: district.region().to_string(),
            reference: reference.region().to_string(),
            district_only: district_only
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", "),
            reference_only: reference_only
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        });
    }

    let d_scores = region_scores(district, false, district.raw(), cfg)?;
    let r_scores = region_scores(reference, true, district.raw(), cfg)?;
    let r_lookup = |sector: &str| -> Result<RdRc, PipelineError> {
        r_scores
            .iter()
            .find(|(s, _)| s == sector)
            .map(|(_, v)| *v)
            .ok_or_else(|| PipelineError::MissingScore {
                region: reference.region().to_string(),
                sector: sector.to_string(),
            })
    };

    let traditional: Option<Vec<(String, Quadrant)>> = match (district.raw(), reference.raw()) {
        (Some(d), Some(r)) => Some(klassen::traditional_klassen(d, r)?),
        _ => None,
    };

    let mut rows = Vec::with_capacity(d_scores.len());
    for (sector, d_rdrc) in &d_scores {
        let r_rdrc = r_lookup(sector)?;
        let fuzzy = classify_scores(*d_rdrc, r_rdrc);
        let trad = traditional.as_ref().map(|t| {
            t.iter()
                .find(|(s, _)| s == sector)
                .map(|(_, q)| *q)
                .expect("traditional covers the same sector set")
        });
        rows.push(SectorDisparity {
            sector: sector.clone(),
            district: *d_rdrc,
            reference: r_rdrc,
            fuzzy,
            traditional: trad,
            agreement: trad.map(|t| t == fuzzy),
        });
    }

    let mut fuzzy_counts: BTreeMap<String, usize> =
        Quadrant::ALL.iter().map(|q| (q.to_string(), 0)).collect();
    for row in &rows {
        *fuzzy_counts.get_mut(&row.fuzzy.to_string()).unwrap() += 1;
    }
    let traditional_counts = traditional.is_some().then(|| {
        let mut counts: BTreeMap<String, usize> =
            Quadrant::ALL.iter().map(|q| (q.to_string(), 0)).collect();
        for row in &rows {
            if let Some(t) = row.traditional {
                *counts.get_mut(&t.to_string()).unwrap() += 1;
            }
        }
        counts
    });
    let disagreements: Vec<String> = rows
        .iter()
        .filter(|r| r.agreement == Some(false))
        .map(|r| r.sector.clone())
        .collect();
    let agreement_percent = traditional.is_some().then(|| {
        let agreeing = rows.iter().filter(|r| r.agreement == Some(true)).count();
        100.0 * agreeing as f64 / rows.len() as f64
    });

    Ok(DisparityReport {
        district: district.region().to_string(),
        reference: reference.region().to_string(),
        rows,
        summary: ReportSummary {
            fuzzy_counts,
            traditional_counts,
            agreement_percent,
            disagreements,
        },
        metadata: ReportMetadata {
            config_digest: cfg.digest(),
            generated_at: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SectorObservation;

    fn v1_breakpoints() -> Breakpoints {
        Breakpoints::new(216_831.0, 283_777.0, 350_722.0).unwrap()
    }

    #[test]
    fn default_breakpoints_of_the_two_year_series() {
        let bp = default_breakpoints(&[293_563.49, 296_121.45]).unwrap();
        assert!((bp.b - 294_842.47).abs() < 1e-6);
        // spread floor kicks in: w = 0.25 * b
        let w = 0.25 * bp.b;
        assert!((bp.a - (bp.b - 2.0 * w)).abs() < 1e-6);
        assert!((bp.c - (bp.b + 2.0 * w)).abs() < 1e-6);
        assert!(bp.a < 293_563.49 && 296_121.45 < bp.c);
    }

    #[test]
    fn default_breakpoints_of_a_constant_series() {
        let bp = default_breakpoints(&[42.0, 42.0]).unwrap();
        assert!(bp.a < 42.0 && 42.0 < bp.c);
    }

    #[test]
    fn default_breakpoints_reject_bad_series() {
        assert!(matches!(
            default_breakpoints(&[]),
            Err(PipelineError::EmptySeries)
        ));
        assert!(default_breakpoints(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn sector_fis_reproduces_the_worked_fuzzification() {
        let cfg = AnalysisConfig::default();
        let fis = build_sector_fis(&cfg, "V1", v1_breakpoints()).unwrap();
        let fuzzified = fis.inputs()[0].fuzzify(296_121.45).unwrap();
        assert!((fuzzified.degree("medium").unwrap() - 0.816).abs() < 0.001);
        // RD low at 31 matches the reference point value
        let rd_low = fis.outputs()[0].mf("low").unwrap();
        assert!((rd_low.eval(31.0) - 0.9796).abs() < 1e-4);
    }

    #[test]
    fn sector_fis_rejects_invalid_rule_bases() {
        let mut cfg = AnalysisConfig::default();
        let mut rules = default_klassen_rules().rules().to_vec();
        rules.pop();
        cfg.rules = RuleBase::new(rules).unwrap();
        match build_sector_fis(&cfg, "V1", v1_breakpoints()).unwrap_err() {
            PipelineError::Sector { sector, source } => {
                assert_eq!(sector, "V1");
                assert!(matches!(*source, PipelineError::InvalidRuleBase { .. }));
            }
            other => panic!("expected sector-tagged error, got {other}"),
        }
    }

    #[test]
    fn rd_rc_match_the_frozen_worked_example() {
        let cfg = AnalysisConfig::default();
        let fis = build_sector_fis(&cfg, "V1", v1_breakpoints()).unwrap();
        let scores = compute_rd_rc(&fis, 296_121.45, 293_563.49).unwrap();
        // frozen from the naive reference route; reference values are
        // 37.79 and 35.38
        assert!((scores.rd - 36.053217).abs() < 1e-4, "rd = {}", scores.rd);
        assert!((scores.rc - 35.444413).abs() < 1e-4, "rc = {}", scores.rc);
    }

    #[test]
    fn deep_low_inputs_give_the_pure_low_centroid() {
        let cfg = AnalysisConfig::default();
        let fis = build_sector_fis(&cfg, "V1", v1_breakpoints()).unwrap();
        let scores = compute_rd_rc(&fis, 216_831.0, 216_831.0).unwrap();
        let expected =
            crate::engine::aggregate_output(&[(1.0, "low")], &fis.outputs()[0], &cfg.ops)
                .unwrap()
                .centroid()
                .unwrap();
        assert!((scores.rd - expected).abs() < 1e-12);
    }

    fn scores_input(region: &str, rows: &[(&str, f64, f64)]) -> RegionInput {
        RegionInput::Scores(RegionScores {
            region: region.to_string(),
            scores: rows
                .iter()
                .map(|&(s, rd, rc)| (s.to_string(), RdRc { rd, rc }))
                .collect(),
        })
    }

    #[test]
    fn injected_score_replay_reproduces_the_reference_quadrants() {
        let district = scores_input(
            "Kota Cilegon",
            &[
                ("V1", 37.8, 35.4),
                ("V2", 75.5, 75.3),
                ("V3", 75.5, 75.3),
                ("V4", 32.1, 30.8),
                ("V5", 29.1, 27.5),
                ("V6", 75.5, 75.3),
                ("V7", 30.9, 29.5),
                ("V8", 75.5, 75.3),
                ("V9", 75.5, 75.3),
            ],
        );
        let reference = scores_input(
            "Banten Province",
            &[
                ("V1", 29.1, 27.5),
                ("V2", 29.1, 27.5),
                ("V3", 39.8, 39.2),
                ("V4", 29.1, 27.5),
                ("V5", 29.1, 27.5),
                ("V6", 75.5, 75.3),
                ("V7", 75.5, 75.3),
                ("V8", 29.1, 27.5),
                ("V9", 75.5, 75.3),
            ],
        );
        let report = compare_methods(&district, &reference, &AnalysisConfig::default()).unwrap();
        let quadrants: Vec<Quadrant> = report.rows.iter().map(|r| r.fuzzy).collect();
        let expected = [
            Quadrant::K1,
            Quadrant::K1,
            Quadrant::K1,
            Quadrant::K1,
            Quadrant::K1,
            Quadrant::K1,
            Quadrant::K4,
            Quadrant::K1,
            Quadrant::K1,
        ];
        assert_eq!(quadrants, expected);
        // no raw data on either side: traditional column absent
        assert!(report.rows.iter().all(|r| r.traditional.is_none()));
        assert_eq!(report.summary.fuzzy_counts["K1"], 8);
        assert_eq!(report.summary.fuzzy_counts["K4"], 1);
    }

    fn dataset(region: &str, rows: &[(&str, f64, f64)]) -> GrdpDataset {
        GrdpDataset::new(
            region,
            rows.iter()
                .map(|&(s, t, t1)| {
                    (
                        s.to_string(),
                        SectorObservation {
                            value_t: t,
                            value_t1: t1,
                        },
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn fuzzy_klassen_classifies_identical_regions_as_k1() {
        let ds = dataset(
            "same",
            &[("V1", 296_121.45, 293_563.49), ("V2", 10.0, 12.0)],
        );
        let quadrants = fuzzy_klassen(&ds, &ds, &AnalysisConfig::default()).unwrap();
        assert_eq!(quadrants.len(), 2);
        assert!(quadrants.iter().all(|(_, q)| *q == Quadrant::K1));
    }

    #[test]
    fn identical_regions_are_all_k1_and_fully_agree() {
        let ds = dataset("same", &[("V1", 10.0, 8.0), ("V2", 30.0, 40.0)]);
        let report = compare_methods(
            &RegionInput::Raw(ds.clone()),
            &RegionInput::Raw(ds),
            &AnalysisConfig::default(),
        )
        .unwrap();
        assert!(report.rows.iter().all(|r| r.fuzzy == Quadrant::K1));
        assert!(report
            .rows
            .iter()
            .all(|r| r.traditional == Some(Quadrant::K1)));
        assert_eq!(report.summary.agreement_percent, Some(100.0));
        assert!(report.summary.disagreements.is_empty());
    }

    /// Tuned fixture where the two methods disagree on exactly one sector:
    /// sector B's absolute level sits at the high plateau of its (overridden)
    /// fuzzy landscape, while its crisp growth and share both trail the
    /// reference.
    #[test]
    fn constructed_fixture_disagrees_on_exactly_one_sector() {
        let district = dataset("d", &[("A", 1000.0, 500.0), ("B", 10.0, 9.0)]);
        let reference = dataset("r", &[("A", 150.0, 100.0), ("B", 200.0, 100.0)]);
        let mut cfg = AnalysisConfig::default();
        cfg.breakpoints
            .insert("A".into(), Breakpoints::new(100.0, 500.0, 1200.0).unwrap());
        cfg.breakpoints
            .insert("B".into(), Breakpoints::new(1.0, 5.0, 9.0).unwrap());
        cfg.reference_breakpoints
            .insert("A".into(), Breakpoints::new(50.0, 150.0, 400.0).unwrap());
        cfg.reference_breakpoints
            .insert("B".into(), Breakpoints::new(150.0, 300.0, 500.0).unwrap());
        let report = compare_methods(
            &RegionInput::Raw(district),
            &RegionInput::Raw(reference),
            &cfg,
        )
        .unwrap();
        assert_eq!(report.rows[0].fuzzy, Quadrant::K1);
        assert_eq!(report.rows[0].traditional, Some(Quadrant::K1));
        assert_eq!(report.rows[1].fuzzy, Quadrant::K1);
        assert_eq!(report.rows[1].traditional, Some(Quadrant::K4));
        assert_eq!(report.summary.disagreements, vec!["B".to_string()]);
        let pct = report.summary.agreement_percent.unwrap();
        assert!((pct - 50.0).abs() < 1e-9);
    }

    #[test]
    fn permuting_sectors_permutes_report_rows() {
        let district = dataset("d", &[("A", 10.0, 9.0), ("B", 20.0, 25.0)]);
        let reference = dataset("r", &[("B", 21.0, 20.0), ("A", 11.0, 10.0)]);
        let cfg = AnalysisConfig::default();
        let forward = compare_methods(
            &RegionInput::Raw(district.clone()),
            &RegionInput::Raw(reference.clone()),
            &cfg,
        )
        .unwrap();
        let swapped = dataset("d", &[("B", 20.0, 25.0), ("A", 10.0, 9.0)]);
        let backward = compare_methods(
            &RegionInput::Raw(swapped),
            &RegionInput::Raw(reference),
            &cfg,
        )
        .unwrap();
        assert_eq!(forward.rows.len(), backward.rows.len());
        for row in &forward.rows {
            let twin = backward
                .rows
                .iter()
                .find(|r| r.sector == row.sector)
                .unwrap();
            assert_eq!(row, twin);
        }
        assert_eq!(forward.rows[0].sector, "A");
        assert_eq!(backward.rows[0].sector, "B");
    }

    #[test]
    fn mismatched_sector_sets_are_rejected() {
        let district = dataset("d", &[("A", 10.0, 9.0)]);
        let reference = dataset("r", &[("B", 21.0, 20.0)]);
        let err = compare_methods(
            &RegionInput::Raw(district),
            &RegionInput::Raw(reference),
            &AnalysisConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, PipelineError::MismatchedSectors { .. }));
    }

    #[test]
    fn report_serialization_round_trips() {
        let ds = dataset("d", &[("V1", 10.0, 8.0)]);
        let report = compare_methods(
            &RegionInput::Raw(ds.clone()),
            &RegionInput::Raw(ds),
            &AnalysisConfig::default(),
        )
        .unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: DisparityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(!json.contains("generated_at"));
    }

    #[test]
    fn config_digest_is_stable_and_sensitive() {
        let cfg = AnalysisConfig::default();
        assert_eq!(cfg.digest(), AnalysisConfig::default().digest());
        let other = AnalysisConfig {
            grid: (1, 200),
            ..AnalysisConfig::default()
        };
        assert_ne!(cfg.digest(), other.digest());
    }

    #[test]
    fn sector_errors_carry_the_sector_id() {
        // a single-rule base is incomplete and fails validation
        let rules = RuleBase::new(vec![crate::rulebase::Rule::new(
            vec![
                (VAR_CURRENT.into(), "high".into()),
                (VAR_PREVIOUS.into(), "high".into()),
            ],
            vec![
                (VAR_GROWTH.into(), "high".into()),
                (VAR_CONTRIBUTION.into(), "high".into()),
            ],
        )
        .unwrap()])
        .unwrap();
        let cfg = AnalysisConfig {
            rules,
            ..AnalysisConfig::default()
        };
        let district = dataset("d", &[("A", 10.0, 9.0)]);
        let err = compare_methods(
            &RegionInput::Raw(district.clone()),
            &RegionInput::Raw(district),
            &cfg,
        )
        .unwrap_err();
        match err {
            PipelineError::Sector { sector, source } => {
                assert_eq!(sector, "A");
                assert!(matches!(*source, PipelineError::InvalidRuleBase { .. }));
            }
            other => panic!("expected sector-tagged error, got {other}"),
        }
    }
}
