//! CSV ingestion with locale-aware number parsing.
//!
//! Data files carry the header `region,sector,year,value`. Two number
//! locales are supported: `dot` (canonical, `296121.45`) and `comma`
//! (Indonesian-style `296.121,45` with dot thousands grouping and a comma
//! decimal mark). Score files for replay mode carry `region,sector,rd,rc`.

use std::str::FromStr;

use thiserror::Error;

use fuzzy_klassen::data::{DataError, GrdpDataset, SectorObservation};
use fuzzy_klassen::pipeline::{RdRc, RegionScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locale {
    DotDecimal,
    CommaDecimal,
}

impl FromStr for Locale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" | "dot-decimal" => Ok(Self::DotDecimal),
            "comma" | "comma-decimal" => Ok(Self::CommaDecimal),
            other => Err(format!(
                "unknown locale '{other}' (expected 'dot' or 'comma')"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("expected header '{expected}', found '{found}'")]
    BadHeader { expected: String, found: String },
    #[error("line {line}: cannot parse number '{text}'")]
    UnparsableNumber { line: u64, text: String },
    #[error("line {line}: cannot parse year '{text}'")]
    UnparsableYear { line: u64, text: String },
    #[error("line {line}: non-positive value for region '{region}', sector '{sector}'")]
    NonPositiveValue {
        line: u64,
        region: String,
        sector: String,
    },
    #[error("line {line}: duplicate row for (region '{region}', sector '{sector}', year {year})")]
    DuplicateRow {
        line: u64,
        region: String,
        sector: String,
        year: i32,
    },
    #[error("line {line}: duplicate score row for (region '{region}', sector '{sector}')")]
    DuplicateScore {
        line: u64,
        region: String,
        sector: String,
    },
    #[error("region '{region}', sector '{sector}': no value for year {year}")]
    MissingYear {
        region: String,
        sector: String,
        year: i32,
    },
    #[error("cannot infer the year pair: file contains years [{years}]; pass year_t/year_prev")]
    AmbiguousYears { years: String },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Parse a number in the given locale. Strict: `dot` accepts `123` or
/// `123.45`; `comma` accepts `123`, `123,45`, or grouped `1.234.567,89`.
pub fn parse_number(text: &str, locale: Locale) -> Option<f64> {
    let text = text.trim();
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let value = match locale {
        Locale::DotDecimal => parse_dot(digits)?,
        Locale::CommaDecimal => parse_comma(digits)?,
    };
    Some(if negative { -value } else { value })
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn parse_dot(s: &str) -> Option<f64> {
    match s.split_once('.') {
        None => all_digits(s).then(|| s.parse().ok())?,
        Some((int, frac)) => {
            if all_digits(int) && all_digits(frac) {
                s.parse().ok()
            } else {
                None
            }
        }
    }
}

fn parse_comma(s: &str) -> Option<f64> {
    let (int_part, frac) = match s.split_once(',') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if let Some(f) = frac {
        if !all_digits(f) {
            return None;
        }
    }
    let groups: Vec<&str> = int_part.split('.').collect();
    if groups.len() == 1 {
        if !all_digits(groups[0]) {
            return None;
        }
    } else {
        if !all_digits(groups[0]) || groups[0].len() > 3 {
            return None;
        }
        for group in &groups[1..] {
            if group.len() != 3 || !all_digits(group) {
                return None;
            }
        }
    }
    let mut normalized: String = int_part.chars().filter(|c| *c != '.').collect();
    if let Some(f) = frac {
        normalized.push('.');
        normalized.push_str(f);
    }
    normalized.parse().ok()
}

fn reader_for(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<(), IngestError> {
    let headers = reader.headers()?.clone();
    let found: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if found != expected {
        return Err(IngestError::BadHeader {
            expected: expected.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Parse a `region,sector,year,value` file into one dataset per region
/// (regions and sectors keep file order).
///
/// `years` selects the analyzed pair `(t, t-1)`; when absent the file must
/// contain exactly two distinct years and the later one is taken as `t`.
pub fn ingest(
    text: &str,
    locale: Locale,
    years: Option<(i32, i32)>,
) -> Result<Vec<GrdpDataset>, IngestError> {
    let mut reader = reader_for(text);
    check_header(&mut reader, &["region", "sector", "year", "value"])?;

    struct Row {
        region: String,
        sector: String,
        year: i32,
        value: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        let region = record.get(0).unwrap_or("").to_string();
        let sector = record.get(1).unwrap_or("").to_string();
        let year_text = record.get(2).unwrap_or("");
        let value_text = record.get(3).unwrap_or("");
        let year: i32 = year_text.parse().map_err(|_| IngestError::UnparsableYear {
            line,
            text: year_text.to_string(),
        })?;
        let value =
            parse_number(value_text, locale).ok_or_else(|| IngestError::UnparsableNumber {
                line,
                text: value_text.to_string(),
            })?;
        if value <= 0.0 {
            return Err(IngestError::NonPositiveValue {
                line,
                region,
                sector,
            });
        }
        if rows
            .iter()
            .any(|r| r.region == region && r.sector == sector && r.year == year)
        {
            return Err(IngestError::DuplicateRow {
                line,
                region,
                sector,
                year,
            });
        }
        rows.push(Row {
            region,
            sector,
            year,
            value,
        });
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyFile);
    }

    let (year_t, year_t1) = match years {
        Some(pair) => pair,
        None => {
            let mut distinct: Vec<i32> = Vec::new();
            for row in &rows {
                if !distinct.contains(&row.year) {
                    distinct.push(row.year);
                }
            }
            distinct.sort_unstable();
            if distinct.len() != 2 {
                return Err(IngestError::AmbiguousYears {
                    years: distinct
                        .iter()
                        .map(|y| y.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                });
            }
            (distinct[1], distinct[0])
        }
    };

    let mut regions: Vec<String> = Vec::new();
    for row in &rows {
        if !regions.contains(&row.region) {
            regions.push(row.region.clone());
        }
    }
    let mut datasets = Vec::with_capacity(regions.len());
    for region in regions {
        let mut sectors: Vec<String> = Vec::new();
        for row in rows.iter().filter(|r| r.region == region) {
            if !sectors.contains(&row.sector) {
                sectors.push(row.sector.clone());
            }
        }
        let mut observations = Vec::with_capacity(sectors.len());
        for sector in sectors {
            let value_for = |year: i32| {
                rows.iter()
                    .find(|r| r.region == region && r.sector == sector && r.year == year)
                    .map(|r| r.value)
            };
            let value_t = value_for(year_t).ok_or_else(|| IngestError::MissingYear {
                region: region.clone(),
                sector: sector.clone(),
                year: year_t,
            })?;
            let value_t1 = value_for(year_t1).ok_or_else(|| IngestError::MissingYear {
                region: region.clone(),
                sector: sector.clone(),
                year: year_t1,
            })?;
            observations.push((sector, SectorObservation { value_t, value_t1 }));
        }
        datasets.push(GrdpDataset::new(region, observations)?);
    }
    Ok(datasets)
}

/// Parse a `region,sector,rd,rc` score file (replay mode) into one
/// [`RegionScores`] per region.
pub fn read_scores(text: &str, locale: Locale) -> Result<Vec<RegionScores>, IngestError> {
    let mut reader = reader_for(text);
    check_header(&mut reader, &["region", "sector", "rd", "rc"])?;

    let mut regions: Vec<RegionScores> = Vec::new();
    let mut any = false;
    for record in reader.records() {
        let record = record?;
        any = true;
        let line = record_line(&record);
        let region = record.get(0).unwrap_or("").to_string();
        let sector = record.get(1).unwrap_or("").to_string();
        let number = |idx: usize| -> Result<f64, IngestError> {
            let text = record.get(idx).unwrap_or("");
            parse_number(text, locale).ok_or_else(|| IngestError::UnparsableNumber {
                line,
                text: text.to_string(),
            })
        };
        let scores = RdRc {
            rd: number(2)?,
            rc: number(3)?,
        };
        let entry = match regions.iter_mut().find(|r| r.region == region) {
            Some(entry) => entry,
            None => {
                regions.push(RegionScores {
                    region: region.clone(),
                    scores: Vec::new(),
                });
                regions.last_mut().unwrap()
            }
        };
        if entry.scores.iter().any(|(s, _)| *s == sector) {
            return Err(IngestError::DuplicateScore {
                line,
                region,
                sector,
            });
        }
        entry.scores.push((sector, scores));
    }
    if !any {
        return Err(IngestError::EmptyFile);
    }
    Ok(regions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_comma_locale_table_style() {
        assert_eq!(
            parse_number("293.563,49", Locale::CommaDecimal),
            Some(293_563.49)
        );
        assert_eq!(
            parse_number("12.101,38", Locale::CommaDecimal),
            Some(12_101.38)
        );
        assert_eq!(
            parse_number("13.218.285,53", Locale::CommaDecimal),
            Some(13_218_285.53)
        );
        assert_eq!(
            parse_number("12101,38", Locale::CommaDecimal),
            Some(12_101.38)
        );
        assert_eq!(parse_number("12101", Locale::CommaDecimal), Some(12_101.0));
    }

    #[test]
    fn parses_the_dot_locale() {
        assert_eq!(
            parse_number("296121.45", Locale::DotDecimal),
            Some(296_121.45)
        );
        assert_eq!(parse_number("296121", Locale::DotDecimal), Some(296_121.0));
        assert_eq!(parse_number("-3.5", Locale::DotDecimal), Some(-3.5));
    }

    #[test]
    fn rejects_cross_locale_and_malformed_numbers() {
        // a dot-decimal number is not valid comma-locale grouping
        assert_eq!(parse_number("296121.45", Locale::CommaDecimal), None);
        assert_eq!(parse_number("1.23.45", Locale::CommaDecimal), None);
        assert_eq!(parse_number("293.563,49", Locale::DotDecimal), None);
        assert_eq!(parse_number("1.2.3", Locale::DotDecimal), None);
        assert_eq!(parse_number("", Locale::DotDecimal), None);
        assert_eq!(parse_number("abc", Locale::DotDecimal), None);
        assert_eq!(parse_number("1,", Locale::CommaDecimal), None);
    }

    const SAMPLE: &str = "region,sector,year,value\n\
        Cilegon,V1,2011,293563.49\n\
        Cilegon,V1,2012,296121.45\n\
        Cilegon,V2,2011,12101.38\n\
        Cilegon,V2,2012,12935.68\n";

    #[test]
    fn ingest_groups_by_region_and_infers_years() {
        let datasets = ingest(SAMPLE, Locale::DotDecimal, None).unwrap();
        assert_eq!(datasets.len(), 1);
        let ds = &datasets[0];
        assert_eq!(ds.region(), "Cilegon");
        let v1 = ds.get("V1").unwrap();
        assert_eq!(v1.value_t, 296_121.45);
        assert_eq!(v1.value_t1, 293_563.49);
    }

    #[test]
    fn ingest_same_numbers_in_both_locales_agree() {
        let comma = "region,sector,year,value\n\
            Cilegon,V1,2011,\"293.563,49\"\n\
            Cilegon,V1,2012,\"296.121,45\"\n";
        let dot = "region,sector,year,value\n\
            Cilegon,V1,2011,293563.49\n\
            Cilegon,V1,2012,296121.45\n";
        let a = ingest(comma, Locale::CommaDecimal, None).unwrap();
        let b = ingest(dot, Locale::DotDecimal, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ingest_reports_missing_year_with_sector() {
        let text = "region,sector,year,value\n\
            Cilegon,V1,2011,1.0\n\
            Cilegon,V1,2012,2.0\n\
            Cilegon,V2,2012,3.0\n";
        let err = ingest(text, Locale::DotDecimal, None).unwrap_err();
        match err {
            IngestError::MissingYear { sector, year, .. } => {
                assert_eq!(sector, "V2");
                assert_eq!(year, 2011);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn ingest_reports_duplicates_and_bad_numbers_with_lines() {
        let dup = "region,sector,year,value\n\
            C,V1,2011,1.0\n\
            C,V1,2011,2.0\n";
        assert!(matches!(
            ingest(dup, Locale::DotDecimal, None).unwrap_err(),
            IngestError::DuplicateRow { line: 3, .. }
        ));
        let bad = "region,sector,year,value\nC,V1,2011,oops\n";
        assert!(matches!(
            ingest(bad, Locale::DotDecimal, None).unwrap_err(),
            IngestError::UnparsableNumber { line: 2, .. }
        ));
        let nonpos = "region,sector,year,value\nC,V1,2011,0\n";
        assert!(matches!(
            ingest(nonpos, Locale::DotDecimal, None).unwrap_err(),
            IngestError::NonPositiveValue { line: 2, .. }
        ));
    }

    #[test]
    fn ingest_requires_exactly_two_years_unless_told() {
        let three = "region,sector,year,value\n\
            C,V1,2010,1.0\nC,V1,2011,2.0\nC,V1,2012,3.0\n";
        assert!(matches!(
            ingest(three, Locale::DotDecimal, None).unwrap_err(),
            IngestError::AmbiguousYears { .. }
        ));
        let datasets = ingest(three, Locale::DotDecimal, Some((2012, 2010))).unwrap();
        let obs = datasets[0].get("V1").unwrap();
        assert_eq!(obs.value_t, 3.0);
        assert_eq!(obs.value_t1, 1.0);
    }

    #[test]
    fn ingest_rejects_wrong_header_and_empty_files() {
        assert!(matches!(
            ingest("a,b,c\n1,2,3\n", Locale::DotDecimal, None).unwrap_err(),
            IngestError::BadHeader { .. }
        ));
        assert!(matches!(
            ingest("region,sector,year,value\n", Locale::DotDecimal, None).unwrap_err(),
            IngestError::EmptyFile
        ));
    }

    #[test]
    fn scores_files_parse_and_reject_duplicates() {
        let text = "region,sector,rd,rc\nBanten,V1,29.1,27.5\nBanten,V2,75.5,75.3\n";
        let scores = read_scores(text, Locale::DotDecimal).unwrap();
        assert_eq!(scores.len(), 1);
        assert_eq!(scores[0].get("V2").unwrap().rd, 75.5);
        let dup = "region,sector,rd,rc\nB,V1,1,2\nB,V1,3,4\n";
        assert!(matches!(
            read_scores(dup, Locale::DotDecimal).unwrap_err(),
            IngestError::DuplicateScore { line: 3, .. }
        ));
    }
}
