//! Report rendering: a machine-readable JSON document and an aligned text
//! table. Both are pure functions of the report, so identical analyses
//! produce identical bytes.

use std::fmt::Write as _;

use fuzzy_klassen::pipeline::DisparityReport;

pub fn render_json(report: &DisparityReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports always serialize");
    text.push('\n');
    text
}

pub fn render_table(report: &DisparityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "District:  {}", report.district);
    let _ = writeln!(out, "Reference: {}", report.reference);
    let _ = writeln!(out);

    let sector_width = report
        .rows
        .iter()
        .map(|r| r.sector.len())
        .chain(std::iter::once("Sector".len()))
        .max()
        .unwrap_or(6);
    let _ = writeln!(
        out,
        "{:<sector_width$}  {:>12}  {:>12}  {:>13}  {:>13}  {:>5}  {:>11}  {:>5}",
        "Sector",
        "District RD",
        "District RC",
        "Reference RD",
        "Reference RC",
        "Fuzzy",
        "Traditional",
        "Agree",
    );
    for row in &report.rows {
        let traditional = row
            .traditional
            .map(|q| q.to_string())
            .unwrap_or_else(|| "-".to_string());
        let agree = match row.agreement {
            Some(true) => "yes",
            Some(false) => "no",
            None => "-",
        };
        let _ = writeln!(
            out,
            "{:<sector_width$}  {:>12.2}  {:>12.2}  {:>13.2}  {:>13.2}  {:>5}  {:>11}  {:>5}",
            row.sector,
            row.district.rd,
            row.district.rc,
            row.reference.rd,
            row.reference.rc,
            row.fuzzy,
            traditional,
            agree,
        );
    }

    let _ = writeln!(out);
    let counts_line = |counts: &std::collections::BTreeMap<String, usize>| {
        counts
            .iter()
            .map(|(q, n)| format!("{q}={n}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let _ = writeln!(
        out,
        "Fuzzy quadrants:       {}",
        counts_line(&report.summary.fuzzy_counts)
    );
    match &report.summary.traditional_counts {
        Some(counts) => {
            let _ = writeln!(out, "Traditional quadrants: {}", counts_line(counts));
        }
        None => {
            let _ = writeln!(
                out,
                "Traditional quadrants: - (needs raw data for both regions)"
            );
        }
    }
    match report.summary.agreement_percent {
        Some(pct) => {
            let _ = write!(out, "Agreement:             {pct:.1}%");
            if report.summary.disagreements.is_empty() {
                let _ = writeln!(out);
            } else {
                let _ = writeln!(
                    out,
                    " (disagreements: {})",
                    report.summary.disagreements.join(", ")
                );
            }
        }
        None => {
            let _ = writeln!(out, "Agreement:             -");
        }
    }
    let _ = writeln!(
        out,
        "Config digest:         {}",
        report.metadata.config_digest
    );
    out
}
