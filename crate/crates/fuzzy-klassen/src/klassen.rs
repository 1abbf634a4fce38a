//! Traditional (crisp) Klassen typology: growth rates, contribution shares
//! and the four-quadrant classification.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::GrdpDataset;

#[derive(Debug, Error, PartialEq)]
pub enum KlassenError {
    #[error("growth/share base must be positive, got {base}")]
    InvalidBase { base: f64 },
    #[error("sector value {value} is outside [0, total={total}]")]
    InvalidShare { value: f64, total: f64 },
    #[error("current value must be non-negative, got {value}")]
    NegativeValue { value: f64 },
    #[error("datasets cover different sectors: only in '{district}': [{district_only}]; only in '{reference}': [{reference_only}]")]
    MismatchedSectors {
        district: String,
        reference: String,
        district_only: String,
        reference_only: String,
    },
}

/// A sector's crisp indicators: growth rate and contribution share, both in
/// percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorIndicators {
    pub growth_rate: f64,
    pub contribution: f64,
}

/// Klassen quadrant.
///
/// K1: advanced and fast-growing. K2: contributing but with depressed
/// growth. K3: growing but still low-contribution. K4: relatively lagging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    K1,
    K2,
    K3,
    K4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::K1, Quadrant::K2, Quadrant::K3, Quadrant::K4];

    pub fn describe(self) -> &'static str {
        match self {
            Quadrant::K1 => "advanced and fast-growing",
            Quadrant::K2 => "contributing but depressed growth",
            Quadrant::K3 => "growing but low contribution",
            Quadrant::K4 => "relatively lagging",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // pad() so width/alignment specifiers work in table output
        f.pad(match self {
            Quadrant::K1 => "K1",
            Quadrant::K2 => "K2",
            Quadrant::K3 => "K3",
            Quadrant::K4 => "K4",
        })
    }
}

/// Year-over-year growth in percent: `100 * (v_t - v_t1) / v_t1`.
pub fn growth_rate(v_t: f64, v_t1: f64) -> Result<f64, KlassenError> {
    if !v_t1.is_finite() || v_t1 <= 0.0 {
        return Err(KlassenError::InvalidBase { base: v_t1 });
    }
    if v_t < 0.0 {
        return Err(KlassenError::NegativeValue { value: v_t });
    }
    Ok(100.0 * (v_t - v_t1) / v_t1)
}

/// A sector's share of the regional total in percent: `100 * value / total`.
pub fn contribution_share(sector_value: f64, total: f64) -> Result<f64, KlassenError> {
    if !total.is_finite() || total <= 0.0 {
        return Err(KlassenError::InvalidBase { base: total });
    }
    if sector_value < 0.0 || sector_value > total {
        return Err(KlassenError::InvalidShare {
            value: sector_value,
            total,
        });
    }
    Ok(100.0 * sector_value / total)
}

/// Classify a sector by comparing district indicators against the reference
/// region's. Equality counts toward the `>=` branch, so a sector matching
/// its reference exactly lands in K1.
pub fn classify_quadrant(district: SectorIndicators, reference: SectorIndicators) -> Quadrant {
    let growth_leads = district.growth_rate >= reference.growth_rate;
    let share_leads = district.contribution >= reference.contribution;
    match (growth_leads, share_leads) {
        (true, true) => Quadrant::K1,
        (false, true) => Quadrant::K2,
        (true, false) => Quadrant::K3,
        (false, false) => Quadrant::K4,
    }
}

/// Classify every sector of `district` against `reference` using crisp
/// growth rates and year-t contribution shares.
pub fn traditional_klassen(
    district: &GrdpDataset,
    reference: &GrdpDataset,
) -> Result<Vec<(String, Quadrant)>, KlassenError> {
    check_same_sectors(district, reference)?;
    let d_total = district.total_t();
    let r_total = reference.total_t();
    district
        .observations()
        .iter()
        .map(|(sector, d_obs)| {
            let r_obs = reference
                .get(sector)
                .expect("sector sets were checked above");
            let d_ind = SectorIndicators {
                growth_rate: growth_rate(d_obs.value_t, d_obs.value_t1)?,
                contribution: contribution_share(d_obs.value_t, d_total)?,
            };
            let r_ind = SectorIndicators {
                growth_rate: growth_rate(r_obs.value_t, r_obs.value_t1)?,
                contribution: contribution_share(r_obs.value_t, r_total)?,
            };
            Ok((sector.clone(), classify_quadrant(d_ind, r_ind)))
        })
        .collect()
}

pub(crate) fn check_same_sectors(
    district: &GrdpDataset,
    reference: &GrdpDataset,
) -> Result<(), KlassenError> {
    let district_only: Vec<&str> = district
        .sectors()
        .filter(|s| reference.get(s).is_none())
        .collect();
    let reference_only: Vec<&str> = reference
        .sectors()
        .filter(|s| district.get(s).is_none())
        .collect();
    if district_only.is_empty() && reference_only.is_empty() {
        Ok(())
    } else {
        Err(KlassenError::MismatchedSectors {
            district: district.region().to_string(),
            reference: reference.region().to_string(),
            district_only: district_only.join(", "),
            reference_only: reference_only.join(", "),
        })
    }
}
