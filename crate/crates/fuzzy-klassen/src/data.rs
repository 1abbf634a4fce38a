//! GRDP observations: one region's per-sector values for two years.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("region name must be non-empty")]
    EmptyRegion,
    #[error("dataset for region '{region}' has no sectors")]
    EmptyDataset { region: String },
    #[error("region '{region}': sector '{sector}' appears more than once")]
    DuplicateSector { region: String, sector: String },
    #[error("region '{region}': sector '{sector}' has a non-positive value")]
    NonPositiveValue { region: String, sector: String },
}

/// One sector's observed values for the analyzed year `t` and the year
/// before, `t-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorObservation {
    pub value_t: f64,
    pub value_t1: f64,
}

/// A region's GRDP decomposed by sector, in a stable (insertion) order.
#[derive(Debug, Clone, PartialEq)]
pub struct GrdpDataset {
    region: String,
    sectors: Vec<(String, SectorObservation)>,
}

impl GrdpDataset {
    pub fn new(
        region: impl Into<String>,
        sectors: Vec<(String, SectorObservation)>,
    ) -> Result<Self, DataError> {
        let region = region.into();
        if region.is_empty() {
            return Err(DataError::EmptyRegion);
        }
        if sectors.is_empty() {
            return Err(DataError::EmptyDataset { region });
        }
        for (i, (sector, obs)) in sectors.iter().enumerate() {
            if sectors[..i].iter().any(|(s, _)| s == sector) {
                return Err(DataError::DuplicateSector {
                    region,
                    sector: sector.clone(),
                });
            }
            if !obs.value_t.is_finite()
                || obs.value_t <= 0.0
                || !obs.value_t1.is_finite()
                || obs.value_t1 <= 0.0
            {
                return Err(DataError::NonPositiveValue {
                    region,
                    sector: sector.clone(),
                });
            }
        }
        Ok(Self { region, sectors })
    }

    pub fn region(&self) -> &str {
        &self.region
    }

    pub fn sectors(&self) -> impl Iterator<Item = &str> {
        self.sectors.iter().map(|(s, _)| s.as_str())
    }

    pub fn observations(&self) -> &[(String, SectorObservation)] {
        &self.sectors
    }

    pub fn get(&self, sector: &str) -> Option<SectorObservation> {
        self.sectors
            .iter()
            .find(|(s, _)| s == sector)
            .map(|(_, obs)| *obs)
    }

    /// Total value over all sectors for year `t`.
    pub fn total_t(&self) -> f64 {
        self.sectors.iter().map(|(_, o)| o.value_t).sum()
    }

    /// Total value over all sectors for year `t-1`.
    pub fn total_t1(&self) -> f64 {
        self.sectors.iter().map(|(_, o)| o.value_t1).sum()
    }
}
