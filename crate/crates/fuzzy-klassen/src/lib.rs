//! Fuzzy-Klassen: Mamdani fuzzy inference applied to Klassen typology analysis
//! of regional GRDP sectors.
//!
//! The crate has two halves:
//!
//! - a small, general Mamdani inference engine over discretized output
//!   universes ([`membership`], [`variable`], [`ops`], [`engine`], [`rulebase`]),
//! - the Klassen typology layer that uses it ([`klassen`], [`data`],
//!   [`pipeline`]): per-sector fuzzy systems turn two-year GRDP observations
//!   into growth (RD) and contribution (RC) scores which are compared
//!   district-vs-reference and classified into quadrants K1..K4, next to the
//!   traditional crisp classification.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its arguments, so everything here is safe to share across
//! threads.

pub mod data;
pub mod engine;
pub mod klassen;
pub mod membership;
pub mod ops;
pub mod pipeline;
pub mod rulebase;
pub mod variable;

#[cfg(feature = "oracle")]
pub mod oracle;

pub use data::{GrdpDataset, SectorObservation};
pub use engine::{DiscreteFuzzySet, FuzzySystem, InferenceTrace};
pub use klassen::{Quadrant, SectorIndicators};
pub use membership::MembershipFunction;
pub use ops::{Aggregation, AndNorm, Defuzzifier, Implication, OperatorSet};
pub use pipeline::{AnalysisConfig, Breakpoints, DisparityReport, RdRc, RegionInput, RegionScores};
pub use rulebase::{Rule, RuleBase, RuleSchema};
pub use variable::{FuzzifiedValue, FuzzyVariable, Universe};
