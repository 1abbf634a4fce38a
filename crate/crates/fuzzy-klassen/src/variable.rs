//! Linguistic variables: a named universe with labeled membership functions.

use thiserror::Error;

use crate::membership::MembershipFunction;

#[derive(Debug, Error, PartialEq)]
pub enum VariableError {
    #[error("variable name must be non-empty")]
    EmptyName,
    #[error("variable '{variable}' declares no membership functions")]
    NoLabels { variable: String },
    #[error("variable '{variable}' declares label '{label}' more than once")]
    DuplicateLabel { variable: String, label: String },
    #[error("variable '{variable}': label '{label}' has breakpoints outside the universe")]
    SupportOutsideUniverse { variable: String, label: String },
    #[error("universe bounds out of order")]
    BadUniverse,
    #[error("variable '{variable}': input value is not finite")]
    NonFiniteInput { variable: String },
}

/// Domain of a fuzzy variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Universe {
    /// Continuous interval `[lo, hi]`; crisp inputs are clamped to it.
    Continuous { lo: f64, hi: f64 },
    /// Inclusive integer grid; output universes are discretized onto it.
    Grid { min: i64, max: i64 },
}

impl Universe {
    pub fn continuous(lo: f64, hi: f64) -> Result<Self, VariableError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self::Continuous { lo, hi })
        } else {
            Err(VariableError::BadUniverse)
        }
    }

    pub fn grid(min: i64, max: i64) -> Result<Self, VariableError> {
        if min <= max {
            Ok(Self::Grid { min, max })
        } else {
            Err(VariableError::BadUniverse)
        }
    }

    pub fn clamp(&self, x: f64) -> f64 {
        let (lo, hi) = self.bounds();
        x.clamp(lo, hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.bounds();
        (lo..=hi).contains(&x)
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Self::Continuous { lo, hi } => (lo, hi),
            Self::Grid { min, max } => (min as f64, max as f64),
        }
    }

    /// Grid points for discrete universes, `None` for continuous ones.
    pub fn grid_points(&self) -> Option<Vec<i64>> {
        match *self {
            Self::Continuous { .. } => None,
            Self::Grid { min, max } => Some((min..=max).collect()),
        }
    }
}

/// Degrees of membership of one crisp value in every label of a variable,
/// in the variable's label order.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzifiedValue {
    degrees: Vec<(String, f64)>,
}

impl FuzzifiedValue {
    pub fn degree(&self, label: &str) -> Option<f64> {
        self.degrees
            .iter()
            .find(|(l, _)| l.eq_ignore_ascii_case(label))
            .map(|(_, d)| *d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.degrees.iter().map(|(l, d)| (l.as_str(), *d))
    }
}

/// A named variable over a universe with labeled membership functions.
///
/// Labels are unique (case-insensitively) and keep their declaration order,
/// which makes fuzzification output deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyVariable {
    name: String,
    universe: Universe,
    mfs: Vec<(String, MembershipFunction)>,
}

impl FuzzyVariable {
    pub fn new(
        name: impl Into<String>,
        universe: Universe,
        mfs: Vec<(String, MembershipFunction)>,
    ) -> Result<Self, VariableError> {
        let name = name.into();
        if name.is_empty() {
            return Err(VariableError::EmptyName);
        }
        if mfs.is_empty() {
            return Err(VariableError::NoLabels { variable: name });
        }
        let (lo, hi) = universe.bounds();
        for (i, (label, mf)) in mfs.iter().enumerate() {
            if mfs[..i].iter().any(|(l, _)| l.eq_ignore_ascii_case(label)) {
                return Err(VariableError::DuplicateLabel {
                    variable: name,
                    label: label.clone(),
                });
            }
            let (first, last) = mf.bounds();
            if first < lo || last > hi {
                return Err(VariableError::SupportOutsideUniverse {
                    variable: name,
                    label: label.clone(),
                });
            }
        }
        Ok(Self {
            name,
            universe,
            mfs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.mfs.iter().map(|(l, _)| l.as_str())
    }

    /// Membership function for `label` (case-insensitive lookup).
    pub fn mf(&self, label: &str) -> Option<&MembershipFunction> {
        self.mfs
            .iter()
            .find(|(l, _)| l.eq_ignore_ascii_case(label))
            .map(|(_, mf)| mf)
    }

    /// Evaluate every label's membership function at `x`.
    ///
    /// Values outside the universe are clamped to the nearest endpoint; all
    /// the shapes used here plateau there, so the clamp only matters for
    /// out-of-range data. Non-finite inputs are rejected.
    pub fn fuzzify(&self, x: f64) -> Result<FuzzifiedValue, VariableError> {
        if !x.is_finite() {
            return Err(VariableError::NonFiniteInput {
                variable: self.name.clone(),
            });
        }
        let x = self.universe.clamp(x);
        Ok(FuzzifiedValue {
            degrees: self
                .mfs
                .iter()
                .map(|(label, mf)| (label.clone(), mf.eval(x)))
                .collect(),
        })
    }
}
