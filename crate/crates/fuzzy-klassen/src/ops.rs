//! Operator selection for the inference engine: t-norm, implication,
//! aggregation and defuzzifier.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("unknown operator '{name}' for {slot} (expected one of {expected})")]
pub struct UnknownOperator {
    pub slot: &'static str,
    pub name: String,
    pub expected: &'static str,
}

/// Conjunction over antecedent degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AndNorm {
    Min,
    Product,
}

impl AndNorm {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Self::Min => a.min(b),
            Self::Product => a * b,
        }
    }
}

/// How a rule's activation limits its consequent set: min truncates (clip),
/// product scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Implication {
    Min,
    Product,
}

impl Implication {
    pub fn apply(self, activation: f64, consequent: f64) -> f64 {
        match self {
            Self::Min => activation.min(consequent),
            Self::Product => activation * consequent,
        }
    }
}

/// S-norm combining the implicated sets of all rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Max,
    BoundedSum,
}

impl Aggregation {
    pub fn apply(self, acc: f64, x: f64) -> f64 {
        match self {
            Self::Max => acc.max(x),
            Self::BoundedSum => (acc + x).min(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Defuzzifier {
    Centroid,
}

/// The operator selection for one fuzzy system.
///
/// The default tracks the worked numbers this crate regression-tests against:
/// min conjunction, min (clip) implication, max aggregation, centroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorSet {
    pub and_norm: AndNorm,
    pub implication: Implication,
    pub aggregation: Aggregation,
    pub defuzzifier: Defuzzifier,
}

impl Default for OperatorSet {
    fn default() -> Self {
        Self {
            and_norm: AndNorm::Min,
            implication: Implication::Min,
            aggregation: Aggregation::Max,
            defuzzifier: Defuzzifier::Centroid,
        }
    }
}

impl OperatorSet {
    /// Parse a `and,implication,aggregation,defuzzifier` spec such as
    /// `min,min,max,centroid` or `product,product,bounded-sum,centroid`.
    pub fn parse_spec(spec: &str) -> Result<Self, UnknownOperator> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(UnknownOperator {
                slot: "operator set",
                name: spec.to_string(),
                expected: "four comma-separated names: and,implication,aggregation,defuzzifier",
            });
        }
        Ok(Self {
            and_norm: parts[0].parse()?,
            implication: parts[1].parse()?,
            aggregation: parts[2].parse()?,
            defuzzifier: parts[3].parse()?,
        })
    }
}

impl fmt::Display for OperatorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let and = match self.and_norm {
            AndNorm::Min => "min",
            AndNorm::Product => "product",
        };
        let imp = match self.implication {
            Implication::Min => "min",
            Implication::Product => "product",
        };
        let agg = match self.aggregation {
            Aggregation::Max => "max",
            Aggregation::BoundedSum => "bounded-sum",
        };
        write!(f, "{and},{imp},{agg},centroid")
    }
}

impl FromStr for AndNorm {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Self::Min),
            "product" => Ok(Self::Product),
            _ => Err(UnknownOperator {
                slot: "and norm",
                name: s.to_string(),
                expected: "min, product",
            }),
        }
    }
}

impl FromStr for Implication {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "clip" => Ok(Self::Min),
            "product" | "scale" => Ok(Self::Product),
            _ => Err(UnknownOperator {
                slot: "implication",
                name: s.to_string(),
                expected: "min (clip), product (scale)",
            }),
        }
    }
}

impl FromStr for Aggregation {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Self::Max),
            "bounded-sum" | "bounded_sum" | "boundedsum" => Ok(Self::BoundedSum),
            _ => Err(UnknownOperator {
                slot: "aggregation",
                name: s.to_string(),
                expected: "max, bounded-sum",
            }),
        }
    }
}

impl FromStr for Defuzzifier {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "centroid" => Ok(Self::Centroid),
            _ => Err(UnknownOperator {
                slot: "defuzzifier",
                name: s.to_string(),
                expected: "centroid",
            }),
        }
    }
}
