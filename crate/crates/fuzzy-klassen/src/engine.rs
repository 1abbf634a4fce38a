//! Discretized Mamdani inference: rule activation, implication, aggregation
//! and centroid defuzzification.
//!
//! Everything operates on an explicit integer output grid. For each output
//! variable the engine evaluates, per grid point, the s-norm over all rules
//! of `implication(activation, consequent_mf(point))`, then defuzzifies the
//! aggregate with the centroid `sum(g * mu(g)) / sum(mu(g))`.

use std::collections::HashMap;

use thiserror::Error;

use crate::ops::{AndNorm, OperatorSet};
use crate::rulebase::RuleBase;
use crate::variable::{FuzzifiedValue, FuzzyVariable, Universe};

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no value supplied for input variable '{variable}'")]
    MissingInput { variable: String },
    #[error("variable '{variable}' has no label '{label}'")]
    UnknownLabel { variable: String, label: String },
    #[error("'{variable}' is not an input of this system")]
    UnknownVariable { variable: String },
    #[error("output variable '{variable}' must have a discrete grid universe")]
    NonDiscreteOutput { variable: String },
    #[error("aggregated output for '{variable}' is zero everywhere; centroid is undefined")]
    EmptyAggregate { variable: String },
    #[error("grid and membership lengths differ ({grid} vs {memberships})")]
    LengthMismatch { grid: usize, memberships: usize },
    #[error("grid points must be strictly increasing")]
    UnorderedGrid,
    #[error("membership degree {degree} outside [0, 1]")]
    DegreeOutOfRange { degree: f64 },
    #[error("duplicate variable name '{variable}' in system")]
    DuplicateVariable { variable: String },
}

/// A fuzzy set sampled on an integer grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFuzzySet {
    grid: Vec<i64>,
    memberships: Vec<f64>,
}

impl DiscreteFuzzySet {
    pub fn new(grid: Vec<i64>, memberships: Vec<f64>) -> Result<Self, EngineError> {
        if grid.len() != memberships.len() {
            return Err(EngineError::LengthMismatch {
                grid: grid.len(),
                memberships: memberships.len(),
            });
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EngineError::UnorderedGrid);
        }
        for &m in &memberships {
            if !(0.0..=1.0).contains(&m) {
                return Err(EngineError::DegreeOutOfRange { degree: m });
            }
        }
        Ok(Self { grid, memberships })
    }

    pub fn zeros(grid: Vec<i64>) -> Self {
        let memberships = vec![0.0; grid.len()];
        Self { grid, memberships }
    }

    pub fn grid(&self) -> &[i64] {
        &self.grid
    }

    pub fn memberships(&self) -> &[f64] {
        &self.memberships
    }

    pub fn max_membership(&self) -> f64 {
        self.memberships.iter().copied().fold(0.0, f64::max)
    }

    /// Centroid defuzzification: `sum(g * mu(g)) / sum(mu(g))`.
    ///
    /// Undefined (and reported as [`EngineError::EmptyAggregate`]) when every
    /// membership is zero. The result always lies within the grid bounds.
    pub fn centroid(&self) -> Result<f64, EngineError> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&g, &m) in self.grid.iter().zip(&self.memberships) {
            num += g as f64 * m;
            den += m;
        }
        if den == 0.0 {
            return Err(EngineError::EmptyAggregate {
                variable: String::new(),
            });
        }
        let (min, max) = (self.grid[0] as f64, self.grid[self.grid.len() - 1] as f64);
        Ok((num / den).clamp(min, max))
    }
}

/// Fold the t-norm over a rule's antecedent degrees.
pub fn rule_activation(degrees: &[f64], and_norm: AndNorm) -> Result<f64, EngineError> {
    if degrees.is_empty() {
        return Err(EngineError::InvalidInput(
            "rule activation needs at least one antecedent degree".into(),
        ));
    }
    let mut acc = 1.0;
    for &d in degrees {
        if !(0.0..=1.0).contains(&d) {
            return Err(EngineError::DegreeOutOfRange { degree: d });
        }
        acc = and_norm.apply(acc, d);
    }
    Ok(acc)
}

/// Combine rule activations into the aggregated output set for `out_var`.
///
/// Each `(degree, label)` pair contributes the label's membership function
/// implicated by the activation; contributions are folded with the s-norm.
/// An empty activation list yields the all-zero set.
pub fn aggregate_output(
    activations: &[(f64, &str)],
    out_var: &FuzzyVariable,
    ops: &OperatorSet,
) -> Result<DiscreteFuzzySet, EngineError> {
    let (_, aggregate) = aggregate_detail(activations, out_var, ops)?;
    Ok(aggregate)
}

/// As [`aggregate_output`], but also returns each activation's implicated set
/// (used by the trace and by curve dumps).
pub fn aggregate_detail(
    activations: &[(f64, &str)],
    out_var: &FuzzyVariable,
    ops: &OperatorSet,
) -> Result<(Vec<DiscreteFuzzySet>, DiscreteFuzzySet), EngineError> {
    let grid = out_var
        .universe()
        .grid_points()
        .ok_or_else(|| EngineError::NonDiscreteOutput {
            variable: out_var.name().to_string(),
        })?;

    let mut implicated = Vec::with_capacity(activations.len());
    let mut aggregate = vec![0.0; grid.len()];
    for &(activation, label) in activations {
        if !(0.0..=1.0).contains(&activation) {
            return Err(EngineError::DegreeOutOfRange { degree: activation });
        }
        let mf = out_var.mf(label).ok_or_else(|| EngineError::UnknownLabel {
            variable: out_var.name().to_string(),
            label: label.to_string(),
        })?;
        let set: Vec<f64> = grid
            .iter()
            .map(|&g| ops.implication.apply(activation, mf.eval(g as f64)))
            .collect();
        for (acc, &v) in aggregate.iter_mut().zip(&set) {
            *acc = ops.aggregation.apply(*acc, v);
        }
        implicated.push(DiscreteFuzzySet {
            grid: grid.clone(),
            memberships: set,
        });
    }
    Ok((
        implicated,
        DiscreteFuzzySet {
            grid,
            memberships: aggregate,
        },
    ))
}

/// Per-output detail of one inference run.
#[derive(Debug, Clone)]
pub struct OutputAggregate {
    pub variable: String,
    /// One implicated set per rule, in rule order. Rules without a consequent
    /// for this variable contribute an all-zero set.
    pub implicated: Vec<DiscreteFuzzySet>,
    pub aggregate: DiscreteFuzzySet,
}

/// Intermediate results of one inference run, up to (but not including)
/// defuzzification.
#[derive(Debug, Clone)]
pub struct InferenceTrace {
    /// Fuzzified inputs, in system input order.
    pub fuzzified: Vec<(String, FuzzifiedValue)>,
    /// Activation degree per rule, in rule order.
    pub activations: Vec<f64>,
    /// Aggregation detail per output variable, in system output order.
    pub outputs: Vec<OutputAggregate>,
}

/// A complete Mamdani system: input and output variables, a rule base and an
/// operator set.
#[derive(Debug, Clone)]
pub struct FuzzySystem {
    inputs: Vec<FuzzyVariable>,
    outputs: Vec<FuzzyVariable>,
    rules: RuleBase,
    ops: OperatorSet,
}

impl FuzzySystem {
    /// Build a system, checking that variable names are unique, every output
    /// has a grid universe, and every rule resolves to declared variables and
    /// labels in the right role.
    pub fn new(
        inputs: Vec<FuzzyVariable>,
        outputs: Vec<FuzzyVariable>,
        rules: RuleBase,
        ops: OperatorSet,
    ) -> Result<Self, EngineError> {
        let mut seen: Vec<&str> = Vec::new();
        for var in inputs.iter().chain(&outputs) {
            if seen.iter().any(|n| n.eq_ignore_ascii_case(var.name())) {
                return Err(EngineError::DuplicateVariable {
                    variable: var.name().to_string(),
                });
            }
            seen.push(var.name());
        }
        for out in &outputs {
            if matches!(out.universe(), Universe::Continuous { .. }) {
                return Err(EngineError::NonDiscreteOutput {
                    variable: out.name().to_string(),
                });
            }
        }
        for rule in rules.rules() {
            for (var, label) in rule.antecedents() {
                let input = inputs
                    .iter()
                    .find(|v| v.name().eq_ignore_ascii_case(var))
                    .ok_or_else(|| EngineError::UnknownVariable {
                        variable: var.clone(),
                    })?;
                if input.mf(label).is_none() {
                    return Err(EngineError::UnknownLabel {
                        variable: var.clone(),
                        label: label.clone(),
                    });
                }
            }
            for (var, label) in rule.consequents() {
                let output = outputs
                    .iter()
                    .find(|v| v.name().eq_ignore_ascii_case(var))
                    .ok_or_else(|| EngineError::UnknownVariable {
                        variable: var.clone(),
                    })?;
                if output.mf(label).is_none() {
                    return Err(EngineError::UnknownLabel {
                        variable: var.clone(),
                        label: label.clone(),
                    });
                }
            }
        }
        Ok(Self {
            inputs,
            outputs,
            rules,
            ops,
        })
    }

    pub fn inputs(&self) -> &[FuzzyVariable] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[FuzzyVariable] {
        &self.outputs
    }

    pub fn rules(&self) -> &RuleBase {
        &self.rules
    }

    pub fn ops(&self) -> &OperatorSet {
        &self.ops
    }

    /// Run fuzzification, rule activation and aggregation, returning the
    /// intermediate sets. Defuzzification is left to the caller so that
    /// all-zero aggregates can still be inspected.
    pub fn trace(&self, inputs: &HashMap<String, f64>) -> Result<InferenceTrace, EngineError> {
        let mut fuzzified = Vec::with_capacity(self.inputs.len());
        for var in &self.inputs {
            let x = inputs
                .get(var.name())
                .copied()
                .ok_or_else(|| EngineError::MissingInput {
                    variable: var.name().to_string(),
                })?;
            let value = var
                .fuzzify(x)
                .map_err(|e| EngineError::InvalidInput(e.to_string()))?;
            fuzzified.push((var.name().to_string(), value));
        }

        let mut activations = Vec::with_capacity(self.rules.rules().len());
        for rule in self.rules.rules() {
            let degrees: Vec<f64> = rule
                .antecedents()
                .iter()
                .map(|(var, label)| {
                    let (_, value) = fuzzified
                        .iter()
                        .find(|(name, _)| name.eq_ignore_ascii_case(var))
                        .expect("rule variables are checked at construction");
                    value
                        .degree(label)
                        .expect("rule labels are checked at construction")
                })
                .collect();
            activations.push(rule_activation(&degrees, self.ops.and_norm)?);
        }

        let mut outputs = Vec::with_capacity(self.outputs.len());
        for out_var in &self.outputs {
            // Every rule contributes one entry so implicated sets line up
            // with rule order; rules silent on this output contribute 0.
            let pairs: Vec<(f64, &str)> = self
                .rules
                .rules()
                .iter()
                .zip(&activations)
                .map(|(rule, &act)| {
                    rule.consequents()
                        .iter()
                        .find(|(var, _)| var.eq_ignore_ascii_case(out_var.name()))
                        .map(|(_, label)| (act, label.as_str()))
                        .unwrap_or((0.0, ""))
                })
                .collect();
            // Empty labels mark silent rules; map them onto a zero activation
            // of the first label, which implicates to an all-zero set.
            let first_label = out_var.labels().next().expect("variables have labels");
            let resolved: Vec<(f64, &str)> = pairs
                .iter()
                .map(|&(act, label)| {
                    if label.is_empty() {
                        (0.0, first_label)
                    } else {
                        (act, label)
                    }
                })
                .collect();
            let (implicated, aggregate) = aggregate_detail(&resolved, out_var, &self.ops)?;
            outputs.push(OutputAggregate {
                variable: out_var.name().to_string(),
                implicated,
                aggregate,
            });
        }

        Ok(InferenceTrace {
            fuzzified,
            activations,
            outputs,
        })
    }

    /// Full inference: fuzzify, activate, aggregate and defuzzify every
    /// output. Returns `(output name, crisp value)` in output order.
    pub fn infer(&self, inputs: &HashMap<String, f64>) -> Result<Vec<(String, f64)>, EngineError> {
        let trace = self.trace(inputs)?;
        trace
            .outputs
            .into_iter()
            .map(|out| {
                let crisp = out
                    .aggregate
                    .centroid()
                    .map_err(|_| EngineError::EmptyAggregate {
                        variable: out.variable.clone(),
                    })?;
                Ok((out.variable, crisp))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership::MembershipFunction;
    use crate::ops::Implication;
    use crate::rulebase::default_klassen_rules;

    fn rd_variable() -> FuzzyVariable {
        FuzzyVariable::new(
            "RD",
            Universe::grid(1, 100).unwrap(),
            vec![
                (
                    "low".into(),
                    MembershipFunction::ramp_down(30.0, 79.0).unwrap(),
                ),
                (
                    "high".into(),
                    MembershipFunction::ramp_up(30.0, 79.0).unwrap(),
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn activation_min_takes_smaller_degree() {
        assert!((rule_activation(&[0.8157, 0.8538], AndNorm::Min).unwrap() - 0.8157).abs() < 1e-12);
    }

    #[test]
    fn activation_product_multiplies() {
        let act = rule_activation(&[0.8157, 0.8538], AndNorm::Product).unwrap();
        assert!((act - 0.6965).abs() < 1e-3);
        assert!((act - 0.8157 * 0.8538).abs() < 1e-12);
    }

    #[test]
    fn activation_one_is_identity() {
        for norm in [AndNorm::Min, AndNorm::Product] {
            assert_eq!(rule_activation(&[1.0, 0.37], norm).unwrap(), 0.37);
        }
    }

    #[test]
    fn activation_rejects_empty_list() {
        assert!(matches!(
            rule_activation(&[], AndNorm::Min),
            Err(EngineError::InvalidInput(_))
        ));
    }

    #[test]
    fn aggregate_clips_at_plateau_points() {
        let var = rd_variable();
        let set = aggregate_output(
            &[(0.816, "low"), (0.184, "high")],
            &var,
            &OperatorSet::default(),
        )
        .unwrap();
        // grid starts at 1, so point 10 is index 9 and point 100 index 99
        assert_eq!(set.memberships()[9], 0.816);
        assert_eq!(set.memberships()[99], 0.184);
    }

    #[test]
    fn aggregate_single_full_activation_is_the_mf_sampled() {
        let var = rd_variable();
        let set = aggregate_output(&[(1.0, "low")], &var, &OperatorSet::default()).unwrap();
        let mf = var.mf("low").unwrap();
        for (&g, &m) in set.grid().iter().zip(set.memberships()) {
            assert_eq!(m, mf.eval(g as f64));
        }
    }

    #[test]
    fn aggregate_empty_activations_is_all_zero() {
        let set = aggregate_output(&[], &rd_variable(), &OperatorSet::default()).unwrap();
        assert!(set.memberships().iter().all(|&m| m == 0.0));
        assert!(matches!(
            set.centroid(),
            Err(EngineError::EmptyAggregate { .. })
        ));
    }

    #[test]
    fn aggregate_rejects_unknown_label() {
        let err = aggregate_output(&[(0.5, "warm")], &rd_variable(), &OperatorSet::default())
            .unwrap_err();
        assert!(matches!(err, EngineError::UnknownLabel { .. }));
    }

    #[test]
    fn centroid_of_uniform_membership_is_grid_mean() {
        let set = DiscreteFuzzySet::new((1..=100).collect(), vec![0.5; 100]).unwrap();
        assert!((set.centroid().unwrap() - 50.5).abs() < 1e-12);
    }

    #[test]
    fn centroid_of_singleton_is_its_point() {
        let mut memberships = vec![0.0; 100];
        memberships[41] = 1.0; // point 42
        let set = DiscreteFuzzySet::new((1..=100).collect(), memberships).unwrap();
        assert_eq!(set.centroid().unwrap(), 42.0);
    }

    #[test]
    fn set_construction_validates() {
        assert!(matches!(
            DiscreteFuzzySet::new(vec![1, 2], vec![0.5]),
            Err(EngineError::LengthMismatch { .. })
        ));
        assert!(matches!(
            DiscreteFuzzySet::new(vec![1], vec![1.5]),
            Err(EngineError::DegreeOutOfRange { .. })
        ));
        assert!(matches!(
            DiscreteFuzzySet::new(vec![2, 1], vec![0.5, 0.5]),
            Err(EngineError::UnorderedGrid)
        ));
    }

    fn klassen_v1_system() -> FuzzySystem {
        let input = |name: &str| {
            FuzzyVariable::new(
                name,
                Universe::continuous(216_831.0, 350_722.0).unwrap(),
                vec![
                    (
                        "low".into(),
                        MembershipFunction::ramp_down(216_831.0, 283_777.0).unwrap(),
                    ),
                    (
                        "medium".into(),
                        MembershipFunction::triangle(216_831.0, 283_777.0, 350_722.0).unwrap(),
                    ),
                    (
                        "high".into(),
                        MembershipFunction::ramp_up(283_777.0, 350_722.0).unwrap(),
                    ),
                ],
            )
            .unwrap()
        };
        let output = |name: &str, feet: (f64, f64)| {
            FuzzyVariable::new(
                name,
                Universe::grid(1, 100).unwrap(),
                vec![
                    (
                        "low".into(),
                        MembershipFunction::ramp_down(feet.0, feet.1).unwrap(),
                    ),
                    (
                        "high".into(),
                        MembershipFunction::ramp_up(feet.0, feet.1).unwrap(),
                    ),
                ],
            )
            .unwrap()
        };
        FuzzySystem::new(
            vec![input("Vt"), input("Vt1")],
            vec![output("RD", (30.0, 79.0)), output("RC", (33.0, 72.0))],
            default_klassen_rules(),
            OperatorSet::default(),
        )
        .unwrap()
    }

    #[test]
    fn infer_matches_frozen_worked_example() {
        let system = klassen_v1_system();
        let inputs = HashMap::from([
            ("Vt".to_string(), 296_121.45),
            ("Vt1".to_string(), 293_563.49),
        ]);
        let out = system.infer(&inputs).unwrap();
        let rd = out.iter().find(|(n, _)| n == "RD").unwrap().1;
        let rc = out.iter().find(|(n, _)| n == "RC").unwrap().1;
        // frozen from the naive reference route
        assert!((rd - 36.053217).abs() < 1e-4, "rd = {rd}");
        assert!((rc - 35.444413).abs() < 1e-4, "rc = {rc}");
    }

    #[test]
    fn infer_single_rule_at_full_activation_gives_pure_mf_centroid() {
        let system = klassen_v1_system();
        // both inputs deep in the low plateau: only (low, low) fires, at 1
        let inputs = HashMap::from([
            ("Vt".to_string(), 216_831.0),
            ("Vt1".to_string(), 216_831.0),
        ]);
        let out = system.infer(&inputs).unwrap();
        let rd = out.iter().find(|(n, _)| n == "RD").unwrap().1;
        let expected = aggregate_output(
            &[(1.0, "low")],
            &system.outputs()[0],
            &OperatorSet::default(),
        )
        .unwrap()
        .centroid()
        .unwrap();
        assert!((rd - expected).abs() < 1e-12);
    }

    #[test]
    fn infer_requires_every_input() {
        let system = klassen_v1_system();
        let inputs = HashMap::from([("Vt".to_string(), 296_121.45)]);
        assert!(matches!(
            system.infer(&inputs),
            Err(EngineError::MissingInput { variable }) if variable == "Vt1"
        ));
    }

    #[test]
    fn system_rejects_continuous_output() {
        let var = FuzzyVariable::new(
            "RD",
            Universe::continuous(0.0, 100.0).unwrap(),
            vec![(
                "low".into(),
                MembershipFunction::ramp_down(30.0, 79.0).unwrap(),
            )],
        )
        .unwrap();
        let err = FuzzySystem::new(
            vec![],
            vec![var],
            default_klassen_rules(),
            OperatorSet::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn scaling_activations_under_product_implication_keeps_centroid() {
        let var = rd_variable();
        let ops = OperatorSet {
            implication: Implication::Product,
            ..OperatorSet::default()
        };
        let base = [(0.8, "low"), (0.3, "high")];
        let scaled = [(0.8 * 0.41, "low"), (0.3 * 0.41, "high")];
        let c1 = aggregate_output(&base, &var, &ops)
            .unwrap()
            .centroid()
            .unwrap();
        let c2 = aggregate_output(&scaled, &var, &ops)
            .unwrap()
            .centroid()
            .unwrap();
        assert!((c1 - c2).abs() < 1e-9);
    }
}
