//! Naive reference inference used by tests to cross-check the engine.
//!
//! This deliberately re-derives everything with explicit loops and its own
//! piecewise-linear evaluation: no code is shared with the engine's
//! inference path beyond the public data types. Kept behind the `oracle`
//! feature; it is test support, not part of the library proper.

use std::collections::HashMap;

use crate::engine::FuzzySystem;
use crate::membership::MembershipFunction;
use crate::ops::{Aggregation, AndNorm, Implication};
use crate::variable::Universe;

/// Piecewise-linear evaluation, written independently of
/// [`MembershipFunction::eval`].
pub fn naive_eval(mf: &MembershipFunction, x: f64) -> f64 {
    fn rising(a: f64, b: f64, x: f64) -> f64 {
        if x <= a {
            0.0
        } else if x >= b {
            1.0
        } else {
            (x - a) / (b - a)
        }
    }
    match *mf {
        MembershipFunction::RampUp { a, b } => rising(a, b, x),
        MembershipFunction::RampDown { a, b } => 1.0 - rising(a, b, x),
        MembershipFunction::Triangle { a, b, c } => {
            if x < b {
                rising(a, b, x)
            } else if x > b {
                1.0 - rising(b, c, x)
            } else {
                1.0
            }
        }
        MembershipFunction::Trapezoid { a, b, c, d } => {
            if x < b {
                rising(a, b, x)
            } else if x > c {
                1.0 - rising(c, d, x)
            } else {
                1.0
            }
        }
    }
}

/// Proptest strategies for random small systems, shared by the equivalence
/// suites.
pub mod gen {
    use proptest::prelude::*;

    use crate::engine::FuzzySystem;
    use crate::membership::MembershipFunction;
    use crate::ops::{Aggregation, AndNorm, Defuzzifier, Implication, OperatorSet};
    use crate::rulebase::{Rule, RuleBase};
    use crate::variable::{FuzzyVariable, Universe};

    /// Antecedents and consequents as (variable index, label index) pairs.
    pub type IndexedRule = (Vec<(usize, usize)>, Vec<(usize, usize)>);

    /// Blueprint of a random system plus one crisp value per input.
    #[derive(Debug, Clone)]
    pub struct SystemSpec {
        /// Per input: four strictly increasing anchors and a label count.
        pub inputs: Vec<(Vec<f64>, usize)>,
        /// Per output: grid min, grid max, label count.
        pub outputs: Vec<(i64, i64, usize)>,
        pub rules: Vec<IndexedRule>,
        pub ops: OperatorSet,
        pub values: Vec<f64>,
    }

    fn anchors() -> impl Strategy<Value = Vec<f64>> {
        (any::<[u8; 4]>(), -500i32..500).prop_map(|(deltas, base)| {
            let mut points = Vec::with_capacity(4);
            let mut x = base as f64 / 10.0;
            for d in deltas {
                x += 0.5 + d as f64 / 25.0;
                points.push(x);
            }
            points
        })
    }

    fn mf_from_anchors(points: &[f64], pick: usize) -> MembershipFunction {
        match pick % 4 {
            0 => MembershipFunction::ramp_down(points[0], points[3]).unwrap(),
            1 => MembershipFunction::ramp_up(points[0], points[3]).unwrap(),
            2 => MembershipFunction::triangle(points[0], points[1], points[3]).unwrap(),
            _ => MembershipFunction::trapezoid(points[0], points[1], points[2], points[3]).unwrap(),
        }
    }

    fn ops_strategy() -> impl Strategy<Value = OperatorSet> {
        (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(and_min, imp_min, agg_max)| {
            OperatorSet {
                and_norm: if and_min {
                    AndNorm::Min
                } else {
                    AndNorm::Product
                },
                implication: if imp_min {
                    Implication::Min
                } else {
                    Implication::Product
                },
                aggregation: if agg_max {
                    Aggregation::Max
                } else {
                    Aggregation::BoundedSum
                },
                defuzzifier: Defuzzifier::Centroid,
            }
        })
    }

    /// Up to 3 inputs with up to 3 labels each, up to 2 discrete outputs
    /// with grids of at most 200 points, up to 6 rules, any operator combo.
    pub fn system_spec() -> impl Strategy<Value = SystemSpec> {
        let inputs = prop::collection::vec((anchors(), 1usize..=3), 1..=3);
        let outputs =
            prop::collection::vec((-50i64..=50, 1i64..=199, 1usize..=3), 1..=2).prop_map(|outs| {
                outs.into_iter()
                    .map(|(min, span, labels)| (min, min + span, labels))
                    .collect::<Vec<(i64, i64, usize)>>()
            });
        (inputs, outputs, ops_strategy())
            .prop_flat_map(|(inputs, outputs, ops)| {
                let n_in = inputs.len();
                let n_out = outputs.len();
                let rule = (
                    prop::collection::vec((0..n_in, 0usize..3), 1..=n_in),
                    prop::collection::vec((0..n_out, 0usize..3), 1..=n_out),
                );
                let rules = prop::collection::vec(rule, 1..=6);
                let values = prop::collection::vec(-600.0f64..600.0, n_in);
                (Just(inputs), Just(outputs), Just(ops), rules, values)
            })
            .prop_map(|(inputs, outputs, ops, raw_rules, values)| {
                let rules = raw_rules
                    .into_iter()
                    .map(|(ants, cons)| {
                        // keep the first mention of each variable
                        let mut a: Vec<(usize, usize)> = Vec::new();
                        for (var, label) in ants {
                            if !a.iter().any(|(v, _)| *v == var) {
                                a.push((var, label));
                            }
                        }
                        let mut c: Vec<(usize, usize)> = Vec::new();
                        for (var, label) in cons {
                            if !c.iter().any(|(v, _)| *v == var) {
                                c.push((var, label));
                            }
                        }
                        (a, c)
                    })
                    .collect();
                SystemSpec {
                    inputs,
                    outputs,
                    rules,
                    ops,
                    values,
                }
            })
    }

    /// Materialize a blueprint into an engine system.
    pub fn build(spec: &SystemSpec) -> FuzzySystem {
        let inputs: Vec<FuzzyVariable> = spec
            .inputs
            .iter()
            .enumerate()
            .map(|(i, (points, label_count))| {
                let mfs = (0..*label_count)
                    .map(|l| (format!("l{l}"), mf_from_anchors(points, l + i)))
                    .collect();
                FuzzyVariable::new(
                    format!("in{i}"),
                    Universe::continuous(points[0], points[3]).unwrap(),
                    mfs,
                )
                .unwrap()
            })
            .collect();
        let outputs: Vec<FuzzyVariable> = spec
            .outputs
            .iter()
            .enumerate()
            .map(|(i, (min, max, label_count))| {
                let lo = *min as f64;
                let hi = *max as f64;
                let third = (hi - lo) / 3.0;
                let points = [lo, lo + third, lo + 2.0 * third, hi];
                let mfs = (0..*label_count)
                    .map(|l| (format!("l{l}"), mf_from_anchors(&points, l + i + 1)))
                    .collect();
                FuzzyVariable::new(format!("out{i}"), Universe::grid(*min, *max).unwrap(), mfs)
                    .unwrap()
            })
            .collect();
        let rules: Vec<Rule> = spec
            .rules
            .iter()
            .map(|(ants, cons)| {
                Rule::new(
                    ants.iter()
                        .map(|(v, l)| (format!("in{v}"), format!("l{}", l % spec.inputs[*v].1)))
                        .collect(),
                    cons.iter()
                        .map(|(v, l)| (format!("out{v}"), format!("l{}", l % spec.outputs[*v].2)))
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        FuzzySystem::new(inputs, outputs, RuleBase::new(rules).unwrap(), spec.ops).unwrap()
    }
}

/// Reference inference: explicit loop over rules and grid points, no
/// algebraic shortcuts. Returns `None` for an output whose aggregate is zero
/// everywhere (where the centroid is undefined).
///
/// Panics on systems whose rules reference undeclared names or whose inputs
/// are missing; callers feed it systems the engine already accepted.
pub fn naive_infer(
    system: &FuzzySystem,
    inputs: &HashMap<String, f64>,
) -> Vec<(String, Option<f64>)> {
    let mut results = Vec::new();
    for out_var in system.outputs() {
        let (gmin, gmax) = match *out_var.universe() {
            Universe::Grid { min, max } => (min, max),
            Universe::Continuous { .. } => panic!("oracle outputs must be discrete"),
        };

        let mut num = 0.0;
        let mut den = 0.0;
        let mut any_positive = false;
        for g in gmin..=gmax {
            let mut mu: f64 = 0.0;
            for rule in system.rules().rules() {
                let consequent = rule
                    .consequents()
                    .iter()
                    .find(|(var, _)| var.eq_ignore_ascii_case(out_var.name()));
                let Some((_, label)) = consequent else {
                    continue;
                };

                let mut activation = 1.0;
                for (var, ant_label) in rule.antecedents() {
                    let input_var = system
                        .inputs()
                        .iter()
                        .find(|v| v.name().eq_ignore_ascii_case(var))
                        .expect("oracle rule variable must exist");
                    let raw = *inputs.get(input_var.name()).expect("oracle input missing");
                    let (lo, hi) = input_var.universe().bounds();
                    let clamped = if raw < lo {
                        lo
                    } else if raw > hi {
                        hi
                    } else {
                        raw
                    };
                    let degree =
                        naive_eval(input_var.mf(ant_label).expect("oracle label"), clamped);
                    activation = match system.ops().and_norm {
                        AndNorm::Min => {
                            if degree < activation {
                                degree
                            } else {
                                activation
                            }
                        }
                        AndNorm::Product => activation * degree,
                    };
                }

                let consequent_degree =
                    naive_eval(out_var.mf(label).expect("oracle label"), g as f64);
                let implicated = match system.ops().implication {
                    Implication::Min => {
                        if activation < consequent_degree {
                            activation
                        } else {
                            consequent_degree
                        }
                    }
                    Implication::Product => activation * consequent_degree,
                };
                mu = match system.ops().aggregation {
                    Aggregation::Max => {
                        if implicated > mu {
                            implicated
                        } else {
                            mu
                        }
                    }
                    Aggregation::BoundedSum => {
                        let s = mu + implicated;
                        if s > 1.0 {
                            1.0
                        } else {
                            s
                        }
                    }
                };
            }
            if mu > 0.0 {
                any_positive = true;
            }
            num += g as f64 * mu;
            den += mu;
        }

        let crisp = any_positive.then(|| num / den);
        results.push((out_var.name().to_string(), crisp));
    }
    results
}
