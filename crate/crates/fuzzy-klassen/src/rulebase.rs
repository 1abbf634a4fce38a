//! IF-AND-THEN-ALSO fuzzy rule bases: representation, a line-oriented text
//! format, validation against a variable/label schema, and the default
//! Klassen rule table.
//!
//! The rule file grammar is one rule per line:
//!
//! ```text
//! IF <var> IS <label> ( AND <var> IS <label> )* THEN <var> IS <label> ( ALSO <var> IS <label> )*
//! ```
//!
//! Keywords are case-insensitive; `#` starts a comment. Variable and label
//! names are matched case-insensitively against the schema and canonicalized
//! to the schema's spelling, so `parse_rules(format_rules(rb))` reproduces
//! `rb` exactly for any rule base that uses schema spellings.

use std::fmt;

use thiserror::Error;

/// Input variable name for the year-t observation in the Klassen systems.
pub const VAR_CURRENT: &str = "Vt";
/// Input variable name for the year-(t-1) observation.
pub const VAR_PREVIOUS: &str = "Vt1";
/// Output variable carrying the growth score.
pub const VAR_GROWTH: &str = "RD";
/// Output variable carrying the contribution score.
pub const VAR_CONTRIBUTION: &str = "RC";

const INPUT_LABELS: [&str; 3] = ["low", "medium", "high"];
const OUTPUT_LABELS: [&str; 2] = ["low", "high"];

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("a rule needs at least one antecedent and one consequent")]
    EmptyRule,
    #[error("variable '{variable}' appears more than once in the antecedent")]
    DuplicateAntecedentVariable { variable: String },
    #[error("variable '{variable}' appears more than once in the consequent")]
    DuplicateConsequentVariable { variable: String },
    #[error("a rule base needs at least one rule")]
    EmptyRuleBase,
    #[error("schema name '{name}' is empty, duplicated, or a reserved keyword")]
    BadSchemaName { name: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown {role} variable '{name}'")]
    UnknownVariable {
        line: usize,
        role: &'static str,
        name: String,
    },
    #[error("line {line}: unknown label '{label}' for variable '{variable}'")]
    UnknownLabel {
        line: usize,
        variable: String,
        label: String,
    },
    #[error("line {line}: variable '{name}' appears twice in the antecedent")]
    DuplicateAntecedentVariable { line: usize, name: String },
    #[error("line {line}: duplicate rule, same antecedent as line {first_line}")]
    DuplicateRule { line: usize, first_line: usize },
    #[error("rule file contains no rules; a rule base needs at least one")]
    Empty,
}

/// One IF-AND-THEN-ALSO rule. Antecedents pair input variables with labels,
/// consequents pair output variables with labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    antecedents: Vec<(String, String)>,
    consequents: Vec<(String, String)>,
}

impl Rule {
    pub fn new(
        antecedents: Vec<(String, String)>,
        consequents: Vec<(String, String)>,
    ) -> Result<Self, RuleError> {
        if antecedents.is_empty() || consequents.is_empty() {
            return Err(RuleError::EmptyRule);
        }
        for (i, (var, _)) in antecedents.iter().enumerate() {
            if antecedents[..i]
                .iter()
                .any(|(v, _)| v.eq_ignore_ascii_case(var))
            {
                return Err(RuleError::DuplicateAntecedentVariable {
                    variable: var.clone(),
                });
            }
        }
        for (i, (var, _)) in consequents.iter().enumerate() {
            if consequents[..i]
                .iter()
                .any(|(v, _)| v.eq_ignore_ascii_case(var))
            {
                return Err(RuleError::DuplicateConsequentVariable {
                    variable: var.clone(),
                });
            }
        }
        Ok(Self {
            antecedents,
            consequents,
        })
    }

    pub fn antecedents(&self) -> &[(String, String)] {
        &self.antecedents
    }

    pub fn consequents(&self) -> &[(String, String)] {
        &self.consequents
    }

    /// Antecedent pairs sorted by variable, lowercased: two rules with equal
    /// keys fire identically regardless of written order.
    fn antecedent_key(&self) -> Vec<(String, String)> {
        let mut key: Vec<(String, String)> = self
            .antecedents
            .iter()
            .map(|(v, l)| (v.to_ascii_lowercase(), l.to_ascii_lowercase()))
            .collect();
        key.sort();
        key
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IF ")?;
        for (i, (var, label)) in self.antecedents.iter().enumerate() {
            if i > 0 {
                write!(f, " AND ")?;
            }
            write!(f, "{var} IS {label}")?;
        }
        write!(f, " THEN ")?;
        for (i, (var, label)) in self.consequents.iter().enumerate() {
            if i > 0 {
                write!(f, " ALSO ")?;
            }
            write!(f, "{var} IS {label}")?;
        }
        Ok(())
    }
}

/// An ordered collection of rules. Order is preserved for reporting but has
/// no semantic weight: aggregation is commutative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleBase {
    rules: Vec<Rule>,
}

impl RuleBase {
    pub fn new(rules: Vec<Rule>) -> Result<Self, RuleError> {
        if rules.is_empty() {
            return Err(RuleError::EmptyRuleBase);
        }
        Ok(Self { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Declares which variables (and labels) a rule file may reference, split by
/// role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSchema {
    inputs: Vec<(String, Vec<String>)>,
    outputs: Vec<(String, Vec<String>)>,
}

const KEYWORDS: [&str; 5] = ["if", "is", "and", "then", "also"];

impl RuleSchema {
    pub fn new(
        inputs: Vec<(String, Vec<String>)>,
        outputs: Vec<(String, Vec<String>)>,
    ) -> Result<Self, RuleError> {
        let mut names: Vec<String> = Vec::new();
        for (name, labels) in inputs.iter().chain(&outputs) {
            let lower = name.to_ascii_lowercase();
            if name.is_empty() || KEYWORDS.contains(&lower.as_str()) || names.contains(&lower) {
                return Err(RuleError::BadSchemaName { name: name.clone() });
            }
            names.push(lower);
            let mut label_names: Vec<String> = Vec::new();
            for label in labels {
                let lower = label.to_ascii_lowercase();
                if label.is_empty()
                    || KEYWORDS.contains(&lower.as_str())
                    || label_names.contains(&lower)
                {
                    return Err(RuleError::BadSchemaName {
                        name: label.clone(),
                    });
                }
                label_names.push(lower);
            }
        }
        Ok(Self { inputs, outputs })
    }

    /// The schema of every per-sector Klassen system: inputs `Vt` and `Vt1`
    /// with labels low/medium/high, outputs `RD` and `RC` with low/high.
    pub fn klassen() -> Self {
        let input_labels: Vec<String> = INPUT_LABELS.iter().map(|s| s.to_string()).collect();
        let output_labels: Vec<String> = OUTPUT_LABELS.iter().map(|s| s.to_string()).collect();
        Self {
            inputs: vec![
                (VAR_CURRENT.to_string(), input_labels.clone()),
                (VAR_PREVIOUS.to_string(), input_labels),
            ],
            outputs: vec![
                (VAR_GROWTH.to_string(), output_labels.clone()),
                (VAR_CONTRIBUTION.to_string(), output_labels),
            ],
        }
    }

    pub fn inputs(&self) -> &[(String, Vec<String>)] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[(String, Vec<String>)] {
        &self.outputs
    }

    fn find<'a>(vars: &'a [(String, Vec<String>)], name: &str) -> Option<(&'a str, &'a [String])> {
        vars.iter()
            .find(|(v, _)| v.eq_ignore_ascii_case(name))
            .map(|(v, labels)| (v.as_str(), labels.as_slice()))
    }

    fn canonical_label<'a>(labels: &'a [String], label: &str) -> Option<&'a str> {
        labels
            .iter()
            .find(|l| l.eq_ignore_ascii_case(label))
            .map(|l| l.as_str())
    }
}

/// Parse rule-file text against a schema.
///
/// Returns the first error encountered; no partial rule base is produced.
pub fn parse_rules(text: &str, schema: &RuleSchema) -> Result<RuleBase, ParseError> {
    let mut rules: Vec<Rule> = Vec::new();
    let mut rule_lines: Vec<usize> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let rule = parse_rule_line(&tokens, line_no, schema)?;
        if let Some(pos) = rules
            .iter()
            .position(|r| r.antecedent_key() == rule.antecedent_key())
        {
            return Err(ParseError::DuplicateRule {
                line: line_no,
                first_line: rule_lines[pos],
            });
        }
        rules.push(rule);
        rule_lines.push(line_no);
    }

    if rules.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(RuleBase { rules })
}

struct Cursor<'a> {
    tokens: &'a [&'a str],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, expected: &str) -> Result<&'a str, ParseError> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| ParseError::Syntax {
                line: self.line,
                message: format!("expected {expected}, found end of line"),
            })?;
        self.pos += 1;
        Ok(tok)
    }

    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).copied()
    }

    fn advance(&mut self) {
        self.pos += 1;
    }
}

fn parse_rule_line(tokens: &[&str], line: usize, schema: &RuleSchema) -> Result<Rule, ParseError> {
    let syntax = |message: String| ParseError::Syntax { line, message };
    let mut cursor = Cursor {
        tokens,
        pos: 0,
        line,
    };

    let kw = cursor.next("'IF'")?;
    if !kw.eq_ignore_ascii_case("if") {
        return Err(syntax(format!("expected 'IF', found '{kw}'")));
    }

    let mut antecedents: Vec<(String, String)> = Vec::new();
    loop {
        let var = cursor.next("a variable name")?;
        let is_kw = cursor.next("'IS'")?;
        if !is_kw.eq_ignore_ascii_case("is") {
            return Err(syntax(format!("expected 'IS', found '{is_kw}'")));
        }
        let label = cursor.next("a label")?;
        let (canon_var, labels) =
            RuleSchema::find(&schema.inputs, var).ok_or(ParseError::UnknownVariable {
                line,
                role: "input",
                name: var.to_string(),
            })?;
        let canon_label =
            RuleSchema::canonical_label(labels, label).ok_or(ParseError::UnknownLabel {
                line,
                variable: canon_var.to_string(),
                label: label.to_string(),
            })?;
        if antecedents.iter().any(|(v, _)| v == canon_var) {
            return Err(ParseError::DuplicateAntecedentVariable {
                line,
                name: canon_var.to_string(),
            });
        }
        antecedents.push((canon_var.to_string(), canon_label.to_string()));

        let connective = cursor.next("'AND' or 'THEN'")?;
        if connective.eq_ignore_ascii_case("and") {
            continue;
        } else if connective.eq_ignore_ascii_case("then") {
            break;
        } else {
            return Err(syntax(format!(
                "expected 'AND' or 'THEN', found '{connective}'"
            )));
        }
    }

    let mut consequents: Vec<(String, String)> = Vec::new();
    loop {
        let var = cursor.next("an output variable name")?;
        let is_kw = cursor.next("'IS'")?;
        if !is_kw.eq_ignore_ascii_case("is") {
            return Err(syntax(format!("expected 'IS', found '{is_kw}'")));
        }
        let label = cursor.next("a label")?;
        let (canon_var, labels) =
            RuleSchema::find(&schema.outputs, var).ok_or(ParseError::UnknownVariable {
                line,
                role: "output",
                name: var.to_string(),
            })?;
        let canon_label =
            RuleSchema::canonical_label(labels, label).ok_or(ParseError::UnknownLabel {
                line,
                variable: canon_var.to_string(),
                label: label.to_string(),
            })?;
        if consequents.iter().any(|(v, _)| v == canon_var) {
            return Err(syntax(format!(
                "variable '{canon_var}' appears twice in the consequent"
            )));
        }
        consequents.push((canon_var.to_string(), canon_label.to_string()));

        match cursor.peek() {
            None => break,
            Some(tok) if tok.eq_ignore_ascii_case("also") => cursor.advance(),
            Some(tok) => {
                return Err(syntax(format!(
                    "expected 'ALSO' or end of line, found '{tok}'"
                )));
            }
        }
    }

    Rule::new(antecedents, consequents).map_err(|e| syntax(e.to_string()))
}

/// Render a rule base in the canonical one-rule-per-line text form.
/// `parse_rules(format_rules(rb), schema)` reproduces `rb` exactly.
pub fn format_rules(rb: &RuleBase) -> String {
    let mut out = String::new();
    for rule in &rb.rules {
        out.push_str(&rule.to_string());
        out.push('\n');
    }
    out
}

/// The default 3x3 Klassen rule table over (label at t, label at t-1).
///
/// RD is high when the current-year label outranks the previous-year label
/// or both are high, low otherwise; RC is high exactly when the current-year
/// label is high. This table reproduces the reference contribution score for
/// the agriculture worked example to within a few hundredths of a point.
pub fn default_klassen_rules() -> RuleBase {
    let rd_high: [(&str, &str); 4] = [
        ("medium", "low"),
        ("high", "low"),
        ("high", "medium"),
        ("high", "high"),
    ];
    let mut rules = Vec::with_capacity(9);
    for current in INPUT_LABELS {
        for previous in INPUT_LABELS {
            let rd = if rd_high.contains(&(current, previous)) {
                "high"
            } else {
                "low"
            };
            let rc = if current == "high" { "high" } else { "low" };
            rules.push(
                Rule::new(
                    vec![
                        (VAR_CURRENT.to_string(), current.to_string()),
                        (VAR_PREVIOUS.to_string(), previous.to_string()),
                    ],
                    vec![
                        (VAR_GROWTH.to_string(), rd.to_string()),
                        (VAR_CONTRIBUTION.to_string(), rc.to_string()),
                    ],
                )
                .expect("static rule table is well-formed"),
            );
        }
    }
    RuleBase { rules }
}

/// A problem reported by [`validate_rulebase`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    /// No rule covers this combination of input labels.
    MissingCombination { combination: Vec<(String, String)> },
    /// Rule `index` repeats the antecedent of rule `earlier` (0-based).
    UnreachableRule { index: usize, earlier: usize },
    /// More than one rule covers this combination of input labels.
    OverlappingRules {
        combination: Vec<(String, String)>,
        rules: Vec<usize>,
    },
    /// Rule `rule` (0-based) references a name the schema does not declare.
    UnknownName {
        rule: usize,
        name: String,
        context: String,
    },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let combo = |combination: &[(String, String)]| {
            combination
                .iter()
                .map(|(v, l)| format!("{v}={l}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            Self::MissingCombination { combination } => {
                write!(f, "no rule covers ({})", combo(combination))
            }
            Self::UnreachableRule { index, earlier } => write!(
                f,
                "rule {} repeats the antecedent of rule {}",
                index + 1,
                earlier + 1
            ),
            Self::OverlappingRules { combination, rules } => write!(
                f,
                "rules {} all cover ({})",
                rules
                    .iter()
                    .map(|r| (r + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(", "),
                combo(combination)
            ),
            Self::UnknownName {
                rule,
                name,
                context,
            } => {
                write!(f, "rule {}: unknown {} '{}'", rule + 1, context, name)
            }
        }
    }
}

/// Check a rule base against a schema.
///
/// An empty findings list means the base is valid and complete: every name
/// resolves, no rule duplicates another's antecedent, and every combination
/// in the product of the schema's input labels is covered by exactly one
/// rule (a rule that omits an input variable covers all of its labels).
pub fn validate_rulebase(rb: &RuleBase, schema: &RuleSchema) -> Vec<Finding> {
    let mut findings = Vec::new();

    // name resolution
    let mut resolvable = vec![true; rb.rules.len()];
    for (idx, rule) in rb.rules.iter().enumerate() {
        for (var, label) in rule.antecedents() {
            match RuleSchema::find(&schema.inputs, var) {
                None => {
                    findings.push(Finding::UnknownName {
                        rule: idx,
                        name: var.clone(),
                        context: "input variable".into(),
                    });
                    resolvable[idx] = false;
                }
                Some((canon, labels)) => {
                    if RuleSchema::canonical_label(labels, label).is_none() {
                        findings.push(Finding::UnknownName {
                            rule: idx,
                            name: label.clone(),
                            context: format!("label of input '{canon}'"),
                        });
                        resolvable[idx] = false;
                    }
                }
            }
        }
        for (var, label) in rule.consequents() {
            match RuleSchema::find(&schema.outputs, var) {
                None => {
                    findings.push(Finding::UnknownName {
                        rule: idx,
                        name: var.clone(),
                        context: "output variable".into(),
                    });
                    resolvable[idx] = false;
                }
                Some((canon, labels)) => {
                    if RuleSchema::canonical_label(labels, label).is_none() {
                        findings.push(Finding::UnknownName {
                            rule: idx,
                            name: label.clone(),
                            context: format!("label of output '{canon}'"),
                        });
                        resolvable[idx] = false;
                    }
                }
            }
        }
    }

    // duplicated antecedents
    for (idx, rule) in rb.rules.iter().enumerate() {
        if let Some(earlier) = rb.rules[..idx]
            .iter()
            .position(|r| r.antecedent_key() == rule.antecedent_key())
        {
            findings.push(Finding::UnreachableRule {
                index: idx,
                earlier,
            });
        }
    }

    // coverage of the full input-label product
    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (var, labels) in &schema.inputs {
        combos = combos
            .into_iter()
            .flat_map(|combo| {
                labels.iter().map(move |label| {
                    let mut next = combo.clone();
                    next.push((var.clone(), label.clone()));
                    next
                })
            })
            .collect();
    }
    for combo in combos {
        let matching: Vec<usize> = rb
            .rules
            .iter()
            .enumerate()
            .filter(|(idx, rule)| {
                resolvable[*idx]
                    && rule.antecedents().iter().all(|(var, label)| {
                        combo.iter().any(|(cv, cl)| {
                            cv.eq_ignore_ascii_case(var) && cl.eq_ignore_ascii_case(label)
                        })
                    })
            })
            .map(|(idx, _)| idx)
            .collect();
        match matching.len() {
            0 => findings.push(Finding::MissingCombination { combination: combo }),
            1 => {}
            _ => findings.push(Finding::OverlappingRules {
                combination: combo,
                rules: matching,
            }),
        }
    }

    findings
}
