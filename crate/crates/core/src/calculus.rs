//! Grounding calculi: schematic grounding rules and one-way matching.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{self, logical_complexity, Formula, ParseError};

/// A propositional formula with uppercase metavariables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Meta(String),
    Atom(String),
    Bottom,
    Neg(Box<Pattern>),
    And(Box<Pattern>, Box<Pattern>),
    Or(Box<Pattern>, Box<Pattern>),
    Imp(Box<Pattern>, Box<Pattern>),
}

pub type Binding = BTreeMap<String, Formula>;

impl Pattern {
    pub fn parse(text: &str) -> Result<Pattern, PatternError> {
        let f = syntax::parse_with_metavars(text).map_err(PatternError::Syntax)?;
        Pattern::from_formula(&f)
    }

    fn from_formula(f: &Formula) -> Result<Pattern, PatternError> {
        let bin = |l: &Formula, r: &Formula| -> Result<(Box<Pattern>, Box<Pattern>), PatternError> {
            Ok((Box::new(Pattern::from_formula(l)?), Box::new(Pattern::from_formula(r)?)))
        };
        Ok(match f {
            Formula::Atom(name) if name.starts_with(|c: char| c.is_ascii_uppercase()) => Pattern::Meta(name.clone()),
            Formula::Atom(name) => Pattern::Atom(name.clone()),
            Formula::Bottom => Pattern::Bottom,
            Formula::Neg(g) => Pattern::Neg(Box::new(Pattern::from_formula(g)?)),
            Formula::And(l, r) => {
                let (l, r) = bin(l, r)?;
                Pattern::And(l, r)
            }
            Formula::Or(l, r) => {
                let (l, r) = bin(l, r)?;
                Pattern::Or(l, r)
            }
            Formula::Imp(l, r) => {
                let (l, r) = bin(l, r)?;
                Pattern::Imp(l, r)
            }
            Formula::Immediate { .. } | Formula::Mediate { .. } => {
                return Err(PatternError::GroundingOperator(syntax::print_formula(f)))
            }
        })
    }

    pub fn metavars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Meta(m) => {
                if !out.contains(m) {
                    out.push(m.clone());
                }
            }
            Pattern::Atom(_) | Pattern::Bottom => {}
            Pattern::Neg(p) => p.metavars(out),
            Pattern::And(l, r) | Pattern::Or(l, r) | Pattern::Imp(l, r) => {
                l.metavars(out);
                r.metavars(out);
            }
        }
    }

    /// One-way matching: extends `binding` so that the pattern instantiates
    /// to `f`. On failure `binding` may hold partial assignments.
    pub fn match_into(&self, f: &Formula, binding: &mut Binding) -> bool {
        match (self, f) {
            (Pattern::Meta(m), _) => match binding.get(m) {
                Some(bound) => bound == f,
                None => {
                    binding.insert(m.clone(), f.clone());
                    true
                }
            },
            (Pattern::Atom(a), Formula::Atom(b)) => a == b,
            (Pattern::Bottom, Formula::Bottom) => true,
            (Pattern::Neg(p), Formula::Neg(g)) => p.match_into(g, binding),
            (Pattern::And(pl, pr), Formula::And(l, r))
            | (Pattern::Or(pl, pr), Formula::Or(l, r))
            | (Pattern::Imp(pl, pr), Formula::Imp(l, r)) => pl.match_into(l, binding) && pr.match_into(r, binding),
            _ => false,
        }
    }

    /// Substitutes the binding; `None` if a metavariable is unbound.
    pub fn instantiate(&self, binding: &Binding) -> Option<Formula> {
        Some(match self {
            Pattern::Meta(m) => binding.get(m)?.clone(),
            Pattern::Atom(a) => Formula::Atom(a.clone()),
            Pattern::Bottom => Formula::Bottom,
            Pattern::Neg(p) => Formula::neg(p.instantiate(binding)?),
            Pattern::And(l, r) => Formula::and(l.instantiate(binding)?, r.instantiate(binding)?),
            Pattern::Or(l, r) => Formula::or(l.instantiate(binding)?, r.instantiate(binding)?),
            Pattern::Imp(l, r) => Formula::imp(l.instantiate(binding)?, r.instantiate(binding)?),
        })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Metavariables print as atoms with uppercase names.
        fn to_formula(p: &Pattern) -> Formula {
            match p {
                Pattern::Meta(m) | Pattern::Atom(m) => Formula::Atom(m.clone()),
                Pattern::Bottom => Formula::Bottom,
                Pattern::Neg(p) => Formula::neg(to_formula(p)),
                Pattern::And(l, r) => Formula::and(to_formula(l), to_formula(r)),
                Pattern::Or(l, r) => Formula::or(to_formula(l), to_formula(r)),
                Pattern::Imp(l, r) => Formula::imp(to_formula(l), to_formula(r)),
            }
        }
        f.write_str(&syntax::print_formula(&to_formula(self)))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error(transparent)]
    Syntax(ParseError),
    #[error("grounding operator in pattern `{0}`")]
    GroundingOperator(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SideCondition {
    #[default]
    None,
    /// Every instantiated premiss is strictly less complex than the conclusion.
    PremissSimpler,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSchema {
    pub name: String,
    pub grounds: Vec<Pattern>,
    pub conditions: Vec<Pattern>,
    pub conclusion: Pattern,
    pub side: SideCondition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalculusSpec {
    pub name: String,
    pub closed_world: bool,
    pub commutative: bool,
    pub schemas: Vec<RuleSchema>,
}

/// A concrete application of a schema.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleInstance {
    pub schema: String,
    pub binding: Binding,
    pub grounds: Vec<Formula>,
    pub conditions: Vec<Formula>,
    pub conclusion: Formula,
}

impl RuleInstance {
    pub fn premisses(&self) -> impl Iterator<Item = &Formula> {
        self.grounds.iter().chain(&self.conditions)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("syntax error in calculus document: {0}")]
    Syntax(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateRuleName(String),
    #[error("ill-formed pattern in rule `{rule}`: {reason}")]
    IllFormedPattern { rule: String, reason: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalculus {
    name: String,
    #[serde(default)]
    closed_world: bool,
    #[serde(default)]
    commutative: bool,
    rules: Vec<RawRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    name: String,
    grounds: Vec<String>,
    #[serde(default)]
    conditions: Vec<String>,
    conclusion: String,
    #[serde(default)]
    side: SideCondition,
}

#[derive(Serialize)]
struct RawRuleOut<'a> {
    name: &'a str,
    grounds: Vec<String>,
    conditions: Vec<String>,
    conclusion: String,
    side: SideCondition,
}

const REFERENCE: &str = include_str!("../calculi/gc-core.json");

/// The bundled `gc-core` calculus.
pub fn reference_calculus() -> CalculusSpec {
    load_calculus(REFERENCE).expect("bundled calculus is valid")
}

/// Source text of the bundled `gc-core` calculus.
pub fn reference_calculus_source() -> &'static str {
    REFERENCE
}

pub fn load_calculus(document: &str) -> Result<CalculusSpec, CalculusError> {
    let raw: RawCalculus = serde_json::from_str(document).map_err(|e| CalculusError::Syntax(e.to_string()))?;
    let mut seen = HashSet::new();
    let mut schemas = Vec::with_capacity(raw.rules.len());
    for rule in raw.rules {
        if !seen.insert(rule.name.clone()) {
            return Err(CalculusError::DuplicateRuleName(rule.name));
        }
        let ill = |reason: String| CalculusError::IllFormedPattern { rule: rule.name.clone(), reason };
        let parse = |s: &String| Pattern::parse(s).map_err(|e| ill(e.to_string()));
        let grounds = rule.grounds.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        let conditions = rule.conditions.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        let conclusion = parse(&rule.conclusion)?;
        if grounds.is_empty() {
            return Err(ill("empty ground list".into()));
        }
        schemas.push(RuleSchema { name: rule.name, grounds, conditions, conclusion, side: rule.side });
    }
    Ok(CalculusSpec { name: raw.name, closed_world: raw.closed_world, commutative: raw.commutative, schemas })
}

impl CalculusSpec {
    pub fn schema(&self, name: &str) -> Option<&RuleSchema> {
        self.schemas.iter().find(|s| s.name == name)
    }

    pub fn with_closed_world(mut self, on: bool) -> Self {
        self.closed_world = on;
        self
    }

    pub fn with_commutative(mut self, on: bool) -> Self {
        self.commutative = on;
        self
    }

    /// Serializes back to the JSON calculus format.
    pub fn to_json(&self) -> String {
        let rules: Vec<RawRuleOut<'_>> = self
            .schemas
            .iter()
            .map(|s| RawRuleOut {
                name: &s.name,
                grounds: s.grounds.iter().map(ToString::to_string).collect(),
                conditions: s.conditions.iter().map(ToString::to_string).collect(),
                conclusion: s.conclusion.to_string(),
                side: s.side,
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "name": self.name,
            "closed_world": self.closed_world,
            "commutative": self.commutative,
            "rules": rules,
        }))
        .expect("calculus serializes")
    }
}

/// First schema, in file order, matching the triple and satisfying its side
/// condition.
pub fn match_grounding_rule(
    spec: &CalculusSpec,
    grounds: &[Formula],
    conditions: &[Formula],
    conclusion: &Formula,
) -> Option<RuleInstance> {
    spec.schemas.iter().find_map(|s| match_schema(s, spec.commutative, grounds, conditions, conclusion))
}

/// Matches one schema against a triple.
pub fn match_schema(
    schema: &RuleSchema,
    commutative: bool,
    grounds: &[Formula],
    conditions: &[Formula],
    conclusion: &Formula,
) -> Option<RuleInstance> {
    if schema.grounds.len() != grounds.len() || schema.conditions.len() != conditions.len() {
        return None;
    }
    let mut binding = Binding::new();
    if !schema.conclusion.match_into(conclusion, &mut binding) {
        return None;
    }
    let binding = match_list(&schema.grounds, grounds, binding, commutative)?;
    let binding = match_list(&schema.conditions, conditions, binding, commutative)?;
    if schema.side == SideCondition::PremissSimpler {
        let c = logical_complexity(conclusion);
        if grounds.iter().chain(conditions).any(|p| logical_complexity(p) >= c) {
            return None;
        }
    }
    Some(RuleInstance {
        schema: schema.name.clone(),
        binding,
        grounds: grounds.to_vec(),
        conditions: conditions.to_vec(),
        conclusion: conclusion.clone(),
    })
}

fn match_list(patterns: &[Pattern], formulas: &[Formula], binding: Binding, commutative: bool) -> Option<Binding> {
    if !commutative {
        let mut b = binding;
        for (p, f) in patterns.iter().zip(formulas) {
            if !p.match_into(f, &mut b) {
                return None;
            }
        }
        return Some(b);
    }
    fn go(patterns: &[Pattern], formulas: &[Formula], used: &mut Vec<bool>, binding: &Binding) -> Option<Binding> {
        let Some((p, rest)) = patterns.split_first() else {
            return Some(binding.clone());
        };
        for j in 0..formulas.len() {
            if used[j] {
                continue;
            }
            let mut b = binding.clone();
            if p.match_into(&formulas[j], &mut b) {
                used[j] = true;
                if let Some(done) = go(rest, formulas, used, &b) {
                    return Some(done);
                }
                used[j] = false;
            }
        }
        None
    }
    go(patterns, formulas, &mut vec![false; formulas.len()], &binding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn fs(v: &[&str]) -> Vec<Formula> {
        v.iter().map(|s| f(s)).collect()
    }

    #[test]
    fn reference_schemas() {
        let spec = reference_calculus();
        let names: Vec<_> = spec.schemas.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["and", "or_l", "or_r", "or_both", "dneg"]);
        assert_eq!(spec.name, "gc-core");
    }

    #[test]
    fn matches_reference_instances() {
        let spec = reference_calculus();
        let m = match_grounding_rule(&spec, &fs(&["p", "q"]), &[], &f("p & q")).unwrap();
        assert_eq!(m.schema, "and");
        let m = match_grounding_rule(&spec, &fs(&["p"]), &fs(&["~q"]), &f("p | q")).unwrap();
        assert_eq!(m.schema, "or_l");
        let m = match_grounding_rule(&spec, &fs(&["q"]), &fs(&["~p"]), &f("p | q")).unwrap();
        assert_eq!(m.schema, "or_r");
        let m = match_grounding_rule(&spec, &fs(&["p & q"]), &[], &f("~~(p & q)")).unwrap();
        assert_eq!(m.schema, "dneg");
        assert!(match_grounding_rule(&spec, &fs(&["p & q & r & s"]), &[], &f("p")).is_none());
    }

    #[test]
    fn repeated_metavariable_must_bind_consistently() {
        let spec = reference_calculus();
        assert!(match_grounding_rule(&spec, &fs(&["p", "r"]), &[], &f("p & q")).is_none());
        assert!(match_grounding_rule(&spec, &fs(&["p"]), &fs(&["~r"]), &f("p | q")).is_none());
    }

    #[test]
    fn commutative_flag_permits_permutations() {
        let spec = reference_calculus();
        assert!(match_grounding_rule(&spec, &fs(&["t", "s"]), &[], &f("s & t")).is_none());
        let spec = spec.with_commutative(true);
        let m = match_grounding_rule(&spec, &fs(&["t", "s"]), &[], &f("s & t")).unwrap();
        assert_eq!(m.schema, "and");
        assert_eq!(m.grounds, fs(&["t", "s"]));
    }

    #[test]
    fn side_condition_filters() {
        let doc = r#"{"name":"x","rules":[{"name":"id","grounds":["A"],"conclusion":"A","side":"premiss_simpler"},
                     {"name":"id2","grounds":["A"],"conclusion":"A"}]}"#;
        let spec = load_calculus(doc).unwrap();
        assert_eq!(match_grounding_rule(&spec, &fs(&["p"]), &[], &f("p")).unwrap().schema, "id2");
    }

    #[test]
    fn load_errors() {
        let dup = r#"{"name":"x","rules":[{"name":"and","grounds":["A"],"conclusion":"~A"},
                     {"name":"and","grounds":["A"],"conclusion":"~~A"}]}"#;
        assert_eq!(load_calculus(dup), Err(CalculusError::DuplicateRuleName("and".into())));
        assert!(matches!(load_calculus("{"), Err(CalculusError::Syntax(_))));
        let bad = r#"{"name":"x","rules":[{"name":"r","grounds":["A |> B"],"conclusion":"B"}]}"#;
        assert!(matches!(load_calculus(bad), Err(CalculusError::IllFormedPattern { .. })));
        let bad = r#"{"name":"x","rules":[{"name":"r","grounds":["A &"],"conclusion":"B"}]}"#;
        assert!(matches!(load_calculus(bad), Err(CalculusError::IllFormedPattern { .. })));
        let empty = r#"{"name":"x","rules":[]}"#;
        let spec = load_calculus(empty).unwrap();
        assert!(spec.schemas.is_empty());
        assert!(match_grounding_rule(&spec, &fs(&["p", "q"]), &[], &f("p & q")).is_none());
    }

    #[test]
    fn json_round_trip() {
        let spec = reference_calculus();
        assert_eq!(load_calculus(&spec.to_json()).unwrap(), spec);
    }
}
