//! Bars of grounding derivations, mediate claims synthesized from bars, and
//! the correspondence between grounding derivations and grounding trees.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::calculus::{match_grounding_rule, CalculusSpec};
use crate::derivation::{check, is_grounding_derivation, Derivation, NodePath, RuleTag};
use crate::syntax::{ClaimParts, EntrySel, Formula, GroundEntry, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("not a grounding derivation")]
    NotAGroundingDerivation,
    #[error("not a bar of the derivation: {0}")]
    BarMismatch(String),
    #[error("`{0}` is not a grounding rule application")]
    NoMatchingRule(String),
    #[error("`{0}` is not an immediate grounding claim")]
    NotImmediate(String),
    #[error("derivation rejected at {path}: {message}")]
    Rejected { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BarMember {
    pub path: NodePath,
    pub formula: Formula,
    /// Position the occurrence fills in the rule instance right below it.
    pub side: Side,
    /// `Condition` when the occurrence or any occurrence below it (other
    /// than the root) fills a condition position; this is where the member
    /// ends up in the synthesized mediate claim.
    pub effective: Side,
}

impl BarMember {
    /// Whether the member lies above a condition of some rule other than its own.
    pub fn crosses_condition(&self) -> bool {
        self.side == Side::Ground && self.effective == Side::Condition
    }
}

/// A set of occurrences meeting every root-leaf path exactly once, root excluded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bar {
    /// Members in pre-order.
    pub members: Vec<BarMember>,
}

impl Bar {
    pub fn grounds(&self) -> Vec<Formula> {
        self.of_side(Side::Ground)
    }

    pub fn conditions(&self) -> Vec<Formula> {
        self.of_side(Side::Condition)
    }

    fn of_side(&self, side: Side) -> Vec<Formula> {
        self.members.iter().filter(|m| m.effective == side).map(|m| m.formula.clone()).collect()
    }

    pub fn crosses_condition(&self) -> bool {
        self.members.iter().any(BarMember::crosses_condition)
    }

    pub fn paths(&self) -> Vec<NodePath> {
        self.members.iter().map(|m| m.path.clone()).collect()
    }
}

/// Sorted, comma-separated members; condition members are bracketed.
impl fmt::Display for Bar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = self
            .members
            .iter()
            .map(|m| match m.effective {
                Side::Ground => m.formula.to_string(),
                Side::Condition => format!("[{}]", m.formula),
            })
            .collect();
        items.sort();
        f.write_str(&items.join(", "))
    }
}

fn require_grounding(d: &Derivation) -> Result<(), AnalysisError> {
    if is_grounding_derivation(d) {
        Ok(())
    } else {
        Err(AnalysisError::NotAGroundingDerivation)
    }
}

fn require_checked(d: &Derivation, spec: &CalculusSpec) -> Result<(), AnalysisError> {
    let report = check(d, spec);
    match report.failures.into_iter().next() {
        None => Ok(()),
        Some(f) => Err(AnalysisError::Rejected { path: f.path, message: f.message }),
    }
}

fn premiss_side(node: &Derivation, i: usize) -> Side {
    match &node.rule {
        RuleTag::Grounding(inst) if i >= inst.grounds.len() => Side::Condition,
        _ => Side::Ground,
    }
}

/// Every bar of a grounding derivation. Each premiss subtree either
/// contributes its own conclusion or, recursively, one choice per premiss;
/// choices for earlier premisses vary slowest.
pub fn bars(d: &Derivation) -> Result<Vec<Bar>, AnalysisError> {
    require_grounding(d)?;
    let choices = product(d, &NodePath::root(), Side::Ground);
    Ok(choices.into_iter().map(|members| Bar { members }).collect())
}

fn product(node: &Derivation, path: &NodePath, inherited: Side) -> Vec<Vec<BarMember>> {
    let mut acc: Vec<Vec<BarMember>> = vec![Vec::new()];
    for (i, p) in node.premisses.iter().enumerate() {
        let side = premiss_side(node, i);
        let effective = if inherited == Side::Condition { Side::Condition } else { side };
        let opts = options(p, &path.child(i), side, effective);
        acc = acc
            .iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.extend(o.iter().cloned());
                    v
                })
            })
            .collect();
    }
    acc
}

fn options(node: &Derivation, path: &NodePath, side: Side, effective: Side) -> Vec<Vec<BarMember>> {
    let me = BarMember { path: path.clone(), formula: node.conclusion.clone(), side, effective };
    let mut out = vec![vec![me]];
    if !node.is_leaf() {
        out.extend(product(node, path, effective));
    }
    out
}

/// Whether `paths` meets every root-leaf path of `d` exactly once and
/// avoids the root.
pub fn is_bar(d: &Derivation, paths: &[NodePath]) -> bool {
    if paths.iter().any(|p| p.0.is_empty()) || d.at(&NodePath::root()).is_none() {
        return false;
    }
    if paths.iter().any(|p| d.at(p).is_none()) {
        return false;
    }
    d.nodes()
        .into_iter()
        .filter(|(_, n)| n.is_leaf())
        .all(|(leaf, _)| paths.iter().filter(|p| p.is_prefix_of(&leaf)).count() == 1)
}

/// Derives `Γ [Δ] >> A` from the hypotheses of `d`, with `Γ` and `Δ` the
/// ground and condition members of `bar` and `A` the conclusion of `d`.
pub fn bar_to_mediate(d: &Derivation, bar: &Bar, spec: &CalculusSpec) -> Result<Derivation, AnalysisError> {
    require_grounding(d)?;
    require_checked(d, spec)?;
    let paths = bar.paths();
    if !is_bar(d, &paths) {
        return Err(AnalysisError::BarMismatch(bar.to_string()));
    }
    for m in &bar.members {
        if d.at(&m.path).map(|n| &n.conclusion) != Some(&m.formula) {
            return Err(AnalysisError::BarMismatch(format!("{} is not at {}", m.formula, m.path)));
        }
    }
    let (out, _, _) = synthesize(d, &NodePath::root(), &paths);
    Ok(out)
}

/// Returns the derivation together with the node paths that the grounds and
/// conditions of its conclusion stand for.
fn synthesize(node: &Derivation, path: &NodePath, bar: &[NodePath]) -> (Derivation, Vec<NodePath>, Vec<NodePath>) {
    let RuleTag::Grounding(inst) = &node.rule else { unreachable!("bars only descend through grounding rules") };
    let claim = Formula::immediate(inst.grounds.clone(), inst.conditions.clone(), inst.conclusion.clone());
    let imm = Derivation::node(RuleTag::ImmIntro, claim.clone(), vec![node.clone()]);
    let med = Formula::mediate(inst.grounds.clone(), inst.conditions.clone(), inst.conclusion.clone());
    let mut cur = Derivation::node(RuleTag::MedIntroBase, med, vec![imm]);
    let n = inst.grounds.len();
    let mut gpos: Vec<NodePath> = (0..n).map(|i| path.child(i)).collect();
    let mut cpos: Vec<NodePath> = (n..node.premisses.len()).map(|i| path.child(i)).collect();
    for (i, p) in node.premisses.iter().enumerate() {
        let here = path.child(i);
        if bar.contains(&here) {
            continue;
        }
        let (sub, sg, sc) = synthesize(p, &here, bar);
        let (rule, mut ng, mut nc) = if let Some(k) = gpos.iter().position(|x| *x == here) {
            let ng = [&gpos[..k], &sg[..], &gpos[k + 1..]].concat();
            let nc = [&sc[..], &cpos[..]].concat();
            (RuleTag::MedIntroTransGround(k), ng, nc)
        } else {
            let k = cpos.iter().position(|x| *x == here).expect("premiss position is tracked");
            let nc = [&cpos[..k], &sg[..], &sc[..], &cpos[k + 1..]].concat();
            (RuleTag::MedIntroTransCond(k), gpos.clone(), nc)
        };
        let conclusion = crate::derivation::infer_conclusion(&rule, &[&sub.conclusion, &cur.conclusion])
            .expect("splice matches the transitivity rule");
        cur = Derivation::node(rule, conclusion, vec![sub, cur]);
        std::mem::swap(&mut gpos, &mut ng);
        std::mem::swap(&mut cpos, &mut nc);
    }
    (cur, gpos, cpos)
}

/// The grounding tree corresponding to a grounding derivation.
pub fn derivation_to_tree(d: &Derivation) -> Result<Formula, AnalysisError> {
    require_grounding(d)?;
    Ok(to_tree(d))
}

fn to_tree(d: &Derivation) -> Formula {
    let RuleTag::Grounding(inst) = &d.rule else { unreachable!("grounding derivation") };
    let entry = |p: &Derivation| match p.rule {
        RuleTag::Hyp => GroundEntry::Plain(p.conclusion.clone()),
        _ => GroundEntry::tree_of(&to_tree(p)).expect("immediate claim"),
    };
    let n = inst.grounds.len();
    Formula::Immediate {
        grounds: d.premisses[..n].iter().map(entry).collect(),
        conditions: d.premisses[n..].iter().map(entry).collect(),
        consequence: Box::new(d.conclusion.clone()),
    }
}

/// The grounding derivation corresponding to a grounding tree, using the
/// first matching rule of `spec` for each component claim.
pub fn tree_to_derivation(t: &Formula, spec: &CalculusSpec) -> Result<Derivation, AnalysisError> {
    let parts = ClaimParts::of(t).ok_or_else(|| AnalysisError::NotImmediate(t.to_string()))?;
    let premiss = |e: &GroundEntry| match e.as_claim() {
        Some(sub) => tree_to_derivation(&sub, spec),
        None => Ok(Derivation::hyp(e.formula().clone())),
    };
    let premisses = parts.grounds.iter().chain(parts.conditions).map(premiss).collect::<Result<Vec<_>, _>>()?;
    let grounds: Vec<Formula> = parts.grounds.iter().map(|e| e.formula().clone()).collect();
    let conditions: Vec<Formula> = parts.conditions.iter().map(|e| e.formula().clone()).collect();
    let inst = match_grounding_rule(spec, &grounds, &conditions, parts.consequence).ok_or_else(|| {
        AnalysisError::NoMatchingRule(Formula::immediate(grounds, conditions, parts.consequence.clone()).to_string())
    })?;
    Ok(Derivation::node(RuleTag::Grounding(inst), parts.consequence.clone(), premisses))
}

/// Derives the grounding tree of `d` from the hypotheses of `d`: the last
/// rule is introduced as an immediate claim, then the tree of each derived
/// premiss is plugged in from left to right.
pub fn tree_derivation_witness(d: &Derivation, spec: &CalculusSpec) -> Result<Derivation, AnalysisError> {
    require_grounding(d)?;
    require_checked(d, spec)?;
    Ok(witness(d))
}

fn witness(d: &Derivation) -> Derivation {
    let RuleTag::Grounding(inst) = &d.rule else { unreachable!("grounding derivation") };
    let claim = Formula::immediate(inst.grounds.clone(), inst.conditions.clone(), inst.conclusion.clone());
    let mut cur = Derivation::node(RuleTag::ImmIntro, claim, vec![d.clone()]);
    let n = inst.grounds.len();
    for (i, p) in d.premisses.iter().enumerate() {
        if p.rule == RuleTag::Hyp {
            continue;
        }
        let sel = if i < n { EntrySel::ground(i) } else { EntrySel::condition(i - n) };
        let sub = witness(p);
        let parts = ClaimParts::of(&cur.conclusion).expect("immediate claim");
        let conclusion = parts.with_entry(sel, GroundEntry::tree_of(&sub.conclusion).expect("immediate claim"));
        cur = Derivation::node(RuleTag::TreeIntro(sel), conclusion, vec![sub, cur]);
    }
    cur
}

/// Multiplicity map, for comparing formula lists up to order.
pub fn multiset(items: &[Formula]) -> BTreeMap<&Formula, usize> {
    let mut m = BTreeMap::new();
    for f in items {
        *m.entry(f).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::reference_calculus;
    use crate::derivation::{open_hypotheses, parse_proof};
    use crate::syntax::{parse_formula, tree_size};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    const WIDE: &str = r#"
(grounding "p & (q | r) | s & t" :schema or_both
  (grounding "p & (q | r)" :schema and
    (hyp "p")
    (grounding "q | r" :schema or_both (hyp "q") (hyp "r")))
  (grounding "s & t" :schema and (hyp "t") (hyp "s")))
"#;

    const DNEG: &str = r#"
(grounding "~~(p & q)" :schema dneg
  (grounding "p & q" :schema and (hyp "p") (hyp "q")))
"#;

    const TREE2: &str = r#"
(grounding "~~(r & s) | t" :schema or_l
  (grounding "~~(r & s)" :schema dneg
    (grounding "r & s" :schema and (hyp "r") (hyp "s")))
  (hyp "~t"))
"#;

    fn commutative() -> CalculusSpec {
        reference_calculus().with_commutative(true)
    }

    #[test]
    fn bars_of_the_wide_derivation() {
        let spec = commutative();
        let d = parse_proof(WIDE, &spec).unwrap();
        assert!(check(&d, &spec).ok);
        let all = bars(&d).unwrap();
        assert_eq!(all.len(), 6);
        let lines: Vec<String> = all.iter().map(|b| b.to_string()).collect();
        assert!(lines.contains(&"p, q, r, s, t".to_string()));
        assert!(lines.contains(&"p, q | r, s & t".to_string()));
        for b in &all {
            assert!(is_bar(&d, &b.paths()));
            let m = bar_to_mediate(&d, b, &spec).unwrap();
            let report = check(&m, &spec);
            assert!(report.ok, "{b}: {:?}", report.failures);
            let Formula::Mediate { grounds, conditions, consequence } = &m.conclusion else { panic!() };
            assert_eq!(**consequence, d.conclusion);
            assert_eq!(multiset(grounds), multiset(&b.grounds()));
            assert_eq!(multiset(conditions), multiset(&b.conditions()));
        }
        let leaves = all.iter().find(|b| b.to_string() == "p, q, r, s, t").unwrap();
        let m = bar_to_mediate(&d, leaves, &spec).unwrap();
        assert_eq!(m.conclusion, f("p, q, r, t, s >> p & (q | r) | s & t"));
    }

    #[test]
    fn mediate_claims_from_dneg() {
        let spec = reference_calculus();
        let d = parse_proof(DNEG, &spec).unwrap();
        let all = bars(&d).unwrap();
        assert_eq!(all.len(), 2);
        let got: Vec<Formula> = all.iter().map(|b| bar_to_mediate(&d, b, &spec).unwrap().conclusion).collect();
        assert_eq!(got, vec![f("p & q >> ~~(p & q)"), f("p, q >> ~~(p & q)")]);
        let wrong = Bar { members: vec![all[1].members[0].clone()] };
        assert!(matches!(bar_to_mediate(&d, &wrong, &spec), Err(AnalysisError::BarMismatch(_))));
    }

    #[test]
    fn condition_members_are_bracketed() {
        let spec = reference_calculus();
        let text = r#"
(grounding "p | ~~q" :schema or_l
  (hyp "p")
  (grounding "~~~q" :schema dneg (hyp "~q")))
"#;
        let d = parse_proof(text, &spec).unwrap();
        assert!(check(&d, &spec).ok, "{:?}", check(&d, &spec).failures);
        let all = bars(&d).unwrap();
        let lines: Vec<String> = all.iter().map(|b| b.to_string()).collect();
        assert_eq!(lines, vec!["[~~~q], p", "[~q], p"]);
        assert!(!all[0].crosses_condition());
        assert!(all[1].crosses_condition());
        let m = bar_to_mediate(&d, &all[1], &spec).unwrap();
        assert_eq!(m.conclusion, f("p [~q] >> p | ~~q"));
        assert!(check(&m, &spec).ok);
    }

    #[test]
    fn tree_correspondence() {
        let spec = reference_calculus();
        let d = parse_proof(TREE2, &spec).unwrap();
        let t = derivation_to_tree(&d).unwrap();
        assert_eq!(t, f("((r, s *> r & s) *> ~~(r & s)) [~t] |> ~~(r & s) | t"));
        assert_eq!(tree_size(&t).unwrap(), d.grounding_count());
        assert_eq!(tree_to_derivation(&t, &spec).unwrap(), d);
        let one = parse_proof(r#"(grounding "p & q" :schema and (hyp "p") (hyp "q"))"#, &spec).unwrap();
        assert_eq!(derivation_to_tree(&one).unwrap(), f("p, q |> p & q"));
        let t = f("(r [~s] *> r | s) |> ~~(r | s)");
        let back = tree_to_derivation(&t, &spec).unwrap();
        assert_eq!(derivation_to_tree(&back).unwrap(), t);
        assert!(matches!(
            tree_to_derivation(&f("(p & q & r & s *> p), q |> p & q"), &spec),
            Err(AnalysisError::NoMatchingRule(_))
        ));
        assert!(matches!(derivation_to_tree(&Derivation::hyp(f("p"))), Err(AnalysisError::NotAGroundingDerivation)));
    }

    #[test]
    fn witnesses() {
        let spec = reference_calculus();
        let one = parse_proof(r#"(grounding "p & q" :schema and (hyp "p") (hyp "q"))"#, &spec).unwrap();
        let w = tree_derivation_witness(&one, &spec).unwrap();
        assert_eq!(w.rule, RuleTag::ImmIntro);
        let d = parse_proof(TREE2, &spec).unwrap();
        let w = tree_derivation_witness(&d, &spec).unwrap();
        assert!(check(&w, &spec).ok);
        assert_eq!(w.conclusion, derivation_to_tree(&d).unwrap());
        let intros = w.nodes().iter().filter(|(_, n)| matches!(n.rule, RuleTag::TreeIntro(_))).count();
        assert_eq!(intros, 2);
        let mut hyps = open_hypotheses(&w);
        hyps.dedup();
        assert_eq!(hyps, open_hypotheses(&d));
    }
}
