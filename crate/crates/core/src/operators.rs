//! Witnesses for weak deducibility of identicals, and decomposition of
//! grounding trees into the immediate claims composing them.

use thiserror::Error;

use crate::calculus::{match_grounding_rule, CalculusSpec};
use crate::derivation::{Derivation, RuleTag};
use crate::syntax::{ClaimParts, EntrySel, Formula, GroundEntry};

/// A derivation of a claim from itself that eliminates and reintroduces its
/// main operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoiWitness {
    pub derivation: Derivation,
    pub elim_count: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error("`{0}` is not an immediate grounding claim")]
    NotImmediate(String),
    #[error("`{0}` contains grounding-tree entries")]
    HasTreeEntries(String),
    #[error("no grounding rule application concludes `{0}`")]
    NotIntroducible(String),
    #[error("`{0}` has no grounding-tree entry")]
    NoTreeEntry(String),
    #[error("entry {sel} of `{claim}` is not a grounding-tree entry")]
    NotATreeEntry { claim: String, sel: EntrySel },
    #[error("`{0}` is not a grounding tree")]
    NotAGroundingTree(String),
    #[error("parts do not decompose the target: expected [{expected}], found [{found}]")]
    PartsMismatch { expected: String, found: String },
}

fn immediate_parts(claim: &Formula) -> Result<ClaimParts<'_>, OperatorError> {
    ClaimParts::of(claim).ok_or_else(|| OperatorError::NotImmediate(claim.to_string()))
}

/// Eliminates every ground and condition of `claim`, reapplies the grounding
/// rule to them and reintroduces the claim.
pub fn wdoi_immediate(claim: &Formula, spec: &CalculusSpec) -> Result<DoiWitness, OperatorError> {
    let parts = immediate_parts(claim)?;
    if parts.has_tree() {
        return Err(OperatorError::HasTreeEntries(claim.to_string()));
    }
    let grounds: Vec<Formula> = parts.grounds.iter().map(|e| e.formula().clone()).collect();
    let conditions: Vec<Formula> = parts.conditions.iter().map(|e| e.formula().clone()).collect();
    let instance = match_grounding_rule(spec, &grounds, &conditions, parts.consequence)
        .ok_or_else(|| OperatorError::NotIntroducible(claim.to_string()))?;
    let hyp = || Derivation::hyp(claim.clone());
    let mut premisses: Vec<Derivation> = grounds
        .iter()
        .enumerate()
        .map(|(i, g)| Derivation::node(RuleTag::ImmElimGround(i), g.clone(), vec![hyp()]))
        .collect();
    premisses.extend(
        conditions.iter().enumerate().map(|(i, c)| Derivation::node(RuleTag::ImmElimCond(i), c.clone(), vec![hyp()])),
    );
    let elim_count = premisses.len();
    let grounding = Derivation::node(RuleTag::Grounding(instance), parts.consequence.clone(), premisses);
    Ok(DoiWitness { derivation: Derivation::node(RuleTag::ImmIntro, claim.clone(), vec![grounding]), elim_count })
}

/// Extracts and flattens one tree entry of `claim`, then plugs the two
/// results back together. Without `sel`, the leftmost tree entry is used.
pub fn wdoi_tree(claim: &Formula, sel: Option<EntrySel>) -> Result<DoiWitness, OperatorError> {
    let parts = immediate_parts(claim)?;
    let sel = match sel {
        Some(sel) => sel,
        None => parts
            .entries()
            .find(|(_, e)| e.is_tree())
            .map(|(s, _)| s)
            .ok_or_else(|| OperatorError::NoTreeEntry(claim.to_string()))?,
    };
    let entry = parts
        .entry(sel)
        .filter(|e| e.is_tree())
        .ok_or_else(|| OperatorError::NotATreeEntry { claim: claim.to_string(), sel })?;
    let hyp = || Derivation::hyp(claim.clone());
    let sub = entry.as_claim().expect("tree entry");
    let flat = parts.with_entry(sel, GroundEntry::Plain(entry.formula().clone()));
    let left = Derivation::node(RuleTag::TreeExtract(vec![sel]), sub, vec![hyp()]);
    let right = Derivation::node(RuleTag::TreeFlatten(sel), flat, vec![hyp()]);
    Ok(DoiWitness {
        derivation: Derivation::node(RuleTag::TreeIntro(sel), claim.clone(), vec![left, right]),
        elim_count: 2,
    })
}

/// A component claim of a grounding tree with its derivation from the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub claim: Formula,
    pub derivation: Derivation,
}

/// The immediate claims composing `claim`, innermost first and left to
/// right, ending with the fully flattened claim itself.
pub fn decompose_tree(claim: &Formula) -> Result<Vec<Component>, OperatorError> {
    if ClaimParts::of(claim).is_none() || claim.validate().is_err() {
        return Err(OperatorError::NotAGroundingTree(claim.to_string()));
    }
    let mut out = Vec::new();
    collect(claim, claim, &mut Vec::new(), &mut out);
    Ok(out)
}

fn collect(root: &Formula, here: &Formula, path: &mut Vec<EntrySel>, out: &mut Vec<Component>) {
    let parts = ClaimParts::of(here).expect("immediate claim");
    for (sel, entry) in parts.entries() {
        if let Some(sub) = entry.as_claim() {
            path.push(sel);
            collect(root, &sub, path, out);
            path.pop();
        }
    }
    let mut derivation = Derivation::hyp(root.clone());
    let mut cur = here.clone();
    if !path.is_empty() {
        derivation = Derivation::node(RuleTag::TreeExtract(path.clone()), cur.clone(), vec![derivation]);
    }
    let trees: Vec<EntrySel> = parts.entries().filter(|(_, e)| e.is_tree()).map(|(s, _)| s).collect();
    for sel in trees {
        let p = ClaimParts::of(&cur).expect("immediate claim");
        let flat = p.with_entry(sel, GroundEntry::Plain(p.entry(sel).unwrap().formula().clone()));
        derivation = Derivation::node(RuleTag::TreeFlatten(sel), flat.clone(), vec![derivation]);
        cur = flat;
    }
    out.push(Component { claim: cur, derivation });
}

/// Derives `target` from its component claims by tree introductions,
/// plugging in the last tree entry first.
pub fn recompose_tree(parts: &[Formula], target: &Formula) -> Result<Derivation, OperatorError> {
    let expected: Vec<Formula> = decompose_tree(target)?.into_iter().map(|c| c.claim).collect();
    if expected != parts {
        let show = |v: &[Formula]| v.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ");
        return Err(OperatorError::PartsMismatch { expected: show(&expected), found: show(parts) });
    }
    Ok(rebuild(target))
}

fn rebuild(claim: &Formula) -> Derivation {
    let parts = ClaimParts::of(claim).expect("immediate claim");
    let Some((sel, entry)) = parts.entries().filter(|(_, e)| e.is_tree()).last() else {
        return Derivation::hyp(claim.clone());
    };
    let sub = entry.as_claim().expect("tree entry");
    let rest = parts.with_entry(sel, GroundEntry::Plain(entry.formula().clone()));
    Derivation::node(RuleTag::TreeIntro(sel), claim.clone(), vec![rebuild(&sub), rebuild(&rest)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::reference_calculus;
    use crate::derivation::{check, open_hypotheses};
    use crate::syntax::{parse_formula, tree_size};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    const TREE2: &str = "((r, s *> r & s) *> ~~(r & s)) [~t] |> ~~(r & s) | t";
    const PAIR: &str = "(p, q *> p & q), (r [~s] *> r | s) |> (p & q) & (r | s)";

    fn assert_witness(w: &DoiWitness, claim: &Formula) {
        let spec = reference_calculus();
        let report = check(&w.derivation, &spec);
        assert!(report.ok, "{:?}", report.failures);
        assert_eq!(&w.derivation.conclusion, claim);
        assert!(open_hypotheses(&w.derivation).iter().all(|h| h == claim));
        assert!(w.elim_count >= 1);
    }

    #[test]
    fn immediate_witnesses() {
        let spec = reference_calculus();
        for (s, n) in [("p, q |> p & q", 2), ("p [~q] |> p | q", 2), ("p & q |> ~~(p & q)", 1)] {
            let w = wdoi_immediate(&f(s), &spec).unwrap();
            assert_eq!(w.elim_count, n);
            assert_witness(&w, &f(s));
        }
        assert!(matches!(wdoi_immediate(&f("p & q & r & s |> p"), &spec), Err(OperatorError::NotIntroducible(_))));
        assert!(matches!(wdoi_immediate(&f(TREE2), &spec), Err(OperatorError::HasTreeEntries(_))));
        assert!(matches!(wdoi_immediate(&f("p"), &spec), Err(OperatorError::NotImmediate(_))));
    }

    #[test]
    fn tree_witnesses() {
        let claim = f(TREE2);
        let w = wdoi_tree(&claim, None).unwrap();
        assert_eq!(w.elim_count, 2);
        assert_witness(&w, &claim);
        let cond = f("p [(q [~r] *> q | r)] |> x");
        let w = wdoi_tree(&cond, None).unwrap();
        assert_eq!(w.derivation.rule, RuleTag::TreeIntro(EntrySel::condition(0)));
        assert_witness(&w, &cond);
        let w = wdoi_tree(&f(PAIR), Some(EntrySel::ground(1))).unwrap();
        assert_witness(&w, &f(PAIR));
        assert!(matches!(wdoi_tree(&f("p, q |> p & q"), None), Err(OperatorError::NoTreeEntry(_))));
        assert!(matches!(wdoi_tree(&f(PAIR), Some(EntrySel::ground(2))), Err(OperatorError::NotATreeEntry { .. })));
    }

    #[test]
    fn decompose_pair() {
        let claim = f(PAIR);
        let parts = decompose_tree(&claim).unwrap();
        let claims: Vec<Formula> = parts.iter().map(|c| c.claim.clone()).collect();
        assert_eq!(claims, vec![f("p, q |> p & q"), f("r [~s] |> r | s"), f("p & q, r | s |> (p & q) & (r | s)")]);
        let spec = reference_calculus();
        for c in &parts {
            assert!(check(&c.derivation, &spec).ok);
            assert_eq!(c.derivation.conclusion, c.claim);
            assert!(c
                .derivation
                .nodes()
                .iter()
                .all(|(_, n)| matches!(n.rule, RuleTag::Hyp | RuleTag::TreeExtract(_) | RuleTag::TreeFlatten(_))));
        }
        assert_eq!(parts[2].derivation.rule_count(), 2);
        let d = recompose_tree(&claims, &claim).unwrap();
        assert!(check(&d, &spec).ok);
        assert_eq!(d.conclusion, claim);
        assert_eq!(d.rule, RuleTag::TreeIntro(EntrySel::ground(1)));
        assert_eq!(d.premisses[1].rule, RuleTag::TreeIntro(EntrySel::ground(0)));
        let mut hyps = open_hypotheses(&d);
        let mut sorted = claims.clone();
        sorted.sort();
        hyps.sort();
        assert_eq!(hyps, sorted);
    }

    #[test]
    fn decompose_nested() {
        let claim = f(TREE2);
        let parts = decompose_tree(&claim).unwrap();
        assert_eq!(parts.len(), tree_size(&claim).unwrap());
        let claims: Vec<Formula> = parts.iter().map(|c| c.claim.clone()).collect();
        assert_eq!(claims, vec![f("r, s |> r & s"), f("r & s |> ~~(r & s)"), f("~~(r & s) [~t] |> ~~(r & s) | t")]);
        let spec = reference_calculus();
        assert!(parts.iter().all(|c| check(&c.derivation, &spec).ok));
        let d = recompose_tree(&claims, &claim).unwrap();
        assert!(check(&d, &spec).ok);
    }

    #[test]
    fn trivial_and_mismatched_parts() {
        let claim = f("p, q |> p & q");
        let parts = decompose_tree(&claim).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].derivation, Derivation::hyp(claim.clone()));
        assert_eq!(recompose_tree(std::slice::from_ref(&claim), &claim).unwrap(), Derivation::hyp(claim));
        let target = f(PAIR);
        let mut claims: Vec<Formula> = decompose_tree(&target).unwrap().into_iter().map(|c| c.claim).collect();
        claims.swap(0, 1);
        assert!(matches!(recompose_tree(&claims, &target), Err(OperatorError::PartsMismatch { .. })));
        claims.pop();
        assert!(matches!(recompose_tree(&claims, &target), Err(OperatorError::PartsMismatch { .. })));
        assert!(matches!(decompose_tree(&f("p >> q")), Err(OperatorError::NotAGroundingTree(_))));
    }
}
