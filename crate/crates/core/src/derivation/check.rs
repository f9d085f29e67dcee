use serde::Serialize;

use super::{open_hypotheses, Derivation, Label, NodePath, RuleTag};
use crate::calculus::{match_grounding_rule, match_schema, CalculusSpec};
use crate::syntax::{ClaimParts, EntrySel, Formula, GroundEntry, Side};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckFailure {
    pub path: String,
    pub rule: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub failures: Vec<CheckFailure>,
    /// Advisory notes that do not make the derivation invalid.
    pub warnings: Vec<String>,
}

/// Validates every node of `d` against `spec`.
pub fn check(d: &Derivation, spec: &CalculusSpec) -> CheckReport {
    let mut failures = Vec::new();
    walk(d, spec, &NodePath::root(), &mut Vec::new(), &mut failures);
    let mut warnings = Vec::new();
    let open = open_hypotheses(d);
    if open.contains(&Formula::Bottom) {
        warnings.push("open hypotheses contain bot".to_string());
    }
    for h in &open {
        if let Formula::Neg(a) = h {
            if open.binary_search(a).is_ok() {
                warnings.push(format!("open hypotheses contain both {a} and {h}"));
            }
        }
    }
    CheckReport { ok: failures.is_empty(), failures, warnings }
}

fn walk(
    d: &Derivation,
    spec: &CalculusSpec,
    path: &NodePath,
    active: &mut Vec<(Label, Formula)>,
    out: &mut Vec<CheckFailure>,
) {
    let mut fail = |message: String| {
        out.push(CheckFailure { path: path.to_string(), rule: d.rule.to_string(), message });
    };
    if let Err(e) = d.conclusion.validate() {
        fail(format!("ill-formed conclusion: {e}"));
    }
    if let Err(e) = check_node(d, spec) {
        fail(e);
    }
    if let Err(e) = check_labels(d, active) {
        fail(e);
    }
    let discharges = d.discharges();
    for (i, p) in d.premisses.iter().enumerate() {
        let mut pushed = 0;
        for (at, label, formula) in &discharges {
            if *at == i {
                if active.iter().any(|(l, _)| l == *label) {
                    out.push(CheckFailure {
                        path: path.to_string(),
                        rule: d.rule.to_string(),
                        message: format!("label `{label}` shadows an enclosing discharge"),
                    });
                }
                active.push(((*label).clone(), formula.clone()));
                pushed += 1;
            }
        }
        walk(p, spec, &path.child(i), active, out);
        active.truncate(active.len() - pushed);
    }
}

fn check_labels(d: &Derivation, active: &[(Label, Formula)]) -> Result<(), String> {
    if d.rule == RuleTag::Hyp {
        if !d.discharged.is_empty() {
            return Err("a hypothesis cannot discharge".into());
        }
        if let Some(l) = &d.hyp_label {
            if let Some((_, f)) = active.iter().rev().find(|(x, _)| x == l) {
                if *f != d.conclusion {
                    return Err(format!("hypothesis `{l}` is discharged as {f}, not {}", d.conclusion));
                }
            }
        }
        return Ok(());
    }
    if d.hyp_label.is_some() {
        return Err("only hypotheses carry labels".into());
    }
    let allowed: &[usize] = match d.rule {
        RuleTag::ImpI | RuleTag::NegI => &[0, 1],
        RuleTag::OrE => &[0, 2],
        _ => &[0],
    };
    if !allowed.contains(&d.discharged.len()) {
        return Err(format!("{} cannot discharge {} label(s)", d.rule.name(), d.discharged.len()));
    }
    Ok(())
}

fn arity(rule: &RuleTag) -> Option<usize> {
    use RuleTag::*;
    Some(match rule {
        Hyp => 0,
        Grounding(_) => return None,
        AndI | ImpE | NegE | MedIntroTransGround(_) | MedIntroTransCond(_) | TreeIntro(_) => 2,
        OrE => 3,
        _ => 1,
    })
}

fn check_node(d: &Derivation, spec: &CalculusSpec) -> Result<(), String> {
    if let Some(n) = arity(&d.rule) {
        if d.premisses.len() != n {
            return Err(format!("expected {n} premiss(es), found {}", d.premisses.len()));
        }
    }
    let prem: Vec<&Formula> = d.premisses.iter().map(|p| &p.conclusion).collect();
    let c = &d.conclusion;
    match &d.rule {
        RuleTag::Hyp => Ok(()),
        RuleTag::Grounding(inst) => {
            let schema = spec.schema(&inst.schema).ok_or_else(|| format!("unknown schema `{}`", inst.schema))?;
            let expect: Vec<&Formula> = inst.premisses().collect();
            if expect != prem {
                return Err("premisses differ from the rule instance".into());
            }
            if inst.conclusion != *c {
                return Err("conclusion differs from the rule instance".into());
            }
            match_schema(schema, spec.commutative, &inst.grounds, &inst.conditions, c)
                .map(|_| ())
                .ok_or_else(|| format!("not an instance of `{}`", inst.schema))
        }
        RuleTag::OrIL => match c {
            Formula::Or(a, _) if **a == *prem[0] => Ok(()),
            _ => Err(format!("expected {} | B", prem[0])),
        },
        RuleTag::OrIR => match c {
            Formula::Or(_, b) if **b == *prem[0] => Ok(()),
            _ => Err(format!("expected A | {}", prem[0])),
        },
        RuleTag::ImpI => match c {
            Formula::Imp(_, b) if **b == *prem[0] => Ok(()),
            _ => Err(format!("expected A -> {}", prem[0])),
        },
        RuleTag::NegI => match (c, prem[0]) {
            (Formula::Neg(_), Formula::Bottom) => Ok(()),
            _ => Err("expected ~A from bot".into()),
        },
        RuleTag::BotE => match prem[0] {
            Formula::Bottom => Ok(()),
            _ => Err("premiss must be bot".into()),
        },
        RuleTag::ImmIntro => {
            let g = &d.premisses[0];
            let RuleTag::Grounding(inst) = &g.rule else {
                return Err("premiss must be a grounding rule application".into());
            };
            let expect = Formula::immediate(inst.grounds.clone(), inst.conditions.clone(), inst.conclusion.clone());
            if *c == expect {
                Ok(())
            } else {
                Err(format!("expected {expect}"))
            }
        }
        RuleTag::ImmElimNeg => {
            if !spec.closed_world {
                return Err("calculus is not closed-world".into());
            }
            let parts = ClaimParts::of(prem[0]).ok_or("premiss must be an immediate claim")?;
            if parts.has_tree() {
                return Err("premiss must not contain tree entries".into());
            }
            if *c != Formula::Bottom {
                return Err("conclusion must be bot".into());
            }
            let grounds: Vec<Formula> = parts.grounds.iter().map(|e| e.formula().clone()).collect();
            let conditions: Vec<Formula> = parts.conditions.iter().map(|e| e.formula().clone()).collect();
            match match_grounding_rule(spec, &grounds, &conditions, parts.consequence) {
                Some(inst) => Err(format!("claim is an instance of `{}`", inst.schema)),
                None => Ok(()),
            }
        }
        rule => {
            let expect = infer_conclusion(rule, &prem)?;
            if *c == expect {
                Ok(())
            } else {
                Err(format!("expected conclusion {expect}"))
            }
        }
    }
}

/// The conclusion of `rule` applied to premisses with the given conclusions,
/// for rules whose conclusion the premisses determine.
pub fn infer_conclusion(rule: &RuleTag, prem: &[&Formula]) -> Result<Formula, String> {
    use RuleTag::*;
    if let Some(n) = arity(rule) {
        if prem.len() != n {
            return Err(format!("expected {n} premiss(es), found {}", prem.len()));
        }
    }
    match rule {
        AndI => Ok(Formula::and(prem[0].clone(), prem[1].clone())),
        AndEL | AndER => match prem[0] {
            Formula::And(l, r) => Ok(if *rule == AndEL { (**l).clone() } else { (**r).clone() }),
            _ => Err("major premiss must be a conjunction".into()),
        },
        OrE => match prem[0] {
            Formula::Or(..) if prem[1] == prem[2] => Ok(prem[1].clone()),
            Formula::Or(..) => Err("branches conclude different formulas".into()),
            _ => Err("major premiss must be a disjunction".into()),
        },
        ImpE => match prem[0] {
            Formula::Imp(a, b) if **a == *prem[1] => Ok((**b).clone()),
            Formula::Imp(..) => Err("minor premiss does not match the antecedent".into()),
            _ => Err("major premiss must be an implication".into()),
        },
        NegE => match prem[0] {
            Formula::Neg(a) if **a == *prem[1] => Ok(Formula::Bottom),
            Formula::Neg(_) => Err("minor premiss does not match the negated formula".into()),
            _ => Err("major premiss must be a negation".into()),
        },
        ImmElimCons => {
            let parts = ClaimParts::of(prem[0]).ok_or("premiss must be an immediate claim")?;
            Ok(parts.consequence.clone())
        }
        ImmElimGround(i) | ImmElimCond(i) => {
            let parts = ClaimParts::of(prem[0]).ok_or("premiss must be an immediate claim")?;
            let side = if matches!(rule, ImmElimGround(_)) { Side::Ground } else { Side::Condition };
            match parts.entry(EntrySel { side, index: *i }) {
                Some(GroundEntry::Plain(a)) => Ok(a.clone()),
                Some(GroundEntry::Tree { .. }) => Err("selected entry has *> as outermost operator".into()),
                None => Err(format!("no entry at index {i}")),
            }
        }
        MedIntroBase => {
            let parts = ClaimParts::of(prem[0]).ok_or("premiss must be an immediate claim")?;
            if parts.has_tree() {
                return Err("premiss must not contain tree entries".into());
            }
            Ok(Formula::mediate(
                parts.grounds.iter().map(|e| e.formula().clone()).collect(),
                parts.conditions.iter().map(|e| e.formula().clone()).collect(),
                parts.consequence.clone(),
            ))
        }
        MedIntroTransGround(k) | MedIntroTransCond(k) => {
            let (
                Formula::Mediate { grounds: g, conditions: dl, consequence: a },
                Formula::Mediate { grounds: g1, conditions: d1, consequence: b },
            ) = (prem[0], prem[1])
            else {
                return Err("premisses must be mediate claims".into());
            };
            if matches!(rule, MedIntroTransGround(_)) {
                if g1.get(*k) != Some(&**a) {
                    return Err(format!("ground {k} of the right premiss is not {a}"));
                }
                let grounds = [&g1[..*k], &g[..], &g1[k + 1..]].concat();
                let conditions = [&dl[..], &d1[..]].concat();
                Ok(Formula::mediate(grounds, conditions, (**b).clone()))
            } else {
                if d1.get(*k) != Some(&**a) {
                    return Err(format!("condition {k} of the right premiss is not {a}"));
                }
                let conditions = [&d1[..*k], &g[..], &dl[..], &d1[k + 1..]].concat();
                Ok(Formula::mediate(g1.clone(), conditions, (**b).clone()))
            }
        }
        MedElimCons | MedElimGround(_) | MedElimCond(_) => {
            let Formula::Mediate { grounds, conditions, consequence } = prem[0] else {
                return Err("premiss must be a mediate claim".into());
            };
            match rule {
                MedElimCons => Ok((**consequence).clone()),
                MedElimGround(i) => grounds.get(*i).cloned().ok_or_else(|| format!("no ground at index {i}")),
                MedElimCond(i) => conditions.get(*i).cloned().ok_or_else(|| format!("no condition at index {i}")),
                _ => unreachable!(),
            }
        }
        TreeIntro(sel) => {
            let sub = ClaimParts::of(prem[0]).ok_or("left premiss must be an immediate claim")?;
            let host = ClaimParts::of(prem[1]).ok_or("right premiss must be an immediate claim")?;
            match host.entry(*sel) {
                Some(GroundEntry::Plain(a)) if a == sub.consequence => {
                    Ok(host.with_entry(*sel, GroundEntry::tree_of(prem[0]).unwrap()))
                }
                Some(GroundEntry::Plain(_)) => Err("selected entry differs from the plugged consequence".into()),
                Some(GroundEntry::Tree { .. }) => Err("selected entry is already a tree entry".into()),
                None => Err("no entry at the selected index".into()),
            }
        }
        TreeExtract(path) => {
            if path.is_empty() {
                return Err("empty extraction path".into());
            }
            let mut cur = ClaimParts::of(prem[0]).ok_or("premiss must be an immediate claim")?;
            for sel in path {
                let entry = cur.entry(*sel).ok_or_else(|| format!("no entry {sel}"))?;
                cur = ClaimParts::of_entry(entry).ok_or_else(|| format!("entry {sel} is not a tree entry"))?;
            }
            Ok(cur.to_claim())
        }
        TreeFlatten(sel) => {
            let parts = ClaimParts::of(prem[0]).ok_or("premiss must be an immediate claim")?;
            match parts.entry(*sel) {
                Some(e @ GroundEntry::Tree { .. }) => {
                    Ok(parts.with_entry(*sel, GroundEntry::Plain(e.formula().clone())))
                }
                Some(_) => Err(format!("entry {sel} is not a tree entry")),
                None => Err(format!("no entry {sel}")),
            }
        }
        Hyp | Grounding(_) | OrIL | OrIR | ImpI | NegI | BotE | ImmIntro | ImmElimNeg => {
            Err(format!("the conclusion of {} is not determined by its premisses", rule.name()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{match_grounding_rule, reference_calculus};
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn grounding(grounds: &[&str], conditions: &[&str], conclusion: &str) -> Derivation {
        let spec = reference_calculus();
        let g: Vec<Formula> = grounds.iter().map(|s| f(s)).collect();
        let c: Vec<Formula> = conditions.iter().map(|s| f(s)).collect();
        let inst = match_grounding_rule(&spec, &g, &c, &f(conclusion)).unwrap();
        let prem = g.iter().chain(&c).map(|x| Derivation::hyp(x.clone())).collect();
        Derivation::node(RuleTag::Grounding(inst), f(conclusion), prem)
    }

    #[test]
    fn immediate_introduction_checks() {
        let spec = reference_calculus();
        let d = Derivation::node(RuleTag::ImmIntro, f("p, q |> p & q"), vec![grounding(&["p", "q"], &[], "p & q")]);
        let r = check(&d, &spec);
        assert!(r.ok, "{:?}", r.failures);
        let bad = Derivation::node(RuleTag::ImmIntro, f("q, p |> p & q"), vec![grounding(&["p", "q"], &[], "p & q")]);
        assert!(!check(&bad, &spec).ok);
    }

    #[test]
    fn elimination_of_tree_entry_fails() {
        let spec = reference_calculus();
        let claim = f("(p, q *> p & q), (r, ~s *> r | s) |> p & q & (r | s)");
        let d = Derivation::node(RuleTag::ImmElimGround(0), f("p & q"), vec![Derivation::hyp(claim)]);
        let r = check(&d, &spec);
        assert!(!r.ok);
        assert!(r.failures[0].message.contains("*>"));
    }

    #[test]
    fn hypothesis_leaf_is_fine() {
        assert!(check(&Derivation::hyp(f("p")), &reference_calculus()).ok);
    }

    #[test]
    fn closed_world_negative_rule() {
        let claim = f("p & q & r & s |> p");
        let d = Derivation::node(RuleTag::ImmElimNeg, Formula::Bottom, vec![Derivation::hyp(claim)]);
        assert!(check(&d, &reference_calculus().with_closed_world(true)).ok);
        assert!(!check(&d, &reference_calculus().with_closed_world(false)).ok);
        let good = Derivation::node(RuleTag::ImmElimNeg, Formula::Bottom, vec![Derivation::hyp(f("p, q |> p & q"))]);
        assert!(!check(&good, &reference_calculus()).ok);
    }

    #[test]
    fn discharge_must_match_formula() {
        let spec = reference_calculus();
        let ok = Derivation::node(RuleTag::ImpI, f("p -> p"), vec![Derivation::hyp_labeled(f("p"), "x")])
            .with_discharge(&["x"]);
        assert!(check(&ok, &spec).ok);
        let bad = Derivation::node(RuleTag::ImpI, f("q -> p"), vec![Derivation::hyp_labeled(f("p"), "x")])
            .with_discharge(&["x"]);
        assert!(!check(&bad, &spec).ok);
    }

    #[test]
    fn shadowing_is_rejected() {
        let spec = reference_calculus();
        let inner = Derivation::node(RuleTag::ImpI, f("p -> p"), vec![Derivation::hyp_labeled(f("p"), "x")])
            .with_discharge(&["x"]);
        let outer = Derivation::node(RuleTag::ImpI, f("p -> p -> p"), vec![inner]).with_discharge(&["x"]);
        assert!(!check(&outer, &spec).ok);
    }

    #[test]
    fn mediate_transitivity() {
        let spec = reference_calculus();
        let left = Derivation::hyp(f("p [c] >> a"));
        let right = Derivation::hyp(f("x, a, y [d] >> b"));
        let d = Derivation::node(RuleTag::MedIntroTransGround(1), f("x, p, y [c, d] >> b"), vec![left.clone(), right]);
        assert!(check(&d, &spec).ok, "{:?}", check(&d, &spec).failures);
        let right = Derivation::hyp(f("x [d1, a, d2] >> b"));
        let d = Derivation::node(RuleTag::MedIntroTransCond(1), f("x [d1, p, c, d2] >> b"), vec![left, right]);
        assert!(check(&d, &spec).ok, "{:?}", check(&d, &spec).failures);
    }

    #[test]
    fn tree_rules() {
        let spec = reference_calculus();
        let sub = Derivation::hyp(f("r, s |> r & s"));
        let host = Derivation::hyp(f("r & s [~t] |> r & s | t"));
        let d = Derivation::node(
            RuleTag::TreeIntro(EntrySel::ground(0)),
            f("(r, s *> r & s) [~t] |> r & s | t"),
            vec![sub, host],
        );
        assert!(check(&d, &spec).ok);
        let tree = f("((r, s *> r & s) *> ~~(r & s)) [~t] |> ~~(r & s) | t");
        let deep = Derivation::node(
            RuleTag::TreeExtract(vec![EntrySel::ground(0), EntrySel::ground(0)]),
            f("r, s |> r & s"),
            vec![Derivation::hyp(tree.clone())],
        );
        assert!(check(&deep, &spec).ok);
        let flat = Derivation::node(
            RuleTag::TreeFlatten(EntrySel::ground(0)),
            f("~~(r & s) [~t] |> ~~(r & s) | t"),
            vec![Derivation::hyp(tree)],
        );
        assert!(check(&flat, &spec).ok);
    }

    #[test]
    fn inconsistency_warning() {
        let spec = reference_calculus();
        let d =
            Derivation::node(RuleTag::NegE, Formula::Bottom, vec![Derivation::hyp(f("~p")), Derivation::hyp(f("p"))]);
        let r = check(&d, &spec);
        assert!(r.ok);
        assert_eq!(r.warnings.len(), 1);
    }
}
