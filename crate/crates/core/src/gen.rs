//! Seeded random formulas and derivations, for property tests, benchmarks
//! and the normalization suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::calculus::{match_grounding_rule, Binding, CalculusSpec, Pattern};
use crate::derivation::{Derivation, NodePath, RuleTag};
use crate::rewrite::labels::{freshen, LabelGen};
use crate::syntax::{ClaimParts, EntrySel, Formula, GroundEntry};

const ATOMS: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

/// A propositional formula of at most the given depth.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return Formula::atom(ATOMS.choose(rng).unwrap());
    }
    let sub = |rng: &mut R| random_formula(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::neg(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::imp(sub(rng), sub(rng)),
        _ => {
            if rng.gen_bool(0.2) {
                Formula::Bottom
            } else {
                Formula::atom(ATOMS.choose(rng).unwrap())
            }
        }
    }
}

/// An immediate claim whose entries may be nested grounding trees.
pub fn random_claim<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    let entries = |rng: &mut R, n: usize| -> Vec<GroundEntry> {
        (0..n)
            .map(|_| {
                if depth > 0 && rng.gen_bool(0.3) {
                    GroundEntry::tree_of(&random_claim(rng, depth - 1)).unwrap()
                } else {
                    GroundEntry::Plain(random_formula(rng, 2))
                }
            })
            .collect()
    };
    let g = rng.gen_range(1..=3);
    let c = rng.gen_range(0..=1);
    Formula::Immediate {
        grounds: entries(rng, g),
        conditions: entries(rng, c),
        consequence: Box::new(random_formula(rng, 2)),
    }
}

/// A grounding derivation of at most `max_rules` rule applications whose
/// instances are the ones `match_grounding_rule` picks, so that it survives
/// a round trip through its grounding tree unchanged.
pub fn random_grounding_derivation<R: Rng>(rng: &mut R, spec: &CalculusSpec, max_rules: usize) -> Derivation {
    assert!(max_rules >= 1 && !spec.schemas.is_empty());
    loop {
        let mut budget = max_rules;
        if let Some(d) = grounding_node(rng, spec, &mut budget, 0) {
            return d;
        }
    }
}

fn grounding_node<R: Rng>(rng: &mut R, spec: &CalculusSpec, budget: &mut usize, depth: usize) -> Option<Derivation> {
    *budget = budget.checked_sub(1)?;
    let schema = spec.schemas.choose(rng).unwrap();
    let mut binding = Binding::new();
    let mut premisses = Vec::new();
    for pattern in schema.grounds.iter().chain(&schema.conditions) {
        let mut derived = None;
        if *budget > 0 && depth < 4 && rng.gen_bool(0.5) {
            for _ in 0..4 {
                let mut b = *budget;
                let Some(sub) = grounding_node(rng, spec, &mut b, depth + 1) else { break };
                let mut extended = binding.clone();
                if pattern.match_into(&sub.conclusion, &mut extended) {
                    binding = extended;
                    *budget = b;
                    derived = Some(sub);
                    break;
                }
            }
        }
        let p = match derived {
            Some(d) => d,
            None => Derivation::hyp(instantiate_fresh(rng, pattern, &mut binding)),
        };
        premisses.push(p);
    }
    let conclusion = schema.conclusion.instantiate(&binding)?;
    let n = schema.grounds.len();
    let grounds: Vec<Formula> = premisses[..n].iter().map(|p| p.conclusion.clone()).collect();
    let conditions: Vec<Formula> = premisses[n..].iter().map(|p| p.conclusion.clone()).collect();
    let inst = match_grounding_rule(spec, &grounds, &conditions, &conclusion)?;
    Some(Derivation::node(RuleTag::Grounding(inst), conclusion, premisses))
}

fn instantiate_fresh<R: Rng>(rng: &mut R, pattern: &Pattern, binding: &mut Binding) -> Formula {
    let mut vars = Vec::new();
    pattern.metavars(&mut vars);
    for v in vars {
        binding.entry(v).or_insert_with(|| random_formula(rng, 1));
    }
    pattern.instantiate(binding).expect("all metavariables bound")
}

/// The detour shapes [`DetourGen`] can wrap around a subderivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detour {
    AndLeft,
    AndRight,
    Imp,
    Or,
    Neg,
    ImmGround,
    ImmCond,
    ImmCons,
    TreeExtract,
    TreeFlatten,
    TreeNested,
    Permutation,
}

impl Detour {
    pub const ALL: [Detour; 12] = [
        Detour::AndLeft,
        Detour::AndRight,
        Detour::Imp,
        Detour::Or,
        Detour::Neg,
        Detour::ImmGround,
        Detour::ImmCond,
        Detour::ImmCons,
        Detour::TreeExtract,
        Detour::TreeFlatten,
        Detour::TreeNested,
        Detour::Permutation,
    ];
}

/// Builds derivations over the base logic, `|>` and `*>` rules with
/// injected detours. No `>>` rule is used.
pub struct DetourGen<'a, R: Rng> {
    rng: &'a mut R,
    spec: &'a CalculusSpec,
    next_label: usize,
}

impl<'a, R: Rng> DetourGen<'a, R> {
    pub fn new(rng: &'a mut R, spec: &'a CalculusSpec) -> Self {
        DetourGen { rng, spec, next_label: 0 }
    }

    fn label(&mut self) -> String {
        self.next_label += 1;
        format!("x{}", self.next_label)
    }

    /// A small normal derivation to start from.
    pub fn base(&mut self) -> Derivation {
        match self.rng.gen_range(0..5) {
            0 => Derivation::hyp(random_formula(self.rng, 2)),
            1 => {
                let (a, b) = (random_formula(self.rng, 1), random_formula(self.rng, 1));
                Derivation::node(
                    RuleTag::AndI,
                    Formula::and(a.clone(), b.clone()),
                    vec![Derivation::hyp(a), Derivation::hyp(b)],
                )
            }
            2 => {
                let g = random_grounding_derivation(self.rng, self.spec, 3);
                let RuleTag::Grounding(inst) = &g.rule else { unreachable!() };
                let claim = Formula::immediate(inst.grounds.clone(), inst.conditions.clone(), inst.conclusion.clone());
                Derivation::node(RuleTag::ImmIntro, claim, vec![g])
            }
            3 => Derivation::hyp(random_claim(self.rng, 1)),
            _ => random_grounding_derivation(self.rng, self.spec, 3),
        }
    }

    /// A base derivation with `detours` detours wrapped around randomly
    /// chosen subderivations, innermost first.
    pub fn derivation(&mut self, detours: usize) -> Derivation {
        let mut d = self.base();
        for _ in 0..detours {
            d = self.inject_somewhere(d);
        }
        d
    }

    fn inject_somewhere(&mut self, d: Derivation) -> Derivation {
        let candidates: Vec<NodePath> = d
            .nodes()
            .into_iter()
            .filter(|(path, _)| match path.0.split_last() {
                None => true,
                Some((_, parent)) => d.at(&NodePath(parent.to_vec())).unwrap().rule != RuleTag::ImmIntro,
            })
            .map(|(p, _)| p)
            .collect();
        let at = candidates.choose(self.rng).unwrap().clone();
        let sub = d.at(&at).unwrap().clone();
        // An `or-e` that reductions carry down onto the major premiss of a
        // rule with minor premisses would have those copied into both
        // branches by the permutation conversion, duplicating open
        // hypotheses. Minor premisses of `->`/`~` eliminations get
        // substituted into arbitrary positions, so they count too; only the
        // case branches of `or-e` are safe.
        let major_with_minors = (0..at.0.len()).any(|k| {
            let p = d.at(&NodePath(at.0[..k].to_vec())).unwrap();
            let branch = p.rule == RuleTag::OrE && at.0[k] > 0;
            p.rule.is_elimination() && p.premisses.len() > 1 && !branch
        });
        let mut kinds = Detour::ALL.to_vec();
        kinds.shuffle(self.rng);
        for kind in kinds {
            if major_with_minors && matches!(kind, Detour::Or | Detour::Permutation) {
                continue;
            }
            if let Some(wrapped) = self.wrap(kind, &sub) {
                return d.replace_at(&at, wrapped).unwrap();
            }
        }
        d
    }

    /// Wraps `d` in a detour of the given shape concluding the same formula,
    /// if the shape applies to its conclusion.
    pub fn wrap(&mut self, kind: Detour, d: &Derivation) -> Option<Derivation> {
        let a = d.conclusion.clone();
        let node = Derivation::node;
        Some(match kind {
            Detour::AndLeft => {
                let b = random_formula(self.rng, 1);
                let intro =
                    node(RuleTag::AndI, Formula::and(a.clone(), b.clone()), vec![d.clone(), Derivation::hyp(b)]);
                node(RuleTag::AndEL, a, vec![intro])
            }
            Detour::AndRight => {
                let b = random_formula(self.rng, 1);
                let intro =
                    node(RuleTag::AndI, Formula::and(b.clone(), a.clone()), vec![Derivation::hyp(b), d.clone()]);
                node(RuleTag::AndER, a, vec![intro])
            }
            Detour::Imp => {
                let (body, c, label) = self.abstract_hyp(d);
                let intro =
                    node(RuleTag::ImpI, Formula::imp(c.clone(), a.clone()), vec![body]).with_discharge(&[&label]);
                node(RuleTag::ImpE, a, vec![intro, Derivation::hyp(c)])
            }
            Detour::Or => {
                let (left, c, x) = self.abstract_hyp(d);
                let e = random_formula(self.rng, 1);
                let y = self.label();
                let right = self.copy(d);
                let major = node(RuleTag::OrIL, Formula::or(c.clone(), e), vec![Derivation::hyp(c)]);
                node(RuleTag::OrE, a, vec![major, left, right]).with_discharge(&[&x, &y])
            }
            Detour::Neg => {
                if a != Formula::Bottom {
                    return None;
                }
                let (body, c, label) = self.abstract_hyp(d);
                let intro = node(RuleTag::NegI, Formula::neg(c.clone()), vec![body]).with_discharge(&[&label]);
                node(RuleTag::NegE, a, vec![intro, Derivation::hyp(c)])
            }
            Detour::ImmGround => {
                if !a.is_propositional() {
                    return None;
                }
                let b = random_formula(self.rng, 1);
                let g =
                    self.grounding(vec![d.clone(), Derivation::hyp(b.clone())], vec![], Formula::and(a.clone(), b))?;
                self.imm_elim(RuleTag::ImmElimGround(0), g, a)?
            }
            Detour::ImmCond => {
                let Formula::Neg(inner) = &a else { return None };
                if !a.is_propositional() {
                    return None;
                }
                let c = random_formula(self.rng, 1);
                let g = self.grounding(
                    vec![Derivation::hyp(c.clone())],
                    vec![d.clone()],
                    Formula::or(c, (**inner).clone()),
                )?;
                self.imm_elim(RuleTag::ImmElimCond(0), g, a)?
            }
            Detour::ImmCons => {
                if !matches!(d.rule, RuleTag::Grounding(_)) {
                    return None;
                }
                self.imm_elim(RuleTag::ImmElimCons, d.clone(), a)?
            }
            Detour::TreeExtract => {
                let parts = ClaimParts::of(&a)?;
                let host = Formula::immediate(
                    vec![parts.consequence.clone(), random_formula(self.rng, 1)],
                    vec![],
                    random_formula(self.rng, 1),
                );
                let sel = EntrySel::ground(0);
                let intro = self.tree_intro(sel, d.clone(), Derivation::hyp(host))?;
                node(RuleTag::TreeExtract(vec![sel]), a, vec![intro])
            }
            Detour::TreeFlatten => {
                let parts = ClaimParts::of(&a)?;
                let plain: Vec<EntrySel> = parts.entries().filter(|(_, e)| !e.is_tree()).map(|(s, _)| s).collect();
                let sel = *plain.choose(self.rng)?;
                let target = parts.entry(sel)?.formula().clone();
                let sub = Formula::immediate(vec![random_formula(self.rng, 1)], vec![], target);
                let intro = self.tree_intro(sel, Derivation::hyp(sub), d.clone())?;
                node(RuleTag::TreeFlatten(sel), a, vec![intro])
            }
            Detour::TreeNested => {
                let parts = ClaimParts::of(&a)?;
                let mid_cons = random_formula(self.rng, 1);
                let mid_flat = Formula::immediate(vec![parts.consequence.clone()], vec![], mid_cons.clone());
                let inner_sel = EntrySel::ground(0);
                let mid = self.tree_intro(inner_sel, d.clone(), Derivation::hyp(mid_flat))?;
                let host = Formula::immediate(
                    vec![random_formula(self.rng, 1), mid_cons],
                    vec![],
                    random_formula(self.rng, 1),
                );
                let outer_sel = EntrySel::ground(1);
                let top = self.tree_intro(outer_sel, mid, Derivation::hyp(host))?;
                node(RuleTag::TreeExtract(vec![outer_sel, inner_sel]), a, vec![top])
            }
            Detour::Permutation => {
                let (c, e) = (random_formula(self.rng, 1), random_formula(self.rng, 1));
                let b = random_formula(self.rng, 1);
                let both = Formula::and(a.clone(), b.clone());
                let branch = |d: Derivation| node(RuleTag::AndI, both.clone(), vec![d, Derivation::hyp(b.clone())]);
                let left = branch(d.clone());
                let right = branch(self.copy(d));
                let or = node(RuleTag::OrE, both.clone(), vec![Derivation::hyp(Formula::or(c, e)), left, right]);
                node(RuleTag::AndEL, a, vec![or])
            }
        })
    }

    fn copy(&mut self, d: &Derivation) -> Derivation {
        let mut gen = LabelGen::for_derivation(d);
        let mut out = freshen(d, &mut gen);
        self.relabel_bound(&mut out);
        // Hypotheses bound below `d` stay open in the copy so each binder
        // keeps a single use.
        let bound: Vec<String> = out.nodes().into_iter().flat_map(|(_, n)| n.discharged.clone()).collect();
        fn open_free(d: &mut Derivation, bound: &[String]) {
            if d.hyp_label.as_ref().is_some_and(|l| !bound.contains(l)) {
                d.hyp_label = None;
            }
            for p in &mut d.premisses {
                open_free(p, bound);
            }
        }
        open_free(&mut out, &bound);
        out
    }

    /// Renames bound labels to generator labels so they stay globally unique.
    fn relabel_bound(&mut self, d: &mut Derivation) {
        let renames: Vec<(String, String)> =
            d.nodes().into_iter().flat_map(|(_, n)| n.discharged.clone()).map(|l| (l, self.label())).collect();
        fn go(d: &mut Derivation, renames: &[(String, String)]) {
            for l in d.discharged.iter_mut().chain(d.hyp_label.iter_mut()) {
                if let Some((_, new)) = renames.iter().find(|(old, _)| old == l) {
                    *l = new.clone();
                }
            }
            for p in &mut d.premisses {
                go(p, renames);
            }
        }
        go(d, &renames);
    }

    /// Labels the unlabelled hypotheses of one formula in `d` with a fresh
    /// label, or picks a fresh formula for a vacuous discharge.
    /// Binds one open hypothesis occurrence of `d` to a fresh label, or
    /// returns `d` unchanged with a vacuous formula. Binding a single
    /// occurrence keeps substitution from duplicating hypotheses.
    fn abstract_hyp(&mut self, d: &Derivation) -> (Derivation, Formula, String) {
        let label = self.label();
        let open: Vec<NodePath> = d
            .nodes()
            .into_iter()
            .filter(|(_, n)| n.rule == RuleTag::Hyp && n.hyp_label.is_none())
            .map(|(p, _)| p)
            .collect();
        match open.choose(self.rng).cloned() {
            Some(p) if self.rng.gen_bool(0.8) => {
                let c = d.at(&p).expect("path from nodes()").conclusion.clone();
                let body = d.replace_at(&p, Derivation::hyp_labeled(c.clone(), &label)).expect("path from nodes()");
                (body, c, label)
            }
            _ => (d.clone(), random_formula(self.rng, 1), label),
        }
    }

    fn grounding(
        &mut self,
        grounds: Vec<Derivation>,
        conditions: Vec<Derivation>,
        conclusion: Formula,
    ) -> Option<Derivation> {
        let g: Vec<Formula> = grounds.iter().map(|d| d.conclusion.clone()).collect();
        let c: Vec<Formula> = conditions.iter().map(|d| d.conclusion.clone()).collect();
        let inst = match_grounding_rule(self.spec, &g, &c, &conclusion)?;
        let premisses = grounds.into_iter().chain(conditions).collect();
        Some(Derivation::node(RuleTag::Grounding(inst), conclusion, premisses))
    }

    fn imm_elim(&mut self, rule: RuleTag, g: Derivation, conclusion: Formula) -> Option<Derivation> {
        let RuleTag::Grounding(inst) = &g.rule else { return None };
        let claim = Formula::immediate(inst.grounds.clone(), inst.conditions.clone(), inst.conclusion.clone());
        let intro = Derivation::node(RuleTag::ImmIntro, claim, vec![g]);
        Some(Derivation::node(rule, conclusion, vec![intro]))
    }

    fn tree_intro(&mut self, sel: EntrySel, sub: Derivation, host: Derivation) -> Option<Derivation> {
        let conclusion =
            crate::derivation::infer_conclusion(&RuleTag::TreeIntro(sel), &[&sub.conclusion, &host.conclusion]).ok()?;
        Some(Derivation::node(RuleTag::TreeIntro(sel), conclusion, vec![sub, host]))
    }
}
