//! Detour reductions, permutations, segments and normalization.

pub(crate) mod labels;
mod segment;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::derivation::{infer_conclusion, Derivation, NodePath, RuleTag};
use crate::syntax::{logical_complexity, Formula};

pub use segment::{
    derivation_complexity, derivation_complexity_mode, normalize, segment_above, segment_right_of, segments,
    segments_mode, ComplexityTriple, Normalized, Segment, TraceStep,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RedexKind {
    Imm,
    Med,
    Tree1,
    Tree2,
    LogicalDetour,
    Permutation,
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexKind::Imm => "imm",
            RedexKind::Med => "med",
            RedexKind::Tree1 => "tree1",
            RedexKind::Tree2 => "tree2",
            RedexKind::LogicalDetour => "detour",
            RedexKind::Permutation => "permutation",
        })
    }
}

/// A reducible configuration whose lower critical rule sits at `location`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Redex {
    pub location: NodePath,
    pub kind: RedexKind,
    /// Complexity of the major premiss of the lower critical rule.
    pub complexity: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("no {kind} redex at {location}")]
    StaleRedex { location: String, kind: RedexKind },
    #[error("step budget of {budget} exhausted after {steps} reductions")]
    BudgetExhausted { budget: usize, steps: usize, partial: Box<Derivation>, trace: Vec<TraceStep> },
}

/// The redex kind of the configuration with `e` as lower critical rule.
pub fn redex_kind_at(e: &Derivation) -> Option<RedexKind> {
    use RuleTag::*;
    let major = e.premisses.first()?;
    if !e.rule.is_elimination() {
        return None;
    }
    if major.rule == OrE {
        return Some(RedexKind::Permutation);
    }
    match (&e.rule, &major.rule) {
        (ImmElimCons | ImmElimGround(_) | ImmElimCond(_), ImmIntro) => Some(RedexKind::Imm),
        (
            MedElimCons | MedElimGround(_) | MedElimCond(_),
            MedIntroBase | MedIntroTransGround(_) | MedIntroTransCond(_),
        ) => Some(RedexKind::Med),
        (TreeExtract(path), TreeIntro(sel)) => {
            if path.len() == 1 && path[0] == *sel {
                Some(RedexKind::Tree1)
            } else {
                Some(RedexKind::Tree2)
            }
        }
        (TreeFlatten(s), TreeIntro(sel)) if s == sel => Some(RedexKind::Tree1),
        (AndEL | AndER, AndI) | (OrE, OrIL | OrIR) | (ImpE, ImpI) | (NegE, NegI) => Some(RedexKind::LogicalDetour),
        _ => None,
    }
}

/// All redexes, in pre-order of their lower critical rule.
pub fn find_redexes(d: &Derivation) -> Vec<Redex> {
    d.nodes()
        .into_iter()
        .filter_map(|(location, e)| {
            redex_kind_at(e).map(|kind| Redex {
                location,
                kind,
                complexity: logical_complexity(&e.premisses[0].conclusion),
            })
        })
        .collect()
}

pub fn is_normal(d: &Derivation) -> bool {
    d.nodes().into_iter().all(|(_, e)| redex_kind_at(e).is_none())
}

/// Contracts one redex.
pub fn reduce_redex(d: &Derivation, r: &Redex) -> Result<Derivation, RewriteError> {
    let stale = || RewriteError::StaleRedex { location: r.location.to_string(), kind: r.kind };
    let e = d.at(&r.location).ok_or_else(stale)?;
    if redex_kind_at(e) != Some(r.kind) {
        return Err(stale());
    }
    let mut gen = labels::LabelGen::for_derivation(d);
    let new = contract(e, &mut gen).ok_or_else(stale)?;
    debug_assert_eq!(new.conclusion, e.conclusion);
    d.replace_at(&r.location, new).ok_or_else(stale)
}

/// Applies `rule` to premisses, computing the conclusion.
fn apply(rule: RuleTag, premisses: Vec<Derivation>) -> Option<Derivation> {
    let prem: Vec<&Formula> = premisses.iter().map(|p| &p.conclusion).collect();
    let conclusion = infer_conclusion(&rule, &prem).ok()?;
    Some(Derivation::node(rule, conclusion, premisses))
}

fn contract(e: &Derivation, gen: &mut labels::LabelGen) -> Option<Derivation> {
    use RuleTag::*;
    let major = &e.premisses[0];
    if major.rule == OrE {
        return permute(e, gen);
    }
    match (&e.rule, &major.rule) {
        (ImmElimCons | ImmElimGround(_) | ImmElimCond(_), ImmIntro) => {
            let g = &major.premisses[0];
            let RuleTag::Grounding(inst) = &g.rule else { return None };
            match e.rule {
                ImmElimCons => Some(g.clone()),
                ImmElimGround(i) => g.premisses.get(i).cloned(),
                ImmElimCond(i) => g.premisses.get(inst.grounds.len() + i).cloned(),
                _ => None,
            }
        }
        (_, MedIntroBase) => {
            let rule = match e.rule {
                MedElimCons => ImmElimCons,
                MedElimGround(i) => ImmElimGround(i),
                MedElimCond(i) => ImmElimCond(i),
                _ => return None,
            };
            apply(rule, vec![major.premisses[0].clone()])
        }
        (_, MedIntroTransGround(k)) => {
            let (left, right) = (&major.premisses[0], &major.premisses[1]);
            let Formula::Mediate { grounds: g, conditions: dl, .. } = &left.conclusion else { return None };
            let (k, g, dl) = (*k, g.len(), dl.len());
            match e.rule {
                MedElimCons => apply(MedElimCons, vec![right.clone()]),
                MedElimGround(j) if j < k => apply(MedElimGround(j), vec![right.clone()]),
                MedElimGround(j) if j < k + g => apply(MedElimGround(j - k), vec![left.clone()]),
                MedElimGround(j) => apply(MedElimGround(j + 1 - g), vec![right.clone()]),
                MedElimCond(j) if j < dl => apply(MedElimCond(j), vec![left.clone()]),
                MedElimCond(j) => apply(MedElimCond(j - dl), vec![right.clone()]),
                _ => None,
            }
        }
        (_, MedIntroTransCond(k)) => {
            let (left, right) = (&major.premisses[0], &major.premisses[1]);
            let Formula::Mediate { grounds: g, conditions: dl, .. } = &left.conclusion else { return None };
            let (k, g, dl) = (*k, g.len(), dl.len());
            match e.rule {
                MedElimCons => apply(MedElimCons, vec![right.clone()]),
                MedElimGround(j) => apply(MedElimGround(j), vec![right.clone()]),
                MedElimCond(j) if j < k => apply(MedElimCond(j), vec![right.clone()]),
                MedElimCond(j) if j < k + g => apply(MedElimGround(j - k), vec![left.clone()]),
                MedElimCond(j) if j < k + g + dl => apply(MedElimCond(j - k - g), vec![left.clone()]),
                MedElimCond(j) => apply(MedElimCond(j + 1 - g - dl), vec![right.clone()]),
                _ => None,
            }
        }
        (TreeExtract(path), TreeIntro(sel)) => {
            let (left, right) = (&major.premisses[0], &major.premisses[1]);
            if path[0] == *sel {
                if path.len() == 1 {
                    Some(left.clone())
                } else {
                    apply(TreeExtract(path[1..].to_vec()), vec![left.clone()])
                }
            } else {
                apply(TreeExtract(path.clone()), vec![right.clone()])
            }
        }
        (TreeFlatten(_), TreeIntro(_)) => Some(major.premisses[1].clone()),
        (AndEL, AndI) => Some(major.premisses[0].clone()),
        (AndER, AndI) => Some(major.premisses[1].clone()),
        (ImpE, ImpI) | (NegE, NegI) => {
            let body = &major.premisses[0];
            let minor = &e.premisses[1];
            match major.discharged.first() {
                Some(label) => {
                    let host = labels::freshen(body, gen);
                    Some(labels::substitute(&host, label, minor, gen))
                }
                None => Some(body.clone()),
            }
        }
        (OrE, OrIL | OrIR) => {
            let branch = if major.rule == OrIL { 1 } else { 2 };
            let arg = &major.premisses[0];
            let body = &e.premisses[branch];
            match e.discharged.get(branch - 1) {
                Some(label) => {
                    let host = labels::freshen(body, gen);
                    Some(labels::substitute(&host, label, arg, gen))
                }
                None => Some(body.clone()),
            }
        }
        _ => None,
    }
}

/// `E(OrE(M, c1, c2), rest)` becomes `OrE(M, E(c1, rest), E(c2, rest'))`.
fn permute(e: &Derivation, gen: &mut labels::LabelGen) -> Option<Derivation> {
    let or = labels::freshen(&e.premisses[0], gen);
    let [m, c1, c2] = <[Derivation; 3]>::try_from(or.premisses).ok()?;
    let lift = |branch: Derivation, gen: &mut labels::LabelGen| {
        let mut premisses = vec![Derivation::hyp(branch.conclusion.clone())];
        premisses.extend(e.premisses[1..].iter().cloned());
        let mut copy = labels::freshen(&Derivation { premisses, ..e.clone() }, gen);
        copy.premisses[0] = branch;
        copy
    };
    let left = lift(c1, gen);
    let right = lift(c2, gen);
    Some(Derivation {
        conclusion: e.conclusion.clone(),
        rule: RuleTag::OrE,
        premisses: vec![m, left, right],
        discharged: or.discharged,
        hyp_label: None,
    })
}
