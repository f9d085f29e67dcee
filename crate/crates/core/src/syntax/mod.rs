//! Formulas of the grounding language.
//!
//! Propositional formulas are extended with three grounding operators:
//! immediate claims `Γ [Δ] |> A`, mediate claims `Γ [Δ] >> A` and tree
//! entries `(Γ [Δ] *> A)`. Tree entries are not formulas on their own; they
//! only occur as grounds or conditions of an immediate claim (or of another
//! tree entry), which is why they live in [`GroundEntry`] rather than in
//! [`Formula`].

mod parse;
mod print;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use parse::parse_with_metavars;
pub use parse::{parse_formula, ParseError};
pub use print::print_formula;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Bottom,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// `grounds [conditions] |> consequence`; entries may be grounding trees.
    Immediate {
        grounds: Vec<GroundEntry>,
        conditions: Vec<GroundEntry>,
        consequence: Box<Formula>,
    },
    /// `grounds [conditions] >> consequence`; entries are plain formulas.
    Mediate {
        grounds: Vec<Formula>,
        conditions: Vec<Formula>,
        consequence: Box<Formula>,
    },
}

/// An element of the ground or condition list of an immediate claim.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundEntry {
    Plain(Formula),
    /// `(grounds [conditions] *> consequence)`: only `consequence` is part of
    /// the enclosing ground, the rest records how it is grounded in turn.
    Tree {
        grounds: Vec<GroundEntry>,
        conditions: Vec<GroundEntry>,
        consequence: Box<Formula>,
    },
}

/// Which list of a claim an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Ground,
    Condition,
}

/// Selects one entry of a claim: the `index`-th ground or condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntrySel {
    pub side: Side,
    pub index: usize,
}

impl EntrySel {
    pub fn ground(index: usize) -> Self {
        EntrySel { side: Side::Ground, index }
    }

    pub fn condition(index: usize) -> Self {
        EntrySel { side: Side::Condition, index }
    }
}

impl fmt::Display for EntrySel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Ground => write!(f, "g{}", self.index),
            Side::Condition => write!(f, "c{}", self.index),
        }
    }
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    /// An immediate claim whose entries are all plain formulas.
    pub fn immediate(grounds: Vec<Formula>, conditions: Vec<Formula>, consequence: Formula) -> Formula {
        Formula::Immediate {
            grounds: grounds.into_iter().map(GroundEntry::Plain).collect(),
            conditions: conditions.into_iter().map(GroundEntry::Plain).collect(),
            consequence: Box::new(consequence),
        }
    }

    pub fn mediate(grounds: Vec<Formula>, conditions: Vec<Formula>, consequence: Formula) -> Formula {
        Formula::Mediate { grounds, conditions, consequence: Box::new(consequence) }
    }

    /// True for formulas without any grounding operator.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => true,
            Formula::Neg(f) => f.is_propositional(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => l.is_propositional() && r.is_propositional(),
            Formula::Immediate { .. } | Formula::Mediate { .. } => false,
        }
    }

    /// Whether this is an immediate claim with at least one tree entry.
    pub fn is_grounding_tree(&self) -> bool {
        match self {
            Formula::Immediate { grounds, conditions, .. } => {
                grounds.iter().chain(conditions).any(GroundEntry::is_tree)
            }
            _ => false,
        }
    }

    /// Checks the grammar invariants that the type system does not enforce:
    /// non-empty ground lists, lowercase atom names, and no tree entries
    /// below a mediate claim (impossible by construction, checked anyway for
    /// nested claims).
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Formula::Atom(name) => {
                if is_atom_name(name) {
                    Ok(())
                } else {
                    Err(format!("invalid atom name `{name}`"))
                }
            }
            Formula::Bottom => Ok(()),
            Formula::Neg(f) => f.validate(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.validate()?;
                r.validate()
            }
            Formula::Immediate { grounds, conditions, consequence } => {
                if grounds.is_empty() {
                    return Err("immediate claim with empty ground list".into());
                }
                for e in grounds.iter().chain(conditions) {
                    e.validate()?;
                }
                consequence.validate()
            }
            Formula::Mediate { grounds, conditions, consequence } => {
                if grounds.is_empty() {
                    return Err("mediate claim with empty ground list".into());
                }
                for e in grounds.iter().chain(conditions) {
                    e.validate()?;
                }
                consequence.validate()
            }
        }
    }
}

pub(crate) fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && name != "bot"
}

impl GroundEntry {
    pub fn is_tree(&self) -> bool {
        matches!(self, GroundEntry::Tree { .. })
    }

    /// The formula this entry contributes to the enclosing ground list.
    pub fn formula(&self) -> &Formula {
        match self {
            GroundEntry::Plain(f) => f,
            GroundEntry::Tree { consequence, .. } => consequence,
        }
    }

    /// Reads a tree entry `(Γ [Δ] *> A)` as the immediate claim `Γ [Δ] |> A`.
    pub fn as_claim(&self) -> Option<Formula> {
        match self {
            GroundEntry::Plain(_) => None,
            GroundEntry::Tree { grounds, conditions, consequence } => Some(Formula::Immediate {
                grounds: grounds.clone(),
                conditions: conditions.clone(),
                consequence: consequence.clone(),
            }),
        }
    }

    /// The inverse of [`GroundEntry::as_claim`].
    pub fn tree_of(claim: &Formula) -> Option<GroundEntry> {
        match claim {
            Formula::Immediate { grounds, conditions, consequence } => Some(GroundEntry::Tree {
                grounds: grounds.clone(),
                conditions: conditions.clone(),
                consequence: consequence.clone(),
            }),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            GroundEntry::Plain(f) => f.validate(),
            GroundEntry::Tree { grounds, conditions, consequence } => {
                if grounds.is_empty() {
                    return Err("tree entry with empty ground list".into());
                }
                for e in grounds.iter().chain(conditions) {
                    e.validate()?;
                }
                consequence.validate()
            }
        }
    }
}

/// Borrowed parts of an immediate claim or tree entry.
#[derive(Clone, Copy, Debug)]
pub struct ClaimParts<'a> {
    pub grounds: &'a [GroundEntry],
    pub conditions: &'a [GroundEntry],
    pub consequence: &'a Formula,
}

impl<'a> ClaimParts<'a> {
    pub fn of(f: &'a Formula) -> Option<ClaimParts<'a>> {
        match f {
            Formula::Immediate { grounds, conditions, consequence } => {
                Some(ClaimParts { grounds, conditions, consequence })
            }
            _ => None,
        }
    }

    pub fn of_entry(e: &'a GroundEntry) -> Option<ClaimParts<'a>> {
        match e {
            GroundEntry::Tree { grounds, conditions, consequence } => {
                Some(ClaimParts { grounds, conditions, consequence })
            }
            GroundEntry::Plain(_) => None,
        }
    }

    pub fn list(&self, side: Side) -> &'a [GroundEntry] {
        match side {
            Side::Ground => self.grounds,
            Side::Condition => self.conditions,
        }
    }

    pub fn entry(&self, sel: EntrySel) -> Option<&'a GroundEntry> {
        self.list(sel.side).get(sel.index)
    }

    /// Entries in ground-then-condition order, each with its selector.
    pub fn entries(&self) -> impl Iterator<Item = (EntrySel, &'a GroundEntry)> + 'a {
        let g = self.grounds.iter().enumerate().map(|(i, e)| (EntrySel::ground(i), e));
        let c = self.conditions.iter().enumerate().map(|(i, e)| (EntrySel::condition(i), e));
        g.chain(c)
    }

    pub fn has_tree(&self) -> bool {
        self.grounds.iter().chain(self.conditions).any(GroundEntry::is_tree)
    }

    pub fn to_claim(&self) -> Formula {
        Formula::Immediate {
            grounds: self.grounds.to_vec(),
            conditions: self.conditions.to_vec(),
            consequence: Box::new(self.consequence.clone()),
        }
    }

    /// The claim with `sel` replaced by `entry`.
    pub fn with_entry(&self, sel: EntrySel, entry: GroundEntry) -> Formula {
        let mut grounds = self.grounds.to_vec();
        let mut conditions = self.conditions.to_vec();
        match sel.side {
            Side::Ground => grounds[sel.index] = entry,
            Side::Condition => conditions[sel.index] = entry,
        }
        Formula::Immediate { grounds, conditions, consequence: Box::new(self.consequence.clone()) }
    }
}

/// Number of atoms, connectives (`~ & | -> bot`) and grounding operators
/// (`|> >> *>`) in a formula. Brackets and commas do not count.
pub fn logical_complexity(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Bottom => 1,
        Formula::Neg(g) => 1 + logical_complexity(g),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
            1 + logical_complexity(l) + logical_complexity(r)
        }
        Formula::Immediate { grounds, conditions, consequence } => {
            1 + grounds.iter().chain(conditions).map(entry_complexity).sum::<usize>() + logical_complexity(consequence)
        }
        Formula::Mediate { grounds, conditions, consequence } => {
            1 + grounds.iter().chain(conditions).map(logical_complexity).sum::<usize>()
                + logical_complexity(consequence)
        }
    }
}

fn entry_complexity(e: &GroundEntry) -> usize {
    match e {
        GroundEntry::Plain(f) => logical_complexity(f),
        GroundEntry::Tree { grounds, conditions, consequence } => {
            1 + grounds.iter().chain(conditions).map(entry_complexity).sum::<usize>() + logical_complexity(consequence)
        }
    }
}

/// Address of a subterm occurrence: a sequence of child indices.
///
/// Children of a claim (or tree entry) are its grounds, then its conditions,
/// then its consequence. A plain entry is addressed as the formula itself.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccPath(pub Vec<usize>);

impl OccPath {
    pub fn root() -> Self {
        OccPath(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        OccPath(v)
    }
}

impl From<Vec<usize>> for OccPath {
    fn from(v: Vec<usize>) -> Self {
        OccPath(v)
    }
}

/// A subterm occurrence: either a formula or a tree entry.
#[derive(Clone, Copy, Debug)]
pub enum Occurrence<'a> {
    Formula(&'a Formula),
    Tree(ClaimParts<'a>),
}

impl<'a> Occurrence<'a> {
    fn children(&self) -> Vec<Occurrence<'a>> {
        let claim_children = |parts: ClaimParts<'a>| {
            let mut out: Vec<Occurrence<'a>> = parts
                .grounds
                .iter()
                .chain(parts.conditions)
                .map(|e| match e {
                    GroundEntry::Plain(f) => Occurrence::Formula(f),
                    GroundEntry::Tree { .. } => Occurrence::Tree(ClaimParts::of_entry(e).unwrap()),
                })
                .collect();
            out.push(Occurrence::Formula(parts.consequence));
            out
        };
        match *self {
            Occurrence::Formula(f) => match f {
                Formula::Atom(_) | Formula::Bottom => Vec::new(),
                Formula::Neg(g) => vec![Occurrence::Formula(g)],
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                    vec![Occurrence::Formula(l), Occurrence::Formula(r)]
                }
                Formula::Immediate { .. } => claim_children(ClaimParts::of(f).unwrap()),
                Formula::Mediate { grounds, conditions, consequence } => grounds
                    .iter()
                    .chain(conditions)
                    .chain(std::iter::once(&**consequence))
                    .map(Occurrence::Formula)
                    .collect(),
            },
            Occurrence::Tree(parts) => claim_children(parts),
        }
    }

    /// Grounds and conditions of a `|>` or `*>` occurrence.
    fn claim_parts(&self) -> Option<ClaimParts<'a>> {
        match *self {
            Occurrence::Formula(f) => ClaimParts::of(f),
            Occurrence::Tree(parts) => Some(parts),
        }
    }
}

/// The occurrence addressed by `path`, if every index is in range.
pub fn occurrence_at<'a>(f: &'a Formula, path: &OccPath) -> Option<Occurrence<'a>> {
    let mut cur = Occurrence::Formula(f);
    for &i in &path.0 {
        cur = cur.children().into_iter().nth(i)?;
    }
    Some(cur)
}

/// Every `*>` occurrence in `f`, in pre-order.
pub fn tree_occurrences(f: &Formula) -> Vec<OccPath> {
    fn walk(occ: Occurrence<'_>, path: OccPath, out: &mut Vec<OccPath>) {
        if matches!(occ, Occurrence::Tree(_)) {
            out.push(path.clone());
        }
        for (i, c) in occ.children().into_iter().enumerate() {
            walk(c, path.child(i), out);
        }
    }
    let mut out = Vec::new();
    walk(Occurrence::Formula(f), OccPath::root(), &mut out);
    out
}

/// Every `|>` occurrence in `f`, in pre-order.
pub fn immediate_occurrences(f: &Formula) -> Vec<OccPath> {
    fn walk(occ: Occurrence<'_>, path: OccPath, out: &mut Vec<OccPath>) {
        if let Occurrence::Formula(Formula::Immediate { .. }) = occ {
            out.push(path.clone());
        }
        for (i, c) in occ.children().into_iter().enumerate() {
            walk(c, path.child(i), out);
        }
    }
    let mut out = Vec::new();
    walk(Occurrence::Formula(f), OccPath::root(), &mut out);
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxOpError {
    #[error("bad occurrence {path:?}: {reason}")]
    BadOccurrence { path: Vec<usize>, reason: &'static str },
    #[error("not a grounding tree: {0}")]
    NotAGroundingTree(String),
}

/// Whether the `|>`/`*>` occurrence at `outer` holds the `*>` occurrence at
/// `inner`: `inner` is the outermost operator of one of `outer`'s entries, or
/// is held by a `*>` that `outer` holds.
pub fn holds(f: &Formula, outer: &OccPath, inner: &OccPath) -> Result<bool, SyntaxOpError> {
    let outer_occ = occurrence_at(f, outer)
        .ok_or(SyntaxOpError::BadOccurrence { path: outer.0.clone(), reason: "path out of range" })?;
    if outer_occ.claim_parts().is_none() {
        return Err(SyntaxOpError::BadOccurrence { path: outer.0.clone(), reason: "expected a |> or *> occurrence" });
    }
    match occurrence_at(f, inner) {
        Some(Occurrence::Tree(_)) => {}
        Some(_) => {
            return Err(SyntaxOpError::BadOccurrence { path: inner.0.clone(), reason: "expected a *> occurrence" })
        }
        None => return Err(SyntaxOpError::BadOccurrence { path: inner.0.clone(), reason: "path out of range" }),
    }
    if inner.0.len() <= outer.0.len() || !inner.0.starts_with(&outer.0) {
        return Ok(false);
    }
    let mut cur = outer_occ;
    for &i in &inner.0[outer.0.len()..] {
        let parts = cur.claim_parts().expect("walk stays on claim occurrences");
        if i >= parts.grounds.len() + parts.conditions.len() {
            return Ok(false);
        }
        match cur.children().into_iter().nth(i) {
            Some(next @ Occurrence::Tree(_)) => cur = next,
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Number of `*>` occurrences held by the outermost `|>` of a claim.
pub fn held_tree_count(f: &Formula) -> usize {
    fn count(parts: ClaimParts<'_>) -> usize {
        parts.grounds.iter().chain(parts.conditions).filter_map(ClaimParts::of_entry).map(|p| 1 + count(p)).sum()
    }
    ClaimParts::of(f).map_or(0, count)
}

/// Size of a grounding tree: 1 for a claim without tree entries, otherwise
/// 1 plus the sizes of its tree entries read as claims.
pub fn tree_size(f: &Formula) -> Result<usize, SyntaxOpError> {
    fn size(parts: ClaimParts<'_>) -> usize {
        1 + parts.grounds.iter().chain(parts.conditions).filter_map(ClaimParts::of_entry).map(size).sum::<usize>()
    }
    ClaimParts::of(f).map(size).ok_or_else(|| SyntaxOpError::NotAGroundingTree(print_formula(f)))
}

/// Multiset equality of two formula lists.
pub fn same_multiset(a: &[Formula], b: &[Formula]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a: Vec<&Formula> = a.iter().collect();
    let mut b: Vec<&Formula> = b.iter().collect();
    a.sort();
    b.sort();
    a == b
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
