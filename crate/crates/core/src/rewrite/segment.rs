use std::collections::HashMap;
use std::fmt;

use super::{redex_kind_at, reduce_redex, Redex, RedexKind, RewriteError};
use crate::derivation::{Derivation, NodePath, RuleTag};
use crate::syntax::logical_complexity;

/// A maximal chain of occurrences linked through minor premisses of `or-e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Node paths from the topmost occurrence down to the bottommost one.
    pub occurrences: Vec<NodePath>,
    pub complexity: usize,
    pub length: usize,
}

impl Segment {
    pub fn top(&self) -> &NodePath {
        &self.occurrences[0]
    }

    pub fn bottom(&self) -> &NodePath {
        self.occurrences.last().unwrap()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexityTriple {
    /// Largest segment complexity.
    pub m: usize,
    /// Summed length of the segments of complexity `m`.
    pub n: usize,
    /// Number of rule applications.
    pub u: usize,
}

impl fmt::Display for ComplexityTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.n, self.u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub redex: Redex,
    pub before: ComplexityTriple,
    pub after: ComplexityTriple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub derivation: Derivation,
    pub trace: Vec<TraceStep>,
}

fn parent(p: &NodePath) -> Option<(NodePath, usize)> {
    let (&last, rest) = p.0.split_last()?;
    Some((NodePath(rest.to_vec()), last))
}

/// All segments, counting `>>` detours.
pub fn segments(d: &Derivation) -> Vec<Segment> {
    segments_mode(d, true)
}

/// All segments. With `include_mediate` off, segments ending in a `>>`
/// elimination get complexity 0.
pub fn segments_mode(d: &Derivation, include_mediate: bool) -> Vec<Segment> {
    let nodes: Vec<(NodePath, &Derivation)> = d.nodes();
    let index: HashMap<&NodePath, &Derivation> = nodes.iter().map(|(p, n)| (p, *n)).collect();
    let mut out = Vec::new();
    for (path, node) in &nodes {
        if node.rule == RuleTag::OrE {
            continue;
        }
        let mut occurrences = vec![path.clone()];
        let mut cur = path.clone();
        while let Some((up, idx)) = parent(&cur) {
            if index[&up].rule == RuleTag::OrE && idx > 0 {
                occurrences.push(up.clone());
                cur = up;
            } else {
                break;
            }
        }
        let length = occurrences.len();
        let complexity = segment_complexity(&index, &cur, length, include_mediate);
        out.push(Segment { occurrences, complexity, length });
    }
    out
}

fn segment_complexity(
    index: &HashMap<&NodePath, &Derivation>,
    bottom: &NodePath,
    length: usize,
    include_mediate: bool,
) -> usize {
    let Some((up, idx)) = parent(bottom) else { return 0 };
    let e = index[&up];
    if idx != 0 || !e.rule.is_elimination() || (!include_mediate && e.rule.is_mediate()) {
        return 0;
    }
    let lc = logical_complexity(&index[bottom].conclusion);
    if length > 1 {
        return lc;
    }
    match redex_kind_at(e) {
        Some(k) if k != RedexKind::Permutation => lc,
        _ => 0,
    }
}

fn triple_of(segs: &[Segment], d: &Derivation) -> ComplexityTriple {
    let m = segs.iter().map(|s| s.complexity).max().unwrap_or(0);
    let n = if m == 0 { 0 } else { segs.iter().filter(|s| s.complexity == m).map(|s| s.length).sum() };
    ComplexityTriple { m, n, u: d.rule_count() }
}

/// `(m, n, u)` counting every redex kind; `(0, 0, u)` exactly when normal.
pub fn derivation_complexity(d: &Derivation) -> ComplexityTriple {
    derivation_complexity_mode(d, true)
}

pub fn derivation_complexity_mode(d: &Derivation, include_mediate: bool) -> ComplexityTriple {
    triple_of(&segments_mode(d, include_mediate), d)
}

/// Whether `r` lies to the right of `s`: some occurrence of `r` sits in a
/// later premiss of a rule than some occurrence of `s`.
pub fn segment_right_of(r: &Segment, s: &Segment) -> bool {
    r.occurrences.iter().any(|a| {
        s.occurrences.iter().any(|b| {
            let common = a.0.iter().zip(&b.0).take_while(|(x, y)| x == y).count();
            common < a.0.len() && common < b.0.len() && a.0[common] > b.0[common]
        })
    })
}

/// Whether the bottom of `r` lies strictly above the bottom of `s`.
pub fn segment_above(r: &Segment, s: &Segment) -> bool {
    let (a, b) = (r.bottom(), s.bottom());
    a.0.len() > b.0.len() && b.is_prefix_of(a)
}

/// The segment the strategy reduces next, if any has nonzero complexity:
/// among those of maximal complexity, the one whose top occurrence is
/// lexicographically greatest (rightmost, then topmost).
fn select(segs: &[Segment]) -> Option<&Segment> {
    let m = segs.iter().map(|s| s.complexity).max().unwrap_or(0);
    if m == 0 {
        return None;
    }
    segs.iter().filter(|s| s.complexity == m).max_by(|a, b| a.top().cmp(b.top()))
}

/// Reduces selected segments until none of nonzero complexity remains.
pub fn normalize(d: &Derivation, include_mediate: bool, step_budget: usize) -> Result<Normalized, RewriteError> {
    let mut cur = d.clone();
    let mut trace = Vec::new();
    loop {
        let segs = segments_mode(&cur, include_mediate);
        let before = triple_of(&segs, &cur);
        let Some(seg) = select(&segs) else {
            return Ok(Normalized { derivation: cur, trace });
        };
        if trace.len() >= step_budget {
            return Err(RewriteError::BudgetExhausted {
                budget: step_budget,
                steps: trace.len(),
                partial: Box::new(cur),
                trace,
            });
        }
        let (location, _) = parent(seg.bottom()).expect("a segment of nonzero complexity has a parent");
        let e = cur.at(&location).expect("segment paths are valid");
        let kind = redex_kind_at(e).expect("a segment of nonzero complexity ends in a redex");
        let redex = Redex { location, kind, complexity: logical_complexity(&e.premisses[0].conclusion) };
        cur = reduce_redex(&cur, &redex)?;
        let after = derivation_complexity_mode(&cur, include_mediate);
        trace.push(TraceStep { redex, before, after });
    }
}
