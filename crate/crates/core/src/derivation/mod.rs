//! Derivations: finite proof trees over the base logic, grounding rules and
//! the rules for `|>`, `>>` and `*>`.

mod check;
mod format;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::calculus::RuleInstance;
use crate::syntax::{EntrySel, Formula, Side};

pub use check::{check, infer_conclusion, CheckFailure, CheckReport};
pub use format::{parse_proof, print_proof, ProofError};

pub type Label = String;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleTag {
    Hyp,
    Grounding(RuleInstance),
    AndI,
    AndEL,
    AndER,
    OrIL,
    OrIR,
    /// Premisses: major `A | B`, then the branches for `A` and `B`.
    OrE,
    ImpI,
    /// Premisses: major `A -> B`, then minor `A`.
    ImpE,
    NegI,
    /// Premisses: major `~A`, then minor `A`.
    NegE,
    BotE,
    ImmIntro,
    ImmElimCons,
    ImmElimGround(usize),
    ImmElimCond(usize),
    ImmElimNeg,
    MedIntroBase,
    /// Splices the left premiss into ground `k` of the right premiss.
    MedIntroTransGround(usize),
    /// Splices the left premiss into condition `k` of the right premiss.
    MedIntroTransCond(usize),
    MedElimCons,
    MedElimGround(usize),
    MedElimCond(usize),
    /// Premisses: the plugged claim, then the host claim.
    TreeIntro(EntrySel),
    /// Extracts the claim of a tree entry. A path longer than one step
    /// descends through tree entries nested in tree entries.
    TreeExtract(Vec<EntrySel>),
    TreeFlatten(EntrySel),
}

impl RuleTag {
    /// Rule name as written in proof files.
    pub fn name(&self) -> &'static str {
        use RuleTag::*;
        match self {
            Hyp => "hyp",
            Grounding(_) => "grounding",
            AndI => "and-i",
            AndEL => "and-e-l",
            AndER => "and-e-r",
            OrIL => "or-i-l",
            OrIR => "or-i-r",
            OrE => "or-e",
            ImpI => "imp-i",
            ImpE => "imp-e",
            NegI => "neg-i",
            NegE => "neg-e",
            BotE => "bot-e",
            ImmIntro => "imm-i",
            ImmElimCons => "imm-e-cons",
            ImmElimGround(_) => "imm-e-ground",
            ImmElimCond(_) => "imm-e-cond",
            ImmElimNeg => "imm-e-neg",
            MedIntroBase => "med-i-base",
            MedIntroTransGround(_) => "med-i-trans-ground",
            MedIntroTransCond(_) => "med-i-trans-cond",
            MedElimCons => "med-e-cons",
            MedElimGround(_) => "med-e-ground",
            MedElimCond(_) => "med-e-cond",
            TreeIntro(s) => match s.side {
                Side::Ground => "tree-i-ground",
                Side::Condition => "tree-i-cond",
            },
            TreeExtract(p) => match p.first().map(|s| s.side) {
                Some(Side::Condition) => "tree-e-extract-cond",
                _ => "tree-e-extract-ground",
            },
            TreeFlatten(s) => match s.side {
                Side::Ground => "tree-e-flatten-ground",
                Side::Condition => "tree-e-flatten-cond",
            },
        }
    }

    pub fn is_introduction(&self) -> bool {
        use RuleTag::*;
        matches!(
            self,
            AndI | OrIL
                | OrIR
                | ImpI
                | NegI
                | ImmIntro
                | MedIntroBase
                | MedIntroTransGround(_)
                | MedIntroTransCond(_)
                | TreeIntro(_)
        )
    }

    /// Eliminations whose premiss 0 is the major premiss. `bot-e` is not
    /// counted: it has no introduction to form a detour with.
    pub fn is_elimination(&self) -> bool {
        use RuleTag::*;
        matches!(
            self,
            AndEL
                | AndER
                | OrE
                | ImpE
                | NegE
                | ImmElimCons
                | ImmElimGround(_)
                | ImmElimCond(_)
                | ImmElimNeg
                | MedElimCons
                | MedElimGround(_)
                | MedElimCond(_)
                | TreeExtract(_)
                | TreeFlatten(_)
        )
    }

    pub fn is_mediate(&self) -> bool {
        use RuleTag::*;
        matches!(
            self,
            MedIntroBase
                | MedIntroTransGround(_)
                | MedIntroTransCond(_)
                | MedElimCons
                | MedElimGround(_)
                | MedElimCond(_)
        )
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RuleTag::*;
        match self {
            Grounding(inst) => write!(f, "grounding[{}]", inst.schema),
            ImmElimGround(i)
            | ImmElimCond(i)
            | MedIntroTransGround(i)
            | MedIntroTransCond(i)
            | MedElimGround(i)
            | MedElimCond(i) => write!(f, "{}[{}]", self.name(), i),
            TreeIntro(s) | TreeFlatten(s) => write!(f, "{}[{}]", self.name(), s.index),
            TreeExtract(p) => {
                write!(f, "{}[", self.name())?;
                for (i, s) in p.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{}", s.index)?;
                    } else {
                        write!(f, ".{s}")?;
                    }
                }
                f.write_str("]")
            }
            _ => f.write_str(self.name()),
        }
    }
}

/// Address of a node: premiss indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        NodePath(v)
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for NodePath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "root" {
            return Ok(NodePath::root());
        }
        s.split('.')
            .map(|p| p.parse::<usize>().map_err(|_| format!("bad node path `{s}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(NodePath)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub conclusion: Formula,
    pub rule: RuleTag,
    pub premisses: Vec<Derivation>,
    /// Labels discharged here: one for `imp-i`/`neg-i`, one per branch for
    /// `or-e`. Empty means a vacuous (or no) discharge.
    pub discharged: Vec<Label>,
    pub hyp_label: Option<Label>,
}

impl Derivation {
    pub fn hyp(f: Formula) -> Derivation {
        Derivation { conclusion: f, rule: RuleTag::Hyp, premisses: Vec::new(), discharged: Vec::new(), hyp_label: None }
    }

    pub fn hyp_labeled(f: Formula, label: &str) -> Derivation {
        Derivation { hyp_label: Some(label.to_string()), ..Derivation::hyp(f) }
    }

    pub fn node(rule: RuleTag, conclusion: Formula, premisses: Vec<Derivation>) -> Derivation {
        Derivation { conclusion, rule, premisses, discharged: Vec::new(), hyp_label: None }
    }

    pub fn with_discharge(mut self, labels: &[&str]) -> Derivation {
        self.discharged = labels.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.premisses.is_empty()
    }

    /// Number of rule applications (non-hypothesis nodes).
    pub fn rule_count(&self) -> usize {
        usize::from(self.rule != RuleTag::Hyp) + self.premisses.iter().map(Derivation::rule_count).sum::<usize>()
    }

    pub fn node_count(&self) -> usize {
        1 + self.premisses.iter().map(Derivation::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premisses.iter().map(Derivation::depth).max().unwrap_or(0)
    }

    pub fn grounding_count(&self) -> usize {
        usize::from(matches!(self.rule, RuleTag::Grounding(_)))
            + self.premisses.iter().map(Derivation::grounding_count).sum::<usize>()
    }

    pub fn at(&self, path: &NodePath) -> Option<&Derivation> {
        let mut cur = self;
        for &i in &path.0 {
            cur = cur.premisses.get(i)?;
        }
        Some(cur)
    }

    /// A copy with the node at `path` replaced.
    pub fn replace_at(&self, path: &NodePath, new: Derivation) -> Option<Derivation> {
        fn go(d: &Derivation, path: &[usize], new: Derivation) -> Option<Derivation> {
            match path.split_first() {
                None => Some(new),
                Some((&i, rest)) => {
                    let child = go(d.premisses.get(i)?, rest, new)?;
                    let mut out = d.clone();
                    out.premisses[i] = child;
                    Some(out)
                }
            }
        }
        go(self, &path.0, new)
    }

    /// Every node with its path, in pre-order.
    pub fn nodes(&self) -> Vec<(NodePath, &Derivation)> {
        fn go<'a>(d: &'a Derivation, path: NodePath, out: &mut Vec<(NodePath, &'a Derivation)>) {
            out.push((path.clone(), d));
            for (i, p) in d.premisses.iter().enumerate() {
                go(p, path.child(i), out);
            }
        }
        let mut out = Vec::new();
        go(self, NodePath::root(), &mut out);
        out
    }

    /// All labels used on hypotheses or discharges.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        for (_, n) in self.nodes() {
            out.extend(n.hyp_label.iter().cloned());
            out.extend(n.discharged.iter().cloned());
        }
        out
    }

    /// The formulas discharged at this node, paired with their labels and
    /// the premiss they are discharged in.
    pub fn discharges(&self) -> Vec<(usize, &Label, Formula)> {
        match (&self.rule, self.discharged.as_slice()) {
            (RuleTag::ImpI, [l]) => match &self.conclusion {
                Formula::Imp(a, _) => vec![(0, l, (**a).clone())],
                _ => Vec::new(),
            },
            (RuleTag::NegI, [l]) => match &self.conclusion {
                Formula::Neg(a) => vec![(0, l, (**a).clone())],
                _ => Vec::new(),
            },
            (RuleTag::OrE, [l1, l2]) => match self.premisses.first().map(|m| &m.conclusion) {
                Some(Formula::Or(a, b)) => vec![(1, l1, (**a).clone()), (2, l2, (**b).clone())],
                _ => Vec::new(),
            },
            _ => Vec::new(),
        }
    }
}

/// Undischarged hypotheses, as a sorted multiset.
pub fn open_hypotheses(d: &Derivation) -> Vec<Formula> {
    fn go(d: &Derivation, active: &mut Vec<Label>, out: &mut Vec<Formula>) {
        if d.rule == RuleTag::Hyp {
            match &d.hyp_label {
                Some(l) if active.contains(l) => {}
                _ => out.push(d.conclusion.clone()),
            }
            return;
        }
        let discharges = d.discharges();
        for (i, p) in d.premisses.iter().enumerate() {
            let pushed: Vec<Label> =
                discharges.iter().filter(|(at, _, _)| *at == i).map(|(_, l, _)| (*l).clone()).collect();
            let n = pushed.len();
            active.extend(pushed);
            go(p, active, out);
            active.truncate(active.len() - n);
        }
    }
    let mut out = Vec::new();
    go(d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Whether `small` is a sub-multiset of `big`; both must be sorted.
pub fn is_sub_multiset(small: &[Formula], big: &[Formula]) -> bool {
    let mut j = 0;
    for f in small {
        while j < big.len() && big[j] < *f {
            j += 1;
        }
        if j == big.len() || big[j] != *f {
            return false;
        }
        j += 1;
    }
    true
}

/// Built only from grounding rules over hypotheses, with at least one rule.
pub fn is_grounding_derivation(d: &Derivation) -> bool {
    fn all(d: &Derivation) -> bool {
        match d.rule {
            RuleTag::Hyp => d.premisses.is_empty(),
            RuleTag::Grounding(_) => !d.premisses.is_empty() && d.premisses.iter().all(all),
            _ => false,
        }
    }
    d.rule != RuleTag::Hyp && all(d)
}
