use std::collections::BTreeSet;

use crate::derivation::{Derivation, Label, RuleTag};

/// Produces hypothesis labels not yet used in a derivation.
pub(crate) struct LabelGen {
    used: BTreeSet<Label>,
    next: usize,
}

impl LabelGen {
    pub fn for_derivation(d: &Derivation) -> Self {
        LabelGen { used: d.labels(), next: 0 }
    }

    pub fn fresh(&mut self) -> Label {
        loop {
            let l = format!("h{}", self.next);
            self.next += 1;
            if self.used.insert(l.clone()) {
                return l;
            }
        }
    }
}

/// Renames every label discharged inside `d`, together with the hypotheses
/// it binds. Labels free in `d` are left alone.
pub(crate) fn freshen(d: &Derivation, gen: &mut LabelGen) -> Derivation {
    fn go(d: &Derivation, env: &mut Vec<(Label, Label)>, gen: &mut LabelGen) -> Derivation {
        if d.rule == RuleTag::Hyp {
            let mut out = d.clone();
            if let Some(l) = &d.hyp_label {
                if let Some((_, new)) = env.iter().rev().find(|(old, _)| old == l) {
                    out.hyp_label = Some(new.clone());
                }
            }
            return out;
        }
        let renamed: Vec<Label> = d.discharged.iter().map(|_| gen.fresh()).collect();
        let scopes = discharge_scopes(d);
        let premisses = d
            .premisses
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut pushed = 0;
                for (k, at) in scopes.iter().enumerate() {
                    if *at == i {
                        env.push((d.discharged[k].clone(), renamed[k].clone()));
                        pushed += 1;
                    }
                }
                let out = go(p, env, gen);
                env.truncate(env.len() - pushed);
                out
            })
            .collect();
        Derivation {
            conclusion: d.conclusion.clone(),
            rule: d.rule.clone(),
            premisses,
            discharged: renamed,
            hyp_label: None,
        }
    }
    go(d, &mut Vec::new(), gen)
}

/// For each entry of `d.discharged`, the premiss it is discharged in.
fn discharge_scopes(d: &Derivation) -> Vec<usize> {
    match (&d.rule, d.discharged.len()) {
        (RuleTag::OrE, 2) => vec![1, 2],
        (_, n) => vec![0; n],
    }
}

/// Replaces the hypotheses labelled `label` that are free in `host` by
/// fresh copies of `replacement`.
pub(crate) fn substitute(host: &Derivation, label: &str, replacement: &Derivation, gen: &mut LabelGen) -> Derivation {
    if host.rule == RuleTag::Hyp {
        return if host.hyp_label.as_deref() == Some(label) { freshen(replacement, gen) } else { host.clone() };
    }
    let scopes = discharge_scopes(host);
    let premisses = host
        .premisses
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let rebinds = scopes.iter().zip(&host.discharged).any(|(at, l)| *at == i && l == label);
            if rebinds {
                p.clone()
            } else {
                substitute(p, label, replacement, gen)
            }
        })
        .collect();
    Derivation { premisses, ..host.clone() }
}
