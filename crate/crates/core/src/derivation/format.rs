//! The s-expression proof format.
//!
//! ```text
//! (imm-i "p, q |> p & q"
//!   (grounding "p & q" :schema and
//!     (hyp "p")
//!     (hyp "q")))
//! ```

use thiserror::Error;

use super::{Derivation, RuleTag};
use crate::calculus::{match_schema, Binding, CalculusSpec, RuleInstance};
use crate::syntax::{parse_formula, EntrySel, Formula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("proof file line {line}: {message}")]
pub struct ProofError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Str(String),
    Key(String),
    Word(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ProofError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let line_of = |pos: usize| text[..pos].matches('\n').count() + 1;
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                out.push((Tok::Open, line_of(i)));
            }
            ')' => {
                chars.next();
                out.push((Tok::Close, line_of(i)));
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, '\\')) => match chars.next() {
                            Some((_, c)) => s.push(c),
                            None => break,
                        },
                        Some((_, c)) => s.push(c),
                        None => return Err(ProofError { line: line_of(i), message: "unterminated string".into() }),
                    }
                }
                out.push((Tok::Str(s), line_of(i)));
            }
            _ => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                let tok = match s.strip_prefix(':') {
                    Some(k) => Tok::Key(k.to_string()),
                    None => Tok::Word(s),
                };
                out.push((tok, line_of(i)));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    spec: &'a CalculusSpec,
}

#[derive(Default)]
struct Keys {
    label: Option<String>,
    discharge: Vec<String>,
    schema: Option<String>,
    index: Option<usize>,
    path: Option<String>,
}

impl<'a> Parser<'a> {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |t| t.1)
    }

    fn err(&self, message: impl Into<String>) -> ProofError {
        ProofError { line: self.line(), message: message.into() }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn node(&mut self) -> Result<Derivation, ProofError> {
        if self.next() != Some(Tok::Open) {
            return Err(self.err("expected `(`"));
        }
        let line = self.line();
        let name = match self.next() {
            Some(Tok::Word(w)) => w,
            _ => return Err(self.err("expected a rule name")),
        };
        let conclusion = match self.next() {
            Some(Tok::Str(s)) => parse_formula(&s).map_err(|e| ProofError { line, message: e.to_string() })?,
            _ => return Err(self.err("expected a quoted conclusion")),
        };
        let mut keys = Keys::default();
        let mut children = Vec::new();
        loop {
            match self.toks.get(self.pos).map(|t| t.0.clone()) {
                Some(Tok::Close) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Open) => children.push(self.node()?),
                Some(Tok::Key(k)) => {
                    self.pos += 1;
                    let v = match self.next() {
                        Some(Tok::Word(w)) => w,
                        _ => return Err(self.err(format!("expected a value for :{k}"))),
                    };
                    match k.as_str() {
                        "label" => keys.label = Some(ident(&v).map_err(|m| self.err(m))?),
                        "discharge" => keys.discharge.push(ident(&v).map_err(|m| self.err(m))?),
                        "schema" => keys.schema = Some(v),
                        "index" => keys.index = Some(v.parse().map_err(|_| self.err(format!("bad index `{v}`")))?),
                        "path" => keys.path = Some(v),
                        _ => return Err(self.err(format!("unknown key :{k}"))),
                    }
                }
                Some(_) => return Err(self.err("expected `(`, `)` or a key")),
                None => return Err(self.err("unexpected end of file")),
            }
        }
        let rule = self.rule(&name, &keys, &conclusion, &children).map_err(|m| ProofError { line, message: m })?;
        if keys.label.is_some() && rule != RuleTag::Hyp {
            return Err(ProofError { line, message: ":label is only allowed on hyp".into() });
        }
        Ok(Derivation { conclusion, rule, premisses: children, discharged: keys.discharge, hyp_label: keys.label })
    }

    fn rule(&self, name: &str, keys: &Keys, conclusion: &Formula, children: &[Derivation]) -> Result<RuleTag, String> {
        use RuleTag::*;
        let index = || keys.index.ok_or_else(|| format!("{name} needs :index"));
        let g = |i| EntrySel::ground(i);
        let c = |i| EntrySel::condition(i);
        Ok(match name {
            "hyp" => Hyp,
            "grounding" => {
                let schema = keys.schema.clone().ok_or("grounding needs :schema")?;
                let prem: Vec<Formula> = children.iter().map(|d| d.conclusion.clone()).collect();
                let n = self.spec.schema(&schema).map_or(prem.len(), |s| s.grounds.len().min(prem.len()));
                let (grounds, conditions) = prem.split_at(n);
                let binding = self
                    .spec
                    .schema(&schema)
                    .and_then(|s| match_schema(s, self.spec.commutative, grounds, conditions, conclusion))
                    .map_or_else(Binding::new, |i| i.binding);
                Grounding(RuleInstance {
                    schema,
                    binding,
                    grounds: grounds.to_vec(),
                    conditions: conditions.to_vec(),
                    conclusion: conclusion.clone(),
                })
            }
            "and-i" => AndI,
            "and-e-l" => AndEL,
            "and-e-r" => AndER,
            "or-i-l" => OrIL,
            "or-i-r" => OrIR,
            "or-e" => OrE,
            "imp-i" => ImpI,
            "imp-e" => ImpE,
            "neg-i" => NegI,
            "neg-e" => NegE,
            "bot-e" => BotE,
            "imm-i" => ImmIntro,
            "imm-e-cons" => ImmElimCons,
            "imm-e-ground" => ImmElimGround(index()?),
            "imm-e-cond" => ImmElimCond(index()?),
            "imm-e-neg" => ImmElimNeg,
            "med-i-base" => MedIntroBase,
            "med-i-trans-ground" => MedIntroTransGround(index()?),
            "med-i-trans-cond" => MedIntroTransCond(index()?),
            "med-e-cons" => MedElimCons,
            "med-e-ground" => MedElimGround(index()?),
            "med-e-cond" => MedElimCond(index()?),
            "tree-i-ground" => TreeIntro(g(index()?)),
            "tree-i-cond" => TreeIntro(c(index()?)),
            "tree-e-flatten-ground" => TreeFlatten(g(index()?)),
            "tree-e-flatten-cond" => TreeFlatten(c(index()?)),
            "tree-e-extract-ground" | "tree-e-extract-cond" => {
                let first = if name.ends_with("ground") { g(index()?) } else { c(index()?) };
                let mut path = vec![first];
                if let Some(rest) = &keys.path {
                    path.extend(parse_sel_path(rest)?);
                }
                TreeExtract(path)
            }
            _ => return Err(format!("unknown rule `{name}`")),
        })
    }
}

fn ident(s: &str) -> Result<String, String> {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Ok(s.to_string())
    } else {
        Err(format!("bad label `{s}`"))
    }
}

fn parse_sel_path(s: &str) -> Result<Vec<EntrySel>, String> {
    s.split('.')
        .map(|part| {
            let (side, num) = part.split_at(part.len().min(1));
            let index = num.parse().map_err(|_| format!("bad path step `{part}`"))?;
            match side {
                "g" => Ok(EntrySel::ground(index)),
                "c" => Ok(EntrySel::condition(index)),
                _ => Err(format!("bad path step `{part}`")),
            }
        })
        .collect()
}

/// Parses one derivation. Grounding nodes are split into grounds and
/// conditions using the named schema of `spec`; unknown schemas are left
/// for the checker to reject.
pub fn parse_proof(text: &str, spec: &CalculusSpec) -> Result<Derivation, ProofError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, spec };
    let d = p.node()?;
    if p.pos < p.toks.len() {
        return Err(p.err("trailing input after the derivation"));
    }
    Ok(d)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Prints a derivation with two-space indentation per level.
pub fn print_proof(d: &Derivation) -> String {
    let mut out = String::new();
    write_node(d, 0, &mut out);
    out.push('\n');
    out
}

fn write_node(d: &Derivation, indent: usize, out: &mut String) {
    out.push_str(&" ".repeat(indent));
    out.push('(');
    out.push_str(d.rule.name());
    out.push(' ');
    out.push_str(&quote(&d.conclusion.to_string()));
    if let Some(l) = &d.hyp_label {
        out.push_str(" :label ");
        out.push_str(l);
    }
    use RuleTag::*;
    match &d.rule {
        Grounding(inst) => {
            out.push_str(" :schema ");
            out.push_str(&inst.schema);
        }
        ImmElimGround(i)
        | ImmElimCond(i)
        | MedIntroTransGround(i)
        | MedIntroTransCond(i)
        | MedElimGround(i)
        | MedElimCond(i) => out.push_str(&format!(" :index {i}")),
        TreeIntro(s) | TreeFlatten(s) => out.push_str(&format!(" :index {}", s.index)),
        TreeExtract(path) => {
            out.push_str(&format!(" :index {}", path[0].index));
            if path.len() > 1 {
                let rest: Vec<String> = path[1..].iter().map(|s| s.to_string()).collect();
                out.push_str(&format!(" :path {}", rest.join(".")));
            }
        }
        _ => {}
    }
    for l in &d.discharged {
        out.push_str(" :discharge ");
        out.push_str(l);
    }
    for p in &d.premisses {
        out.push('\n');
        write_node(p, indent + 2, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::reference_calculus;
    use crate::derivation::check;

    const IMM_AND: &str =
        "(imm-i \"p, q |> p & q\"\n  (grounding \"p & q\" :schema and\n    (hyp \"p\")\n    (hyp \"q\")))\n";

    #[test]
    fn round_trip_and_check() {
        let spec = reference_calculus();
        let d = parse_proof(IMM_AND, &spec).unwrap();
        assert_eq!(print_proof(&d), IMM_AND);
        assert!(check(&d, &spec).ok);
    }

    #[test]
    fn grounding_conditions_split_by_schema() {
        let spec = reference_calculus();
        let text = "(grounding \"p | q\" :schema or_l (hyp \"p\") (hyp \"~q\"))";
        let d = parse_proof(text, &spec).unwrap();
        match &d.rule {
            RuleTag::Grounding(inst) => {
                assert_eq!(inst.grounds.len(), 1);
                assert_eq!(inst.conditions.len(), 1);
                assert_eq!(inst.binding.len(), 2);
            }
            _ => panic!(),
        }
        assert!(check(&d, &spec).ok);
    }

    #[test]
    fn labels_discharges_and_paths() {
        let spec = reference_calculus();
        let text = r#"
            ; comment
            (imp-i "p -> p" :discharge x
              (hyp "p" :label x))
        "#;
        let d = parse_proof(text, &spec).unwrap();
        assert_eq!(d.discharged, vec!["x".to_string()]);
        assert!(check(&d, &spec).ok);
        let text = "(tree-e-extract-ground \"r, s |> r & s\" :index 0 :path g0\n  (hyp \"((r, s *> r & s) *> ~~(r & s)) [~t] |> ~~(r & s) | t\"))\n";
        let d = parse_proof(text, &spec).unwrap();
        assert_eq!(d.rule, RuleTag::TreeExtract(vec![EntrySel::ground(0), EntrySel::ground(0)]));
        assert_eq!(print_proof(&d), text);
        assert!(check(&d, &spec).ok);
    }

    #[test]
    fn errors() {
        let spec = reference_calculus();
        assert!(parse_proof("(frob \"p\")", &spec).is_err());
        assert!(parse_proof("(hyp \"p &\")", &spec).is_err());
        assert!(parse_proof("(imm-e-ground \"p\" (hyp \"p |> q\"))", &spec).is_err());
        assert!(parse_proof("(hyp \"p\") (hyp \"q\")", &spec).is_err());
        assert!(parse_proof("(hyp \"p\"", &spec).is_err());
        let e = parse_proof("\n\n(hyp \"p\" :bogus 1)", &spec).unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn unknown_schema_is_a_check_failure() {
        let spec = reference_calculus();
        let d = parse_proof("(grounding \"p & q\" :schema nope (hyp \"p\") (hyp \"q\"))", &spec).unwrap();
        assert!(!check(&d, &spec).ok);
    }
}
