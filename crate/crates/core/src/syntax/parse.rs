use thiserror::Error;

use super::{Formula, GroundEntry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("grammar violation at {position}: {message}")]
    GrammarViolation { position: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::GrammarViolation { position, .. } => *position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Upper(String),
    Bot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Imm,
    Med,
    Tree,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    End,
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Ident(_) => "atom",
        Tok::Upper(_) => "metavariable",
        Tok::Bot => "`bot`",
        Tok::Tilde => "`~`",
        Tok::Amp => "`&`",
        Tok::Bar => "`|`",
        Tok::Arrow => "`->`",
        Tok::Imm => "`|>`",
        Tok::Med => "`>>`",
        Tok::Tree => "`*>`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::LBrack => "`[`",
        Tok::RBrack => "`]`",
        Tok::Comma => "`,`",
        Tok::End => "end of input",
    }
}

fn lex(text: &str, metavars: bool) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = bytes.get(i + 1).copied();
        let tok = match c {
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' if two == Some(b'>') => {
                i += 1;
                Tok::Imm
            }
            b'|' => Tok::Bar,
            b'-' if two == Some(b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'>' if two == Some(b'>') => {
                i += 1;
                Tok::Med
            }
            b'*' if two == Some(b'>') => {
                i += 1;
                Tok::Tree
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            c if c.is_ascii_lowercase() || (metavars && c.is_ascii_uppercase()) => {
                let mut j = i + 1;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                    && (metavars || !bytes[j].is_ascii_uppercase())
                {
                    j += 1;
                }
                let word = &text[i..j];
                i = j - 1;
                if c.is_ascii_uppercase() {
                    Tok::Upper(word.to_string())
                } else if word == "bot" {
                    Tok::Bot
                } else {
                    Tok::Ident(word.to_string())
                }
            }
            _ => {
                return Err(ParseError::Syntax { position: start, expected: "a token".into() });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Result of parsing a parenthesized group, which may turn out to be a tree
/// entry rather than a formula.
enum Group {
    Formula(Formula),
    Tree(GroundEntry),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// A primary already parsed by lookahead, consumed by the next `unary`.
    pending: Option<Formula>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(describe(&want)))
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax { position: self.offset(), expected: format!("{expected}, found {}", describe(self.peek())) }
    }

    fn violation(&self, position: usize, message: &str) -> ParseError {
        ParseError::GrammarViolation { position, message: message.to_string() }
    }

    fn top(&mut self) -> Result<Formula, ParseError> {
        let start = self.offset();
        let (grounds, conditions) = self.entries_and_cond()?;
        let f = match self.peek() {
            Tok::Imm => {
                self.bump();
                let consequence = self.prop()?;
                Formula::Immediate { grounds, conditions, consequence: Box::new(consequence) }
            }
            Tok::Med => {
                let at = self.offset();
                self.bump();
                let consequence = self.prop()?;
                mediate(grounds, conditions, consequence).map_err(|m| self.violation(at, m))?
            }
            _ => {
                if grounds.len() == 1 && conditions.is_empty() {
                    match grounds.into_iter().next().unwrap() {
                        GroundEntry::Plain(f) => f,
                        GroundEntry::Tree { .. } => return Err(self.violation(start, "a tree entry is not a formula")),
                    }
                } else {
                    return Err(self.syntax("`|>` or `>>`"));
                }
            }
        };
        if *self.peek() != Tok::End {
            return Err(self.syntax("end of input"));
        }
        Ok(f)
    }

    fn entries_and_cond(&mut self) -> Result<(Vec<GroundEntry>, Vec<GroundEntry>), ParseError> {
        let grounds = self.entry_list()?;
        let conditions = if *self.peek() == Tok::LBrack {
            self.bump();
            let c = self.entry_list()?;
            self.expect(Tok::RBrack)?;
            c
        } else {
            Vec::new()
        };
        Ok((grounds, conditions))
    }

    fn entry_list(&mut self) -> Result<Vec<GroundEntry>, ParseError> {
        let mut out = vec![self.entry()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.entry()?);
        }
        Ok(out)
    }

    fn entry(&mut self) -> Result<GroundEntry, ParseError> {
        if *self.peek() == Tok::LParen {
            match self.group()? {
                Group::Tree(e) => Ok(e),
                Group::Formula(f) => {
                    self.pending = Some(f);
                    Ok(GroundEntry::Plain(self.prop()?))
                }
            }
        } else {
            Ok(GroundEntry::Plain(self.prop()?))
        }
    }

    fn group(&mut self) -> Result<Group, ParseError> {
        let open = self.offset();
        self.expect(Tok::LParen)?;
        let (grounds, conditions) = self.entries_and_cond()?;
        let g = match self.peek() {
            Tok::Tree => {
                self.bump();
                let consequence = Box::new(self.prop()?);
                Group::Tree(GroundEntry::Tree { grounds, conditions, consequence })
            }
            Tok::Imm => {
                self.bump();
                let consequence = Box::new(self.prop()?);
                Group::Formula(Formula::Immediate { grounds, conditions, consequence })
            }
            Tok::Med => {
                let at = self.offset();
                self.bump();
                let consequence = self.prop()?;
                Group::Formula(mediate(grounds, conditions, consequence).map_err(|m| self.violation(at, m))?)
            }
            Tok::RParen if grounds.len() == 1 && conditions.is_empty() => match grounds.into_iter().next().unwrap() {
                GroundEntry::Plain(f) => Group::Formula(f),
                GroundEntry::Tree { .. } => return Err(self.violation(open + 1, "a tree entry is not a formula")),
            },
            _ => return Err(self.syntax("`*>`, `|>` or `>>`")),
        };
        self.expect(Tok::RParen)?;
        Ok(g)
    }

    fn prop(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.prop()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if let Some(f) = self.pending.take() {
            return Ok(f);
        }
        let at = self.offset();
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::Ident(name) | Tok::Upper(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => match self.group()? {
                Group::Formula(f) => Ok(f),
                Group::Tree(_) => Err(self.violation(at, "a tree entry is not a formula")),
            },
            _ => Err(self.syntax("a formula")),
        }
    }
}

fn mediate(
    grounds: Vec<GroundEntry>,
    conditions: Vec<GroundEntry>,
    consequence: Formula,
) -> Result<Formula, &'static str> {
    let plain = |v: Vec<GroundEntry>| -> Result<Vec<Formula>, &'static str> {
        v.into_iter()
            .map(|e| match e {
                GroundEntry::Plain(f) => Ok(f),
                GroundEntry::Tree { .. } => Err("tree entry inside a mediate claim"),
            })
            .collect()
    };
    Ok(Formula::Mediate {
        grounds: plain(grounds)?,
        conditions: plain(conditions)?,
        consequence: Box::new(consequence),
    })
}

fn run(text: &str, metavars: bool) -> Result<Formula, ParseError> {
    let toks = lex(text, metavars)?;
    let mut p = Parser { toks, pos: 0, pending: None };
    p.top()
}

/// Parses the ASCII surface syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    run(text, false)
}

/// Like [`parse_formula`] but also accepts uppercase identifiers, returned
/// as atoms with uppercase names.
pub(crate) fn parse_with_metavars(text: &str) -> Result<Formula, ParseError> {
    run(text, true)
}
