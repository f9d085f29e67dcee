use super::{Formula, GroundEntry};

// Binding strength: 4 atoms, bot and negation; 3 `&`; 2 `|`; 1 `->`; 0 claims.
fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) | Formula::Bottom | Formula::Neg(_) => 4,
        Formula::And(..) => 3,
        Formula::Or(..) => 2,
        Formula::Imp(..) => 1,
        Formula::Immediate { .. } | Formula::Mediate { .. } => 0,
    }
}

/// Canonical surface syntax; `parse_formula(&print_formula(f)) == Ok(f)`.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, 0, &mut out);
    out
}

fn write(f: &Formula, min: u8, out: &mut String) {
    let paren = strength(f) < min;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Atom(name) => out.push_str(name),
        Formula::Bottom => out.push_str("bot"),
        Formula::Neg(g) => {
            out.push('~');
            write(g, 4, out);
        }
        Formula::And(l, r) => binary(l, " & ", r, 3, 4, out),
        Formula::Or(l, r) => binary(l, " | ", r, 2, 3, out),
        Formula::Imp(l, r) => binary(l, " -> ", r, 2, 1, out),
        Formula::Immediate { grounds, conditions, consequence } => claim(grounds, conditions, " |> ", consequence, out),
        Formula::Mediate { grounds, conditions, consequence } => {
            write_list(grounds.iter(), out, |g, out| write(g, 1, out));
            if !conditions.is_empty() {
                out.push_str(" [");
                write_list(conditions.iter(), out, |g, out| write(g, 1, out));
                out.push(']');
            }
            out.push_str(" >> ");
            write(consequence, 1, out);
        }
    }
    if paren {
        out.push(')');
    }
}

fn binary(l: &Formula, op: &str, r: &Formula, lmin: u8, rmin: u8, out: &mut String) {
    write(l, lmin, out);
    out.push_str(op);
    write(r, rmin, out);
}

fn claim(grounds: &[GroundEntry], conditions: &[GroundEntry], op: &str, consequence: &Formula, out: &mut String) {
    write_list(grounds.iter(), out, write_entry);
    if !conditions.is_empty() {
        out.push_str(" [");
        write_list(conditions.iter(), out, write_entry);
        out.push(']');
    }
    out.push_str(op);
    write(consequence, 1, out);
}

fn write_entry(e: &GroundEntry, out: &mut String) {
    match e {
        GroundEntry::Plain(f) => write(f, 1, out),
        GroundEntry::Tree { grounds, conditions, consequence } => {
            out.push('(');
            claim(grounds, conditions, " *> ", consequence, out);
            out.push(')');
        }
    }
}

fn write_list<'a, T: 'a>(items: impl Iterator<Item = &'a T>, out: &mut String, each: impl Fn(&T, &mut String)) {
    for (i, item) in items.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        each(item, out);
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    #[test]
    fn canonical_strings() {
        for s in [
            "p",
            "p, q |> p & q",
            "p [~q] |> p | q",
            "((r, s *> r & s) *> ~~(r & s)) [~t] |> ~~(r & s) | t",
            "(p, q *> p & q), (r, ~s *> r | s) |> p & q & (r | s)",
            "p & (q | r) -> s",
            "(p -> q) -> r",
            "~(p & q)",
            "(p |> q) & r",
            "p, t >> u",
            "p [q, r] >> (s >> t)",
        ] {
            let f = parse_formula(s).unwrap();
            assert_eq!(print_formula(&f), s);
        }
    }

    #[test]
    fn normalizes_spacing() {
        let f = parse_formula("p,q|>p&q").unwrap();
        assert_eq!(print_formula(&f), "p, q |> p & q");
    }
}
