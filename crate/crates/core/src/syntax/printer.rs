use super::Formula;

/// Canonical text of a formula. Binary connectives are always
/// parenthesised, implications and `top`/`bot` are re-sugared, and the
/// output parses back to the same tree.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn write(f: &Formula, out: &mut String) {
    if f.is_top() {
        out.push_str("top");
        return;
    }
    // `~(a & top)` stays unsugared: its consequent would be the bare encoding of top
    if let Some((a, b)) = f.as_implication().filter(|(_, b)| !Formula::not((*b).clone()).is_top()) {
        out.push('(');
        write(a, out);
        out.push_str(" -> ");
        write(b, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::Not(inner) if inner.is_top() => out.push_str("bot"),
        Formula::Not(inner) => {
            out.push('~');
            write(inner, out);
        }
        Formula::And(a, b) => {
            out.push('(');
            write(a, out);
            out.push_str(" & ");
            write(b, out);
            out.push(')');
        }
        Formula::K(i, body) => {
            out.push_str("K[");
            out.push_str(i.name());
            out.push_str("] ");
            write(body, out);
        }
        Formula::Ky(i, body) => {
            out.push_str("Ky[");
            out.push_str(i.name());
            out.push_str("] ");
            write(body, out);
        }
        Formula::KyCond(i, cond, body) => {
            out.push_str("Ky[");
            out.push_str(i.name());
            out.push_str("](");
            write(cond, out);
            out.push_str(", ");
            write(body, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, Agent};
    use super::*;

    #[test]
    fn resugars_implication() {
        let f = Formula::not(Formula::and(Formula::prop("p"), Formula::not(Formula::prop("q"))));
        assert_eq!(print_formula(&f), "(p -> q)");
    }

    #[test]
    fn nested_modalities() {
        let f = Formula::k(Agent::new("i"), Formula::ky(Agent::new("j"), Formula::prop("p")));
        assert_eq!(print_formula(&f), "K[i] Ky[j] p");
    }

    #[test]
    fn conjunction() {
        let f = Formula::and(Formula::prop("p"), Formula::prop("q"));
        assert_eq!(print_formula(&f), "(p & q)");
    }

    #[test]
    fn disjunction_prints_as_implication() {
        let f = parse_formula("p | q").unwrap();
        assert_eq!(print_formula(&f), "(~p -> q)");
        assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
    }

    #[test]
    fn constants_and_conditional() {
        assert_eq!(print_formula(&Formula::top()), "top");
        let f = Formula::not(Formula::and(Formula::prop("p"), Formula::top()));
        assert_eq!(print_formula(&f), "~(p & top)");
        assert_eq!(print_formula(&Formula::bot()), "bot");
        assert_eq!(print_formula(&Formula::not(Formula::bot())), "~bot");
        let c = parse_formula("Ky[i](q, (p & r))").unwrap();
        assert_eq!(print_formula(&c), "Ky[i](q, (p & r))");
    }
}
