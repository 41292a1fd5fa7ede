use std::fmt::Write as _;

use crate::syntax::{Atom, ProductionRule, Signature, SymbolKind, SyntaxError, Theory};

use super::formula::{term, Cursor};
use super::lexer::Tok;
use super::{ParseError, ParseErrorKind, SourceSpan, INPUT};

fn syntax_error(e: SyntaxError, span: SourceSpan) -> ParseError {
    let kind = match e {
        SyntaxError::DuplicateSymbol(_) => ParseErrorKind::DuplicateSymbol,
        SyntaxError::UndeclaredSymbol(_) => ParseErrorKind::UndeclaredSymbol,
        SyntaxError::ArityMismatch { .. } => ParseErrorKind::ArityMismatch,
        SyntaxError::NotInductive(_) => ParseErrorKind::NotInductive,
        _ => ParseErrorKind::Syntax,
    };
    ParseError::new(kind, span, e.to_string())
}

fn declarations(c: &mut Cursor) -> Result<Signature, ParseError> {
    let mut sig = Signature::new();
    c.expect_word("sig")?;
    while !c.at_word("rules") && *c.peek() != Tok::Eof {
        let (kw, kw_span) = c.ident("a declaration")?;
        match kw.as_str() {
            "const" => loop {
                let (name, span) = c.ident("a constant name")?;
                sig.add_constant(name).map_err(|e| syntax_error(e, span))?;
                if !c.eat(&Tok::Comma) {
                    break;
                }
            },
            "func" | "pred" | "ind" => {
                let (name, span) = c.ident("a symbol name")?;
                let (arity, _) = c.number("an arity")?;
                let added = match kw.as_str() {
                    "func" => sig.add_function(name, arity),
                    "pred" => sig.add_ordinary(name, arity),
                    _ => sig.add_inductive(name, arity),
                };
                added.map_err(|e| syntax_error(e, span))?;
            }
            "names" => {
                let (budget, _) = c.number("a name-constant budget")?;
                sig.set_name_budget(budget);
            }
            _ => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    kw_span,
                    format!("unknown declaration `{kw}`"),
                ))
            }
        }
        c.expect(Tok::Semi)?;
    }
    Ok(sig)
}

fn rule_atom(c: &mut Cursor, sig: &Signature) -> Result<(Atom, SymbolKind, SourceSpan), ParseError> {
    let (pred, span) = c.ident("a predicate")?;
    let kind = sig.lookup(&pred).ok_or_else(|| {
        ParseError::new(
            ParseErrorKind::UndeclaredSymbol,
            span.clone(),
            format!("undeclared symbol `{pred}`"),
        )
    })?;
    let arity = match kind {
        SymbolKind::Ordinary(k) => k,
        SymbolKind::Inductive(i) => sig.inductive_arity(i),
        _ => {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("`{pred}` is not a predicate"),
            ))
        }
    };
    let mut args = Vec::new();
    if c.eat(&Tok::LParen) && !c.eat(&Tok::RParen) {
        loop {
            args.push(term(c, sig)?);
            if c.eat(&Tok::RParen) {
                break;
            }
            c.expect(Tok::Comma)?;
        }
    }
    if args.len() != arity {
        return Err(ParseError::new(
            ParseErrorKind::ArityMismatch,
            span,
            format!("`{pred}` expects {arity} argument(s), found {}", args.len()),
        ));
    }
    Ok((Atom::new(pred, args), kind, span))
}

fn production_rule(c: &mut Cursor, sig: &Signature) -> Result<(ProductionRule, SourceSpan), ParseError> {
    c.expect_word("rule")?;
    let (label, label_span) = c.ident("a rule label")?;
    c.expect(Tok::Colon)?;
    let mut ordinary = Vec::new();
    let mut inductive = Vec::new();
    if *c.peek() != Tok::FatArrow {
        loop {
            let (atom, kind, _) = rule_atom(c, sig)?;
            match kind {
                SymbolKind::Inductive(_) => inductive.push(atom),
                _ => ordinary.push(atom),
            }
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
    }
    c.expect(Tok::FatArrow)?;
    let (head, kind, span) = rule_atom(c, sig)?;
    if !matches!(kind, SymbolKind::Inductive(_)) {
        return Err(ParseError::new(
            ParseErrorKind::NotInductive,
            span,
            format!("rule head `{}` is not an inductive predicate", head.pred),
        ));
    }
    c.expect(Tok::Semi)?;
    Ok((ProductionRule::new(label, head, ordinary, inductive), label_span))
}

/// Parses a `.folid` file: a `sig` block of declarations followed by an
/// optional `rules` block.
pub fn parse_signature(text: &str) -> Result<Theory, ParseError> {
    let mut c = Cursor::lex(text, &SourceSpan::start(INPUT))?;
    let sig = declarations(&mut c)?;
    let mut rules = Vec::new();
    let mut spans = Vec::new();
    if c.eat_word("rules") {
        while *c.peek() != Tok::Eof {
            let (rule, span) = production_rule(&mut c, &sig)?;
            rules.push(rule);
            spans.push(span);
        }
    }
    c.expect_end()?;
    Theory::new(sig, rules.clone()).map_err(|e| {
        let span = match &e {
            SyntaxError::DuplicateSymbol(l) | SyntaxError::NameInRule(l) => rules
                .iter()
                .zip(&spans)
                .filter(|(r, _)| &r.label == l)
                .map(|(_, s)| s.clone())
                .next_back(),
            _ => None,
        };
        syntax_error(e, span.unwrap_or_else(|| SourceSpan::start(INPUT)))
    })
}

/// Prints a theory in the `.folid` format accepted by [`parse_signature`].
pub fn print_signature(theory: &Theory) -> String {
    let sig = theory.signature();
    let mut out = String::from("sig\n");
    for c in sig.constants() {
        let _ = writeln!(out, "  const {c};");
    }
    for (f, k) in sig.functions() {
        let _ = writeln!(out, "  func {f} {k};");
    }
    for (q, k) in sig.ordinary_preds() {
        let _ = writeln!(out, "  pred {q} {k};");
    }
    for (p, k) in sig.inductive_preds() {
        let _ = writeln!(out, "  ind {p} {k};");
    }
    if sig.name_budget() > 0 {
        let _ = writeln!(out, "  names {};", sig.name_budget());
    }
    if !theory.rules().is_empty() {
        out.push_str("rules\n");
        for r in theory.rules() {
            let _ = writeln!(out, "  {r}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_the_successor_system() {
        let th = parse_signature("sig const 0; func s 1; ind N 1; rules rule z: => N(0); rule sc: N(x) => N(s(x));")
            .unwrap();
        assert_eq!(th, Theory::example_nat());
    }

    #[test]
    fn arity_mismatch_in_rule() {
        let e = parse_signature("sig ind N 1; rules rule bad: => N(x,y);").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ArityMismatch);
        assert_eq!(e.span.column, 33);
    }

    #[test]
    fn undeclared_function_in_rule() {
        let e = parse_signature("sig pred Q 1; ind P 1; rules rule r: Q(x), P(x) => P(s(x));").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredSymbol);
        assert!(e.message.contains("`s`"));
    }

    #[test]
    fn duplicate_and_head_errors() {
        let e = parse_signature("sig const a; pred a 1;").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateSymbol);
        assert_eq!(e.span.column, 19);
        let e = parse_signature("sig pred Q 1; ind P 1; rules rule r: P(x) => Q(x);").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NotInductive);
        let e = parse_signature("sig ind P 0; rules rule r: => P; rule r: P => P;").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateSymbol);
    }

    #[test]
    fn print_then_parse_is_identity() {
        let text = "# mutual\nsig const 0; func s 1; pred Q 2; ind E 1; ind O 1; names 4;\n\
                    rules rule e0: => E(0); rule es: O(x), Q(x, x) => E(s(x)); rule os: E(x) => O(s(x));";
        let th = parse_signature(text).unwrap();
        assert_eq!(parse_signature(&print_signature(&th)).unwrap(), th);
        assert_eq!(th.signature().name_budget(), 4);
    }
}
