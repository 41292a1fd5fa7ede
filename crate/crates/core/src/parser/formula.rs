use crate::syntax::{is_name_constant, Formula, Sequent, Signature, Substitution, SymbolKind, Term};

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind, SourceSpan, INPUT};

const KEYWORDS: &[&str] = &["forall", "exists", "false"];

pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn lex(text: &str, origin: &SourceSpan) -> Result<Self, ParseError> {
        Ok(Cursor::new(tokenize(text, origin)?))
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    pub fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    pub fn eat_word(&mut self, word: &str) -> bool {
        if self.at_word(word) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(ParseErrorKind::Syntax, self.span(), message)
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn expect_word(&mut self, word: &str) -> Result<Token, ParseError> {
        if self.at_word(word) {
            Ok(self.next())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let t = self.next();
                Ok((s, t.span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn number(&mut self, what: &str) -> Result<(usize, SourceSpan), ParseError> {
        let span = self.span();
        let (s, span2) = self.ident(what)?;
        s.parse::<usize>()
            .map(|n| (n, span2))
            .map_err(|_| ParseError::new(ParseErrorKind::Syntax, span, format!("expected {what}, found `{s}`")))
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

fn arity_error(span: SourceSpan, symbol: &str, expected: usize, found: usize) -> ParseError {
    ParseError::new(
        ParseErrorKind::ArityMismatch,
        span,
        format!("`{symbol}` expects {expected} argument(s), found {found}"),
    )
}

fn undeclared(span: SourceSpan, symbol: &str) -> ParseError {
    ParseError::new(
        ParseErrorKind::UndeclaredSymbol,
        span,
        format!("undeclared symbol `{symbol}`"),
    )
}

pub(crate) fn term(c: &mut Cursor, sig: &Signature) -> Result<Term, ParseError> {
    let (name, span) = c.ident("a term")?;
    if *c.peek() == Tok::LParen {
        let args = term_args(c, sig)?;
        return match sig.lookup(&name) {
            Some(SymbolKind::Function(k)) if k == args.len() => Ok(Term::App(name, args)),
            Some(SymbolKind::Function(k)) => Err(arity_error(span, &name, k, args.len())),
            Some(SymbolKind::Constant) => Err(arity_error(span, &name, 0, args.len())),
            Some(_) => Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("predicate `{name}` used as a function"),
            )),
            None => Err(undeclared(span, &name)),
        };
    }
    if let Some(k) = is_name_constant(&name) {
        return if k >= 1 && k <= sig.name_budget() {
            Ok(Term::Name(k))
        } else {
            Err(ParseError::new(
                ParseErrorKind::UndeclaredSymbol,
                span,
                format!("name constant `{name}` exceeds the budget of {}", sig.name_budget()),
            ))
        };
    }
    match sig.lookup(&name) {
        Some(SymbolKind::Constant) => Ok(Term::Const(name)),
        Some(SymbolKind::Function(k)) => Err(arity_error(span, &name, k, 0)),
        Some(_) => Err(ParseError::new(
            ParseErrorKind::Syntax,
            span,
            format!("predicate `{name}` used as a term"),
        )),
        None if KEYWORDS.contains(&name.as_str()) => Err(ParseError::new(
            ParseErrorKind::Syntax,
            span,
            format!("keyword `{name}` used as a term"),
        )),
        None if name.starts_with(|ch: char| ch.is_ascii_digit()) => Err(undeclared(span, &name)),
        None => Ok(Term::Var(name)),
    }
}

fn term_args(c: &mut Cursor, sig: &Signature) -> Result<Vec<Term>, ParseError> {
    c.expect(Tok::LParen)?;
    let mut args = Vec::new();
    if c.eat(&Tok::RParen) {
        return Ok(args);
    }
    loop {
        args.push(term(c, sig)?);
        if c.eat(&Tok::RParen) {
            return Ok(args);
        }
        c.expect(Tok::Comma)?;
    }
}

/// Predicate arguments; a bare 0-ary predicate takes none.
fn pred_args(
    c: &mut Cursor,
    sig: &Signature,
    name: &str,
    arity: usize,
    span: SourceSpan,
) -> Result<Vec<Term>, ParseError> {
    let args = if *c.peek() == Tok::LParen {
        term_args(c, sig)?
    } else {
        Vec::new()
    };
    if args.len() != arity {
        return Err(arity_error(span, name, arity, args.len()));
    }
    Ok(args)
}

pub(crate) fn formula(c: &mut Cursor, sig: &Signature) -> Result<Formula, ParseError> {
    let lhs = disjunction(c, sig)?;
    if c.eat(&Tok::Arrow) {
        let rhs = formula(c, sig)?;
        return Ok(Formula::imp(lhs, rhs));
    }
    Ok(lhs)
}

fn disjunction(c: &mut Cursor, sig: &Signature) -> Result<Formula, ParseError> {
    let mut acc = conjunction(c, sig)?;
    while c.eat(&Tok::Or) {
        let rhs = conjunction(c, sig)?;
        acc = Formula::or(acc, rhs);
    }
    Ok(acc)
}

fn conjunction(c: &mut Cursor, sig: &Signature) -> Result<Formula, ParseError> {
    let mut acc = unary(c, sig)?;
    while c.eat(&Tok::And) {
        let rhs = unary(c, sig)?;
        acc = Formula::and(acc, rhs);
    }
    Ok(acc)
}

fn unary(c: &mut Cursor, sig: &Signature) -> Result<Formula, ParseError> {
    if c.eat(&Tok::Tilde) {
        return Ok(Formula::not(unary(c, sig)?));
    }
    if c.eat(&Tok::LParen) {
        let f = formula(c, sig)?;
        c.expect(Tok::RParen)?;
        return Ok(f);
    }
    if c.at_word("forall") || c.at_word("exists") {
        let universal = c.at_word("forall");
        c.next();
        let mut vars = Vec::new();
        loop {
            let (x, span) = c.ident("a bound variable")?;
            if sig.lookup(&x).is_some() || is_name_constant(&x).is_some() || KEYWORDS.contains(&x.as_str()) {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    span,
                    format!("`{x}` cannot be bound"),
                ));
            }
            vars.push(x);
            if c.eat(&Tok::Dot) {
                break;
            }
        }
        let body = formula(c, sig)?;
        return Ok(vars.into_iter().rev().fold(body, |acc, x| {
            if universal {
                Formula::forall(x, acc)
            } else {
                Formula::exists(x, acc)
            }
        }));
    }
    if c.eat_word("false") {
        return Ok(Formula::False);
    }
    atom(c, sig)
}

fn atom(c: &mut Cursor, sig: &Signature) -> Result<Formula, ParseError> {
    if let Tok::Ident(name) = c.peek().clone() {
        match sig.lookup(&name) {
            Some(SymbolKind::Ordinary(k)) => {
                let span = c.next().span;
                let args = pred_args(c, sig, &name, k, span)?;
                return Ok(Formula::Rel(name, args));
            }
            Some(SymbolKind::Inductive(_)) => {
                let span = c.next().span;
                let k = sig.inductive_arity(sig.inductive_index(&name).unwrap_or(0));
                let args = pred_args(c, sig, &name, k, span)?;
                return Ok(Formula::Ind(name, args));
            }
            None if *c.peek_at(1) == Tok::LParen && is_name_constant(&name).is_none() => {
                // unknown whether a predicate or a function was meant
                let span = c.span();
                return Err(undeclared(span, &name));
            }
            _ => {}
        }
    } else {
        return Err(c.unexpected("a formula"));
    }
    let lhs = term(c, sig)?;
    if !c.eat(&Tok::Equals) {
        return Err(c.unexpected("`=`"));
    }
    let rhs = term(c, sig)?;
    Ok(Formula::eq(lhs, rhs))
}

/// True at tokens that may end a sequent side inside a larger file.
fn at_sequent_end(c: &Cursor) -> bool {
    matches!(c.peek(), Tok::Eof | Tok::Semi) || c.at_word("by") || c.at_word("companion")
}

pub(crate) fn sequent(c: &mut Cursor, sig: &Signature) -> Result<Sequent, ParseError> {
    let mut ante = Vec::new();
    if *c.peek() != Tok::Turnstile {
        loop {
            ante.push(formula(c, sig)?);
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
    }
    c.expect(Tok::Turnstile)?;
    let mut succ = Vec::new();
    if !at_sequent_end(c) {
        loop {
            succ.push(formula(c, sig)?);
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
    }
    Ok(Sequent::new(ante, succ))
}

pub(crate) fn substitution(c: &mut Cursor, sig: &Signature) -> Result<Substitution, ParseError> {
    c.expect(Tok::LBracket)?;
    let mut theta = Substitution::new();
    if c.eat(&Tok::RBracket) {
        return Ok(theta);
    }
    loop {
        let (x, span) = c.ident("a variable")?;
        if sig.lookup(&x).is_some() || is_name_constant(&x).is_some() {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("`{x}` is not a variable"),
            ));
        }
        if theta.get(&x).is_some() {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("variable `{x}` bound twice"),
            ));
        }
        c.expect(Tok::Assign)?;
        theta.insert(x, term(c, sig)?);
        if c.eat(&Tok::RBracket) {
            return Ok(theta);
        }
        c.expect(Tok::Comma)?;
    }
}

fn whole<T>(
    text: &str,
    sig: &Signature,
    f: impl FnOnce(&mut Cursor, &Signature) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut c = Cursor::lex(text, &SourceSpan::start(INPUT))?;
    let v = f(&mut c, sig)?;
    c.expect_end()?;
    Ok(v)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    whole(text, sig, term)
}

/// Parses a formula. `~` binds tightest, then `/\`, `\/`, and `->`
/// (right-associative); a quantifier body extends as far as possible.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    whole(text, sig, formula)
}

pub fn parse_sequent(text: &str, sig: &Signature) -> Result<Sequent, ParseError> {
    whole(text, sig, sequent)
}

/// Parses `[x:=t, y:=u]`.
pub fn parse_substitution(text: &str, sig: &Signature) -> Result<Substitution, ParseError> {
    whole(text, sig, substitution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::example_nat();
        s.add_ordinary("a", 0).unwrap();
        s.add_ordinary("b", 0).unwrap();
        s.add_ordinary("c", 0).unwrap();
        s.add_ordinary("Q", 2).unwrap();
        s.set_name_budget(3);
        s
    }

    #[test]
    fn precedence_and_associativity() {
        let s = sig();
        let f = parse_formula("a /\\ b \\/ c", &s).unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::and(Formula::rel("a", vec![]), Formula::rel("b", vec![])),
                Formula::rel("c", vec![])
            )
        );
        let g = parse_formula("a -> b -> c", &s).unwrap();
        assert_eq!(g.to_string(), "a -> b -> c");
        assert!(matches!(g, Formula::Imp(_, ref r) if matches!(**r, Formula::Imp(..))));
        let h = parse_formula("~a /\\ b", &s).unwrap();
        assert!(matches!(h, Formula::And(..)));
    }

    #[test]
    fn quantifier_body_extends_right() {
        let s = sig();
        let f = parse_formula("forall x. N(x) -> N(s(x))", &s).unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::imp(
                    Formula::ind("N", vec![Term::var("x")]),
                    Formula::ind("N", vec![Term::app1("s", Term::var("x"))])
                )
            )
        );
        let g = parse_formula("forall x y. Q(x, y)", &s).unwrap();
        assert_eq!(g.to_string(), "forall x. forall y. Q(x, y)");
    }

    #[test]
    fn equality_and_name_constants() {
        let s = sig();
        let f = parse_formula("s(c_2) = c_3", &s).unwrap();
        assert_eq!(f, Formula::eq(Term::app1("s", Term::Name(2)), Term::Name(3)));
        let e = parse_formula("c_4 = 0", &s).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredSymbol);
    }

    #[test]
    fn errors_carry_kinds_and_spans() {
        let s = sig();
        let e = parse_formula("N(x, y)", &s).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ArityMismatch);
        assert_eq!((e.span.line, e.span.column), (1, 1));
        let e = parse_formula("N(f(x))", &s).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredSymbol);
        assert_eq!(e.span.column, 3);
        let e = parse_formula("N(x) /\\", &s).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = parse_formula("x", &s).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn sequents_with_empty_sides() {
        let s = sig();
        assert_eq!(parse_sequent("N(x) |- N(x)", &s).unwrap().to_string(), "N(x) |- N(x)");
        assert_eq!(parse_sequent("|-", &s).unwrap(), Sequent::default());
        let q = parse_sequent("N(y), N(x) |-", &s).unwrap();
        assert_eq!(q.to_string(), "N(x), N(y) |-");
    }

    #[test]
    fn printing_round_trips() {
        let s = sig();
        for text in [
            "~(a /\\ b) \\/ c",
            "(a -> b) -> c",
            "forall x. exists y. ~y = s(x) /\\ N(y)",
            "(forall x. N(x)) /\\ a",
            "~~false",
            "~(forall x. N(x))",
        ] {
            let f = parse_formula(text, &s).unwrap();
            assert_eq!(parse_formula(&f.to_string(), &s).unwrap(), f, "{text}");
        }
    }

    #[test]
    fn substitutions() {
        let s = sig();
        let t = parse_substitution("[x:=s(y), y:=0]", &s).unwrap();
        assert_eq!(t.to_string(), "[x:=s(y), y:=0]");
        assert!(parse_substitution("[x:=0, x:=0]", &s).is_err());
    }
}
