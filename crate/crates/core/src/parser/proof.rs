use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::kernel::{GraphError, NodeKind, ProofGraph, ProofNode, PropRule, RuleInstance};
use crate::syntax::{Formula, Sequent, Signature, Term};

use super::formula::{formula, sequent, substitution, term, Cursor};
use super::lexer::Tok;
use super::{ParseError, ParseErrorKind, SourceSpan, INPUT};

#[derive(Clone, Debug)]
enum Value {
    Str(String, SourceSpan),
    Word(String, SourceSpan),
    List(Vec<Value>, SourceSpan),
}

impl Value {
    fn span(&self) -> &SourceSpan {
        match self {
            Value::Str(_, s) | Value::Word(_, s) | Value::List(_, s) => s,
        }
    }
}

fn value(c: &mut Cursor) -> Result<Value, ParseError> {
    let span = c.span();
    match c.peek().clone() {
        Tok::Str(s) => {
            c.next();
            Ok(Value::Str(s, span))
        }
        Tok::Ident(w) => {
            c.next();
            Ok(Value::Word(w, span))
        }
        Tok::LBracket => {
            c.next();
            let mut items = Vec::new();
            if !c.eat(&Tok::RBracket) {
                loop {
                    items.push(value(c)?);
                    if c.eat(&Tok::RBracket) {
                        break;
                    }
                    c.expect(Tok::Comma)?;
                }
            }
            Ok(Value::List(items, span))
        }
        _ => Err(c.unexpected("a parameter value")),
    }
}

/// Parses the contents of a quoted parameter with positions inside the file.
fn inner<T>(
    text: &str,
    span: &SourceSpan,
    sig: &Signature,
    f: impl FnOnce(&mut Cursor, &Signature) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let origin = SourceSpan {
        column: span.column + 1,
        ..span.clone()
    };
    let mut c = Cursor::lex(text, &origin)?;
    let v = f(&mut c, sig)?;
    c.expect_end()?;
    Ok(v)
}

struct Params {
    rule_span: SourceSpan,
    rule: String,
    map: BTreeMap<String, (Value, SourceSpan)>,
}

impl Params {
    fn bad(&self, span: &SourceSpan, message: String) -> ParseError {
        ParseError::new(
            ParseErrorKind::Syntax,
            span.clone(),
            format!("{}: {message}", self.rule),
        )
    }

    fn allow(&self, keys: &[&str]) -> Result<(), ParseError> {
        for (k, (_, span)) in &self.map {
            if !keys.contains(&k.as_str()) {
                return Err(self.bad(span, format!("unexpected parameter `{k}`")));
            }
        }
        Ok(())
    }

    fn string(&self, key: &str) -> Result<Option<(String, SourceSpan)>, ParseError> {
        match self.map.get(key) {
            None => Ok(None),
            Some((Value::Str(s, span), _)) => Ok(Some((s.clone(), span.clone()))),
            Some((v, _)) => Err(self.bad(v.span(), format!("`{key}` must be a quoted string"))),
        }
    }

    fn required_string(&self, key: &str) -> Result<(String, SourceSpan), ParseError> {
        self.string(key)?
            .ok_or_else(|| self.bad(&self.rule_span, format!("missing parameter `{key}`")))
    }

    fn formula(&self, key: &str, sig: &Signature) -> Result<Formula, ParseError> {
        let (s, span) = self.required_string(key)?;
        inner(&s, &span, sig, formula)
    }

    fn term(&self, key: &str, sig: &Signature) -> Result<Term, ParseError> {
        let (s, span) = self.required_string(key)?;
        inner(&s, &span, sig, term)
    }

    fn word(&self, key: &str) -> Result<Option<String>, ParseError> {
        match self.map.get(key) {
            None => Ok(None),
            Some((Value::Word(w, _), _)) => Ok(Some(w.clone())),
            Some((Value::Str(w, _), _)) => Ok(Some(w.clone())),
            Some((v, _)) => Err(self.bad(v.span(), format!("`{key}` must be a word"))),
        }
    }

    fn flag(&self, key: &str) -> Result<bool, ParseError> {
        match self.word(key)?.as_deref() {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(_) => Err(self.bad(&self.map[key].1, format!("`{key}` must be true or false"))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<&Vec<Value>>, ParseError> {
        match self.map.get(key) {
            None => Ok(None),
            Some((Value::List(items, _), _)) => Ok(Some(items)),
            Some((v, _)) => Err(self.bad(v.span(), format!("`{key}` must be a list"))),
        }
    }
}

fn rule_instance(c: &mut Cursor, sig: &Signature) -> Result<RuleInstance, ParseError> {
    let (name, rule_span) = c.ident("a rule name")?;
    let mut header = None;
    if name == "IndR" {
        c.expect(Tok::LParen)?;
        let (pred, _) = c.ident("a predicate")?;
        c.expect(Tok::Comma)?;
        let (r, _) = c.number("a rule index")?;
        c.expect(Tok::RParen)?;
        header = Some((pred, r));
    } else if name == "Case" {
        c.expect(Tok::LParen)?;
        let (pred, _) = c.ident("a predicate")?;
        c.expect(Tok::RParen)?;
        header = Some((pred, 0));
    }
    let mut map = BTreeMap::new();
    if c.eat(&Tok::LParen) && !c.eat(&Tok::RParen) {
        loop {
            let (key, span) = c.ident("a parameter name")?;
            c.expect(Tok::Equals)?;
            let v = value(c)?;
            if map.insert(key.clone(), (v, span.clone())).is_some() {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    span,
                    format!("parameter `{key}` given twice"),
                ));
            }
            if c.eat(&Tok::RParen) {
                break;
            }
            c.expect(Tok::Comma)?;
        }
    }
    let p = Params {
        rule_span: rule_span.clone(),
        rule: name.clone(),
        map,
    };
    let inductive = |pred: &str, span: &SourceSpan| -> Result<(), ParseError> {
        if sig.inductive_index(pred).is_none() {
            return Err(ParseError::new(
                ParseErrorKind::UndeclaredSymbol,
                span.clone(),
                format!("`{pred}` is not an inductive predicate"),
            ));
        }
        Ok(())
    };
    let prop = PropRule::ALL.iter().find(|r| r.name() == name);
    Ok(match name.as_str() {
        "Axiom" | "Wk" | "EqR" => {
            p.allow(&[])?;
            match name.as_str() {
                "Axiom" => RuleInstance::Axiom,
                "Wk" => RuleInstance::Wk,
                _ => RuleInstance::EqR,
            }
        }
        "Cut" => {
            p.allow(&["formula"])?;
            RuleInstance::Cut {
                formula: p.formula("formula", sig)?,
            }
        }
        "Subst" => {
            p.allow(&["theta"])?;
            let (s, span) = p.required_string("theta")?;
            RuleInstance::Subst {
                theta: inner(&s, &span, sig, substitution)?,
            }
        }
        _ if prop.is_some() => {
            p.allow(&["principal", "keep"])?;
            RuleInstance::Prop {
                rule: *prop.expect("checked"),
                principal: p.formula("principal", sig)?,
                keep: p.flag("keep")?,
            }
        }
        "AllL" | "ExR" => {
            p.allow(&["principal", "term", "keep"])?;
            let principal = p.formula("principal", sig)?;
            let term = p.term("term", sig)?;
            let keep = p.flag("keep")?;
            if name == "AllL" {
                RuleInstance::AllL { principal, term, keep }
            } else {
                RuleInstance::ExR { principal, term, keep }
            }
        }
        "AllR" | "ExL" => {
            p.allow(&["principal", "var"])?;
            let principal = p.formula("principal", sig)?;
            let var = p.word("var")?;
            if name == "AllR" {
                RuleInstance::AllR { principal, var }
            } else {
                RuleInstance::ExL { principal, var }
            }
        }
        "EqL" => {
            p.allow(&["principal"])?;
            RuleInstance::EqL {
                principal: p.formula("principal", sig)?,
            }
        }
        "IndR" => {
            p.allow(&["terms", "keep"])?;
            let (pred, rule) = header.expect("parsed above");
            inductive(&pred, &rule_span)?;
            let mut terms = Vec::new();
            for v in p.list("terms")?.into_iter().flatten() {
                match v {
                    Value::Str(s, span) => terms.push(inner(s, span, sig, term)?),
                    other => return Err(p.bad(other.span(), "`terms` must hold quoted terms".into())),
                }
            }
            RuleInstance::IndR {
                pred,
                rule,
                terms,
                keep: p.flag("keep")?,
            }
        }
        "Case" => {
            p.allow(&["principal", "fresh", "keep"])?;
            let (pred, _) = header.expect("parsed above");
            inductive(&pred, &rule_span)?;
            let mut fresh = Vec::new();
            for case in p.list("fresh")?.into_iter().flatten() {
                let Value::List(items, _) = case else {
                    return Err(p.bad(case.span(), "`fresh` must be a list of variable lists".into()));
                };
                let mut ys = Vec::new();
                for y in items {
                    match y {
                        Value::Word(w, _) => ys.push(w.clone()),
                        other => return Err(p.bad(other.span(), "fresh variables must be plain names".into())),
                    }
                }
                fresh.push(ys);
            }
            RuleInstance::Case {
                pred,
                principal: p.formula("principal", sig)?,
                fresh,
                keep: p.flag("keep")?,
            }
        }
        _ => {
            return Err(ParseError::new(
                ParseErrorKind::UnknownRule,
                rule_span,
                format!("unknown rule `{name}`"),
            ))
        }
    })
}

enum Pending {
    Node(RuleInstance, Vec<(u64, SourceSpan)>),
    Bud(u64, SourceSpan),
}

/// Parses a `.proof` file. The root is the node named by a `root <id>;`
/// statement, or the first node.
pub fn parse_proof(text: &str, sig: &Signature) -> Result<ProofGraph, ParseError> {
    let mut c = Cursor::lex(text, &SourceSpan::start(INPUT))?;
    let mut entries: Vec<(u64, SourceSpan, Sequent, Pending)> = Vec::new();
    let mut root: Option<(u64, SourceSpan)> = None;
    while *c.peek() != Tok::Eof {
        if c.eat_word("root") {
            let (id, span) = c.number("a node id")?;
            root = Some((id as u64, span));
            c.expect(Tok::Semi)?;
            continue;
        }
        let is_bud = c.at_word("bud");
        if !is_bud && !c.at_word("node") {
            return Err(c.unexpected("`node`, `bud` or `root`"));
        }
        c.next();
        let (id, id_span) = c.number("a node id")?;
        c.expect(Tok::Colon)?;
        let s = sequent(&mut c, sig)?;
        let pending = if is_bud {
            c.expect_word("companion")?;
            let (cid, cspan) = c.number("a companion id")?;
            Pending::Bud(cid as u64, cspan)
        } else {
            c.expect_word("by")?;
            let inst = rule_instance(&mut c, sig)?;
            let mut premises = Vec::new();
            if c.eat_word("premises") {
                c.expect(Tok::LBracket)?;
                if !c.eat(&Tok::RBracket) {
                    loop {
                        let (pid, pspan) = c.number("a premise id")?;
                        premises.push((pid as u64, pspan));
                        if c.eat(&Tok::RBracket) {
                            break;
                        }
                        c.expect(Tok::Comma)?;
                    }
                }
            }
            Pending::Node(inst, premises)
        };
        c.expect(Tok::Semi)?;
        if entries.iter().any(|(other, ..)| *other == id as u64) {
            return Err(ParseError::new(
                ParseErrorKind::DuplicateNode,
                id_span,
                format!("node {id} defined twice"),
            ));
        }
        entries.push((id as u64, id_span, s, pending));
    }
    if entries.is_empty() {
        return Err(c.error("a proof needs at least one node"));
    }
    let index: BTreeMap<u64, usize> = entries.iter().enumerate().map(|(i, (id, ..))| (*id, i)).collect();
    let resolve = |id: u64, span: &SourceSpan| {
        index.get(&id).copied().ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::DanglingPremise,
                span.clone(),
                format!("no node with id {id}"),
            )
        })
    };
    let root = match &root {
        Some((id, span)) => resolve(*id, span)?,
        None => 0,
    };
    let mut nodes = Vec::new();
    for (id, id_span, s, pending) in &entries {
        let kind = match pending {
            Pending::Node(inst, premises) => NodeKind::Inference {
                rule: inst.clone(),
                premises: premises
                    .iter()
                    .map(|(p, span)| resolve(*p, span))
                    .collect::<Result<_, _>>()?,
            },
            Pending::Bud(cid, span) => {
                let companion = resolve(*cid, span)?;
                if entries[companion].2 != *s {
                    return Err(ParseError::new(
                        ParseErrorKind::BudSequentMismatch,
                        id_span.clone(),
                        format!(
                            "bud {id} differs from companion {cid}: `{s}` vs `{}`",
                            entries[companion].2
                        ),
                    ));
                }
                NodeKind::Bud { companion }
            }
        };
        nodes.push(ProofNode {
            id: *id,
            sequent: s.clone(),
            kind,
        });
    }
    ProofGraph::new(nodes, root).map_err(|e| {
        let kind = match e {
            GraphError::BudSequentMismatch { .. } => ParseErrorKind::BudSequentMismatch,
            GraphError::DuplicateId(_) => ParseErrorKind::DuplicateNode,
            _ => ParseErrorKind::DanglingPremise,
        };
        ParseError::new(kind, SourceSpan::start(INPUT), e.to_string())
    })
}

/// Prints a proof graph in the format read by [`parse_proof`].
pub fn print_proof(pg: &ProofGraph) -> String {
    let mut out = String::new();
    if pg.root() != 0 {
        let _ = writeln!(out, "root {};", pg.node(pg.root()).id);
    }
    for n in pg.nodes() {
        match &n.kind {
            NodeKind::Inference { rule, premises } => {
                let ids: Vec<String> = premises.iter().map(|&p| pg.node(p).id.to_string()).collect();
                let _ = writeln!(
                    out,
                    "node {}: {} by {} premises [{}];",
                    n.id,
                    n.sequent,
                    rule,
                    ids.join(", ")
                );
            }
            NodeKind::Bud { companion } => {
                let _ = writeln!(out, "bud {}: {} companion {};", n.id, n.sequent, pg.node(*companion).id);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::example_nat()
    }

    #[test]
    fn single_axiom() {
        let pg = parse_proof("node 1: N(x) |- N(x) by Axiom premises [];", &sig()).unwrap();
        assert_eq!(pg.len(), 1);
        assert_eq!(
            pg.node(0).kind,
            NodeKind::Inference {
                rule: RuleInstance::Axiom,
                premises: vec![]
            }
        );
    }

    #[test]
    fn cycle_with_parameters_round_trips() {
        let text = "\
node 1: N(x) |- N(x) by Case(N)(principal=\"N(x)\", fresh=[[], [y]]) premises [2, 3];
node 2: x = 0 |- N(x) by EqL(principal=\"x = 0\") premises [4];
node 4: |- N(0) by IndR(N,1)(terms=[]) premises [];
node 3: N(y), x = s(y) |- N(x) by Wk premises [5];
node 5: N(y) |- N(y) by Subst(theta=\"[x:=y]\") premises [6];
bud 6: N(x) |- N(x) companion 1;
";
        let pg = parse_proof(text, &sig()).unwrap();
        assert_eq!(pg.len(), 6);
        assert_eq!(pg.bud_count(), 1);
        let printed = print_proof(&pg);
        assert_eq!(parse_proof(&printed, &sig()).unwrap(), pg);
        assert_eq!(print_proof(&parse_proof(&printed, &sig()).unwrap()), printed);
    }

    #[test]
    fn parse_errors() {
        let e = parse_proof("node 1: N(x) |- N(x) by Magic premises [];", &sig()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownRule);
        assert_eq!(e.span.column, 25);
        let e = parse_proof("node 1: N(x) |- N(x) by Wk premises [7];", &sig()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DanglingPremise);
        let e = parse_proof(
            "node 1: N(x) |- N(x) by Wk premises [2];\nbud 2: N(y) |- N(y) companion 1;",
            &sig(),
        )
        .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BudSequentMismatch);
        assert_eq!(e.span.line, 2);
        let e = parse_proof("node 1: N(x) |- N(x) by Cut(formula=\"N(\") premises [];", &sig()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.span.column, 40);
    }
}
