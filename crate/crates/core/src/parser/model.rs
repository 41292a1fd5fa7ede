use serde_json::{Map, Value};

use crate::semantics::{FiniteStructure, FuncTable, Relation, Tuple};
use crate::syntax::{Signature, SymbolKind};

use super::{locate, ParseError, ParseErrorKind, SourceSpan, INPUT};

const KEYS: &[&str] = &["universe", "consts", "funcs", "preds", "ind", "names"];

struct Reader<'a> {
    text: &'a str,
    size: usize,
}

impl Reader<'_> {
    fn err(&self, kind: ParseErrorKind, key: &str, message: impl Into<String>) -> ParseError {
        ParseError::new(kind, locate(self.text, &format!("\"{key}\"")), message)
    }

    fn element(&self, key: &str, v: &Value) -> Result<usize, ParseError> {
        let n = v.as_u64().ok_or_else(|| {
            self.err(
                ParseErrorKind::Syntax,
                key,
                format!("`{key}`: expected a universe element"),
            )
        })?;
        let n = n as usize;
        if n >= self.size {
            return Err(self.err(
                ParseErrorKind::OutOfUniverse,
                key,
                format!("`{key}`: element {n} outside universe of size {}", self.size),
            ));
        }
        Ok(n)
    }

    fn object<'v>(
        &self,
        root: &'v Map<String, Value>,
        key: &str,
    ) -> Result<Option<&'v Map<String, Value>>, ParseError> {
        match root.get(key) {
            None => Ok(None),
            Some(Value::Object(m)) => Ok(Some(m)),
            Some(_) => Err(self.err(ParseErrorKind::Syntax, key, format!("`{key}` must be an object"))),
        }
    }

    fn relation(&self, key: &str, arity: usize, v: &Value) -> Result<Relation, ParseError> {
        let rows = v
            .as_array()
            .ok_or_else(|| self.err(ParseErrorKind::Syntax, key, format!("`{key}` must be a list of tuples")))?;
        let mut rel = Relation::new();
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| self.err(ParseErrorKind::Syntax, key, format!("`{key}` must be a list of tuples")))?;
            if row.len() != arity {
                return Err(self.err(
                    ParseErrorKind::ArityMismatch,
                    key,
                    format!("`{key}` has arity {arity}, found a tuple of length {}", row.len()),
                ));
            }
            let t: Tuple = row.iter().map(|e| self.element(key, e)).collect::<Result<_, _>>()?;
            rel.insert(t);
        }
        Ok(rel)
    }
}

/// Reads a `.model` JSON document over `sig`. Constants and functions must
/// all be given; missing predicate tables are empty.
pub fn parse_structure(text: &str, sig: &Signature) -> Result<FiniteStructure, ParseError> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        ParseError::new(
            ParseErrorKind::Syntax,
            SourceSpan {
                file: INPUT.into(),
                line: e.line().max(1),
                column: e.column().max(1),
                length: 1,
            },
            e.to_string(),
        )
    })?;
    let root = root.as_object().ok_or_else(|| {
        ParseError::new(
            ParseErrorKind::Syntax,
            SourceSpan::start(INPUT),
            "expected a JSON object",
        )
    })?;
    let mut r = Reader { text, size: 0 };
    if let Some(k) = root.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(r.err(ParseErrorKind::Syntax, k, format!("unknown key `{k}`")));
    }
    let size = root
        .get("universe")
        .and_then(Value::as_u64)
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            r.err(
                ParseErrorKind::Syntax,
                "universe",
                "`universe` must be a positive integer",
            )
        })? as usize;
    r.size = size;
    let mut m = FiniteStructure::new(size);

    let consts = r.object(root, "consts")?;
    let funcs = r.object(root, "funcs")?;
    let preds = r.object(root, "preds")?;
    let inds = r.object(root, "ind")?;
    for (section, entries) in [("consts", consts), ("funcs", funcs), ("preds", preds), ("ind", inds)] {
        for name in entries.into_iter().flat_map(|e| e.keys()) {
            let ok = matches!(
                (section, sig.lookup(name)),
                ("consts", Some(SymbolKind::Constant))
                    | ("funcs", Some(SymbolKind::Function(_)))
                    | ("preds", Some(SymbolKind::Ordinary(_)))
                    | ("ind", Some(SymbolKind::Inductive(_)))
            );
            if !ok {
                return Err(r.err(
                    ParseErrorKind::UndeclaredSymbol,
                    name,
                    format!("`{name}` is not declared in the `{section}` category"),
                ));
            }
        }
    }
    for c in sig.constants() {
        let v = consts.and_then(|e| e.get(c)).ok_or_else(|| {
            r.err(
                ParseErrorKind::TableIncomplete,
                "consts",
                format!("no value for constant `{c}`"),
            )
        })?;
        m = m.with_const(c.clone(), r.element(c, v)?);
    }
    for (f, k) in sig.functions() {
        let v = funcs.and_then(|e| e.get(f)).ok_or_else(|| {
            r.err(
                ParseErrorKind::TableIncomplete,
                "funcs",
                format!("no table for function `{f}`"),
            )
        })?;
        let rows = v
            .as_array()
            .ok_or_else(|| r.err(ParseErrorKind::Syntax, f, format!("`{f}` must be a list")))?;
        let expected = size.pow(*k as u32);
        if rows.len() != expected {
            return Err(r.err(
                ParseErrorKind::TableIncomplete,
                f,
                format!("`{f}` needs {expected} entries, found {}", rows.len()),
            ));
        }
        let values = rows.iter().map(|e| r.element(f, e)).collect::<Result<_, _>>()?;
        m = m.with_func(f.clone(), FuncTable::new(*k, values));
    }
    for (q, k) in sig.ordinary_preds() {
        let rel = match preds.and_then(|e| e.get(q)) {
            Some(v) => r.relation(q, *k, v)?,
            None => Relation::new(),
        };
        m = m.with_pred(q.clone(), rel);
    }
    for (p, k) in sig.inductive_preds() {
        let rel = match inds.and_then(|e| e.get(p)) {
            Some(v) => r.relation(p, *k, v)?,
            None => Relation::new(),
        };
        m = m.with_ind(p.clone(), rel);
    }
    if let Some(v) = root.get("names") {
        let list = v
            .as_array()
            .ok_or_else(|| r.err(ParseErrorKind::Syntax, "names", "`names` must be a list"))?;
        let names = list.iter().map(|e| r.element("names", e)).collect::<Result<_, _>>()?;
        m = m.with_names(names);
    }
    Ok(m)
}

fn relation_json(rel: &Relation) -> String {
    let rows: Vec<String> = rel
        .iter()
        .map(|t| format!("[{}]", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn section<'a>(entries: impl Iterator<Item = (&'a String, String)>) -> String {
    let body: Vec<String> = entries
        .map(|(k, v)| format!("{}: {v}", Value::String(k.clone())))
        .collect();
    format!("{{{}}}", body.join(", "))
}

/// Canonical `.model` text: keys sorted, one section per line.
pub fn print_structure(m: &FiniteStructure) -> String {
    let consts = section(m.consts().iter().map(|(k, v)| (k, v.to_string())));
    let funcs = section(m.funcs().iter().map(|(k, t)| {
        (
            k,
            format!(
                "[{}]",
                t.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            ),
        )
    }));
    let inds = section(m.inds().iter().map(|(k, r)| (k, relation_json(r))));
    let preds = section(m.preds().iter().map(|(k, r)| (k, relation_json(r))));
    let mut lines = vec![
        format!("  \"consts\": {consts}"),
        format!("  \"funcs\": {funcs}"),
        format!("  \"ind\": {inds}"),
    ];
    if !m.names().is_empty() {
        let names: Vec<String> = m.names().iter().map(|v| v.to_string()).collect();
        lines.push(format!("  \"names\": [{}]", names.join(", ")));
    }
    lines.push(format!("  \"preds\": {preds}"));
    lines.push(format!("  \"universe\": {}", m.size()));
    format!("{{\n{}\n}}\n", lines.join(",\n"))
}
