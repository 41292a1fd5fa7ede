use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use folid::coding::{
    check_i_clauses, decode, derive_truth_assignment, encode_formula, encode_term, encode_tuple, CodeFamily,
    CodedLayer, Decoded, OrdinaryOracle,
};
use folid::gen::{formula_corpus, CorpusConfig};
use folid::kernel::{check_local, ProofGraph};
use folid::parser::{
    parse_formula, parse_proof, parse_sequent, parse_signature, parse_structure, parse_term, print_signature,
    print_structure,
};
use folid::semantics::{
    check_unfold_equivalence, compute_lfp, eval_formula, sequent_counterexample, unfold_formula, Assignment,
    FiniteStructure, Relation,
};
use folid::termmodel::{
    build_term_model, check_termmodel_name_extended, check_termmodel_standard, name_extend, TermModel,
};
use folid::trace::{self, check_gtc, verdict_json, Lasso, LassoIds, Verdict};
use folid::translate::{builtin_pa_signature, hardness_sequent, relativize, PaFormula};
use folid::{Formula, Theory};
use serde_json::{json, Value};

use crate::output::{verdict_word, Report};
use crate::{ModelArgs, SigArg, TermModelArgs};

type Res<T> = Result<T, String>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_theory(sig: &SigArg) -> Res<Theory> {
    parse_signature(&read(&sig.sig)?).map_err(|e| e.with_file(sig.sig.display().to_string()).to_string())
}

fn load_model(path: &Path, theory: &Theory) -> Res<FiniteStructure> {
    parse_structure(&read(path)?, theory.signature()).map_err(|e| e.with_file(path.display().to_string()).to_string())
}

fn load(args: &ModelArgs) -> Res<(Theory, FiniteStructure)> {
    let th = load_theory(&args.sig)?;
    let m = load_model(&args.model, &th)?;
    Ok((th, m))
}

fn load_proof(path: &Path, theory: &Theory) -> Res<ProofGraph> {
    parse_proof(&read(path)?, theory.signature()).map_err(|e| e.with_file(path.display().to_string()).to_string())
}

fn build(args: &TermModelArgs) -> Res<(Theory, TermModel)> {
    let (th, m) = load(&args.model)?;
    let mc = name_extend(&m, args.budget).map_err(|e| e.to_string())?;
    let sig = th.signature().with_name_budget(args.budget);
    let tm = build_term_model(&mc, &sig, args.depth).map_err(|e| e.to_string())?;
    Ok((th.with_name_budget(args.budget), tm))
}

fn show_tuple(t: &[usize]) -> String {
    match t {
        [v] => v.to_string(),
        _ => format!("({})", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")),
    }
}

fn show_relation(r: &Relation) -> String {
    format!("{{{}}}", r.iter().map(|t| show_tuple(t)).collect::<Vec<_>>().join(","))
}

fn check_one(path: &Path, theory: &Theory) -> Res<(String, Value, bool)> {
    let pg = load_proof(path, theory)?;
    let local = check_local(&pg, theory);
    let name = path.display().to_string();
    let mut text = String::new();
    if !local.is_empty() {
        let _ = writeln!(text, "{name}: {}", verdict_word(false));
        for v in &local {
            let _ = writeln!(text, "  {v}");
        }
        let json = json!({"file": name, "verdict": "FAIL", "local": local, "gtc": null});
        return Ok((text, json, false));
    }
    let verdict = check_gtc(&pg, theory);
    let ok = verdict.is_pass();
    let _ = writeln!(text, "{name}: {}", verdict_word(ok));
    if let Verdict::Fail(lasso) = &verdict {
        let ids = lasso.ids(&pg);
        let _ = writeln!(
            text,
            "  trace condition fails: stem {:?} cycle {:?}",
            ids.stem, ids.cycle
        );
    }
    let json = json!({
        "file": name,
        "verdict": if ok { "PASS" } else { "FAIL" },
        "local": local,
        "gtc": verdict_json(&pg, theory, &verdict),
    });
    Ok((text, json, ok))
}

/// Files are checked concurrently; results keep the command-line order.
pub fn check_proof(paths: &[PathBuf], sig: &SigArg) -> Res<Report> {
    let theory = load_theory(sig)?;
    let results: Vec<Res<(String, Value, bool)>> = std::thread::scope(|s| {
        let handles: Vec<_> = paths.iter().map(|p| s.spawn(|| check_one(p, &theory))).collect();
        handles.into_iter().map(|h| h.join().expect("checker thread")).collect()
    });
    let mut text = String::new();
    let mut files = Vec::new();
    let mut ok = true;
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok((t, j, pass)) => {
                text.push_str(&t);
                files.push(j);
                ok &= pass;
            }
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(errors.join("\nfolid: "));
    }
    let json = json!({"verdict": if ok { "PASS" } else { "FAIL" }, "results": files});
    Ok(Report::new(text, json, ok))
}

pub fn lfp(args: &ModelArgs) -> Res<Report> {
    let (th, m) = load(args)?;
    let lfp = compute_lfp(&m, &th).map_err(|e| e.to_string())?;
    let mut text = String::new();
    let mut preds = serde_json::Map::new();
    for ((p, _), rel) in th.signature().inductive_preds().iter().zip(&lfp.family) {
        let _ = writeln!(text, "{p} = {}", show_relation(rel));
        preds.insert(p.clone(), json!(rel));
    }
    let _ = writeln!(text, "stage = {}", lfp.stage);
    Ok(Report::new(text, json!({"stage": lfp.stage, "lfp": preds}), true))
}

pub fn standard_check(args: &ModelArgs) -> Res<Report> {
    let (th, m) = load(args)?;
    let lfp = compute_lfp(&m, &th).map_err(|e| e.to_string())?;
    let given = m.family(th.signature());
    let mut text = String::new();
    let mut diffs = Vec::new();
    for (((p, _), want), have) in th.signature().inductive_preds().iter().zip(&lfp.family).zip(&given) {
        if want != have {
            let missing: Relation = want.difference(have).cloned().collect();
            let extra: Relation = have.difference(want).cloned().collect();
            let _ = writeln!(
                text,
                "{p}: missing {}, not derivable {}",
                show_relation(&missing),
                show_relation(&extra)
            );
            diffs.push(json!({"pred": p, "missing": missing, "extra": extra}));
        }
    }
    let ok = diffs.is_empty();
    text.insert_str(0, if ok { "standard\n" } else { "not standard\n" });
    Ok(Report::new(text, json!({"standard": ok, "differences": diffs}), ok))
}

fn parse_assignment(items: &[String], m: &FiniteStructure) -> Res<Assignment> {
    items
        .iter()
        .map(|item| {
            let (x, v) = item
                .split_once('=')
                .ok_or_else(|| format!("bad assignment `{item}`, expected VAR=ELEM"))?;
            let v: usize = v.trim().parse().map_err(|_| format!("bad element in `{item}`"))?;
            if v >= m.size() {
                return Err(format!("element {v} outside universe of size {}", m.size()));
            }
            Ok((x.trim().to_string(), v))
        })
        .collect()
}

pub fn eval(args: &ModelArgs, formula: Option<&str>, sequent: Option<&str>, assign: &[String]) -> Res<Report> {
    let (th, m) = load(args)?;
    let sig = th.signature().with_name_budget(m.names().len());
    if let Some(text) = sequent {
        let s = parse_sequent(text, &sig).map_err(|e| e.to_string())?;
        let cex = sequent_counterexample(&s, &m).map_err(|e| e.to_string())?;
        let out = match &cex {
            None => "valid\n".to_string(),
            Some(rho) => format!(
                "invalid; counterexample {}\n",
                rho.iter()
                    .map(|(x, v)| format!("{x}={v}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        };
        let ok = cex.is_none();
        return Ok(Report::new(out, json!({"valid": ok, "counterexample": cex}), ok));
    }
    let f = parse_formula(formula.unwrap_or_default(), &sig).map_err(|e| e.to_string())?;
    let rho = parse_assignment(assign, &m)?;
    let missing: Vec<String> = f.free_vars().into_iter().filter(|x| !rho.contains_key(x)).collect();
    if !missing.is_empty() {
        return Err(format!("unassigned free variables: {}", missing.join(", ")));
    }
    let value = eval_formula(&f, &m, &rho).map_err(|e| e.to_string())?;
    Ok(Report::new(format!("{value}\n"), json!({"value": value}), true))
}

pub fn unfold(sig: &SigArg, pred: &str, k: usize, model: Option<&Path>) -> Res<Report> {
    let th = load_theory(sig)?;
    let f = unfold_formula(&th, pred, k).ok_or_else(|| format!("`{pred}` is not an inductive predicate"))?;
    let mut text = format!("{f}\n");
    let mut json = json!({"pred": pred, "k": k, "formula": f.to_string()});
    let mut ok = true;
    if let Some(path) = model {
        let m = load_model(path, &th)?;
        let violations = check_unfold_equivalence(&m, &th, k).map_err(|e| e.to_string())?;
        for v in &violations {
            let _ = writeln!(
                text,
                "disagreement: {}({}) at k = {}: stage {}, unfolding {}",
                v.pred,
                show_tuple(&v.tuple),
                v.k,
                v.in_stage,
                v.formula_holds
            );
        }
        let _ = writeln!(
            text,
            "stages agree with unfoldings up to k = {k}: {}",
            verdict_word(violations.is_empty())
        );
        ok = violations.is_empty();
        let vs: Vec<Value> = violations
            .iter()
            .map(|v| json!({"pred": v.pred, "tuple": v.tuple, "k": v.k, "in_stage": v.in_stage, "formula_holds": v.formula_holds}))
            .collect();
        json["violations"] = json!(vs);
    }
    Ok(Report::new(text, json, ok))
}

pub fn termmodel(args: &TermModelArgs, export: Option<&Path>) -> Res<Report> {
    let (th, tm) = build(args)?;
    let terms = tm.universe().terms();
    let named = check_termmodel_name_extended(&tm);
    let standard = check_termmodel_standard(&tm, &th).map_err(|e| e.to_string())?;
    let mut text = format!(
        "{} classes over {} terms of depth <= {}\n",
        tm.classes().len(),
        terms.len(),
        args.depth
    );
    let mut classes = Vec::new();
    for c in tm.classes() {
        let members: Vec<String> = c.members.iter().map(|&i| terms[i].to_string()).collect();
        let _ = writeln!(text, "[{}] -> {}: {}", c.representative, c.value, members.join(", "));
        classes.push(json!({"representative": c.representative.to_string(), "value": c.value, "members": members}));
    }
    let _ = writeln!(text, "name-extended: {named}");
    let _ = writeln!(text, "standard: {standard}");
    let model_text = print_structure(&tm.as_structure());
    if let Some(path) = export {
        std::fs::write(path, &model_text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let model: Value = serde_json::from_str(&model_text).expect("printed model is JSON");
    let json = json!({"classes": classes, "name_extended": named, "standard": standard, "model": model});
    Ok(Report::new(text, json, named && standard))
}

pub fn code(sig: &SigArg, term: Option<&str>, formula: Option<&str>, decode_arg: Option<&str>) -> Res<Report> {
    let th = load_theory(sig)?;
    let sig = th.signature().with_name_budget(usize::MAX >> 1);
    let (kind, code) = if let Some(t) = term {
        ("term", encode_term(&parse_term(t, &sig).map_err(|e| e.to_string())?))
    } else if let Some(f) = formula {
        (
            "formula",
            encode_formula(&parse_formula(f, &sig).map_err(|e| e.to_string())?),
        )
    } else if let Some(c) = decode_arg {
        let c: folid::coding::Code = c.trim().parse().map_err(|_| format!("`{c}` is not a natural number"))?;
        let d = decode(&c).map_err(|e| e.to_string())?;
        let (kind, shown) = match &d {
            Decoded::Term(t) => ("term", t.to_string()),
            Decoded::Formula(f) => ("formula", f.to_string()),
            Decoded::Tuple(ts) => (
                "tuple",
                format!("({})", ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")),
            ),
        };
        let json = json!({"kind": kind, "tag": d.head_tag(), "decoded": shown});
        return Ok(Report::new(format!("{kind} {shown}\n"), json, true));
    } else {
        return Err("one of --term, --formula or --decode is required".into());
    };
    let code = code.to_string();
    Ok(Report::new(
        format!("{code}\n"),
        json!({"kind": kind, "code": code}),
        true,
    ))
}

fn family_json(x: &CodeFamily) -> Value {
    json!(x
        .iter()
        .map(|s| s.iter().map(|c| c.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn code_search(args: &TermModelArgs, pred: &str, term: &str, k: usize) -> Res<Report> {
    let (th, tm) = build(args)?;
    let t = parse_term(term, th.signature()).map_err(|e| e.to_string())?;
    let oracle = OrdinaryOracle::Model(tm.base().clone());
    let layer = CodedLayer::new(&th, tm.universe(), &oracle);
    let code = encode_tuple(std::slice::from_ref(&t));
    let found = layer.search(pred, &code, k).map_err(|e| e.to_string())?;
    let atom = format!("{pred}({t})");
    Ok(match found {
        Some(w) => {
            let mut text = format!("{atom}: witness with {} stages\n", w.len());
            for (l, stage) in w.stages.iter().enumerate() {
                let preds: Vec<String> = th
                    .signature()
                    .inductive_preds()
                    .iter()
                    .zip(stage)
                    .map(|((p, _), set)| {
                        let shown: Vec<String> = set
                            .iter()
                            .map(|c| {
                                folid::coding::decode_tuple(c)
                                    .map(|ts| ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "))
                                    .unwrap_or_else(|_| c.to_string())
                            })
                            .collect();
                        format!("{p} {{{}}}", shown.join("; "))
                    })
                    .collect();
                let _ = writeln!(text, "  stage {l}: {}", preds.join("  "));
            }
            let stages: Vec<Value> = w.stages.iter().map(family_json).collect();
            Report::new(text, json!({"atom": atom, "found": true, "stages": stages}), true)
        }
        None => Report::new(
            format!("{atom}: no witness within {k} stages\n"),
            json!({"atom": atom, "found": false, "stages": null}),
            true,
        ),
    })
}

pub fn approx_truth(args: &TermModelArgs, size: usize, k: usize, formulas: &[String], corpus: usize) -> Res<Report> {
    let (th, tm) = build(args)?;
    let sig = tm.signature().clone();
    let f = derive_truth_assignment(&tm, size);
    let corpus: Vec<Formula> = if formulas.is_empty() {
        let cfg = CorpusConfig {
            count: corpus,
            ..CorpusConfig::default()
        };
        formula_corpus(&sig, &cfg)
    } else {
        formulas
            .iter()
            .map(|s| parse_formula(s, &sig).map_err(|e| e.to_string()))
            .collect::<Res<_>>()?
    };
    let report = check_i_clauses(&f, &th, tm.universe(), size, &corpus).map_err(|e| e.to_string())?;

    let oracle = OrdinaryOracle::Model(tm.base().clone());
    let layer = CodedLayer::new(&th, tm.universe(), &oracle);
    let (mut agree, mut unresolved, mut wrong) = (0usize, 0usize, Vec::new());
    for (p, arity) in sig.inductive_preds() {
        for tuple in folid::semantics::all_tuples(tm.universe().len(), *arity) {
            let ts: Vec<_> = tuple.iter().map(|&i| tm.universe().terms()[i].clone()).collect();
            let atom = Formula::ind(p.clone(), ts.clone());
            let truth = f.value(&atom) == Some(0);
            let found = layer
                .search(p, &encode_tuple(&ts), k)
                .map_err(|e| e.to_string())?
                .is_some();
            match (found, truth) {
                (true, true) | (false, false) => agree += 1,
                (false, true) => unresolved += 1,
                (true, false) => wrong.push(atom.to_string()),
            }
        }
    }
    let ok = report.is_empty() && wrong.is_empty();
    let mut text = format!(
        "I(f) on {} formulas of print length <= {size}: {} violations (quantifiers {})\n",
        report.formulas_checked,
        report.violations.len(),
        json!(report.quantifiers).as_str().unwrap_or_default()
    );
    for v in &report.violations {
        let _ = writeln!(text, "  {}: {}: {}", v.clause, v.formula, v.detail);
    }
    let _ = writeln!(
        text,
        "coded search up to k = {k}: {agree} agree with f, {unresolved} true but beyond k, {} contradict f",
        wrong.len()
    );
    for w in &wrong {
        let _ = writeln!(text, "  {w}");
    }
    let _ = writeln!(text, "{}", verdict_word(ok));
    let json = json!({
        "verdict": if ok { "PASS" } else { "FAIL" },
        "i_report": report,
        "search": {"k": k, "agree": agree, "beyond_k": unresolved, "contradict": wrong},
    });
    Ok(Report::new(text, json, ok))
}

pub fn translate_pa(formula: &str) -> Res<Report> {
    let th = builtin_pa_signature();
    let f = parse_formula(formula, th.signature()).map_err(|e| e.to_string())?;
    let a = PaFormula::new(f).map_err(|e| e.to_string())?;
    let rel = relativize(&a);
    let seq = hardness_sequent(&a);
    let sig = print_signature(&th);
    let text = format!("{sig}\n# relativization\n{rel}\n\n# sequent\n{seq}\n");
    let json = json!({"signature": sig, "relativized": rel.to_string(), "sequent": seq.to_string()});
    Ok(Report::new(text, json, true))
}

pub fn explain_trace(path: &Path, sig: &SigArg, stem: &[u64], cycle: &[u64]) -> Res<Report> {
    let theory = load_theory(sig)?;
    let pg = load_proof(path, &theory)?;
    let local = check_local(&pg, &theory);
    if !local.is_empty() {
        let shown: Vec<String> = local.iter().map(|v| v.to_string()).collect();
        return Err(format!(
            "{}: not a valid pre-proof:\n  {}",
            path.display(),
            shown.join("\n  ")
        ));
    }
    if !cycle.is_empty() {
        let ids = LassoIds {
            stem: stem.to_vec(),
            cycle: cycle.to_vec(),
        };
        let lasso = Lasso::from_ids(&pg, &ids).map_err(|e| e.to_string())?;
        let text = trace::explain_trace(&pg, &theory, &lasso).map_err(|e| e.to_string())?;
        let json = json!({"lasso": ids, "explanation": text});
        return Ok(Report::new(text, json, true));
    }
    let verdict = check_gtc(&pg, &theory);
    let mut json = verdict_json(&pg, &theory, &verdict);
    match &verdict {
        Verdict::Pass => {
            json["explanation"] = Value::Null;
            let text = format!(
                "{}: every infinite path carries a progressing trace\n",
                verdict_word(true)
            );
            Ok(Report::new(text, json, true))
        }
        Verdict::Fail(lasso) => {
            let text = trace::explain_trace(&pg, &theory, lasso).map_err(|e| e.to_string())?;
            json["explanation"] = json!(text);
            Ok(Report::new(text, json, false))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_print_compactly() {
        let r: Relation = [vec![2], vec![0]].into_iter().collect();
        assert_eq!(show_relation(&r), "{0,2}");
        let pairs: Relation = [vec![0, 1]].into_iter().collect();
        assert_eq!(show_relation(&pairs), "{(0,1)}");
        assert_eq!(show_relation(&Relation::new()), "{}");
    }

    #[test]
    fn assignments_are_checked_against_the_universe() {
        let m = FiniteStructure::new(2);
        let rho = parse_assignment(&["x=1".into(), " y = 0".into()], &m).unwrap();
        assert_eq!(rho["x"], 1);
        assert_eq!(rho["y"], 0);
        assert!(parse_assignment(&["x=2".into()], &m).is_err());
        assert!(parse_assignment(&["x".into()], &m).is_err());
    }
}
