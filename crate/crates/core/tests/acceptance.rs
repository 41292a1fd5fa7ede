//! Runs the acceptance criteria, one line per criterion, and exits non-zero
//! if any of them fails or exceeds its time limit.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use folid::coding::{
    check_code_correspondence, check_i_clauses, derive_truth_assignment, encode_tuple, CodedLayer, OrdinaryOracle,
};
use folid::gen::{formula_corpus, nat_family, standard_nat_family, CorpusConfig};
use folid::kernel::check_local;
use folid::semantics::*;
use folid::termmodel::{check_termmodel_name_extended, check_termmodel_standard, TermModel};
use folid::trace::{check_gtc, TraceGraph, Verdict};
use folid::translate::*;
use folid::{Formula, Signature, Term, Theory};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lfp_minimality() -> Outcome {
    let th = Theory::example_nat();
    let family = nat_family(3);
    for m in &family {
        let lfp = compute_lfp(m, &th).map_err(|e| e.to_string())?;
        ensure(lfp.family == least_prefixpoint(m, &th), || format!("mismatch on {m:?}"))?;
    }
    Ok(format!("{} structures", family.len()))
}

fn unfold_equivalence() -> Outcome {
    let th = Theory::example_nat();
    for m in nat_family(3) {
        let v = check_unfold_equivalence(&m, &th, 4).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), || format!("{} violations on {m:?}", v.len()))?;
    }
    Ok("k <= 4".into())
}

fn standard_iff_saturation() -> Outcome {
    let th = Theory::example_nat();
    let sig = th.signature();
    let mut checked = 0;
    for base in nat_family(3) {
        let n = base.size();
        // every interpretation of N over the universe
        for mask in 0u32..(1 << n) {
            let m = base
                .clone()
                .with_ind("N", (0..n).filter(|i| mask & (1 << i) != 0).map(|i| vec![i]));
            let bound = iteration_bound(&m, sig);
            let stages = kleene_stages(&m, &th, bound).map_err(|e| e.to_string())?;
            let saturated = (0..bound).any(|k| stages[k] == stages[k + 1] && stages[k] == m.family(sig));
            let standard = check_standard(&m, &th).map_err(|e| e.to_string())?;
            ensure(standard == saturated, || format!("disagree on {m:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} interpretations"))
}

fn truth_transfer() -> Outcome {
    let th = Theory::example_nat();
    let cfg = CorpusConfig::default();
    let corpus = formula_corpus(th.signature(), &cfg);
    ensure(corpus.len() >= 500, || format!("corpus has {} formulas", corpus.len()))?;
    ensure(corpus.iter().all(|a| a.is_closed() && a.depth() <= 3), || {
        "corpus shape".into()
    })?;
    let family = standard_nat_family(&th, 3).map_err(|e| e.to_string())?;
    for m in &family {
        let tm = term_model(m, &th, m.size(), 2);
        let mt = tm.as_structure();
        for a in &corpus {
            let lhs = eval_closed(a, m).map_err(|e| e.to_string())?;
            let rhs = eval_closed(a, &mt).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("{a} on {m:?}"))?;
        }
    }
    Ok(format!("{} models x {} formulas", family.len(), corpus.len()))
}

fn standard_fixture_term_models() -> Vec<(String, Theory, TermModel)> {
    let nat = nat_theory();
    let mut out: Vec<(String, Theory, TermModel)> = STANDARD_MODELS
        .iter()
        .map(|name| {
            let m = model(name);
            (name.to_string(), nat.clone(), term_model(&m, &nat, m.size(), 2))
        })
        .collect();
    let th = Theory::example_nat();
    for (i, m) in standard_nat_family(&th, 3).unwrap().into_iter().enumerate() {
        let tm = term_model(&m, &th, m.size(), 2);
        out.push((format!("family[{i}]"), th.clone(), tm));
    }
    out
}

fn termmodel_standard() -> Outcome {
    let fixtures = standard_fixture_term_models();
    for (name, th, tm) in &fixtures {
        ensure(check_termmodel_name_extended(tm), || {
            format!("{name} is not name-extended")
        })?;
        let ok = check_termmodel_standard(tm, th).map_err(|e| e.to_string())?;
        ensure(ok, || format!("{name} is not standard"))?;
    }
    Ok(format!("{} term models", fixtures.len()))
}

fn coding_at_scale() -> Outcome {
    let th = Theory::example_nat();
    let models: Vec<FiniteStructure> = standard_nat_family(&th, 3)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|m| m.size() == 3)
        .step_by(3)
        .collect();
    let mut searches = 0;
    for m in &models {
        for depth in 0..=3 {
            let tm = term_model(m, &th, m.size(), depth);
            let thc = th.with_name_budget(tm.signature().name_budget());
            let u = tm.universe();
            let oracle = OrdinaryOracle::Model(tm.base().clone());
            let report = check_code_correspondence(&tm, &oracle, &th, u, 3).map_err(|e| e.to_string())?;
            ensure(report.is_empty(), || {
                format!("{} mismatches at depth {depth}", report.len())
            })?;
            let layer = CodedLayer::new(&thc, u, &oracle);
            let stages = kleene_stages(&tm.as_structure(), &thc, 3).map_err(|e| e.to_string())?;
            for t in u.terms() {
                let code = encode_tuple(std::slice::from_ref(t));
                let found = layer.search("N", &code, 3).map_err(|e| e.to_string())?;
                let class = tm.class_of_term(t).ok_or("term without class")?;
                ensure(found.is_some() == stages[3][0].contains(&vec![class]), || {
                    format!("search N({t})")
                })?;
                if let Some(w) = found {
                    for pair in w.stage_codes().windows(2) {
                        ensure(layer.eval_w(&pair[0], &pair[1]).map_err(|e| e.to_string())?, || {
                            format!("W fails for N({t})")
                        })?;
                    }
                }
                searches += 1;
            }
        }
    }
    Ok(format!("{} models, {searches} searches", models.len()))
}

fn truth_assignments() -> Outcome {
    let fixtures = standard_fixture_term_models();
    let mut checked = 0;
    for (name, th, tm) in &fixtures {
        let f = derive_truth_assignment(tm, 80);
        let cfg = CorpusConfig {
            count: 40,
            ..CorpusConfig::default()
        };
        let corpus = formula_corpus(tm.signature(), &cfg);
        let th = th.with_name_budget(tm.signature().name_budget());
        let report = check_i_clauses(&f, &th, tm.universe(), 80, &corpus).map_err(|e| e.to_string())?;
        ensure(report.is_empty(), || format!("{name}: {:?}", report.violations.first()))?;
        checked += 1;
    }
    Ok(format!("{checked} term models"))
}

fn proof_kernel() -> Outcome {
    let th = nat_theory();
    for name in PASSING {
        let pg = proof(name);
        let local = check_local(&pg, &th);
        ensure(local.is_empty(), || format!("{name}: {local:?}"))?;
        ensure(check_gtc(&pg, &th).is_pass(), || format!("{name} fails GTC"))?;
    }
    for name in FAILING_GTC {
        let pg = proof(name);
        ensure(check_local(&pg, &th).is_empty(), || {
            format!("{name} is locally invalid")
        })?;
        let Verdict::Fail(lasso) = check_gtc(&pg, &th) else {
            return Err(format!("{name} passes GTC"));
        };
        let tg = TraceGraph::new(&pg, &th);
        ensure(!periodic_path_progresses(&tg, &lasso.cycle), || {
            format!("{name}: lasso has a progressing trace")
        })?;
        ensure(brute_force_gtc(&tg, 5, 3).is_some(), || {
            format!("{name}: oracle finds no bad path")
        })?;
    }
    Ok(format!("{} pass, {} fail", PASSING.len(), FAILING_GTC.len()))
}

fn oracle_agreement() -> Outcome {
    let th = nat_theory();
    for name in PASSING.iter().chain(&FAILING_GTC) {
        let tg = TraceGraph::new(&proof(name), &th);
        let closure = tg.check().is_pass();
        let oracle = brute_force_gtc(&tg, 5, 3).is_none();
        ensure(closure == oracle, || {
            format!("{name}: closure {closure}, oracle {oracle}")
        })?;
    }
    Ok(format!("{} graphs", PASSING.len() + FAILING_GTC.len()))
}

fn conclusions_valid() -> Outcome {
    let th = nat_theory();
    let mut models: Vec<FiniteStructure> = STANDARD_MODELS.iter().map(|n| model(n)).collect();
    for m in small_family(&["N", "E", "O"], 3) {
        models.push(standardize(&m, &th).map_err(|e| e.to_string())?);
    }
    for name in PASSING {
        let pg = proof(name);
        if !check_gtc(&pg, &th).is_pass() {
            continue;
        }
        let root = &pg.node(0).sequent;
        for m in &models {
            ensure(sequent_valid(root, m).map_err(|e| e.to_string())?, || {
                format!("{name}: {root} fails in {m:?}")
            })?;
        }
    }
    Ok(format!("{} proofs x {} models", PASSING.len(), models.len()))
}

fn translation() -> Outcome {
    let mut sig = Signature::new();
    sig.add_constant("0").unwrap();
    for (f, a) in [("s", 1), ("F", 1), ("add", 2), ("mul", 2)] {
        sig.add_function(f, a).unwrap();
    }
    let cfg = CorpusConfig {
        seed: 11,
        count: 50,
        max_term_depth: 1,
        ..CorpusConfig::default()
    };
    let corpus: Vec<PaFormula> = formula_corpus(&sig, &cfg)
        .into_iter()
        .map(|f| PaFormula::new(f).unwrap())
        .collect();
    ensure(corpus.len() == 50, || "corpus size".into())?;
    let golden: String = corpus
        .iter()
        .map(|a| format!("{}\n  {}\n", a.formula(), relativize(a)))
        .collect();
    ensure(golden == read("relativize.golden"), || {
        "golden relativizations differ".into()
    })?;
    for a in &corpus {
        ensure(quantifiers_guarded(&relativize(a)), || {
            format!("unguarded: {}", a.formula())
        })?;
    }
    let th = builtin_pa_signature();
    let pa = |s: &str| PaFormula::new(folid::parser::parse_formula(s, th.signature()).unwrap()).unwrap();
    let closed = hardness_sequent(&pa("forall x. add(x, 0) = x"));
    ensure(
        closed.antecedent.len() == 7 && closed.antecedent.contains(&f_closure()),
        || "closed sequent shape".into(),
    )?;
    let open = hardness_sequent(&pa("x = s(y)"));
    ensure(
        open.antecedent.len() == 9 && open.antecedent.contains(&Formula::ind("N", vec![Term::var("y")])),
        || "open sequent shape".into(),
    )?;
    // N = U: a cyclic successor reaches everything from 0
    let m = FiniteStructure::new(3)
        .with_const("0", 0)
        .with_func("s", FuncTable::from_fn(3, 1, |a| (a[0] + 1) % 3))
        .with_func("F", FuncTable::new(1, vec![2, 0, 1]))
        .with_func("add", FuncTable::from_fn(3, 2, |a| (a[0] + a[1]) % 3))
        .with_func("mul", FuncTable::from_fn(3, 2, |a| (a[0] * a[1]) % 3))
        .with_ind("N", [vec![0], vec![1], vec![2]]);
    ensure(check_standard(&m, &th).unwrap(), || "fixture is not standard".into())?;
    for a in &corpus {
        let plain = eval_closed(a.formula(), &m).map_err(|e| e.to_string())?;
        let rel = eval_closed(&relativize(a), &m).map_err(|e| e.to_string())?;
        ensure(plain == rel, || format!("relativization disagrees on {}", a.formula()))?;
    }
    Ok("50 formulas".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("lfp minimality", 5, lfp_minimality),
        ("unfolding equivalence", 10, unfold_equivalence),
        ("standard iff saturation", 5, standard_iff_saturation),
        ("truth transfer to term models", 60, truth_transfer),
        ("term models are standard", 5, termmodel_standard),
        ("code correspondence and search", 10, coding_at_scale),
        ("derived truth assignments", 30, truth_assignments),
        ("proof kernel verdicts", 5, proof_kernel),
        ("GTC oracle agreement", 30, oracle_agreement),
        ("conclusions valid in standard models", 10, conclusions_valid),
        ("translation", 10, translation),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the time limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} {:>2} {name:<38} {:>7.2}s / {limit}s  {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
