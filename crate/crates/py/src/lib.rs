//! Python bindings: theories, finite structures, term models, proofs, codes
//! and the arithmetic translation.

use std::collections::BTreeMap;

use folid::coding::{decode, encode_formula, encode_term, Decoded};
use folid::kernel::{check_local, ProofGraph};
use folid::parser;
use folid::semantics::{self, Assignment, FiniteStructure};
use folid::termmodel::{self as tm, TermModel as CoreTermModel};
use folid::trace::{check_gtc, explain_trace, verdict_json, Verdict};
use folid::translate::{self, PaFormula};
use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Tuples = Vec<Vec<usize>>;

/// A signature with its production rules.
#[pyclass(module = "folid", frozen)]
struct Theory {
    inner: folid::Theory,
}

#[pymethods]
impl Theory {
    /// Reads `.folid` text.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Theory {
            inner: parser::parse_signature(text).map_err(err)?,
        })
    }

    /// `0`, `s` and `N` with the rules `N(0)` and `N(x) ⇒ N(s(x))`.
    #[staticmethod]
    fn example_nat() -> Self {
        Theory {
            inner: folid::Theory::example_nat(),
        }
    }

    /// `{0, s, F, add, mul}` with `N` for the natural numbers.
    #[staticmethod]
    fn arithmetic() -> Self {
        Theory {
            inner: translate::builtin_pa_signature(),
        }
    }

    fn inductive_predicates(&self) -> Vec<(String, usize)> {
        self.inner.signature().inductive_preds().to_vec()
    }

    fn rules(&self) -> Vec<String> {
        self.inner.rules().iter().map(|r| r.to_string()).collect()
    }

    /// The `k`-fold unfolding of `pred`, printed.
    fn unfold(&self, pred: &str, k: usize) -> PyResult<String> {
        semantics::unfold_formula(&self.inner, pred, k)
            .map(|f| f.to_string())
            .ok_or_else(|| err(format!("`{pred}` is not an inductive predicate")))
    }

    fn __str__(&self) -> String {
        parser::print_signature(&self.inner)
    }
}

/// A finite structure over a theory's signature.
#[pyclass(module = "folid", frozen)]
struct Structure {
    theory: folid::Theory,
    inner: FiniteStructure,
}

#[pymethods]
impl Structure {
    /// Reads `.model` JSON.
    #[new]
    fn new(theory: &Theory, text: &str) -> PyResult<Self> {
        let inner = parser::parse_structure(text, theory.inner.signature()).map_err(err)?;
        Ok(Structure {
            theory: theory.inner.clone(),
            inner,
        })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    /// Least fixpoint as `{pred: [tuple, ...]}`.
    fn lfp(&self) -> PyResult<BTreeMap<String, Tuples>> {
        let lfp = semantics::compute_lfp(&self.inner, &self.theory).map_err(err)?;
        Ok(self
            .theory
            .signature()
            .inductive_preds()
            .iter()
            .zip(lfp.family)
            .map(|((p, _), rel)| (p.clone(), rel.into_iter().collect()))
            .collect())
    }

    fn is_standard(&self) -> PyResult<bool> {
        semantics::check_standard(&self.inner, &self.theory).map_err(err)
    }

    /// The same structure with every inductive predicate replaced by its
    /// least fixpoint.
    fn standardize(&self) -> PyResult<Structure> {
        Ok(Structure {
            theory: self.theory.clone(),
            inner: semantics::standardize(&self.inner, &self.theory).map_err(err)?,
        })
    }

    #[pyo3(signature = (formula, assignment = None))]
    fn eval(&self, formula: &str, assignment: Option<BTreeMap<String, usize>>) -> PyResult<bool> {
        let sig = self.theory.signature().with_name_budget(self.inner.names().len());
        let f = parser::parse_formula(formula, &sig).map_err(err)?;
        let rho: Assignment = assignment.unwrap_or_default();
        semantics::eval_formula(&f, &self.inner, &rho).map_err(err)
    }

    /// `None` if the sequent is valid, otherwise a falsifying assignment.
    fn counterexample(&self, sequent: &str) -> PyResult<Option<BTreeMap<String, usize>>> {
        let sig = self.theory.signature().with_name_budget(self.inner.names().len());
        let s = parser::parse_sequent(sequent, &sig).map_err(err)?;
        semantics::sequent_counterexample(&s, &self.inner).map_err(err)
    }

    fn sequent_valid(&self, sequent: &str) -> PyResult<bool> {
        Ok(self.counterexample(sequent)?.is_none())
    }

    /// Disagreements `(pred, tuple, k)` between Kleene stages and unfoldings.
    fn unfold_violations(&self, k_max: usize) -> PyResult<Vec<(String, Vec<usize>, usize)>> {
        let vs = semantics::check_unfold_equivalence(&self.inner, &self.theory, k_max).map_err(err)?;
        Ok(vs.into_iter().map(|v| (v.pred, v.tuple, v.k)).collect())
    }

    #[pyo3(signature = (depth = 2, budget = 8))]
    fn term_model(&self, depth: usize, budget: usize) -> PyResult<TermModel> {
        let mc = tm::name_extend(&self.inner, budget).map_err(err)?;
        let sig = self.theory.signature().with_name_budget(budget);
        let inner = tm::build_term_model(&mc, &sig, depth).map_err(err)?;
        Ok(TermModel {
            theory: self.theory.with_name_budget(budget),
            inner,
        })
    }

    fn to_json(&self) -> String {
        parser::print_structure(&self.inner)
    }
}

/// The quotient of a bounded term universe by equality in the structure.
#[pyclass(module = "folid", frozen)]
struct TermModel {
    theory: folid::Theory,
    inner: CoreTermModel,
}

#[pymethods]
impl TermModel {
    /// `(representative, element, members)` per class.
    fn classes(&self) -> Vec<(String, usize, Vec<String>)> {
        let terms = self.inner.universe().terms();
        self.inner
            .classes()
            .iter()
            .map(|c| {
                let members = c.members.iter().map(|&i| terms[i].to_string()).collect();
                (c.representative.to_string(), c.value, members)
            })
            .collect()
    }

    fn is_name_extended(&self) -> bool {
        tm::check_termmodel_name_extended(&self.inner)
    }

    fn is_standard(&self) -> PyResult<bool> {
        tm::check_termmodel_standard(&self.inner, &self.theory).map_err(err)
    }

    /// `.model` JSON over class representatives.
    fn to_json(&self) -> String {
        parser::print_structure(&self.inner.as_structure())
    }
}

/// A cyclic pre-proof.
#[pyclass(module = "folid", frozen)]
struct Proof {
    theory: folid::Theory,
    inner: ProofGraph,
}

#[pymethods]
impl Proof {
    /// Reads `.proof` text.
    #[new]
    fn new(theory: &Theory, text: &str) -> PyResult<Self> {
        let inner = parser::parse_proof(text, theory.inner.signature()).map_err(err)?;
        Ok(Proof {
            theory: theory.inner.clone(),
            inner,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Local rule violations, printed.
    fn check_local(&self) -> Vec<String> {
        check_local(&self.inner, &self.theory)
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    /// `"PASS"` or `"FAIL"` for the global trace condition.
    fn check_gtc(&self) -> &'static str {
        if check_gtc(&self.inner, &self.theory).is_pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }

    /// Stem and cycle node ids of a counterexample lasso, if any.
    fn lasso(&self) -> Option<(Vec<u64>, Vec<u64>)> {
        match check_gtc(&self.inner, &self.theory) {
            Verdict::Pass => None,
            Verdict::Fail(l) => {
                let ids = l.ids(&self.inner);
                Some((ids.stem, ids.cycle))
            }
        }
    }

    /// Walk-through of the counterexample lasso, if any.
    fn explain(&self) -> PyResult<Option<String>> {
        match check_gtc(&self.inner, &self.theory) {
            Verdict::Pass => Ok(None),
            Verdict::Fail(l) => explain_trace(&self.inner, &self.theory, &l).map(Some).map_err(err),
        }
    }

    /// The verdict as a JSON document.
    fn verdict_json(&self) -> String {
        let v = check_gtc(&self.inner, &self.theory);
        verdict_json(&self.inner, &self.theory, &v).to_string()
    }

    fn conclusion(&self) -> String {
        self.inner.node(self.inner.root()).sequent.to_string()
    }
}

/// Code of a formula over the theory's signature (name constants allowed).
#[pyfunction]
fn encode(theory: &Theory, formula: &str) -> PyResult<BigUint> {
    let sig = theory.inner.signature().with_name_budget(usize::MAX >> 1);
    Ok(encode_formula(&parser::parse_formula(formula, &sig).map_err(err)?))
}

#[pyfunction]
fn encode_term_code(theory: &Theory, term: &str) -> PyResult<BigUint> {
    let sig = theory.inner.signature().with_name_budget(usize::MAX >> 1);
    Ok(encode_term(&parser::parse_term(term, &sig).map_err(err)?))
}

/// `(kind, printed)` for a term, formula or tuple code.
#[pyfunction(name = "decode")]
fn decode_code(code: BigUint) -> PyResult<(String, String)> {
    Ok(match decode(&code).map_err(err)? {
        Decoded::Term(t) => ("term".into(), t.to_string()),
        Decoded::Formula(f) => ("formula".into(), f.to_string()),
        Decoded::Tuple(ts) => (
            "tuple".into(),
            format!("({})", ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")),
        ),
    })
}

fn pa_formula(text: &str) -> PyResult<PaFormula> {
    let th = translate::builtin_pa_signature();
    let f = parser::parse_formula(text, th.signature()).map_err(err)?;
    PaFormula::new(f).map_err(err)
}

/// `A^N` for an arithmetic formula `A`.
#[pyfunction]
fn relativize(formula: &str) -> PyResult<String> {
    Ok(translate::relativize(&pa_formula(formula)?).to_string())
}

/// The sequent whose validity reduces truth of `A` in standard models.
#[pyfunction]
fn hardness_sequent(formula: &str) -> PyResult<String> {
    Ok(translate::hardness_sequent(&pa_formula(formula)?).to_string())
}

#[pymodule]
#[pyo3(name = "folid")]
fn folid_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Theory>()?;
    m.add_class::<Structure>()?;
    m.add_class::<TermModel>()?;
    m.add_class::<Proof>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(encode_term_code, m)?)?;
    m.add_function(wrap_pyfunction!(decode_code, m)?)?;
    m.add_function(wrap_pyfunction!(relativize, m)?)?;
    m.add_function(wrap_pyfunction!(hardness_sequent, m)?)?;
    Ok(())
}
