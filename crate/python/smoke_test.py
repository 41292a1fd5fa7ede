"""Smoke test for the Python bindings.

Build the extension and make it importable as `folid`, e.g.

    cargo build -p folid-py --features extension-module --release
    cp target/release/libfolid_py.so python/folid.so
    python3 python/smoke_test.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import folid  # noqa: E402

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"


def read(name):
    return (FIXTURES / name).read_text()


def main():
    nat = folid.Theory(read("nat.folid"))
    assert nat.inductive_predicates() == [("N", 1), ("E", 1), ("O", 1)]
    assert nat.unfold("N", 0) == "false"

    clamp = folid.Structure(nat, read("clamp.model"))
    assert clamp.size == 3
    assert clamp.lfp()["N"] == [[0], [1], [2]]
    assert clamp.is_standard()
    assert clamp.eval("O(x)", {"x": 1})
    assert clamp.sequent_valid("N(x) |- E(x) \\/ O(x)")
    assert clamp.unfold_violations(4) == []

    junk = folid.Structure(nat, read("junk.model"))
    assert not junk.is_standard()
    assert junk.standardize().is_standard()

    tm = clamp.term_model(depth=2, budget=3)
    assert len(tm.classes()) == 3
    assert tm.is_name_extended() and tm.is_standard()

    for name in ["nat_refl.proof", "even_odd.proof"]:
        p = folid.Proof(nat, read(name))
        assert p.check_local() == [], name
        assert p.check_gtc() == "PASS", name
    bad = folid.Proof(nat, read("no_progress.proof"))
    assert bad.check_gtc() == "FAIL"
    assert bad.lasso() == ([], [1, 2])
    assert bad.explain() == read("no_progress.explain")

    code = folid.encode(nat, "forall x. N(x) -> N(s(x))")
    assert isinstance(code, int) and code > 0
    assert folid.decode(code) == ("formula", "forall x. N(x) -> N(s(x))")

    assert folid.relativize("exists x. x = 0") == "exists x. N(x) /\\ x = 0"
    assert folid.hardness_sequent("x = 0").startswith("N(x), ")

    try:
        folid.Theory("sig const 0; const 0; rules")
    except ValueError as e:
        assert "DuplicateSymbol" in str(e)
    else:
        raise AssertionError("duplicate constant accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
