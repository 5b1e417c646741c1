import pytest
from hypothesis import given

from strategies import PROPERTY, terms
from termalg.algebra import satisfies, satisfies_all
from termalg.config import load_settings
from termalg.errors import BudgetError, TheoryValidationError
from termalg.events import jsonl_event_writer, read_events
from termalg.terms import Identity, Signature, parse_identity, parse_term
from termalg.theory.builtin import affine_semigroup, builtin_theory
from termalg.theory.loader import build_theory, load_theory, parse_theory, resolve_theory_path
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Budget, OracleKind, VerdictStatus

from termalg.deduction.checker import check_proof


def _verdict(theory, text):
    e = parse_identity(text, theory.sig)
    return sigma_equal(theory, e.lhs, e.rhs)


def test_rectangular_band_decisions(load):
    rb = load("rb")
    assert _verdict(rb, "f(f(x1,x2),x3) = f(x1,x3)").is_equal
    verdict = _verdict(rb, "f(x1,x2) = x1")
    assert verdict.is_distinct
    assert verdict.witness.separates(parse_identity("f(x1,x2) = x1"))


def test_semigroup_decision_and_witness(load):
    sg = load("sg")
    assert _verdict(sg, "f(f(f(x1,x2),x1),x2) = f(f(x1,x2),f(x1,x2))").is_equal
    verdict = _verdict(sg, "f(f(x1,x1),x2) = f(x1,x1)")
    assert verdict.status is VerdictStatus.DISTINCT
    assert verdict.witness.algebra.name == "z2_add"
    assert verdict.witness.env == {1: 0, 2: 1}


def test_semigroup_witness_from_affine_maps_when_z2_agrees():
    sg = builtin_theory(OracleKind.SG)
    verdict = _verdict(sg, "f(x1,f(x1,x2)) = x2")
    assert verdict.is_distinct
    assert satisfies(verdict.witness.algebra, parse_identity("f(x1,f(x2,x3)) = f(f(x1,x2),x3)"))
    assert verdict.witness.separates(parse_identity("f(x1,f(x1,x2)) = x2"))


def test_affine_maps_are_semigroups():
    algebra = affine_semigroup("f", 5)
    assert algebra.carrier_size == 20
    assert satisfies(algebra, parse_identity("f(x1,f(x2,x3)) = f(f(x1,x2),x3)"))


def _chain(leaves):
    text = f"x{leaves[-1]}"
    for index in reversed(leaves[:-1]):
        text = f"f(x{index},{text})"
    return parse_term(text)


@pytest.mark.parametrize("h", [6, 15, 27])
def test_semigroup_witness_stays_small_for_long_words(h):
    sg = builtin_theory(OracleKind.SG)
    t = _chain([1] * h + [2, 2] + [1] * h)
    s = _chain([1] * h + [3, 3] + [1] * h)
    verdict = sigma_equal(sg, t, s)
    assert verdict.is_distinct
    assert verdict.witness.algebra.carrier_size <= 20
    assert verdict.witness.separates(Identity(t, s))


def test_empty_and_trivial_theories(load):
    empty = load("empty")
    assert _verdict(empty, "f(x1,x2) = f(x1,x2)").is_equal
    verdict = _verdict(empty, "f(x1,f(x2,x3)) = f(f(x1,x2),x3)")
    assert verdict.is_distinct
    assert verdict.witness.separates(parse_identity("f(x1,f(x2,x3)) = f(f(x1,x2),x3)"))
    assert _verdict(load("trivial"), "f(x1,x2) = x3").is_equal


def test_generic_theories_certify_equalities(load):
    la = load("la")
    verdict = _verdict(la, "f(f(x1,x2),x1) = f(x1,x1)")
    assert verdict.is_equal
    assert verdict.certificate is not None
    assert check_proof(la, verdict.certificate).valid
    assert _verdict(la, "f(x1,x2) = f(x2,x1)").is_distinct

    boolean = load("boolean")
    assert _verdict(boolean, "and(x1,or(x2,not(x2))) = x1").is_equal
    assert _verdict(boolean, "and(x1,x2) = or(x1,x2)").is_distinct


def test_generic_events_are_written(load, tmp_path):
    la = load("la")
    log = tmp_path / "events.jsonl"
    e = parse_identity("f(f(x1,x2),x1) = f(x1,x1)", la.sig)
    assert sigma_equal(la, e.lhs, e.rhs, jsonl_event_writer(log)).is_equal
    events = read_events(log)
    assert [event["stage"] for event in events] == ["GENERIC_HINT_PROOF"]
    assert events[0]["timestamp"]


@PROPERTY
@given(terms(max_vars=3, max_leaves=5), terms(max_vars=3, max_leaves=5))
def test_exact_oracles_are_sound(t, s):
    for kind in (OracleKind.RB, OracleKind.SG, OracleKind.LZ, OracleKind.RZ):
        theory = builtin_theory(kind)
        verdict = sigma_equal(theory, t, s)
        assert not verdict.is_unknown
        if verdict.is_distinct:
            assert satisfies_all(verdict.witness.algebra, theory.axioms)
            assert verdict.witness.separates(Identity(t, s))
        else:
            for algebra in theory.witness_algebras:
                assert satisfies(algebra, Identity(t, s))


@PROPERTY
@given(terms(max_vars=3, max_leaves=5), terms(max_vars=3, max_leaves=5))
def test_verdicts_are_symmetric(t, s):
    rb = builtin_theory(OracleKind.RB)
    assert sigma_equal(rb, t, s).status is sigma_equal(rb, s, t).status


def test_loader_reports_every_field_error(tmp_path):
    text = "\n".join(
        [
            "oracle: nonsense",
            "colour: blue",
            "budget: steps=0",
        ]
    )
    with pytest.raises(TheoryValidationError) as excinfo:
        parse_theory(text, tmp_path)
    fields = [err["field"] for err in excinfo.value.errors]
    assert "signature" in fields
    assert "line 1" in fields
    assert "line 2" in fields
    assert "line 3" in fields


def test_loader_rejects_axioms_the_oracle_refutes(tmp_path):
    with pytest.raises(TheoryValidationError) as excinfo:
        parse_theory("signature: f/2\noracle: rb\naxiom: f(x1,x2) = x1\n", tmp_path)
    assert excinfo.value.errors[0]["field"] == "axiom[0]"


def test_exact_oracles_fix_their_axiom_sets(tmp_path):
    with pytest.raises(TheoryValidationError) as excinfo:
        parse_theory("signature: f/2\noracle: rb\naxiom: f(x1,x1) = x1\n", tmp_path)
    assert [err["field"] for err in excinfo.value.errors] == ["axiom"]
    with pytest.raises(TheoryValidationError):
        build_theory(Signature.parse("f/2"), OracleKind.RB, [parse_identity("f(x1,x1) = x1")])
    lz = parse_theory("signature: f/2\noracle: lz\naxiom: x1 = f(x1,x2)\n", tmp_path)
    assert lz.axioms == (parse_identity("x1 = f(x1,x2)"),)


def test_loader_rejects_witnesses_that_fail_axioms(tmp_path):
    text = "signature: f/2\noracle: generic\naxiom: f(x1,x2) = f(x2,x1)\nwitness: left_zero.json\n"
    with pytest.raises(TheoryValidationError) as excinfo:
        parse_theory(text, tmp_path)
    assert excinfo.value.errors[0]["field"] == "witness[0]"


def test_loader_rejects_bad_hints(tmp_path):
    text = "signature: f/2\noracle: generic\naxiom: f(x1,x1) = x1\nhint: x1 -> f(x1,x1)\n"
    with pytest.raises(TheoryValidationError) as excinfo:
        parse_theory(text, tmp_path)
    assert {err["field"] for err in excinfo.value.errors} == {"hint[0]"}


def test_loader_rejects_repeated_single_keys(tmp_path):
    with pytest.raises(TheoryValidationError):
        parse_theory("signature: f/2\nsignature: g/1\n", tmp_path)


def test_loader_reads_local_witness_files(tmp_path):
    (tmp_path / "const.json").write_text('{"carrier": 2, "ops": {"f": [0, 0, 0, 0]}}', encoding="utf-8")
    path = tmp_path / "zero.eq"
    path.write_text("signature: f/2\noracle: generic\naxiom: f(x1,x2) = f(x3,x4)\nwitness: const.json\n", encoding="utf-8")
    theory = load_theory(path)
    assert theory.name == "zero"
    assert theory.witness_algebras[0].name == "const"


def test_exact_theories_default_to_canonical_axioms(load):
    assert len(load("rb").axioms) == 4
    assert load("trivial").axioms == (parse_identity("x1 = x2"),)
    assert load("empty").axioms == ()


def test_resolve_theory_path(tmp_path, monkeypatch):
    assert resolve_theory_path("rb").name == "rb.eq"
    assert resolve_theory_path("sg.eq").name == "sg.eq"
    with pytest.raises(TheoryValidationError):
        resolve_theory_path("no_such_theory")
    theories = tmp_path / "theories"
    theories.mkdir()
    (theories / "mine.eq").write_text("signature: g/1\noracle: empty\n", encoding="utf-8")
    monkeypatch.setenv("TERMALG_DATA_DIR", str(tmp_path))
    assert resolve_theory_path("mine") == (theories / "mine.eq").resolve()


def test_budget_parsing():
    base = Budget(12, 5000, 3)
    assert Budget.parse("term_size=9 steps=200", base) == Budget(9, 200, 3)
    assert Budget.parse("", base) == base
    for text in ("steps=0", "steps=abc", "bogus=3", "steps"):
        with pytest.raises(BudgetError):
            Budget.parse(text, base)


def test_settings_feed_the_default_budget(load, monkeypatch):
    monkeypatch.setenv("TERMALG_STEPS", "77")
    monkeypatch.setenv("TERMALG_TERM_SIZE", "8")
    assert load_settings().default_budget == Budget(8, 77, 3)
    assert load("sg").budget == Budget(8, 77, 3)
    assert load("la").budget == Budget(9, 200, 3)


def test_builtin_theory_rejects_signatures_without_a_binary_symbol():
    sig_theory = "signature: g/1\noracle: sg\n"
    with pytest.raises(TheoryValidationError):
        parse_theory(sig_theory, resolve_theory_path("rb").parent)
    assert parse_term("f(x1,x2)") in {a.lhs for a in builtin_theory(OracleKind.LZ).axioms}
