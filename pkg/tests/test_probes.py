import pytest

from termalg.hyper import swap
from termalg.probes import NONE_FOUND, replacement_pairs, solidity_probe, stability_probe
from termalg.terms import Variable, parse_identity, parse_term
from termalg.theory.oracle import sigma_equal


def _stages():
    seen = []
    return seen, lambda stage, message: seen.append(stage)


def test_solidity_probe_breaks_left_absorption(load):
    la = load("la")
    result = solidity_probe(la, la.axioms)
    assert result.found
    found = result.counterexample
    assert found.witness.separates(found.image)
    assert sigma_equal(la, found.image.lhs, found.image.rhs).is_distinct
    assert result.summary() == "counterexample found"


def test_swap_alone_breaks_left_absorption(load):
    la = load("la")
    seen, cb = _stages()
    result = solidity_probe(la, la.axioms, hyps=[swap(la.sig)], event_cb=cb)
    assert result.counterexample.image == parse_identity("f(x1,f(x2,x1)) = f(x1,x1)")
    assert result.checks == 1
    assert seen == ["PROBE_COUNTEREXAMPLE"]


def test_solidity_probe_finds_nothing_in_the_trivial_variety(load):
    trivial = load("trivial")
    seen, cb = _stages()
    result = solidity_probe(trivial, trivial.axioms, event_cb=cb)
    assert not result.found
    assert result.summary() == NONE_FOUND
    assert result.checks == 38
    assert seen == ["PROBE_DONE"]


def test_solidity_probe_wants_identities_of_the_theory(load):
    rb = load("rb")
    with pytest.raises(ValueError):
        solidity_probe(rb, [parse_identity("f(x1,x2) = x1")])


def test_stability_probe_breaks_semigroups(load):
    sg = load("sg")
    result = stability_probe(sg, seed=0)
    assert result.found
    found = result.counterexample
    assert sigma_equal(sg, found.t, found.s).is_equal
    assert sigma_equal(sg, found.r, found.v).is_equal
    assert sigma_equal(sg, found.u, found.w).is_equal
    assert found.witness.separates(found.composed)
    assert result.to_dict()["result"] == "counterexample found"


@pytest.mark.parametrize("name, samples", [("rb", 400), ("lz", 400), ("rz", 400), ("la", 40)])
def test_stability_probe_finds_nothing_in_stable_theories(load, name, samples):
    seen, cb = _stages()
    result = stability_probe(load(name), seed=7, samples=samples, event_cb=cb)
    assert not result.found
    assert result.checks <= samples
    assert seen == ["PROBE_DONE"]


def test_stability_probe_is_reproducible(load):
    rz = load("rz")
    first = stability_probe(rz, seed=3, samples=150)
    second = stability_probe(rz, seed=3, samples=150)
    assert first == second


@pytest.mark.slow
@pytest.mark.parametrize("name", ["rb", "lz", "rz", "la"])
def test_stable_theories_hold_at_the_default_budget(load, name):
    theory = load(name)
    result = stability_probe(theory, seed=0)
    assert not result.found
    assert result.checks <= theory.budget.max_steps


def test_replacements_include_fresh_variables_and_rewritten_partners(load):
    rb = load("rb")
    t = parse_term("f(x1,x2)")
    pairs = replacement_pairs(rb, t, t)
    assert (Variable(3), Variable(3)) in pairs
    assert (Variable(1), parse_term("f(x1,x1)")) in pairs
    assert (parse_term("f(x1,x3)"), parse_term("f(x1,x3)")) in pairs
    for u, w in pairs:
        assert sigma_equal(rb, u, w).is_equal
