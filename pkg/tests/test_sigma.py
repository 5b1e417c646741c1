import pytest
from hypothesis import given, strategies as st

from strategies import PROPERTY, terms
from termalg.errors import UnknownVerdictError
from termalg.essentiality import Strictness, minimal_sigma_positions, position_sets, sigma_essential_positions
from termalg.sigma import sigma_compose, sigma_compose_clauses
from termalg.terms import (
    Apply,
    Signature,
    Term,
    Variable,
    inductive_compose,
    leaf_variables,
    leftmost,
    parse_identity,
    parse_position,
    parse_term,
    render_term,
    rightmost,
)
from termalg.theory.builtin import builtin_theory
from termalg.theory.loader import build_theory
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Budget, OracleKind


RB = builtin_theory(OracleKind.RB)
SG = builtin_theory(OracleKind.SG)
T = parse_term("f(f(x1,f(f(f(x1,x2),x2),x3)),x4)")


def _right_nested(leaves) -> Term:
    term: Term = Variable(leaves[-1])
    for index in reversed(leaves[:-1]):
        term = Apply("f", (Variable(index), term))
    return term


def _equal_partner(theory, t: Term) -> Term:
    """A term the theory makes equal to t, usually syntactically different."""
    if theory.oracle is OracleKind.SG:
        return _right_nested(leaf_variables(t))
    return Apply("f", (Variable(leftmost(t)), Variable(rightmost(t))))


def test_position_sets_for_a_pattern_class():
    sets = position_sets(RB, T, parse_term("f(x1,x2)"))
    assert sets.sigma_s == {parse_term("f(x1,x2)"), parse_term("f(f(x1,x2),x2)")}
    assert sets.sigma_p == {parse_position("1211"), parse_position("121")}
    assert sets.minimal == (parse_position("121"),)
    assert sets.essential_minimal == ()
    assert sets.to_dict()["p"] == ["121"]


def test_sigma_compose_uses_the_minimal_positions():
    result = sigma_compose(RB, T, parse_term("f(x1,x2)"), parse_term("f(x4,x1)"))
    assert render_term(result) == "f(f(x1,f(f(x4,x1),x3)),x4)"


def test_sigma_compose_in_semigroups():
    r, u = parse_term("f(x1,x2)"), Variable(1)
    t = parse_term("f(f(f(x1,x2),x1),x2)")
    s = parse_term("f(f(x1,x2),f(x1,x2))")
    assert render_term(sigma_compose(SG, t, r, u)) == "f(f(x1,x1),x2)"
    assert render_term(sigma_compose(SG, s, r, u)) == "f(x1,x1)"
    assert sigma_equal(SG, t, s).is_equal
    assert sigma_equal(SG, sigma_compose(SG, t, r, u), sigma_compose(SG, s, r, u)).is_distinct


def test_sigma_compose_without_members_keeps_the_term():
    t = parse_term("f(x1,x2)")
    assert sigma_compose(RB, t, parse_term("x3"), parse_term("f(x3,x3)")) == t
    assert position_sets(RB, t, parse_term("x3")).sigma_p == frozenset()


def test_fictive_containment_depends_on_the_host():
    # equal hosts, equal patterns, but only one host keeps its pattern positions fictive
    t = parse_term("f(f(x1,x2),f(f(x1,x4),x3))")
    s = parse_term("f(f(x1,x4),f(f(x1,x4),x3))")
    r = parse_term("f(x1,x4)")
    assert sigma_equal(RB, t, s).is_equal
    fictive_t = sigma_essential_positions(RB, t).fictive
    fictive_s = sigma_essential_positions(RB, s).fictive
    assert set(minimal_sigma_positions(RB, t, r)) == {(2, 1)}
    assert set(minimal_sigma_positions(RB, t, r)) <= fictive_t
    assert set(minimal_sigma_positions(RB, s, r)) == {(1,), (2, 1)}
    assert not set(minimal_sigma_positions(RB, s, r)) <= fictive_s


def test_strict_sigma_compose_refuses_undecided_membership():
    theory = build_theory(
        Signature.parse("f/2"),
        OracleKind.GENERIC,
        [parse_identity("f(x1,x1) = x1")],
        budget=Budget(3, 1, 1),
    )
    t = parse_term("f(x1,x2)")
    with pytest.raises(UnknownVerdictError):
        sigma_compose(theory, t, Variable(1), Variable(3))
    assert sigma_compose(theory, t, Variable(1), Variable(3), Strictness.PERMISSIVE) == parse_term("f(x3,x2)")


@PROPERTY
@given(st.sampled_from([RB, SG]), terms(), terms(max_leaves=3), terms(max_leaves=3))
def test_clause_form_agrees_with_positions(theory, t, r, s):
    assert sigma_compose(theory, t, r, s) == sigma_compose_clauses(theory, t, r, s)


@PROPERTY
@given(st.sampled_from([RB, SG]), terms(), terms(max_leaves=3))
def test_self_composition_stays_equal(theory, t, u):
    assert sigma_equal(theory, sigma_compose(theory, t, u, u), t).is_equal


@PROPERTY
@given(st.sampled_from([RB, SG]), terms(), terms(max_leaves=3), terms(max_leaves=3))
def test_equal_patterns_select_the_same_positions(theory, t, r, u):
    v = _equal_partner(theory, r)
    assert sigma_equal(theory, r, v).is_equal
    assert minimal_sigma_positions(theory, t, r) == minimal_sigma_positions(theory, t, v)
    assert sigma_equal(theory, sigma_compose(theory, t, r, u), sigma_compose(theory, t, v, u)).is_equal


@PROPERTY
@given(st.sampled_from([RB, SG]), terms(), terms(max_leaves=3), terms(max_leaves=3))
def test_second_pass_is_plain_inductive_composition(theory, t, u, v):
    once = sigma_compose(theory, t, u, u)
    assert sigma_compose(theory, once, u, v) == inductive_compose(once, u, v)
