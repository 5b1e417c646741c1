import pytest
from hypothesis import given

from strategies import PROPERTY, term_with_incomparable_pair, term_with_position, terms
from termalg.errors import (
    CompositionError,
    InvalidPositionError,
    SignatureError,
    TermSyntaxError,
    VariableFreeTermError,
)
from termalg.terms import (
    Apply,
    Signature,
    Variable,
    depth,
    infer_signature,
    inductive_compose,
    inductive_compose_many,
    is_prefix,
    leftmost,
    minimal_positions,
    parse_identity,
    parse_position,
    parse_term,
    positional_compose,
    positional_compose_many,
    positions,
    positions_of,
    render_position,
    render_term,
    rightmost,
    size,
    substitute,
    subterm_at,
    subterms,
)

T = "f(f(x1,f(f(f(x1,x2),x2),x3)),x4)"


def test_positions_of_nested_term():
    t = parse_term(T)
    rendered = {render_position(p) for p in positions(t)}
    assert rendered == {"e", "1", "2", "11", "12", "121", "122", "1211", "1212", "12111", "12112"}
    assert positions(t)[0] == ()


def test_subterm_depth_and_composition():
    t = parse_term(T)
    assert render_term(subterm_at(t, parse_position("121"))) == "f(f(x1,x2),x2)"
    assert depth(t) == 5
    u = parse_term("f(x4,x1)")
    assert render_term(positional_compose(t, (1, 2, 1), u)) == "f(f(x1,f(f(x4,x1),x3)),x4)"


def test_subterm_rejects_positions_outside_the_term():
    t = parse_term("f(x1,x2)")
    with pytest.raises(InvalidPositionError):
        subterm_at(t, (1, 1))
    with pytest.raises(InvalidPositionError):
        positional_compose(t, (3,), Variable(1))


def test_inductive_composition_replaces_every_occurrence():
    t = parse_term("f(f(x1,x2),f(f(x1,x2),x3))")
    assert render_term(inductive_compose(t, parse_term("f(x1,x2)"), Variable(1))) == "f(x1,f(x1,x3))"
    assert inductive_compose(t, parse_term("f(x5,x5)"), Variable(1)) == t


def test_inductive_compose_many_rejects_nested_patterns():
    t = parse_term("f(f(x1,x2),x3)")
    with pytest.raises(CompositionError):
        inductive_compose_many(t, [(parse_term("f(x1,x2)"), Variable(4)), (Variable(1), Variable(5))])
    swapped = inductive_compose_many(t, [(Variable(1), Variable(2)), (Variable(2), Variable(1))])
    assert render_term(swapped) == "f(f(x2,x1),x3)"


def test_positional_compose_many_needs_an_antichain():
    t = parse_term("f(f(x1,x2),x3)")
    with pytest.raises(CompositionError):
        positional_compose_many(t, [(1,), (1, 2)], Variable(4))
    with pytest.raises(CompositionError):
        positional_compose_many(t, [(1,), (2,)], [Variable(4)])
    assert render_term(positional_compose_many(t, [(1, 1), (2,)], Variable(4))) == "f(f(x4,x2),x4)"


def test_parse_errors_carry_an_offset():
    with pytest.raises(TermSyntaxError) as excinfo:
        parse_term("f(x1,")
    assert excinfo.value.offset == 5
    with pytest.raises(TermSyntaxError):
        parse_term("f(x1 x2)")
    with pytest.raises(TermSyntaxError):
        parse_term("x0")
    with pytest.raises(TermSyntaxError):
        parse_term("f(x1,x2) junk")


def test_parse_checks_the_signature():
    sig = Signature.parse("f/2 g/1")
    assert parse_term("g(f(x1,x2))", sig) == Apply("g", (Apply("f", (Variable(1), Variable(2))),))
    with pytest.raises(TermSyntaxError):
        parse_term("h(x1)", sig)
    with pytest.raises(TermSyntaxError):
        parse_term("f(x1)", sig)
    with pytest.raises(TermSyntaxError):
        parse_term("f(x1,f(x2))")


def test_signature_validation():
    assert Signature.parse("g/1, f/2").names == ["f", "g"]
    with pytest.raises(SignatureError):
        Signature.parse("f2")
    with pytest.raises(SignatureError):
        Signature.parse("x1/2")
    with pytest.raises(SignatureError):
        Signature.parse("f/2 f/1")
    assert infer_signature("f(x1,g(x2))", "g(x1)").symbols == (("f", 2), ("g", 1))


def test_parse_identity_and_constants():
    e = parse_identity("f(x1,c) = x1")
    assert e.rhs == Variable(1)
    assert e.lhs.children[1] == Apply("c")
    with pytest.raises(TermSyntaxError):
        parse_identity("x1 = x2 = x3")
    with pytest.raises(VariableFreeTermError):
        leftmost(Apply("c"))


def test_positions_render_and_parse():
    assert parse_position("e") == ()
    assert parse_position("121") == (1, 2, 1)
    assert parse_position("1.10") == (1, 10)
    assert render_position((1, 10)) == "1.10"
    with pytest.raises(InvalidPositionError):
        parse_position("102")


def test_minimal_positions_drop_extensions():
    assert minimal_positions([(1, 2), (1,), (2, 1), (2, 1, 1)]) == ((1,), (2, 1))


def test_substitution_is_simultaneous():
    t = parse_term("f(x1,x2)")
    assert render_term(substitute(t, {1: Variable(2), 2: Variable(1)})) == "f(x2,x1)"


@PROPERTY
@given(terms())
def test_render_parse_round_trip(t):
    assert parse_term(render_term(t)) == t


@PROPERTY
@given(terms())
def test_positions_are_prefix_closed(t):
    ps = set(positions(t))
    for p in ps:
        assert p[:-1] in ps or p == ()
    assert len(ps) == size(t)


@PROPERTY
@given(term_with_position(), terms(), terms())
def test_composition_at_one_position(tp, r, s):
    t, p = tp
    composed = positional_compose(t, p, r)
    assert subterm_at(composed, p) == r
    assert positional_compose(composed, p, s) == positional_compose(t, p, s)
    assert positional_compose(t, p, subterm_at(t, p)) == t


@PROPERTY
@given(term_with_incomparable_pair(), terms(), terms())
def test_incomparable_compositions_commute(tpq, r, s):
    t, (p, q) = tpq
    left = positional_compose(positional_compose(t, p, r), q, s)
    right = positional_compose(positional_compose(t, q, s), p, r)
    assert left == right


@PROPERTY
@given(term_with_position(), terms(), terms())
def test_outer_composition_overrides_inner(tp, r, s):
    t, q = tp
    for p in positions(t):
        if is_prefix(p, q):
            assert positional_compose(positional_compose(t, q, s), p, r) == positional_compose(t, p, r)


@PROPERTY
@given(terms(), terms(), terms())
def test_inductive_composition_laws(t, r, s):
    assert inductive_compose(t, t, s) == s
    assert inductive_compose(t, r, r) == t
    if r not in subterms(t):
        assert inductive_compose(t, r, s) == t


@PROPERTY
@given(term_with_position(), terms())
def test_inductive_composition_replaces_every_outermost_occurrence(tp, s):
    t, p = tp
    r = subterm_at(t, p)
    occurrences_of_r = minimal_positions(positions_of(t, r))
    assert p in positions_of(t, r)
    assert inductive_compose(t, r, s) == positional_compose_many(t, occurrences_of_r, s)


@PROPERTY
@given(terms())
def test_extreme_variables_sit_on_the_outer_branches(t):
    left = right = t
    while isinstance(left, Apply):
        left = left.children[0]
    while isinstance(right, Apply):
        right = right.children[-1]
    assert left == Variable(leftmost(t))
    assert right == Variable(rightmost(t))
