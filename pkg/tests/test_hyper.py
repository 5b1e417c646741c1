import pytest
from hypothesis import given, strategies as st

from strategies import PROPERTY, terms
from termalg.errors import SignatureError, TermSyntaxError
from termalg.hyper import (
    Hypersubstitution,
    apply_hyper,
    compose_hyper,
    default_hyper_pool,
    parse_hyper_map,
    swap,
)
from termalg.terms import Signature, parse_term, render_term

F2 = Signature.parse("f/2")
POOL = default_hyper_pool(F2)


def test_swap_mirrors_every_application():
    h = swap(F2)
    assert render_term(apply_hyper(h, parse_term("f(f(x1,x2),x1)"))) == "f(x1,f(x2,x1))"
    assert apply_hyper(h, parse_term("f(x1,x1)")) == parse_term("f(x1,x1)")
    assert h.to_dict() == {"f": "f(x2,x1)"}


def test_composition_applies_the_left_map_to_the_right_images():
    h = swap(F2)
    assert compose_hyper(h, h) == Hypersubstitution.identity(F2)
    square = parse_hyper_map(["f -> f(x1,x1)"], F2)
    assert compose_hyper(square, h).image("f") == parse_term("f(x2,x2)")


def test_maps_are_checked_against_the_signature():
    with pytest.raises(SignatureError):
        Hypersubstitution.of(F2, {"f": parse_term("f(x1,x3)")})
    with pytest.raises(SignatureError):
        Hypersubstitution.of(F2, {"g": parse_term("x1")})
    with pytest.raises(TermSyntaxError):
        parse_hyper_map(["f f(x2,x1)"], F2)
    with pytest.raises(SignatureError):
        parse_hyper_map(["f -> x1", "f -> x2"], F2)
    assert parse_hyper_map(["f -> f(x2,x1)"], F2) == swap(F2)


def test_unmapped_symbols_keep_their_shape():
    sig = Signature.parse("f/2 g/1")
    h = parse_hyper_map(["g -> x1"], sig)
    assert h.image("f") == parse_term("f(x1,x2)", sig)
    assert apply_hyper(h, parse_term("g(f(x1,g(x2)))", sig)) == parse_term("f(x1,x2)", sig)


def test_default_pool_covers_depth_two_images():
    assert len(POOL) == 38
    assert POOL[0].image("f") == parse_term("x1")
    assert swap(F2) in POOL
    assert len(default_hyper_pool(F2, limit=5)) == 5


@PROPERTY
@given(terms(), st.sampled_from(POOL), st.sampled_from(POOL))
def test_composition_matches_successive_application(t, h1, h2):
    assert apply_hyper(compose_hyper(h1, h2), t) == apply_hyper(h1, apply_hyper(h2, t))
    assert apply_hyper(Hypersubstitution.identity(F2), t) == t
