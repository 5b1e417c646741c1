from hypothesis import settings, strategies as st

from termalg.terms import Apply, Term, Variable, comparable, positions

PROPERTY = settings(max_examples=200, derandomize=True, deadline=None)
SLOW_PROPERTY = settings(max_examples=40, derandomize=True, deadline=None)


def terms(max_vars: int = 4, max_leaves: int = 6, symbol: str = "f") -> st.SearchStrategy[Term]:
    """Binary terms over x1..x_max_vars with at most max_leaves leaves."""
    leaves = st.integers(min_value=1, max_value=max_vars).map(Variable)
    return st.recursive(
        leaves,
        lambda children: st.tuples(children, children).map(lambda pair: Apply(symbol, pair)),
        max_leaves=max_leaves,
    )


def compound_terms(max_vars: int = 4, max_leaves: int = 6, symbol: str = "f") -> st.SearchStrategy[Term]:
    half = terms(max_vars, max(1, max_leaves // 2), symbol)
    return st.tuples(half, half).map(lambda pair: Apply(symbol, pair))


def term_with_position(max_vars: int = 4, max_leaves: int = 6) -> st.SearchStrategy:
    return terms(max_vars, max_leaves).flatmap(lambda t: st.tuples(st.just(t), st.sampled_from(positions(t))))


def term_with_incomparable_pair(max_vars: int = 4, max_leaves: int = 6) -> st.SearchStrategy:
    """A compound term with two positions neither of which is a prefix of the other."""

    def _pairs(t: Term):
        ps = positions(t)
        pairs = [(p, q) for p in ps for q in ps if not comparable(p, q)]
        return st.tuples(st.just(t), st.sampled_from(pairs))

    return compound_terms(max_vars, max_leaves).flatmap(_pairs)
