from __future__ import annotations

from termalg.errors import UnknownVerdictError
from termalg.essentiality import Strictness, minimal_sigma_positions, sigma_members
from termalg.terms import Apply, Term, Variable, positional_compose_many
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Theory


def sigma_compose(theory: Theory, t: Term, r: Term, s: Term, strictness: Strictness = Strictness.STRICT) -> Term:
    """t^Σ(r <- s): put s at the minimal positions whose subterm is entailed equal to r."""
    ps = minimal_sigma_positions(theory, t, r, strictness)
    if not ps:
        return t
    return positional_compose_many(t, ps, s)


def sigma_compose_clauses(theory: Theory, t: Term, r: Term, s: Term, strictness: Strictness = Strictness.STRICT) -> Term:
    """The same operator evaluated clause by clause, top down."""
    members, _ = sigma_members(theory, t, r, strictness)
    if not members:
        return t
    verdict = sigma_equal(theory, t, r)
    if verdict.is_equal:
        return s
    if verdict.is_unknown and strictness is Strictness.STRICT:
        raise UnknownVerdictError(f"undecided whether {t} and {r} are equal")
    if isinstance(t, Variable) or not t.children:
        return t
    return Apply(t.symbol, tuple(sigma_compose_clauses(theory, child, r, s, strictness) for child in t.children))
