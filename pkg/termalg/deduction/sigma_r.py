from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

from termalg.algebra import FiniteAlgebra, find_counterexample
from termalg.errors import UnknownVerdictError
from termalg.essentiality import sigma_subterm_sets
from termalg.sigma import sigma_compose
from termalg.termgen import generate_terms
from termalg.terms import Identity, Term, fresh_index, render_term, sorted_terms
from termalg.theory.types import Theory


logger = logging.getLogger(__name__)

DEFAULT_PROBE_SIZE = 3


@dataclass(frozen=True)
class SigmaRCheck:
    holds: bool
    r: Optional[Term] = None
    v: Optional[Term] = None
    assignment: Tuple[Tuple[int, int], ...] = ()
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"holds": self.holds}
        if self.r is not None:
            payload["r"] = render_term(self.r)
        if self.v is not None:
            payload["v"] = render_term(self.v)
        if self.assignment:
            payload["assignment"] = {f"x{index}": value for index, value in self.assignment}
        if self.reason:
            payload["reason"] = self.reason
        return payload


def default_probes(theory: Theory, e: Identity, max_size: int = DEFAULT_PROBE_SIZE) -> Sequence[Term]:
    pool = sorted(e.variables() | {fresh_index(e.lhs, e.rhs)})
    return generate_terms(theory.sig, pool, max_size)


def sigma_r_satisfies(
    algebra: FiniteAlgebra,
    theory: Theory,
    e: Identity,
    probes: Optional[Sequence[Term]] = None,
) -> SigmaRCheck:
    """Bounded check that every shared essential subterm, replaced by any probe on both sides, keeps the identity true in algebra."""
    t, s = e.lhs, e.rhs
    if probes is None:
        probes = default_probes(theory, e)
    try:
        shared = sigma_subterm_sets(theory, t).essential & sigma_subterm_sets(theory, s).essential
        for r in sorted_terms(shared):
            for v in probes:
                composed = Identity(sigma_compose(theory, t, r, v), sigma_compose(theory, s, r, v))
                env = find_counterexample(algebra, composed)
                if env is not None:
                    logger.debug("%s fails after replacing %s by %s", e, r, v)
                    return SigmaRCheck(False, r, v, tuple(sorted(env.items())))
    except UnknownVerdictError as exc:
        return SigmaRCheck(False, reason=f"undecided: {exc}")
    return SigmaRCheck(True)
