from __future__ import annotations

import logging
from functools import lru_cache

from termalg.events import EventFn
from termalg.terms import Term, check_term
from termalg.theory.builtin import exact_equal, exact_witness
from termalg.theory.types import OracleKind, Theory, Verdict


logger = logging.getLogger(__name__)


def sigma_equal(theory: Theory, t: Term, s: Term, event_cb: EventFn = None) -> Verdict:
    """Decide (or, for GENERIC theories, semi-decide) whether the axioms entail t = s."""
    check_term(t, theory.sig)
    check_term(s, theory.sig)
    if event_cb is None:
        return _memo_sigma_equal(theory, t, s)
    return _sigma_equal(theory, t, s, event_cb)


@lru_cache(maxsize=1 << 16)
def _memo_sigma_equal(theory: Theory, t: Term, s: Term) -> Verdict:
    return _sigma_equal(theory, t, s, None)


def _sigma_equal(theory: Theory, t: Term, s: Term, event_cb: EventFn) -> Verdict:
    if theory.oracle is OracleKind.GENERIC:
        from termalg.theory.generic import generic_equal

        return generic_equal(theory, t, s, event_cb)
    if t == s or exact_equal(theory.oracle, t, s):
        return Verdict.equal()
    witness = exact_witness(theory, t, s)
    if witness is None:
        logger.warning("no separating model constructed for %s and %s under %s", t, s, theory.describe())
        return Verdict.unknown("no separating model constructed")
    return Verdict.distinct(witness)


def clear_cache() -> None:
    _memo_sigma_equal.cache_clear()
