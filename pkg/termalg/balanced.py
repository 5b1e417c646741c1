from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from termalg.errors import UnknownVerdictError
from termalg.essentiality import Strictness, position_sets
from termalg.terms import Identity, Position, Term, leaf_variables, render_term, sorted_terms, subterms, variables
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Theory


logger = logging.getLogger(__name__)


class BalanceStatus(str, Enum):
    BALANCED = "balanced"
    UNBALANCED = "unbalanced"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class BalanceReport:
    status: BalanceStatus
    q: Optional[Term] = None
    lhs_count: int = 0
    rhs_count: int = 0
    reason: str = ""

    @property
    def balanced(self) -> Optional[bool]:
        if self.status is BalanceStatus.UNKNOWN:
            return None
        return self.status is BalanceStatus.BALANCED

    def verdict(self) -> str:
        if self.status is BalanceStatus.UNBALANCED:
            return f"unbalanced at q={render_term(self.q)} (|EP_lhs|={self.lhs_count}, |EP_rhs|={self.rhs_count})"
        return self.status.value

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"status": self.status.value, "verdict": self.verdict()}
        if self.q is not None:
            payload.update({"q": render_term(self.q), "lhs_count": self.lhs_count, "rhs_count": self.rhs_count})
        if self.reason:
            payload["reason"] = self.reason
        return payload


def essential_class_positions(
    theory: Theory, t: Term, q: Term, strictness: Strictness = Strictness.STRICT
) -> Tuple[Position, ...]:
    """Minimal positions of t holding a term equal to q that are also essential."""
    return position_sets(theory, t, q, strictness).essential_minimal


def class_representatives(
    theory: Theory, terms: List[Term], strictness: Strictness = Strictness.STRICT
) -> List[Term]:
    """Smallest member of every class the terms fall into."""
    reps: List[Term] = []
    for candidate in sorted_terms(terms):
        placed = False
        for rep in reps:
            verdict = sigma_equal(theory, rep, candidate)
            if verdict.is_equal:
                placed = True
                break
            if verdict.is_unknown:
                if strictness is Strictness.STRICT:
                    raise UnknownVerdictError(f"undecided whether {rep} and {candidate} are equal")
                logger.warning("undecided whether %s and %s are equal; kept apart", rep, candidate)
        if not placed:
            reps.append(candidate)
    return reps


def is_sigma_balanced(theory: Theory, e: Identity, strictness: Strictness = Strictness.STRICT) -> BalanceReport:
    """Compare essential class positions on both sides for every class met by a subterm of either side.

    Classes that meet neither side have no positions on either side, so the
    finite check is exact.
    """
    try:
        reps = class_representatives(theory, list(subterms(e.lhs) | subterms(e.rhs)), strictness)
        for q in reps:
            a = len(essential_class_positions(theory, e.lhs, q, strictness))
            b = len(essential_class_positions(theory, e.rhs, q, strictness))
            if a != b:
                return BalanceReport(BalanceStatus.UNBALANCED, q, a, b)
    except UnknownVerdictError as exc:
        return BalanceReport(BalanceStatus.UNKNOWN, reason=str(exc))
    return BalanceReport(BalanceStatus.BALANCED)


def is_regular(e: Identity) -> bool:
    return variables(e.lhs) == variables(e.rhs)


def is_classically_balanced(e: Identity) -> bool:
    return Counter(leaf_variables(e.lhs)) == Counter(leaf_variables(e.rhs))
