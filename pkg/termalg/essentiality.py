from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, TypeVar

from joblib import Parallel, delayed

from termalg.config import load_settings
from termalg.errors import UnknownVerdictError
from termalg.terms import (
    Position,
    Term,
    Variable,
    fresh_index,
    minimal_positions,
    occurrences,
    positional_compose,
    positions,
    positions_of,
    render_position,
    render_term,
    sorted_terms,
    substitute,
    subterms,
    variables,
)
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Theory, Verdict, VerdictStatus


logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class EssStatus(str, Enum):
    ESSENTIAL = "essential"
    FICTIVE = "fictive"
    UNKNOWN = "unknown"


class Strictness(str, Enum):
    STRICT = "strict"
    PERMISSIVE = "permissive"


def _status(verdict: Verdict) -> EssStatus:
    if verdict.status is VerdictStatus.DISTINCT:
        return EssStatus.ESSENTIAL
    if verdict.status is VerdictStatus.EQUAL:
        return EssStatus.FICTIVE
    return EssStatus.UNKNOWN


def _map(fn: Callable[[T], R], items: Sequence[T], n_jobs: Optional[int]) -> List[R]:
    if n_jobs is None:
        n_jobs = load_settings().n_jobs
    if n_jobs == 1 or len(items) < 2:
        return [fn(item) for item in items]
    return list(Parallel(n_jobs=n_jobs, prefer="threads")(delayed(fn)(item) for item in items))


@dataclass(frozen=True)
class EssReport:
    essential: FrozenSet
    fictive: FrozenSet
    unknown: FrozenSet

    def to_dict(self, render: Callable = str, key: Optional[Callable] = None) -> Dict[str, List[str]]:
        def _sorted(items: Iterable) -> List[str]:
            return [render(item) for item in sorted(items, key=key)]

        return {
            "essential": _sorted(self.essential),
            "fictive": _sorted(self.fictive),
            "unknown": _sorted(self.unknown),
        }


def _report(items: Sequence, statuses: Sequence[EssStatus]) -> EssReport:
    buckets: Dict[EssStatus, set] = {status: set() for status in EssStatus}
    for item, status in zip(items, statuses):
        buckets[status].add(item)
    return EssReport(
        frozenset(buckets[EssStatus.ESSENTIAL]),
        frozenset(buckets[EssStatus.FICTIVE]),
        frozenset(buckets[EssStatus.UNKNOWN]),
    )


def var_status(theory: Theory, t: Term, index: int) -> EssStatus:
    if index not in variables(t):
        return EssStatus.FICTIVE
    z = Variable(fresh_index(t))
    return _status(sigma_equal(theory, t, substitute(t, {index: z})))


def position_status(theory: Theory, t: Term, p: Position) -> EssStatus:
    """Compare t(p; z1) with t(p; z2) for the two smallest fresh variables."""
    z1 = fresh_index(t)
    left = positional_compose(t, p, Variable(z1))
    right = positional_compose(t, p, Variable(z1 + 1))
    return _status(sigma_equal(theory, left, right))


def sigma_essential_vars(theory: Theory, t: Term, n_jobs: Optional[int] = None) -> EssReport:
    indices = sorted(variables(t))
    return _report(indices, _map(lambda i: var_status(theory, t, i), indices, n_jobs))


def sigma_essential_positions(theory: Theory, t: Term, n_jobs: Optional[int] = None) -> EssReport:
    ps = positions(t)
    return _report(ps, _map(lambda p: position_status(theory, t, p), ps, n_jobs))


def _aggregate(statuses: Iterable[EssStatus]) -> EssStatus:
    seen = set(statuses)
    if EssStatus.ESSENTIAL in seen:
        return EssStatus.ESSENTIAL
    if EssStatus.UNKNOWN in seen:
        return EssStatus.UNKNOWN
    return EssStatus.FICTIVE


def sigma_subterm_sets(theory: Theory, t: Term, n_jobs: Optional[int] = None) -> EssReport:
    """A subterm is essential when it sits at one or more essential positions."""
    report = sigma_essential_positions(theory, t, n_jobs)
    status_at = {p: EssStatus.ESSENTIAL for p in report.essential}
    status_at.update({p: EssStatus.UNKNOWN for p in report.unknown})
    per_term: Dict[Term, List[EssStatus]] = {}
    for p, sub in occurrences(t):
        per_term.setdefault(sub, []).append(status_at.get(p, EssStatus.FICTIVE))
    terms = list(per_term)
    return _report(terms, [_aggregate(per_term[sub]) for sub in terms])


def subterm_status(theory: Theory, t: Term, r: Term) -> EssStatus:
    """Whether r belongs to SEss(t); subterms absent from t are not essential."""
    statuses = []
    for p in positions_of(t, r):
        status = position_status(theory, t, p)
        if status is EssStatus.ESSENTIAL:
            return status
        statuses.append(status)
    return _aggregate(statuses)


@dataclass(frozen=True)
class PositionSets:
    sigma_s: FrozenSet[Term]
    sigma_p: FrozenSet[Position]
    minimal: Tuple[Position, ...]
    essential_minimal: Tuple[Position, ...]
    excluded: FrozenSet[Term] = frozenset()

    def to_dict(self, render_pos: Callable[[Position], str] = render_position) -> Dict[str, List[str]]:
        return {
            "sigma_s": [render_term(v) for v in sorted_terms(self.sigma_s)],
            "sigma_p": [render_pos(p) for p in sorted(self.sigma_p)],
            "p": [render_pos(p) for p in self.minimal],
            "ep": [render_pos(p) for p in self.essential_minimal],
        }


def _unknown(strictness: Strictness, message: str, excluded: set, item) -> None:
    if strictness is Strictness.STRICT:
        raise UnknownVerdictError(message)
    logger.warning("%s; excluded", message)
    excluded.add(item)


def sigma_members(
    theory: Theory, t: Term, r: Term, strictness: Strictness = Strictness.STRICT
) -> Tuple[FrozenSet[Term], FrozenSet[Term]]:
    """Subterms of t entailed equal to r, plus the ones excluded as undecided."""
    members = set()
    excluded: set = set()
    for v in sorted_terms(subterms(t)):
        verdict = sigma_equal(theory, r, v)
        if verdict.is_equal:
            members.add(v)
        elif verdict.is_unknown:
            _unknown(strictness, f"undecided whether {r} and {v} are equal", excluded, v)
    return frozenset(members), frozenset(excluded)


def minimal_sigma_positions(
    theory: Theory, t: Term, r: Term, strictness: Strictness = Strictness.STRICT
) -> Tuple[Position, ...]:
    members, _ = sigma_members(theory, t, r, strictness)
    return minimal_positions(p for p, sub in occurrences(t) if sub in members)


def position_sets(
    theory: Theory, t: Term, r: Term, strictness: Strictness = Strictness.STRICT
) -> PositionSets:
    members, excluded = sigma_members(theory, t, r, strictness)
    sigma_p = frozenset(p for p, sub in occurrences(t) if sub in members)
    minimal = minimal_positions(sigma_p)
    essential: List[Position] = []
    dropped_positions: set = set()
    for p in minimal:
        status = position_status(theory, t, p)
        if status is EssStatus.ESSENTIAL:
            essential.append(p)
        elif status is EssStatus.UNKNOWN:
            _unknown(strictness, f"undecided whether position {render_position(p)} of {t} is essential", dropped_positions, p)
    return PositionSets(members, sigma_p, minimal, tuple(essential), excluded)


def is_complete_sample(theory: Theory, terms: Iterable[Term]) -> Optional[bool]:
    """True when every position of every sampled term is fictive; None when undecided."""
    undecided = False
    for t in terms:
        report = sigma_essential_positions(theory, t)
        if report.essential:
            return False
        undecided = undecided or bool(report.unknown)
    return None if undecided else True
