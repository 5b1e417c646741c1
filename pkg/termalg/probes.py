"""Falsifiers for solidity and stability.

Both probes search for a counterexample within a budget. Finding none
is evidence only and is reported as "no counterexample within budget".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import islice
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from termalg.config import load_settings
from termalg.errors import UnknownVerdictError
from termalg.essentiality import sigma_subterm_sets
from termalg.events import EventFn, emit
from termalg.hyper import Hypersubstitution, apply_hyper, default_hyper_pool
from termalg.sigma import sigma_compose
from termalg.termgen import generate_terms, random_term
from termalg.terms import Identity, Term, Variable, fresh_index, render_identity, render_term, size, sorted_terms
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Budget, Theory, Witness

from termalg.deduction.certificates import oriented_rules
from termalg.deduction.search import refute, rewrite_neighbors


logger = logging.getLogger(__name__)

NONE_FOUND = "no counterexample within budget"
SWEEP_MAX_SIZE = 7
SWEEP_VARIABLES = (1, 2)
RANDOM_WALK_STEPS = 3
MAX_IDLE_SAMPLES = 64
REPLACEMENT_MAX_SIZE = 3
PARTNERS_PER_TERM = 2


@dataclass(frozen=True)
class SolidityCounterexample:
    identity: Identity
    hyper: Hypersubstitution
    image: Identity
    witness: Witness

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity": render_identity(self.identity),
            "hyper": self.hyper.to_dict(),
            "image": render_identity(self.image),
            "witness": self.witness.to_dict(),
        }


@dataclass(frozen=True)
class StabilityCounterexample:
    t: Term
    s: Term
    r: Term
    v: Term
    u: Term
    w: Term
    composed: Identity
    witness: Witness

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": render_term(self.t),
            "s": render_term(self.s),
            "r": render_term(self.r),
            "v": render_term(self.v),
            "u": render_term(self.u),
            "w": render_term(self.w),
            "composed": render_identity(self.composed),
            "witness": self.witness.to_dict(),
        }


@dataclass(frozen=True)
class ProbeResult:
    counterexample: Optional[Any] = None
    checks: int = 0
    undecided: int = 0

    @property
    def found(self) -> bool:
        return self.counterexample is not None

    def summary(self) -> str:
        return "counterexample found" if self.found else NONE_FOUND

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"result": self.summary(), "checks": self.checks, "undecided": self.undecided}
        if self.counterexample is not None:
            payload["counterexample"] = self.counterexample.to_dict()
        return payload


# ---------------------------------------------------------------------------
# solidity


def solidity_probe(
    theory: Theory,
    ids: Sequence[Identity],
    hyps: Optional[Sequence[Hypersubstitution]] = None,
    budget: Optional[Budget] = None,
    event_cb: EventFn = None,
) -> ProbeResult:
    """Look for an identity of the theory whose image under some hypersubstitution fails."""
    budget = budget or theory.budget
    if hyps is None:
        hyps = default_hyper_pool(theory.sig)
    for e in ids:
        verdict = sigma_equal(theory, e.lhs, e.rhs)
        if verdict.is_distinct:
            raise ValueError(f"{render_identity(e)} is not an identity of the theory")
        if verdict.is_unknown:
            logger.warning("could not confirm %s; probing it anyway", render_identity(e))
    checks = undecided = 0
    for e in ids:
        for h in hyps:
            if checks >= budget.max_steps:
                emit(event_cb, "SEARCH_BUDGET_EXHAUSTED", f"solidity probe stopped after {checks} checks")
                return ProbeResult(None, checks, undecided)
            checks += 1
            image = Identity(apply_hyper(h, e.lhs), apply_hyper(h, e.rhs))
            verdict = sigma_equal(theory, image.lhs, image.rhs)
            if verdict.is_unknown:
                undecided += 1
            elif verdict.is_distinct:
                found = SolidityCounterexample(e, h, image, verdict.witness)
                emit(event_cb, "PROBE_COUNTEREXAMPLE", f"{h.render()} breaks {render_identity(e)}")
                return ProbeResult(found, checks, undecided)
    emit(event_cb, "PROBE_DONE", f"solidity: {NONE_FOUND} ({checks} checks)")
    return ProbeResult(None, checks, undecided)


# ---------------------------------------------------------------------------
# stability


def _equal_pairs(theory: Theory, t: Term, cap: int) -> Iterator[Term]:
    """t itself and its one-step rewrites by the axioms."""
    yield t
    seen = {t}
    for step in rewrite_neighbors(theory.sig, t, oriented_rules(theory.axioms), SWEEP_VARIABLES, cap):
        if step.target not in seen:
            seen.add(step.target)
            yield step.target


def _random_partner(theory: Theory, rng: np.random.Generator, t: Term, cap: int) -> Term:
    current = t
    rules = oriented_rules(theory.axioms)
    for _ in range(int(rng.integers(0, RANDOM_WALK_STEPS + 1))):
        options = [step.target for step in rewrite_neighbors(theory.sig, current, rules, SWEEP_VARIABLES, cap)]
        if not options:
            break
        current = options[int(rng.integers(len(options)))]
    return current


def replacement_pairs(theory: Theory, t: Term, s: Term) -> List[Tuple[Term, Term]]:
    """Equal pairs (u, w) for replacing r and v in t and s.

    u ranges over x1, x2, a variable fresh for t and s, and the small
    compounds over x1 and that fresh variable; w is u itself or one of its
    first one-step rewrites.
    """
    fresh = fresh_index(t, s)
    candidates = sorted_terms(
        {Variable(index) for index in (*SWEEP_VARIABLES, fresh)}
        | set(generate_terms(theory.sig, (1, fresh), REPLACEMENT_MAX_SIZE))
    )
    pairs: List[Tuple[Term, Term]] = []
    for u in candidates:
        partners = islice(_equal_pairs(theory, u, size(u) + 2), PARTNERS_PER_TERM + 1)
        pairs.extend((u, w) for w in partners)
    return pairs


class _StabilitySearch:
    def __init__(self, theory: Theory, budget: Budget, limit: int) -> None:
        self.theory = theory
        self.budget = budget
        self.limit = limit
        self.checks = 0
        self.undecided = 0
        self._sess: Dict[Term, List[Term]] = {}

    @property
    def exhausted(self) -> bool:
        return self.checks >= self.limit

    def essential(self, t: Term) -> List[Term]:
        if t not in self._sess:
            report = sigma_subterm_sets(self.theory, t)
            self.undecided += len(report.unknown)
            self._sess[t] = sorted_terms(report.essential)
        return self._sess[t]

    def pair(
        self, t: Term, s: Term, extra: Sequence[Tuple[Term, Term]] = ()
    ) -> Optional[StabilityCounterexample]:
        replacements = replacement_pairs(self.theory, t, s) + list(extra)
        for r in self.essential(t):
            for v in self.essential(s):
                if self.exhausted:
                    return None
                if not sigma_equal(self.theory, r, v).is_equal:
                    continue
                for u, w in replacements:
                    if self.exhausted:
                        return None
                    self.checks += 1
                    found = self.check(t, s, r, v, u, w)
                    if found is not None:
                        return found
        return None

    def check(self, t: Term, s: Term, r: Term, v: Term, u: Term, w: Term) -> Optional[StabilityCounterexample]:
        try:
            composed = Identity(sigma_compose(self.theory, t, r, u), sigma_compose(self.theory, s, v, w))
        except UnknownVerdictError:
            self.undecided += 1
            return None
        if composed.lhs == composed.rhs:
            return None
        witness = refute(self.theory, composed, self.budget)
        if witness is None:
            return None
        return StabilityCounterexample(t, s, r, v, u, w, composed, witness)


def stability_probe(
    theory: Theory,
    budget: Optional[Budget] = None,
    seed: int = 0,
    samples: Optional[int] = None,
    event_cb: EventFn = None,
) -> ProbeResult:
    """Look for equal t, s, equal essential subterms r, v and equal u, w with t(r <- u) != s(v <- w).

    A systematic sweep over small two-variable terms runs first, then a
    seeded random phase; both count against the same check budget.
    """
    budget = budget or theory.budget
    limit = samples or load_settings().probe_samples or budget.max_steps
    cap = min(SWEEP_MAX_SIZE, budget.max_term_size)
    search = _StabilitySearch(theory, budget, limit)

    def _result(found: Optional[StabilityCounterexample]) -> ProbeResult:
        if found is not None:
            emit(event_cb, "PROBE_COUNTEREXAMPLE", f"{render_term(found.t)} = {render_term(found.s)} with r={render_term(found.r)}")
        else:
            emit(event_cb, "PROBE_DONE", f"stability: {NONE_FOUND} ({search.checks} checks)")
        return ProbeResult(found, search.checks, search.undecided)

    for t in generate_terms(theory.sig, SWEEP_VARIABLES, cap):
        for s in _equal_pairs(theory, t, cap):
            found = search.pair(t, s)
            if found is not None or search.exhausted:
                return _result(found)

    rng = np.random.default_rng(seed)
    random_cap = max(cap, min(budget.max_term_size, 2 * cap))
    stalled = 0
    while not search.exhausted and stalled < MAX_IDLE_SAMPLES:
        before = search.checks
        t = random_term(rng, theory.sig, SWEEP_VARIABLES, random_cap)
        s = _random_partner(theory, rng, t, random_cap)
        u = random_term(rng, theory.sig, (*SWEEP_VARIABLES, fresh_index(t, s)), REPLACEMENT_MAX_SIZE + 2)
        w = _random_partner(theory, rng, u, random_cap)
        found = search.pair(t, s, [(u, w)])
        if found is not None:
            return _result(found)
        stalled = stalled + 1 if search.checks == before else 0
    logger.info("stability probe on %s: %s after %d checks", theory.describe(), NONE_FOUND, search.checks)
    return _result(None)
