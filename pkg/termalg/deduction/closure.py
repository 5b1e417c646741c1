"""Forward saturation of a theory over every term up to a size cap.

Derivable identities are kept as the classes of a union-find structure
over the term universe; each round applies the rules of the chosen
system to class members and their roots until nothing new appears or the
step budget is spent.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from termalg.config import load_settings
from termalg.errors import UnknownVerdictError
from termalg.essentiality import EssStatus, minimal_sigma_positions, position_status, sigma_subterm_sets, var_status
from termalg.events import EventFn, emit
from termalg.hyper import Hypersubstitution, apply_hyper, default_hyper_pool
from termalg.termgen import generate_terms, terms_by_size
from termalg.terms import (
    Identity,
    Position,
    Term,
    leaf_variables,
    minimal_positions,
    occurrences,
    positional_compose,
    positional_compose_many,
    positions,
    size,
    substitute,
    subterm_at,
    term_key,
    variables,
)
from termalg.theory.types import Budget, Theory

from termalg.deduction.types import Rule, System


logger = logging.getLogger(__name__)

SIDE_CONDITION_MODES = ("base", "closure")


class _UnionFind:
    """Roots are the smallest index of their class; the universe is sorted, so that is the smallest term."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if rj < ri:
            ri, rj = rj, ri
        self.parent[rj] = ri
        return True


class _Saturation:
    def __init__(self, theory: Theory, system: System, budget: Budget, variables_count: int, mode: str) -> None:
        self.theory = theory
        self.system = system
        self.rules = system.rules
        self.budget = budget
        self.mode = mode
        self.cap = budget.max_term_size
        self.universe: List[Term] = generate_terms(theory.sig, range(1, variables_count + 1), self.cap)
        self.index: Dict[Term, int] = {t: i for i, t in enumerate(self.universe)}
        self.by_size = terms_by_size(self.universe)
        self.uf = _UnionFind(len(self.universe))
        self.unions = 0
        self._var_status: Dict[Tuple[Term, int], EssStatus] = {}
        self._pos_status: Dict[Tuple[Term, Position], EssStatus] = {}
        self._sess: Dict[Term, List[Term]] = {}
        self._psets: Dict[Tuple[Term, Term], Optional[Tuple[Position, ...]]] = {}
        self.hyper_pool: List[Hypersubstitution] = default_hyper_pool(theory.sig) if Rule.H1 in self.rules else []

    # -- bookkeeping ---------------------------------------------------

    @property
    def exhausted(self) -> bool:
        return self.unions >= self.budget.max_steps

    def join(self, a: Term, b: Term) -> bool:
        i, j = self.index.get(a), self.index.get(b)
        if i is None or j is None:
            return False
        if self.uf.union(i, j):
            self.unions += 1
            return True
        return False

    def root_term(self, t: Term) -> Term:
        return self.universe[self.uf.find(self.index[t])]

    def fits(self, t: Term, x: int, r_size: int) -> bool:
        return size(t) + leaf_variables(t).count(x) * (r_size - 1) <= self.cap

    def replacements(self, limit: int) -> Iterable[Term]:
        for n in range(1, limit + 1):
            yield from self.by_size.get(n, ())

    def classes(self) -> Dict[int, List[Term]]:
        groups: Dict[int, List[Term]] = {}
        for i, t in enumerate(self.universe):
            groups.setdefault(self.uf.find(i), []).append(t)
        return groups

    # -- side conditions ----------------------------------------------

    def var_status(self, t: Term, x: int) -> EssStatus:
        key = (t, x)
        if key not in self._var_status:
            self._var_status[key] = var_status(self.theory, t, x)
        return self._var_status[key]

    def pos_status(self, t: Term, p: Position) -> EssStatus:
        key = (t, p)
        if key not in self._pos_status:
            self._pos_status[key] = position_status(self.theory, t, p)
        return self._pos_status[key]

    def essential_subterms(self, t: Term) -> List[Term]:
        if t not in self._sess:
            report = sigma_subterm_sets(self.theory, t, n_jobs=1)
            self._sess[t] = sorted(report.essential, key=term_key)
        return self._sess[t]

    def sigma_positions(self, t: Term, r: Term) -> Optional[Tuple[Position, ...]]:
        key = (t, r)
        if key not in self._psets:
            if self.mode == "closure":
                root = self.uf.find(self.index[r])
                matched = [p for p, sub in occurrences(t) if self.uf.find(self.index[sub]) == root]
                self._psets[key] = minimal_positions(matched)
            else:
                try:
                    self._psets[key] = minimal_sigma_positions(self.theory, t, r)
                except UnknownVerdictError:
                    self._psets[key] = None
        return self._psets[key]

    # -- rules -----------------------------------------------------------

    def seed(self, identities: Iterable[Identity]) -> None:
        for e in identities:
            self.join(e.lhs, e.rhs)

    def substitution_rules(self) -> None:
        plain = Rule.D4 in self.rules
        essential_only = Rule.D4E in self.rules
        fictive = Rule.D4F in self.rules
        if not (plain or essential_only or fictive):
            return
        for a in self.universe:
            if self.exhausted:
                return
            c = self.root_term(a)
            for x in sorted(variables(a) | variables(c)):
                status = None
                if not plain:
                    status = self.var_status(a, x)
                for r in self.replacements(self.cap):
                    if not (self.fits(a, x, size(r)) and self.fits(c, x, size(r))):
                        if size(r) > 1:
                            break
                        continue
                    if plain or (essential_only and status is EssStatus.ESSENTIAL):
                        if a != c:
                            self.join(substitute(a, {x: r}), substitute(c, {x: r}))
                    if fictive and status is EssStatus.FICTIVE:
                        self.join(substitute(a, {x: r}), c)

    def replacement_rules(self) -> None:
        plain = Rule.D5 in self.rules
        essential_only = Rule.D5E in self.rules
        fictive = Rule.D5F in self.rules
        if not (plain or essential_only or fictive):
            return
        for h in self.universe:
            if self.exhausted:
                return
            for p in positions(h):
                if not p:
                    continue
                sub = subterm_at(h, p)
                status = None if plain else self.pos_status(h, p)
                if plain or (essential_only and status is EssStatus.ESSENTIAL):
                    c = self.root_term(sub)
                    if c != sub:
                        self.join(h, positional_compose(h, p, c))
                if fictive and status is EssStatus.FICTIVE:
                    for s in self.replacements(self.cap - size(h) + size(sub)):
                        self.join(h, positional_compose(h, p, s))

    def sigma_r_rule(self) -> None:
        if Rule.SIGMA_R1 not in self.rules:
            return
        for members in list(self.classes().values()):
            for t in members:
                for s in members:
                    if self.exhausted:
                        return
                    self._sigma_r_pair(t, s)

    def _sigma_r_pair(self, t: Term, s: Term) -> None:
        s_roots = Counter()
        s_essential = self.essential_subterms(s)
        for v in s_essential:
            s_roots[self.uf.find(self.index[v])] += 1
        for r in self.essential_subterms(t):
            r_root = self.uf.find(self.index[r])
            if not s_roots[r_root]:
                continue
            ps_t = self.sigma_positions(t, r)
            if not ps_t:
                continue
            for v in s_essential:
                if self.uf.find(self.index[v]) != r_root:
                    continue
                ps_s = self.sigma_positions(s, v)
                if not ps_s:
                    continue
                self._compose_all(t, ps_t, s, ps_s)

    def _compose_all(self, t: Term, ps_t: Sequence[Position], s: Term, ps_s: Sequence[Position]) -> None:
        removed_t = sum(size(subterm_at(t, p)) for p in ps_t)
        removed_s = sum(size(subterm_at(s, p)) for p in ps_s)
        room_t = (self.cap - size(t) + removed_t) // len(ps_t)
        room_s = (self.cap - size(s) + removed_s) // len(ps_s)
        for u in self.replacements(room_t):
            lhs = positional_compose_many(t, ps_t, u)
            for w in {u, self.root_term(u)}:
                if size(w) <= room_s:
                    self.join(lhs, positional_compose_many(s, ps_s, w))

    def hyper_rule(self) -> None:
        if Rule.H1 not in self.rules:
            return
        for a in self.universe:
            if self.exhausted:
                return
            c = self.root_term(a)
            if a == c:
                continue
            for h in self.hyper_pool:
                self.join(apply_hyper(h, a), apply_hyper(h, c))

    def run(self, event_cb: EventFn) -> None:
        rounds = 0
        while not self.exhausted:
            rounds += 1
            before = self.unions
            for apply in (self.substitution_rules, self.replacement_rules, self.sigma_r_rule, self.hyper_rule):
                apply()
            emit(event_cb, "CLOSURE_ROUND", f"round {rounds}: {self.unions - before} new unions")
            logger.debug("closure round %d: %d unions", rounds, self.unions - before)
            if self.unions == before:
                return
        emit(event_cb, "SEARCH_BUDGET_EXHAUSTED", f"closure stopped after {self.unions} unions")
        logger.warning("closure sample truncated at %d unions", self.unions)

    def identities(self) -> List[Identity]:
        pairs: List[Identity] = []
        for members in self.classes().values():
            for a in members:
                for b in members:
                    pairs.append(Identity(a, b))
        pairs.sort(key=lambda e: (term_key(e.lhs), term_key(e.rhs)))
        return pairs


def closure_sample(
    theory: Theory,
    system: System = System.D,
    budget: Optional[Budget] = None,
    variables_count: int = 3,
    seeds: Sequence[Identity] = (),
    side_conditions: Optional[str] = None,
    event_cb: EventFn = None,
) -> List[Identity]:
    """Every identity derivable between terms of at most budget.max_term_size nodes.

    The universe uses x1..xm with m the larger of ``variables_count`` and the
    largest axiom variable. ``seeds`` are extra premises, which makes
    re-saturating a sample possible.
    """
    budget = budget or theory.budget
    mode = side_conditions or load_settings().sigma_r_side_conditions
    if mode not in SIDE_CONDITION_MODES:
        raise ValueError(f"side condition mode must be one of {', '.join(SIDE_CONDITION_MODES)}")
    if mode == "closure":
        logger.warning("SigmaR1 side conditions read from the growing closure (experimental)")
    width = max([variables_count] + [max(e.variables(), default=0) for e in theory.axioms])
    state = _Saturation(theory, system, budget, width, mode)
    emit(event_cb, "CLOSURE_STARTED", f"{len(state.universe)} terms, system {system.value}")
    state.seed(theory.axioms)
    state.seed(seeds)
    state.run(event_cb)
    return state.identities()


def closure_classes(identities: Iterable[Identity]) -> Dict[Term, List[Term]]:
    """Group a sample by left side."""
    groups: Dict[Term, List[Term]] = {}
    for e in identities:
        groups.setdefault(e.lhs, []).append(e.rhs)
    return groups
