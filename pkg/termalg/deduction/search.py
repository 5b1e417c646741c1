from __future__ import annotations

import heapq
import logging
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, count, product
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from termalg.algebra import enumerable_size, find_counterexample, model_list
from termalg.errors import UnknownVerdictError
from termalg.essentiality import EssStatus, subterm_status
from termalg.events import EventFn, emit
from termalg.sigma import sigma_compose
from termalg.termgen import generate_terms, match
from termalg.terms import (
    Identity,
    Position,
    Signature,
    Term,
    Variable,
    check_term,
    fresh_index,
    leaf_variables,
    occurrences,
    positional_compose,
    positional_compose_many,
    positions_of,
    size,
    sorted_terms,
    substitute,
    subterms,
    term_key,
    variables,
)
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Budget, Theory, Witness

from termalg.deduction.certificates import (
    RewriteStep,
    chain_certificate,
    oriented_rules,
    replacement_by_sigma_r,
)
from termalg.deduction.checker import check_proof
from termalg.deduction.types import (
    DeriveResult,
    DeriveStatus,
    Proof,
    ProofBuilder,
    ProofStep,
    Rule,
    System,
    reflexivity_proof,
)


logger = logging.getLogger(__name__)

MAX_SIGMA_R_DEPTH = 2


class StepMeter:
    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1) -> bool:
        if self.used >= self.limit:
            return False
        self.used += amount
        return True

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit


# ---------------------------------------------------------------------------
# rewriting neighborhood


def rewrite_neighbors(
    sig: Signature,
    term: Term,
    rules: Sequence[Identity],
    pool_vars: Sequence[int],
    max_size: int,
) -> Iterator[RewriteStep]:
    """One-step rewrites of term, extra right-hand variables drawn from the size-capped generator."""
    total = size(term)
    for p, sub in occurrences(term):
        base = total - size(sub)
        for rule in rules:
            theta = match(rule.lhs, sub)
            if theta is None:
                continue
            extra = sorted(variables(rule.rhs) - set(theta))
            if not extra:
                replacement = substitute(rule.rhs, theta)
                if base + size(replacement) <= max_size:
                    target = positional_compose(term, p, replacement)
                    yield RewriteStep(term, target, p, rule, tuple(sorted(theta.items())))
                continue
            skeleton = substitute(rule.rhs, {**theta, **{x: Variable(1) for x in extra}})
            room = max_size - base - size(skeleton)
            if room < 0:
                continue
            counts = Counter(leaf_variables(rule.rhs))
            candidates = generate_terms(sig, pool_vars, room + 1)
            for combo in product(candidates, repeat=len(extra)):
                if sum(counts[x] * (size(c) - 1) for x, c in zip(extra, combo)) > room:
                    continue
                full = {**theta, **dict(zip(extra, combo))}
                target = positional_compose(term, p, substitute(rule.rhs, full))
                yield RewriteStep(term, target, p, rule, tuple(sorted(full.items())))


def _sigma_r_admissible(theory: Theory, step: RewriteStep) -> bool:
    if not step.position:
        return True
    theta = dict(step.theta)
    instance = Identity(substitute(step.rule.lhs, theta), substitute(step.rule.rhs, theta))
    return replacement_by_sigma_r(theory, step.source, step.position, instance) is not None


def _path(parents: Dict[Term, Optional[RewriteStep]], end: Term) -> List[RewriteStep]:
    steps: List[RewriteStep] = []
    node = end
    while parents[node] is not None:
        step = parents[node]
        steps.append(step)
        node = step.source
    steps.reverse()
    return steps


def frontier_key(term: Term, target: Term, rule_rank: int) -> Tuple[Any, ...]:
    """Term-size sum first, then the term order, then the rank of the rule that produced the term."""
    return (size(term) + size(target), term_key(term), rule_rank)


def chain_search(
    theory: Theory,
    goal: Identity,
    budget: Budget,
    system: System = System.D,
) -> Iterator[Optional[List[RewriteStep]]]:
    """Best-first rewrite search from goal.lhs; yields None after every expansion and the chain once found."""
    rules = oriented_rules(theory.axioms)
    pool = sorted(goal.variables() | {fresh_index(goal.lhs, goal.rhs)})
    start, target = goal.lhs, goal.rhs
    parents: Dict[Term, Optional[RewriteStep]] = {start: None}
    if start == target:
        yield []
        return
    rank = {rule: index for index, rule in enumerate(rules)}
    tie = count()
    frontier = [(frontier_key(start, target, -1), next(tie), start)]
    while frontier:
        _, _, current = heapq.heappop(frontier)
        for step in rewrite_neighbors(theory.sig, current, rules, pool, budget.max_term_size):
            nxt = step.target
            if nxt in parents:
                continue
            if system is System.SIGMA_R and not _sigma_r_admissible(theory, step):
                continue
            parents[nxt] = step
            if nxt == target:
                yield _path(parents, nxt)
                return
            heapq.heappush(frontier, (frontier_key(nxt, target, rank[step.rule]), next(tie), nxt))
        yield None


def run_chain_search(
    theory: Theory, goal: Identity, budget: Budget, system: System, meter: StepMeter
) -> Optional[Proof]:
    for found in chain_search(theory, goal, budget, system):
        if found is not None:
            return chain_certificate(theory, goal.lhs, found, system)
        if not meter.spend():
            return None
    return None


# ---------------------------------------------------------------------------
# refutation


def refute(theory: Theory, goal: Identity, budget: Budget) -> Optional[Witness]:
    if theory.oracle.exact:
        verdict = sigma_equal(theory, goal.lhs, goal.rhs)
        return verdict.witness if verdict.is_distinct else None
    for algebra in theory.witness_algebras:
        env = find_counterexample(algebra, goal)
        if env is not None:
            return Witness.of(algebra, env)
    for algebra in model_list(theory.sig, theory.axioms, enumerable_size(theory.sig, budget.max_model_size)):
        env = find_counterexample(algebra, goal)
        if env is not None:
            return Witness.of(algebra, env)
    return None


# ---------------------------------------------------------------------------
# backward SigmaR1 search


@dataclass(frozen=True)
class _Candidate:
    t: Term
    s: Term
    r: Term
    u: Term
    w: Term


def _nonempty_subsets(items: Sequence[Position]) -> Iterator[Tuple[Position, ...]]:
    for k in range(1, len(items) + 1):
        yield from combinations(items, k)


def _sigma_r_candidates(theory: Theory, goal: Identity, budget: Budget) -> Iterator[_Candidate]:
    a, b = goal.lhs, goal.rhs
    pool_vars = sorted(goal.variables() | {fresh_index(a, b)})
    r_pool = generate_terms(theory.sig, pool_vars, max(size(a), size(b)))
    for u in sorted_terms(subterms(a)):
        for w in sorted_terms(subterms(b)):
            if not sigma_equal(theory, u, w).is_equal:
                continue
            for q in _nonempty_subsets(positions_of(a, u)):
                for q_prime in _nonempty_subsets(positions_of(b, w)):
                    for r in r_pool:
                        if r == u and r == w:
                            continue
                        t = positional_compose_many(a, q, r)
                        s = positional_compose_many(b, q_prime, r)
                        if max(size(t), size(s)) > budget.max_term_size:
                            continue
                        yield _Candidate(t, s, r, u, w)


def _sigma_r_applies(theory: Theory, goal: Identity, c: _Candidate) -> bool:
    try:
        if not sigma_equal(theory, c.t, c.s).is_equal:
            return False
        if subterm_status(theory, c.t, c.r) is not EssStatus.ESSENTIAL:
            return False
        if subterm_status(theory, c.s, c.r) is not EssStatus.ESSENTIAL:
            return False
        return (
            sigma_compose(theory, c.t, c.r, c.u) == goal.lhs
            and sigma_compose(theory, c.s, c.r, c.w) == goal.rhs
        )
    except UnknownVerdictError:
        return False


def _sigma_r_search(theory: Theory, goal: Identity, budget: Budget, meter: StepMeter, depth: int) -> Optional[Proof]:
    if goal.lhs == goal.rhs:
        return reflexivity_proof(goal.lhs, theory.describe())
    chain = run_chain_search(theory, goal, budget, System.SIGMA_R, meter)
    if chain is not None or depth == 0:
        return chain
    for candidate in _sigma_r_candidates(theory, goal, budget):
        if not meter.spend():
            return None
        if not _sigma_r_applies(theory, goal, candidate):
            continue
        upper = _sigma_r_search(theory, Identity(candidate.t, candidate.s), budget, meter, depth - 1)
        if upper is None:
            continue
        lower = _sigma_r_search(theory, Identity(candidate.u, candidate.w), budget, meter, depth - 1)
        if lower is None:
            continue
        builder = ProofBuilder()
        first = builder.merge(upper)
        second = builder.add(ProofStep(Identity(candidate.r, candidate.r), Rule.D1))
        third = builder.merge(lower)
        done = builder.add(
            ProofStep(
                goal,
                Rule.SIGMA_R1,
                (first, second, third),
                quad=(candidate.r, candidate.r, candidate.u, candidate.w),
            )
        )
        logger.debug("SigmaR1 step found for %s via r=%s", goal, candidate.r)
        return builder.build_ending_with(goal, done, theory.describe())
    return None


# ---------------------------------------------------------------------------
# entry point


def derive(
    theory: Theory,
    goal: Identity,
    system: System = System.D,
    budget: Optional[Budget] = None,
    event_cb: EventFn = None,
) -> DeriveResult:
    if system not in (System.D, System.SIGMA_R):
        raise ValueError(f"derive supports systems d and sigma-r, not {system.value}")
    check_term(goal.lhs, theory.sig)
    check_term(goal.rhs, theory.sig)
    budget = budget or theory.budget
    emit(event_cb, "DERIVE_STARTED", f"{goal} in system {system.value}")
    if goal.lhs == goal.rhs:
        return DeriveResult(DeriveStatus.PROVED, goal, proof=reflexivity_proof(goal.lhs, theory.describe()))
    if system is System.D:
        witness = refute(theory, goal, budget)
        if witness is not None:
            emit(event_cb, "DERIVE_REFUTED", f"{goal} fails in {witness.algebra.name or 'a model'}")
            return DeriveResult(DeriveStatus.REFUTED, goal, witness=witness)
    meter = StepMeter(budget.max_steps)
    proof: Optional[Proof] = None
    if system is System.D:
        proof = run_chain_search(theory, goal, budget, system, meter)
    else:
        for depth in range(MAX_SIGMA_R_DEPTH + 1):
            proof = _sigma_r_search(theory, goal, budget, meter, depth)
            if proof is not None or meter.exhausted:
                break
    if proof is not None:
        result = check_proof(theory, proof, system)
        if not result.valid:
            logger.error("rejected certificate for %s at step %s: %s", goal, result.failed_step, result.reason)
            proof = None
    if proof is None:
        emit(event_cb, "SEARCH_BUDGET_EXHAUSTED", f"{goal} after {meter.used} expansions")
        logger.warning("no derivation of %s within %d steps", goal, budget.max_steps)
        return DeriveResult(DeriveStatus.NOT_FOUND, goal, steps_used=meter.used)
    emit(event_cb, "DERIVE_PROVED", f"{goal} in {len(proof.steps)} steps")
    return DeriveResult(DeriveStatus.PROVED, goal, proof=proof, steps_used=meter.used)
