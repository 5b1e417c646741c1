"""Turn rewrite chains into checkable derivations."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from termalg.errors import UnknownVerdictError
from termalg.essentiality import EssStatus, position_status
from termalg.sigma import sigma_compose
from termalg.termgen import match
from termalg.terms import (
    Apply,
    Identity,
    Position,
    Term,
    Variable,
    fresh_index,
    positional_compose,
    substitute,
    subterm_at,
    variables,
)
from termalg.theory.types import Theory

from termalg.deduction.types import Proof, ProofBuilder, ProofStep, Rule, System


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewriteStep:
    """source rewritten to target by ``rule`` (an axiom or its mirror) instantiated with ``theta`` at ``position``."""

    source: Term
    target: Term
    position: Position
    rule: Identity
    theta: Tuple[Tuple[int, Term], ...]


def oriented_rules(axioms: Sequence[Identity]) -> List[Identity]:
    rules: List[Identity] = []
    for axiom in axioms:
        for rule in (axiom, axiom.mirror()):
            if rule not in rules and rule.lhs != rule.rhs:
                rules.append(rule)
    return rules


def instantiate(builder: ProofBuilder, index: int, e: Identity, theta: Mapping[int, Term]) -> Tuple[int, Identity]:
    """Apply the simultaneous substitution theta to step ``index`` through single-variable D4 steps."""
    pending: Dict[int, Term] = {
        x: theta[x] for x in sorted(e.variables()) if x in theta and theta[x] != Variable(x)
    }
    expected = Identity(substitute(e.lhs, pending), substitute(e.rhs, pending))
    next_fresh = fresh_index(e.lhs, e.rhs, *pending.values())
    current = e
    while pending:
        blocked = set(pending)
        ready = [x for x in sorted(pending) if not (variables(pending[x]) & (blocked - {x}))]
        if ready:
            x = ready[0]
            r = pending.pop(x)
        else:
            # cyclic dependency: park x on a fresh variable first
            x = min(pending)
            r = Variable(next_fresh)
            pending[next_fresh] = pending.pop(x)
            next_fresh += 1
        current = Identity(substitute(current.lhs, {x: r}), substitute(current.rhs, {x: r}))
        index = builder.add(ProofStep(current, Rule.D4, (index,), var=x, term=r))
    assert current == expected
    return index, current


def replacement_by_sigma_r(theory: Theory, host: Term, p: Position, instance: Identity) -> Optional[Tuple[Term, Identity]]:
    """Simulate replacing ``instance.lhs`` at p in host with one SigmaR1 step, if its side conditions hold."""
    z = Variable(fresh_index(host, instance.lhs, instance.rhs))
    context = positional_compose(host, p, z)
    expected = Identity(host, positional_compose(host, p, instance.rhs))
    try:
        if position_status(theory, host, p) is not EssStatus.ESSENTIAL:
            return None
        got = Identity(
            sigma_compose(theory, context, z, instance.lhs),
            sigma_compose(theory, context, z, instance.rhs),
        )
    except UnknownVerdictError:
        return None
    if got != expected:
        return None
    return context, expected


def rewrite_certificate(builder: ProofBuilder, theory: Theory, step: RewriteStep, system: System) -> Optional[int]:
    """Add steps concluding source = target; None when the system cannot justify the replacement."""
    axiom_index = builder.add(ProofStep(step.rule, Rule.AXIOM))
    inst_index, instance = instantiate(builder, axiom_index, step.rule, dict(step.theta))
    if not step.position:
        return inst_index
    if system is System.SIGMA_R:
        simulated = replacement_by_sigma_r(theory, step.source, step.position, instance)
        if simulated is None:
            return None
        context, conclusion = simulated
        z = subterm_at(context, step.position)
        uu = builder.add(ProofStep(Identity(context, context), Rule.D1))
        zz = builder.add(ProofStep(Identity(z, z), Rule.D1))
        return builder.add(
            ProofStep(conclusion, Rule.SIGMA_R1, (uu, zz, inst_index), quad=(z, z, instance.lhs, instance.rhs))
        )
    d5 = builder.add(
        ProofStep(Identity(step.target, step.source), Rule.D5, (inst_index,), host=step.source, position=step.position)
    )
    return builder.add(ProofStep(Identity(step.source, step.target), Rule.D2, (d5,)))


def chain_into(builder: ProofBuilder, theory: Theory, start: Term, steps: Sequence[RewriteStep], system: System) -> Optional[int]:
    if not steps:
        return builder.add(ProofStep(Identity(start, start), Rule.D1))
    acc: Optional[int] = None
    for step in steps:
        index = rewrite_certificate(builder, theory, step, system)
        if index is None:
            return None
        if acc is None:
            acc = index
        else:
            acc = builder.add(ProofStep(Identity(start, step.target), Rule.D3, (acc, index)))
    return acc


def chain_certificate(theory: Theory, start: Term, steps: Sequence[RewriteStep], system: System = System.D) -> Optional[Proof]:
    builder = ProofBuilder()
    if chain_into(builder, theory, start, steps, system) is None:
        return None
    return builder.build(theory.describe())


# ---------------------------------------------------------------------------
# hint normalization


def _postorder(t: Term, prefix: Position = ()) -> List[Tuple[Position, Term]]:
    out: List[Tuple[Position, Term]] = []
    if isinstance(t, Apply):
        for i, child in enumerate(t.children, start=1):
            out.extend(_postorder(child, prefix + (i,)))
    out.append((prefix, t))
    return out


def _innermost_step(t: Term, rules: Sequence[Identity]) -> Optional[RewriteStep]:
    for p, sub in _postorder(t):
        for rule in rules:
            theta = match(rule.lhs, sub)
            if theta is not None:
                target = positional_compose(t, p, substitute(rule.rhs, theta))
                return RewriteStep(t, target, p, rule, tuple(sorted(theta.items())))
    return None


def normalize(t: Term, rules: Sequence[Identity], max_steps: int) -> Tuple[Term, List[RewriteStep], bool]:
    """Innermost-leftmost rewriting; the flag is False when max_steps ran out first."""
    steps: List[RewriteStep] = []
    current = t
    while len(steps) < max_steps:
        step = _innermost_step(current, rules)
        if step is None:
            return current, steps, True
        steps.append(step)
        current = step.target
    return current, steps, False


def hint_certificate(theory: Theory, goal: Identity, system: System = System.D) -> Optional[Proof]:
    if not theory.hints:
        return None
    budget = theory.budget.max_steps
    lhs_nf, lhs_steps, lhs_done = normalize(goal.lhs, theory.hints, budget)
    rhs_nf, rhs_steps, rhs_done = normalize(goal.rhs, theory.hints, budget)
    if not (lhs_done and rhs_done) or lhs_nf != rhs_nf:
        return None
    builder = ProofBuilder()
    left = chain_into(builder, theory, goal.lhs, lhs_steps, system)
    right = chain_into(builder, theory, goal.rhs, rhs_steps, system)
    if left is None or right is None:
        return None
    if goal.rhs == rhs_nf:
        return builder.build_ending_with(goal, left, theory.describe())
    mirrored = builder.add(ProofStep(Identity(rhs_nf, goal.rhs), Rule.D2, (right,)))
    if goal.lhs == lhs_nf:
        return builder.build_ending_with(goal, mirrored, theory.describe())
    done = builder.add(ProofStep(goal, Rule.D3, (left, mirrored)))
    return builder.build_ending_with(goal, done, theory.describe())
