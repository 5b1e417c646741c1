from __future__ import annotations

import logging
from typing import Callable, Dict, List, Optional, Sequence

from termalg.errors import TermalgError, UnknownVerdictError
from termalg.essentiality import EssStatus, position_status, subterm_status, var_status
from termalg.hyper import apply_hyper
from termalg.sigma import sigma_compose
from termalg.terms import Identity, Variable, check_term, positional_compose, render_position, substitute, subterm_at
from termalg.theory.types import Theory

from termalg.deduction.types import CheckResult, Proof, ProofStep, Rule, System


logger = logging.getLogger(__name__)

_ARITY = {
    Rule.AXIOM: 0,
    Rule.D1: 0,
    Rule.D2: 1,
    Rule.D3: 2,
    Rule.D4: 1,
    Rule.D4E: 1,
    Rule.D4F: 1,
    Rule.D5: 1,
    Rule.D5E: 1,
    Rule.D5F: 0,
    Rule.SIGMA_R1: 3,
    Rule.H1: 1,
}


def _require(status: EssStatus, wanted: EssStatus, what: str) -> str:
    if status is EssStatus.UNKNOWN:
        raise UnknownVerdictError(f"undecided whether {what} is {wanted.value}")
    if status is not wanted:
        return f"{what} is not {wanted.value}"
    return ""


def _mismatch(step: ProofStep, expected: Identity) -> str:
    if step.conclusion != expected:
        return f"conclusion should be {expected}"
    return ""


def _check_axiom(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    if step.conclusion in theory.axioms or step.conclusion.mirror() in theory.axioms:
        return ""
    return "not an axiom of the theory"


def _check_d1(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    return "" if step.conclusion.lhs == step.conclusion.rhs else "sides differ"


def _check_d2(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    return _mismatch(step, premises[0].mirror())


def _check_d3(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    first, second = premises
    if first.rhs != second.lhs:
        return "premises do not chain"
    return _mismatch(step, Identity(first.lhs, second.rhs))


def _substitution(step: ProofStep) -> Optional[str]:
    if step.var is None or step.term is None:
        return "needs var and term"
    return None


def _check_d4(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    missing = _substitution(step)
    if missing:
        return missing
    a, b = premises[0].lhs, premises[0].rhs
    mapping = {step.var: step.term}
    expected = Identity(substitute(a, mapping), substitute(b, mapping))
    if step.rule is Rule.D4E:
        problem = _require(var_status(theory, a, step.var), EssStatus.ESSENTIAL, f"x{step.var} in {a}")
        if problem:
            return problem
    if step.rule is Rule.D4F:
        problem = _require(var_status(theory, a, step.var), EssStatus.FICTIVE, f"x{step.var} in {a}")
        if problem:
            return problem
        expected = Identity(substitute(a, mapping), b)
    return _mismatch(step, expected)


def _check_d5(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    if step.host is None or step.position is None:
        return "needs host and position"
    host, p = step.host, step.position
    where = f"position {render_position(p)} of {host}"
    if step.rule is Rule.D5F:
        if step.term is None:
            return "needs the replacement term"
        problem = _require(position_status(theory, host, p), EssStatus.FICTIVE, where)
        return problem or _mismatch(step, Identity(positional_compose(host, p, step.term), host))
    a, b = premises[0].lhs, premises[0].rhs
    if subterm_at(host, p) != a:
        return f"host has no {a} at {render_position(p)}"
    if step.rule is Rule.D5E:
        problem = _require(position_status(theory, host, p), EssStatus.ESSENTIAL, where)
        if problem:
            return problem
    return _mismatch(step, Identity(positional_compose(host, p, b), host))


def _check_sigma_r1(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    (t, s), (r, v), (u, w) = [(e.lhs, e.rhs) for e in premises]
    if step.quad is not None and step.quad != (r, v, u, w):
        return "quadruple does not match the premises"
    problem = _require(subterm_status(theory, t, r), EssStatus.ESSENTIAL, f"{r} as a subterm of {t}")
    problem = problem or _require(subterm_status(theory, s, v), EssStatus.ESSENTIAL, f"{v} as a subterm of {s}")
    if problem:
        return problem
    return _mismatch(step, Identity(sigma_compose(theory, t, r, u), sigma_compose(theory, s, v, w)))


def _check_h1(theory: Theory, step: ProofStep, premises: List[Identity]) -> str:
    if step.hyper is None:
        return "needs a hypersubstitution"
    a, b = premises[0].lhs, premises[0].rhs
    return _mismatch(step, Identity(apply_hyper(step.hyper, a), apply_hyper(step.hyper, b)))


_CHECKS: Dict[Rule, Callable[[Theory, ProofStep, List[Identity]], str]] = {
    Rule.AXIOM: _check_axiom,
    Rule.D1: _check_d1,
    Rule.D2: _check_d2,
    Rule.D3: _check_d3,
    Rule.D4: _check_d4,
    Rule.D4E: _check_d4,
    Rule.D4F: _check_d4,
    Rule.D5: _check_d5,
    Rule.D5E: _check_d5,
    Rule.D5F: _check_d5,
    Rule.SIGMA_R1: _check_sigma_r1,
    Rule.H1: _check_h1,
}


def check_step(theory: Theory, step: ProofStep, premises: Sequence[Identity]) -> str:
    """Empty string when the step is valid, otherwise the reason it is not."""
    if len(premises) != _ARITY[step.rule]:
        return f"{step.rule.value} takes {_ARITY[step.rule]} premise(s), got {len(premises)}"
    try:
        check_term(step.conclusion.lhs, theory.sig)
        check_term(step.conclusion.rhs, theory.sig)
        if step.term is not None and not isinstance(step.term, Variable):
            check_term(step.term, theory.sig)
        return _CHECKS[step.rule](theory, step, list(premises))
    except UnknownVerdictError as exc:
        return f"side condition undecided: {exc}"
    except TermalgError as exc:
        return str(exc)


def check_proof(theory: Theory, proof: Proof, system: Optional[System] = None) -> CheckResult:
    if not proof.steps:
        return CheckResult(False, None, "empty proof")
    allowed = system.rules if system is not None else None
    for number, step in enumerate(proof.steps, start=1):
        if allowed is not None and step.rule not in allowed:
            return CheckResult(False, number, f"{step.rule.value} is not a rule of system {system.value}")
        if any(not 1 <= p < number for p in step.premises):
            return CheckResult(False, number, "premises must refer to earlier steps")
        reason = check_step(theory, step, [proof.steps[p - 1].conclusion for p in step.premises])
        if reason:
            logger.debug("step %d (%s) rejected: %s", number, step.rule.value, reason)
            return CheckResult(False, number, reason)
    return CheckResult(True)
