from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

from termalg.hyper import Hypersubstitution
from termalg.terms import Identity, Position, Term, render_identity
from termalg.theory.types import Witness


class Rule(str, Enum):
    AXIOM = "Axiom"
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"
    D4 = "D4"
    D4E = "D4e"
    D4F = "D4f"
    D5 = "D5"
    D5E = "D5e"
    D5F = "D5f"
    SIGMA_R1 = "SigmaR1"
    H1 = "H1"


_BASE = frozenset({Rule.AXIOM, Rule.D1, Rule.D2, Rule.D3})


class System(str, Enum):
    D = "d"
    D_REFINED = "d-refined"
    D_ESSENTIAL = "d-essential"
    SIGMA_R = "sigma-r"
    CHI = "chi"

    @property
    def rules(self) -> FrozenSet[Rule]:
        return _SYSTEM_RULES[self]


_SYSTEM_RULES = {
    System.D: _BASE | {Rule.D4, Rule.D5},
    System.D_REFINED: _BASE | {Rule.D4E, Rule.D4F, Rule.D5E, Rule.D5F},
    System.D_ESSENTIAL: _BASE | {Rule.D4E, Rule.D5E},
    System.SIGMA_R: _BASE | {Rule.D4, Rule.SIGMA_R1},
    System.CHI: _BASE | {Rule.D4, Rule.D5, Rule.H1},
}


@dataclass(frozen=True)
class ProofStep:
    """One line of a derivation; premises are 1-based indices of earlier steps."""

    conclusion: Identity
    rule: Rule
    premises: Tuple[int, ...] = ()
    var: Optional[int] = None
    term: Optional[Term] = None
    host: Optional[Term] = None
    position: Optional[Position] = None
    quad: Optional[Tuple[Term, Term, Term, Term]] = None
    hyper: Optional[Hypersubstitution] = None


@dataclass(frozen=True)
class Proof:
    steps: Tuple[ProofStep, ...]
    theory_name: str = ""

    @property
    def conclusion(self) -> Identity:
        if not self.steps:
            raise ValueError("empty proof has no conclusion")
        return self.steps[-1].conclusion

    def __len__(self) -> int:
        return len(self.steps)

    def rules_used(self) -> FrozenSet[Rule]:
        return frozenset(step.rule for step in self.steps)


class ProofBuilder:
    """Appends steps, reusing the index of any conclusion already present."""

    def __init__(self) -> None:
        self.steps: List[ProofStep] = []
        self._known: Dict[Identity, int] = {}

    def add(self, step: ProofStep) -> int:
        existing = self._known.get(step.conclusion)
        if existing is not None:
            return existing
        self.steps.append(step)
        self._known[step.conclusion] = len(self.steps)
        return len(self.steps)

    def index_of(self, e: Identity) -> Optional[int]:
        return self._known.get(e)

    def merge(self, proof: Proof) -> int:
        remap: Dict[int, int] = {}
        last = 0
        for number, step in enumerate(proof.steps, start=1):
            moved = replace(step, premises=tuple(remap[p] for p in step.premises))
            last = self.add(moved)
            remap[number] = last
        return last

    def build(self, theory_name: str = "") -> Proof:
        return Proof(tuple(self.steps), theory_name=theory_name)

    def build_ending_with(self, goal: Identity, index: int, theory_name: str = "") -> Proof:
        """A proof whose last line is ``goal``, already derived at ``index``."""
        steps = list(self.steps)
        if steps[-1].conclusion != goal:
            # re-derive the goal at the end: (a = a) and (a = b) give a = b
            refl = self.add(ProofStep(Identity(goal.lhs, goal.lhs), Rule.D1))
            steps = list(self.steps)
            steps.append(ProofStep(goal, Rule.D3, (refl, index)))
        return Proof(tuple(steps), theory_name=theory_name)


def reflexivity_proof(t: Term, theory_name: str = "") -> Proof:
    return Proof((ProofStep(Identity(t, t), Rule.D1),), theory_name=theory_name)


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    failed_step: Optional[int] = None
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"valid": self.valid, "failed_step": self.failed_step, "reason": self.reason}


class DeriveStatus(str, Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    NOT_FOUND = "not_found"


@dataclass(frozen=True)
class DeriveResult:
    status: DeriveStatus
    goal: Identity
    proof: Optional[Proof] = None
    witness: Optional[Witness] = None
    steps_used: int = 0

    def to_dict(self, render_proof=None) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "status": self.status.value,
            "goal": render_identity(self.goal),
            "steps_used": self.steps_used,
        }
        if self.proof is not None and render_proof is not None:
            payload["proof"] = render_proof(self.proof)
        if self.witness is not None:
            payload["witness"] = self.witness.to_dict()
        return payload


def conclusions(proof: Proof) -> Sequence[Identity]:
    return [step.conclusion for step in proof.steps]
