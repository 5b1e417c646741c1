from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, PositiveInt, ValidationError

from termalg.algebra import FiniteAlgebra, evaluate
from termalg.errors import BudgetError, field_error
from termalg.terms import Identity, Signature, render_identity

if TYPE_CHECKING:
    from termalg.deduction.types import Proof


class OracleKind(str, Enum):
    RB = "rb"
    SG = "sg"
    LZ = "lz"
    RZ = "rz"
    TRIVIAL = "trivial"
    EMPTY = "empty"
    GENERIC = "generic"

    @property
    def exact(self) -> bool:
        return self is not OracleKind.GENERIC


_BUDGET_KEYS = {"term_size": "max_term_size", "steps": "max_steps", "model_size": "max_model_size"}


class _BudgetFields(BaseModel):
    model_config = ConfigDict(extra="forbid")

    term_size: PositiveInt
    steps: PositiveInt
    model_size: PositiveInt


@dataclass(frozen=True)
class Budget:
    max_term_size: int = 12
    max_steps: int = 5000
    max_model_size: int = 3

    @classmethod
    def parse(cls, text: str, base: Optional["Budget"] = None) -> "Budget":
        """Read ``term_size=.. steps=.. model_size=..``; missing keys keep the base values."""
        base = base or cls()
        values: Dict[str, Any] = {
            "term_size": base.max_term_size,
            "steps": base.max_steps,
            "model_size": base.max_model_size,
        }
        errors = []
        for token in re.split(r"[,\s]+", text.strip()):
            if not token:
                continue
            key, sep, value = token.partition("=")
            if not sep:
                errors.append(field_error(token, "Expected key=value"))
                continue
            values[key] = value
        if errors:
            raise BudgetError("Invalid budget", errors)
        try:
            fields = _BudgetFields.model_validate(values)
        except ValidationError as exc:
            raise BudgetError(
                "Invalid budget",
                [field_error(".".join(str(loc) for loc in err["loc"]), err["msg"]) for err in exc.errors()],
            ) from None
        return cls(fields.term_size, fields.steps, fields.model_size)

    def render(self) -> str:
        return f"term_size={self.max_term_size} steps={self.max_steps} model_size={self.max_model_size}"

    def to_dict(self) -> Dict[str, int]:
        return {"term_size": self.max_term_size, "steps": self.max_steps, "model_size": self.max_model_size}


@dataclass(frozen=True)
class Theory:
    sig: Signature
    axioms: Tuple[Identity, ...]
    oracle: OracleKind
    budget: Budget = Budget()
    witness_algebras: Tuple[FiniteAlgebra, ...] = ()
    hints: Tuple[Identity, ...] = ()
    name: str = field(default="", compare=False)

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.sig, self.axioms, self.oracle, self.budget, self.witness_algebras, self.hints))
            object.__setattr__(self, "_hash", cached)
        return cached

    def with_budget(self, budget: Optional[Budget]) -> "Theory":
        if budget is None or budget == self.budget:
            return self
        return replace(self, budget=budget)

    def describe(self) -> str:
        return self.name or self.oracle.value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "signature": self.sig.render(),
            "oracle": self.oracle.value,
            "axioms": [render_identity(axiom) for axiom in self.axioms],
            "budget": self.budget.to_dict(),
            "witnesses": [algebra.name for algebra in self.witness_algebras],
            "hints": [f"{axiom.lhs} -> {axiom.rhs}" for axiom in self.hints],
        }


class VerdictStatus(str, Enum):
    EQUAL = "equal"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Witness:
    algebra: FiniteAlgebra
    assignment: Tuple[Tuple[int, int], ...]

    @classmethod
    def of(cls, algebra: FiniteAlgebra, env: Dict[int, int]) -> "Witness":
        return cls(algebra, tuple(sorted(env.items())))

    @property
    def env(self) -> Dict[int, int]:
        return dict(self.assignment)

    def separates(self, e: Identity) -> bool:
        env = self.env
        return evaluate(self.algebra, e.lhs, env) != evaluate(self.algebra, e.rhs, env)

    def render_assignment(self) -> str:
        return ", ".join(f"x{index}={value}" for index, value in self.assignment)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algebra": self.algebra.to_dict(),
            "assignment": {f"x{index}": value for index, value in self.assignment},
        }


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    witness: Optional[Witness] = None
    certificate: Optional["Proof"] = None
    reason: str = ""

    @classmethod
    def equal(cls, certificate: Optional["Proof"] = None) -> "Verdict":
        return cls(VerdictStatus.EQUAL, certificate=certificate)

    @classmethod
    def distinct(cls, witness: Witness) -> "Verdict":
        return cls(VerdictStatus.DISTINCT, witness=witness)

    @classmethod
    def unknown(cls, reason: str) -> "Verdict":
        return cls(VerdictStatus.UNKNOWN, reason=reason)

    @property
    def is_equal(self) -> bool:
        return self.status is VerdictStatus.EQUAL

    @property
    def is_distinct(self) -> bool:
        return self.status is VerdictStatus.DISTINCT

    @property
    def is_unknown(self) -> bool:
        return self.status is VerdictStatus.UNKNOWN

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"status": self.status.value}
        if self.witness is not None:
            payload["witness"] = self.witness.to_dict()
        if self.certificate is not None:
            payload["certificate_steps"] = len(self.certificate.steps)
        if self.reason:
            payload["reason"] = self.reason
        return payload
