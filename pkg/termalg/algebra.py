from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from pathlib import Path
from typing import Any, Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from termalg.errors import AlgebraError
from termalg.terms import (
    Identity,
    Position,
    Signature,
    Term,
    Variable,
    fresh_index,
    positional_compose,
    positions,
    variables,
)


logger = logging.getLogger(__name__)

TableEntry = Tuple[str, int, Tuple[int, ...]]


@dataclass(frozen=True)
class FiniteAlgebra:
    """Carrier {0..n-1} with one flattened row-major table per symbol (last argument fastest)."""

    carrier_size: int
    tables: Tuple[TableEntry, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        n = self.carrier_size
        if not isinstance(n, int) or n < 1:
            raise AlgebraError("carrier size must be a positive integer")
        seen = set()
        for symbol, arity, entries in self.tables:
            if symbol in seen:
                raise AlgebraError(f"duplicate table for {symbol}")
            seen.add(symbol)
            if len(entries) != n ** arity:
                raise AlgebraError(f"table for {symbol} needs {n ** arity} entries, got {len(entries)}")
            if any(not 0 <= value < n for value in entries):
                raise AlgebraError(f"table for {symbol} has entries outside 0..{n - 1}")

    @classmethod
    def from_tables(
        cls,
        carrier_size: int,
        ops: Mapping[str, Sequence[int]],
        sig: Signature,
        name: str = "",
    ) -> "FiniteAlgebra":
        missing = [symbol for symbol in sig.names if symbol not in ops]
        if missing:
            raise AlgebraError(f"missing table for {', '.join(missing)}")
        extra = sorted(set(ops) - set(sig.names))
        if extra:
            raise AlgebraError(f"tables for symbols outside the signature: {', '.join(extra)}")
        tables = tuple(
            (symbol, arity, tuple(int(value) for value in ops[symbol])) for symbol, arity in sig.symbols
        )
        return cls(carrier_size, tables, name=name)

    @classmethod
    def from_functions(
        cls,
        carrier_size: int,
        sig: Signature,
        functions: Mapping[str, Callable[..., int]],
        name: str = "",
    ) -> "FiniteAlgebra":
        ops = {
            symbol: [functions[symbol](*args) for args in product(range(carrier_size), repeat=arity)]
            for symbol, arity in sig.symbols
        }
        return cls.from_tables(carrier_size, ops, sig, name=name)

    @cached_property
    def _arrays(self) -> Dict[str, np.ndarray]:
        n = self.carrier_size
        return {
            symbol: np.asarray(entries, dtype=np.int64).reshape((n,) * arity)
            for symbol, arity, entries in self.tables
        }

    @property
    def signature(self) -> Signature:
        return Signature(tuple((symbol, arity) for symbol, arity, _ in self.tables))

    def table(self, symbol: str) -> np.ndarray:
        try:
            return self._arrays[symbol]
        except KeyError:
            raise AlgebraError(f"no table for symbol {symbol}") from None

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "carrier": self.carrier_size,
            "ops": {symbol: list(entries) for symbol, _, entries in self.tables},
        }
        if self.name:
            payload["name"] = self.name
        return payload


class AlgebraFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    carrier: int = Field(ge=1)
    ops: Dict[str, List[int]]
    name: str = ""


def _infer_arity(symbol: str, length: int, n: int) -> int:
    if n == 1:
        raise AlgebraError(f"cannot infer the arity of {symbol} on a one-element carrier without a signature")
    arity = 0
    while n ** arity < length:
        arity += 1
    if n ** arity != length:
        raise AlgebraError(f"table for {symbol} has {length} entries, not a power of {n}")
    return arity


def parse_algebra(payload: Any, sig: Optional[Signature] = None, name: str = "") -> FiniteAlgebra:
    try:
        data = AlgebraFile.model_validate(payload)
    except ValidationError as exc:
        raise AlgebraError(f"invalid algebra: {exc.errors()[0]['msg']}") from None
    if sig is None:
        sig = Signature.of({symbol: _infer_arity(symbol, len(entries), data.carrier) for symbol, entries in data.ops.items()})
    return FiniteAlgebra.from_tables(data.carrier, data.ops, sig, name=data.name or name)


def load_algebra(path: Path, sig: Optional[Signature] = None) -> FiniteAlgebra:
    path = Path(path)
    if not path.exists():
        raise AlgebraError(f"algebra file not found: {path}")
    with path.open("r", encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise AlgebraError(f"{path.name}: {exc.msg}") from None
    return parse_algebra(payload, sig, name=path.stem)


def write_algebra(path: Path, algebra: FiniteAlgebra) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(algebra.to_dict(), handle, ensure_ascii=False, indent=2)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(algebra: FiniteAlgebra, t: Term, env: Mapping[int, int]) -> int:
    if isinstance(t, Variable):
        if t.index not in env:
            raise AlgebraError(f"unbound variable x{t.index}")
        value = int(env[t.index])
        if not 0 <= value < algebra.carrier_size:
            raise AlgebraError(f"value {value} for x{t.index} is outside the carrier")
        return value
    table = algebra.table(t.symbol)
    args = tuple(evaluate(algebra, child, env) for child in t.children)
    return int(table[args])


def assignments(n: int, indices: Sequence[int]) -> np.ndarray:
    """Every assignment as a row, in mixed-radix order with the last variable fastest."""
    k = len(indices)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((n,) * k, dtype=np.int64).reshape(k, -1).T


def _evaluate_columns(algebra: FiniteAlgebra, t: Term, columns: Mapping[int, np.ndarray], count: int) -> np.ndarray:
    if isinstance(t, Variable):
        column = columns.get(t.index)
        if column is None:
            raise AlgebraError(f"unbound variable x{t.index}")
        return column
    table = algebra.table(t.symbol)
    if not t.children:
        return np.full(count, int(table[()]), dtype=np.int64)
    args = tuple(_evaluate_columns(algebra, child, columns, count) for child in t.children)
    return table[args]


def evaluate_all(algebra: FiniteAlgebra, t: Term, indices: Sequence[int]) -> np.ndarray:
    grid = assignments(algebra.carrier_size, indices)
    columns = {index: grid[:, j] for j, index in enumerate(indices)}
    return _evaluate_columns(algebra, t, columns, grid.shape[0])


def find_counterexample(algebra: FiniteAlgebra, e: Identity) -> Optional[Dict[int, int]]:
    """First assignment (in enumeration order) on which the two sides differ."""
    indices = sorted(e.variables())
    lhs = evaluate_all(algebra, e.lhs, indices)
    rhs = evaluate_all(algebra, e.rhs, indices)
    failing = np.flatnonzero(lhs != rhs)
    if failing.size == 0:
        return None
    row = assignments(algebra.carrier_size, indices)[int(failing[0])]
    return {index: int(value) for index, value in zip(indices, row)}


def satisfies(algebra: FiniteAlgebra, e: Identity) -> bool:
    return find_counterexample(algebra, e) is None


def satisfies_all(algebra: FiniteAlgebra, axioms: Sequence[Identity]) -> bool:
    return all(satisfies(algebra, axiom) for axiom in axioms)


def essential_vars_in_algebra(algebra: FiniteAlgebra, t: Term) -> FrozenSet[int]:
    indices = sorted(variables(t))
    n = algebra.carrier_size
    values = evaluate_all(algebra, t, indices).reshape((n,) * len(indices))
    return frozenset(
        index
        for axis, index in enumerate(indices)
        if np.any(values.max(axis=axis) != values.min(axis=axis))
    )


def essential_positions_in_algebra(algebra: FiniteAlgebra, t: Term) -> FrozenSet[Position]:
    z = fresh_index(t)
    return frozenset(
        p for p in positions(t) if z in essential_vars_in_algebra(algebra, positional_compose(t, p, Variable(z)))
    )


# ---------------------------------------------------------------------------
# model enumeration


def _table_space(n: int, arity: int) -> List[Tuple[int, ...]]:
    return list(product(range(n), repeat=n ** arity))


def all_algebras(sig: Signature, n: int, prefix: Optional[int] = None) -> Iterator[FiniteAlgebra]:
    """Every algebra of size n in lexicographic table order.

    ``prefix`` pins the first entry of the first table; the partitions for
    0..n-1 concatenate to the full stream.
    """
    spaces = [_table_space(n, arity) for _, arity in sig.symbols]
    if prefix is not None and spaces:
        spaces[0] = [table for table in spaces[0] if table and table[0] == prefix]
    for combo in product(*spaces):
        yield FiniteAlgebra(
            n, tuple((symbol, arity, table) for (symbol, arity), table in zip(sig.symbols, combo))
        )


def _models_with_prefix(sig: Signature, axioms: Tuple[Identity, ...], n: int, prefix: int) -> List[FiniteAlgebra]:
    return [algebra for algebra in all_algebras(sig, n, prefix) if satisfies_all(algebra, axioms)]


def enumerate_models(
    sig: Signature,
    axioms: Sequence[Identity],
    max_size: int,
    n_jobs: int = 1,
) -> Iterator[FiniteAlgebra]:
    if max_size < 1:
        raise AlgebraError("max_size must be at least 1")
    axioms = tuple(axioms)
    for n in range(1, max_size + 1):
        if n_jobs == 1 or n == 1 or not sig.symbols:
            for algebra in all_algebras(sig, n):
                if satisfies_all(algebra, axioms):
                    yield algebra
            continue
        chunks = Parallel(n_jobs=n_jobs, prefer="processes")(
            delayed(_models_with_prefix)(sig, axioms, n, prefix) for prefix in range(n)
        )
        for chunk in chunks:
            yield from chunk


@lru_cache(maxsize=64)
def model_list(sig: Signature, axioms: Tuple[Identity, ...], max_size: int) -> Tuple[FiniteAlgebra, ...]:
    models = tuple(enumerate_models(sig, axioms, max_size))
    logger.debug("enumerated %d models up to size %d", len(models), max_size)
    return models


MODEL_ENUMERATION_LIMIT = 200_000


def candidate_count(sig: Signature, n: int) -> int:
    count = 1
    for _, arity in sig.symbols:
        count *= n ** (n ** arity)
    return count


def enumerable_size(sig: Signature, max_size: int, limit: int = MODEL_ENUMERATION_LIMIT) -> int:
    """Largest carrier size up to max_size whose table space stays within limit (at least 1)."""
    best = 1
    for n in range(2, max_size + 1):
        if candidate_count(sig, n) > limit:
            logger.debug("skipping model sizes from %d: %d candidate tables", n, candidate_count(sig, n))
            break
        best = n
    return best


def is_desk_scale(sig: Signature, size: int, limit: int = MODEL_ENUMERATION_LIMIT) -> bool:
    """Whether every carrier size up to size keeps the table space within limit."""
    total = 0
    for n in range(1, size + 1):
        total += candidate_count(sig, n)
        if total > limit:
            return False
    return True
