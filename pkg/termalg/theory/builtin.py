"""Exact decision procedures and canonical witnesses for the built-in varieties."""

from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from termalg.algebra import FiniteAlgebra, evaluate, find_counterexample
from termalg.errors import SignatureError
from termalg.terms import (
    Apply,
    Identity,
    Signature,
    Term,
    Variable,
    leaf_variables,
    leftmost,
    rightmost,
)
from termalg.theory.types import Budget, OracleKind, Theory, Witness


logger = logging.getLogger(__name__)

_BINARY_KINDS = {OracleKind.RB, OracleKind.SG, OracleKind.LZ, OracleKind.RZ}

_EMPTY_SEARCH_SEED = 20240601
_EMPTY_SEARCH_TRIES = 48
_EMPTY_SEARCH_ASSIGNMENTS = 20000

# words of up to 56 leaves always separate within these primes
AFFINE_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def binary_symbol(sig: Signature, kind: OracleKind) -> str:
    if len(sig.symbols) != 1 or sig.symbols[0][1] != 2:
        raise SignatureError(f"oracle {kind.value} needs exactly one binary symbol, got {sig.render() or 'none'}")
    return sig.symbols[0][0]


def _f(symbol: str, a: Term, b: Term) -> Term:
    return Apply(symbol, (a, b))


def canonical_axioms(kind: OracleKind, sig: Signature) -> Tuple[Identity, ...]:
    if kind is OracleKind.EMPTY or kind is OracleKind.GENERIC:
        return ()
    x1, x2, x3 = Variable(1), Variable(2), Variable(3)
    if kind is OracleKind.TRIVIAL:
        return (Identity(x1, x2),)
    f = binary_symbol(sig, kind)
    assoc = Identity(_f(f, x1, _f(f, x2, x3)), _f(f, _f(f, x1, x2), x3))
    if kind is OracleKind.SG:
        return (assoc,)
    if kind is OracleKind.LZ:
        return (Identity(_f(f, x1, x2), x1),)
    if kind is OracleKind.RZ:
        return (Identity(_f(f, x1, x2), x2),)
    # the rectangular band triple is stored as its pairwise identities
    return (
        assoc,
        Identity(_f(f, _f(f, x1, x2), x3), _f(f, x1, x3)),
        Identity(_f(f, x1, _f(f, x2, x3)), _f(f, x1, x3)),
        Identity(_f(f, x1, x1), x1),
    )


def left_zero_band(symbol: str = "f") -> FiniteAlgebra:
    return FiniteAlgebra(2, ((symbol, 2, (0, 0, 1, 1)),), name="left_zero")


def right_zero_band(symbol: str = "f") -> FiniteAlgebra:
    return FiniteAlgebra(2, ((symbol, 2, (0, 1, 0, 1)),), name="right_zero")


def z2_addition(symbol: str = "f") -> FiniteAlgebra:
    return FiniteAlgebra(2, ((symbol, 2, (0, 1, 1, 0)),), name="z2_add")


def canonical_witnesses(kind: OracleKind, sig: Signature) -> Tuple[FiniteAlgebra, ...]:
    if kind not in _BINARY_KINDS:
        return ()
    f = binary_symbol(sig, kind)
    if kind is OracleKind.SG:
        return (z2_addition(f),)
    if kind is OracleKind.LZ:
        return (left_zero_band(f),)
    if kind is OracleKind.RZ:
        return (right_zero_band(f),)
    return (left_zero_band(f), right_zero_band(f))


def builtin_theory(kind: OracleKind, symbol: str = "f", budget: Optional[Budget] = None) -> Theory:
    if kind is OracleKind.GENERIC:
        raise ValueError("GENERIC theories need explicit axioms")
    sig = Signature.of({symbol: 2})
    return Theory(
        sig=sig,
        axioms=canonical_axioms(kind, sig),
        oracle=kind,
        budget=budget or Budget(),
        witness_algebras=canonical_witnesses(kind, sig),
        name=kind.value,
    )


# ---------------------------------------------------------------------------
# decisions


def exact_equal(kind: OracleKind, t: Term, s: Term) -> bool:
    if kind is OracleKind.TRIVIAL:
        return True
    if kind is OracleKind.EMPTY:
        return t == s
    if kind is OracleKind.SG:
        return leaf_variables(t) == leaf_variables(s)
    if kind is OracleKind.LZ:
        return leftmost(t) == leftmost(s)
    if kind is OracleKind.RZ:
        return rightmost(t) == rightmost(s)
    if kind is OracleKind.RB:
        return leftmost(t) == leftmost(s) and rightmost(t) == rightmost(s)
    raise ValueError(f"oracle {kind.value} has no exact decision procedure")


# ---------------------------------------------------------------------------
# witnesses


def exact_witness(theory: Theory, t: Term, s: Term) -> Optional[Witness]:
    """A finite model of the theory separating t from s, registered witnesses first."""
    goal = Identity(t, s)
    for algebra in theory.witness_algebras:
        env = find_counterexample(algebra, goal)
        if env is not None:
            return Witness.of(algebra, env)
    kind = theory.oracle
    if kind in (OracleKind.RB, OracleKind.LZ) and leftmost(t) != leftmost(s):
        return _band_witness(left_zero_band(binary_symbol(theory.sig, kind)), goal)
    if kind in (OracleKind.RB, OracleKind.RZ) and rightmost(t) != rightmost(s):
        return _band_witness(right_zero_band(binary_symbol(theory.sig, kind)), goal)
    if kind is OracleKind.SG:
        return _word_witness(binary_symbol(theory.sig, kind), t, s)
    if kind is OracleKind.EMPTY:
        return _table_search_witness(theory.sig, goal)
    return None


def _band_witness(algebra: FiniteAlgebra, goal: Identity) -> Optional[Witness]:
    env = find_counterexample(algebra, goal)
    return Witness.of(algebra, env) if env is not None else None


def _first_difference(a: Sequence[int], b: Sequence[int]) -> Tuple[int, bool]:
    for j, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return j, True
    return min(len(a), len(b)), False


def _order_of_two(p: int) -> int:
    order, power = 1, 2 % p
    while power != 1:
        power = power * 2 % p
        order += 1
    return order


def affine_semigroup(symbol: str, p: int) -> FiniteAlgebra:
    """Maps x -> 2^e*x + b over Z_p (p an odd prime) under composition, element e*p + b."""
    k = _order_of_two(p)
    powers = np.array([pow(2, e, p) for e in range(k)], dtype=np.int64)
    elements = np.arange(k * p)
    e1, b1 = (elements // p)[:, None], (elements % p)[:, None]
    e2, b2 = (elements // p)[None, :], (elements % p)[None, :]
    table = ((e1 + e2) % k) * p + (powers[e1] * b2 + b1) % p
    return FiniteAlgebra(k * p, ((symbol, 2, tuple(int(v) for v in table.ravel())),), name=f"affine_mod_{p}")


def _affine_code(word: Sequence[int], marked: int) -> Tuple[int, int]:
    # the composite map of a word: x -> 2^len*x + sum of 2^i over the marked letters
    return 1 << len(word), sum(1 << i for i, x in enumerate(word) if x == marked)


def _word_witness(symbol: str, t: Term, s: Term) -> Optional[Witness]:
    wt, ws = leaf_variables(t), leaf_variables(s)
    if wt == ws:
        return None
    j, letter_differs = _first_difference(wt, ws)
    markers = (wt[j], ws[j]) if letter_differs else (wt[0],)
    for p in AFFINE_PRIMES:
        for marked in markers:
            (ta, tb), (sa, sb) = _affine_code(wt, marked), _affine_code(ws, marked)
            if ta % p == sa % p and tb % p == sb % p:
                continue
            algebra = affine_semigroup(symbol, p)
            letter = (1 % _order_of_two(p)) * p
            env = {x: letter + (1 if x == marked else 0) for x in sorted(set(wt) | set(ws))}
            if evaluate(algebra, t, env) == evaluate(algebra, s, env):
                logger.warning("affine maps mod %d failed to separate %s and %s", p, t, s)
                return None
            return Witness.of(algebra, env)
    logger.debug("no affine separation below %d for %s and %s", AFFINE_PRIMES[-1], t, s)
    return None


def _table_search_witness(sig: Signature, goal: Identity) -> Optional[Witness]:
    rng = np.random.default_rng(_EMPTY_SEARCH_SEED)
    k = len(goal.variables())
    for n in range(2, 9):
        if n ** k > _EMPTY_SEARCH_ASSIGNMENTS:
            break
        for _ in range(_EMPTY_SEARCH_TRIES):
            ops = {name: rng.integers(0, n, size=n ** arity).tolist() for name, arity in sig.symbols}
            algebra = FiniteAlgebra.from_tables(n, ops, sig, name=f"random_{n}")
            env = find_counterexample(algebra, goal)
            if env is not None:
                return Witness.of(algebra, env)
    logger.debug("no separating table found for %s", goal)
    return None
