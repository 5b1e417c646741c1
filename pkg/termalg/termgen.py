from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from termalg.terms import Apply, Signature, Term, Variable, size, term_key


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=512)
def _terms_of_size(sig: Signature, variables: Tuple[int, ...], n: int) -> Tuple[Term, ...]:
    result: List[Term] = []
    if n == 1:
        result.extend(Variable(index) for index in variables)
        result.extend(Apply(name) for name, arity in sig.symbols if arity == 0)
    else:
        for name, arity in sig.symbols:
            if arity == 0 or arity > n - 1:
                continue
            for sizes in _compositions(n - 1, arity):
                pools = [_terms_of_size(sig, variables, k) for k in sizes]
                for children in product(*pools):
                    result.append(Apply(name, tuple(children)))
    return tuple(sorted(result, key=term_key))


def generate_terms(sig: Signature, variables: Iterable[int], max_size: int) -> List[Term]:
    """All terms over the given variables with at most max_size nodes, ordered by (size, term order)."""
    pool = tuple(sorted(set(variables)))
    terms: List[Term] = []
    for n in range(1, max_size + 1):
        terms.extend(_terms_of_size(sig, pool, n))
    return terms


def terms_by_size(terms: Sequence[Term]) -> Dict[int, List[Term]]:
    buckets: Dict[int, List[Term]] = {}
    for t in terms:
        buckets.setdefault(size(t), []).append(t)
    return buckets


def match(pattern: Term, term: Term, binding: Optional[Mapping[int, Term]] = None) -> Optional[Dict[int, Term]]:
    """One-way syntactic matching: a substitution θ with pattern·θ = term, or None."""
    result: Dict[int, Term] = dict(binding or {})
    stack = [(pattern, term)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Variable):
            bound = result.get(p.index)
            if bound is None:
                result[p.index] = t
            elif bound != t:
                return None
        elif isinstance(t, Apply) and p.symbol == t.symbol and len(p.children) == len(t.children):
            stack.extend(zip(p.children, t.children))
        else:
            return None
    return result


def random_term(rng: np.random.Generator, sig: Signature, variables: Sequence[int], max_size: int) -> Term:
    target = int(rng.integers(1, max_size + 1))
    return _random_of_budget(rng, sig, tuple(variables), target)


def _random_of_budget(rng: np.random.Generator, sig: Signature, variables: Tuple[int, ...], budget: int) -> Term:
    symbols = [(name, arity) for name, arity in sig.symbols if arity >= 1 and arity + 1 <= budget]
    if not symbols:
        leaves: List[Term] = [Variable(index) for index in variables]
        leaves.extend(Apply(name) for name, arity in sig.symbols if arity == 0)
        return leaves[int(rng.integers(len(leaves)))]
    name, arity = symbols[int(rng.integers(len(symbols)))]
    remaining = budget - 1
    if arity == 1:
        parts = [remaining]
    else:
        cuts = sorted(int(c) for c in rng.choice(np.arange(1, remaining), size=arity - 1, replace=False))
        bounds = [0] + cuts + [remaining]
        parts = [bounds[i + 1] - bounds[i] for i in range(arity)]
    return Apply(name, tuple(_random_of_budget(rng, sig, variables, part) for part in parts))
