from __future__ import annotations

from dataclasses import dataclass
from itertools import islice, product
from typing import Dict, Iterable, List, Mapping, Tuple

from termalg.errors import SignatureError, TermSyntaxError
from termalg.termgen import generate_terms
from termalg.terms import (
    Apply,
    Signature,
    Term,
    Variable,
    check_term,
    depth,
    parse_term,
    render_term,
    substitute_sequence,
    variables,
)


DEFAULT_POOL_LIMIT = 2000


@dataclass(frozen=True)
class Hypersubstitution:
    """Sends each operation symbol to a term over x1..x_arity."""

    mapping: Tuple[Tuple[str, Term], ...]

    @classmethod
    def of(cls, sig: Signature, images: Mapping[str, Term]) -> "Hypersubstitution":
        extra = sorted(set(images) - set(sig.names))
        if extra:
            raise SignatureError(f"hypersubstitution maps symbols outside the signature: {', '.join(extra)}")
        mapping: List[Tuple[str, Term]] = []
        for name, arity in sig.symbols:
            image = images.get(name)
            if image is None:
                image = _identity_image(name, arity)
            check_term(image, sig)
            stray = sorted(i for i in variables(image) if i > arity)
            if stray:
                raise SignatureError(
                    f"image of {name} uses x{stray[0]}, only x1..x{arity} are allowed"
                )
            mapping.append((name, image))
        return cls(tuple(mapping))

    @classmethod
    def identity(cls, sig: Signature) -> "Hypersubstitution":
        return cls.of(sig, {})

    def image(self, symbol: str) -> Term:
        for name, image in self.mapping:
            if name == symbol:
                return image
        raise SignatureError(f"hypersubstitution has no image for {symbol}")

    def render(self) -> str:
        return "; ".join(f"{name} -> {render_term(image)}" for name, image in self.mapping)

    def to_dict(self) -> Dict[str, str]:
        return {name: render_term(image) for name, image in self.mapping}


def _identity_image(name: str, arity: int) -> Term:
    return Apply(name, tuple(Variable(i) for i in range(1, arity + 1)))


def swap(sig: Signature, symbol: str = "f") -> Hypersubstitution:
    return Hypersubstitution.of(sig, {symbol: Apply(symbol, (Variable(2), Variable(1)))})


def parse_hyper_map(texts: Iterable[str], sig: Signature) -> Hypersubstitution:
    """Build from ``"f -> f(x2,x1)"`` entries; unmapped symbols keep their identity image."""
    images: Dict[str, Term] = {}
    for text in texts:
        name, sep, image = text.partition("->")
        name = name.strip()
        if not sep or not name:
            raise TermSyntaxError(f"expected 'symbol -> term', got {text!r}")
        if name in images:
            raise SignatureError(f"symbol {name} mapped twice")
        images[name] = parse_term(image, sig)
    return Hypersubstitution.of(sig, images)


def apply_hyper(h: Hypersubstitution, t: Term) -> Term:
    if isinstance(t, Variable):
        return t
    return substitute_sequence(h.image(t.symbol), [apply_hyper(h, child) for child in t.children])


def compose_hyper(h1: Hypersubstitution, h2: Hypersubstitution) -> Hypersubstitution:
    """(h1 . h2)(f) = h1 applied to h2(f)."""
    return Hypersubstitution(tuple((name, apply_hyper(h1, image)) for name, image in h2.mapping))


def default_hyper_pool(sig: Signature, max_depth: int = 2, limit: int = DEFAULT_POOL_LIMIT) -> List[Hypersubstitution]:
    """Every hypersubstitution whose images have depth <= max_depth, capped at ``limit`` entries."""
    max_size = _max_size_for_depth(sig, max_depth)
    choices = []
    for name, arity in sig.symbols:
        pool = [t for t in generate_terms(sig, range(1, arity + 1), max_size) if depth(t) <= max_depth]
        choices.append(pool)
    names = sig.names
    combos = islice(product(*choices), limit)
    return [Hypersubstitution(tuple(zip(names, combo))) for combo in combos]


def _max_size_for_depth(sig: Signature, max_depth: int) -> int:
    k = max(sig.max_arity, 1)
    if k == 1:
        return max_depth + 1
    return (k ** (max_depth + 1) - 1) // (k - 1)
