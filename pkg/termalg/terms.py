from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from termalg.errors import (
    CompositionError,
    InvalidPositionError,
    SignatureError,
    TermSyntaxError,
    VariableFreeTermError,
)


Position = Tuple[int, ...]
ROOT: Position = ()

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_VARIABLE_RE = re.compile(r"x([0-9]+)")


@dataclass(frozen=True)
class Signature:
    """Operation symbols with arities, kept sorted by name."""

    symbols: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for name, arity in self.symbols:
            if not isinstance(name, str) or not _NAME_RE.fullmatch(name):
                raise SignatureError(f"Invalid symbol name: {name!r}")
            if _VARIABLE_RE.fullmatch(name):
                raise SignatureError(f"Symbol name collides with the variable lexeme: {name}")
            if name in seen:
                raise SignatureError(f"Duplicate symbol: {name}")
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"Arity of {name} must be a non-negative integer")
            seen.add(name)

    @classmethod
    def of(cls, symbols: Mapping[str, int]) -> "Signature":
        return cls(tuple(sorted(symbols.items())))

    @classmethod
    def parse(cls, text: str) -> "Signature":
        symbols: Dict[str, int] = {}
        for chunk in re.split(r"[,\s]+", text.strip()):
            if not chunk:
                continue
            name, sep, arity = chunk.partition("/")
            if not sep or not arity.isdigit():
                raise SignatureError(f"Expected name/arity, got {chunk!r}")
            if name in symbols:
                raise SignatureError(f"Duplicate symbol: {name}")
            symbols[name] = int(arity)
        return cls.of(symbols)

    @cached_property
    def _arities(self) -> Dict[str, int]:
        return dict(self.symbols)

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.symbols]

    @property
    def max_arity(self) -> int:
        return max((arity for _, arity in self.symbols), default=0)

    def arity(self, name: str) -> int:
        try:
            return self._arities[name]
        except KeyError:
            raise SignatureError(f"Unknown symbol: {name}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._arities

    def render(self) -> str:
        return ", ".join(f"{name}/{arity}" for name, arity in self.symbols)


@dataclass(frozen=True)
class Variable:
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or self.index < 1:
            raise SignatureError(f"Variable index must be a positive integer, got {self.index!r}")

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Apply:
    symbol: str
    children: Tuple["Term", ...] = ()

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.symbol, self.children))
            object.__setattr__(self, "_hash", cached)
        return cached

    def __str__(self) -> str:
        return render_term(self)


Term = Union[Variable, Apply]


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def mirror(self) -> "Identity":
        return Identity(self.rhs, self.lhs)

    def variables(self) -> FrozenSet[int]:
        return variables(self.lhs) | variables(self.rhs)

    def __str__(self) -> str:
        return render_identity(self)


def var(index: int) -> Variable:
    return Variable(index)


# ---------------------------------------------------------------------------
# parsing and printing


class _Parser:
    def __init__(self, text: str, sig: Optional[Signature]) -> None:
        self.text = text
        self.sig = sig
        self.pos = 0
        self.inferred: Dict[str, int] = {}

    def parse(self) -> Term:
        term = self._term()
        self._skip_ws()
        if self.pos != len(self.text):
            raise TermSyntaxError(f"Unexpected trailing input {self.text[self.pos:]!r}", self.pos)
        return term

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _term(self) -> Term:
        self._skip_ws()
        start = self.pos
        match = _NAME_RE.match(self.text, self.pos)
        if not match:
            found = self._peek() or "end of input"
            raise TermSyntaxError(f"Expected a variable or symbol name, found {found!r}", start)
        name = match.group(0)
        self.pos = match.end()
        variable = _VARIABLE_RE.fullmatch(name)
        if variable:
            index = int(variable.group(1))
            if index < 1:
                raise TermSyntaxError("Variable index must be positive", start)
            return Variable(index)

        children: List[Term] = []
        self._skip_ws()
        if self._peek() == "(":
            self.pos += 1
            children.append(self._term())
            self._skip_ws()
            while self._peek() == ",":
                self.pos += 1
                children.append(self._term())
                self._skip_ws()
            if self._peek() != ")":
                raise TermSyntaxError(f"Expected ',' or ')' in arguments of {name}", self.pos)
            self.pos += 1
        self._check_arity(name, len(children), start)
        return Apply(name, tuple(children))

    def _check_arity(self, name: str, count: int, start: int) -> None:
        if self.sig is None:
            expected = self.inferred.setdefault(name, count)
        elif name not in self.sig:
            raise TermSyntaxError(f"Unknown symbol {name!r}", start)
        else:
            expected = self.sig.arity(name)
        if expected != count:
            raise TermSyntaxError(f"Symbol {name!r} expects {expected} argument(s), got {count}", start)


def parse_term(text: str, sig: Optional[Signature] = None) -> Term:
    """Parse the concrete term syntax.

    Without a signature the arities are inferred from the text and must be
    used consistently.
    """
    return _Parser(text, sig).parse()


def infer_signature(*texts: str) -> Signature:
    arities: Dict[str, int] = {}
    for text in texts:
        for chunk in text.split("="):
            parser = _Parser(chunk, None)
            parser.inferred = arities
            parser.parse()
    return Signature.of(arities)


def parse_identity(text: str, sig: Optional[Signature] = None) -> Identity:
    parts = text.split("=")
    if len(parts) != 2:
        raise TermSyntaxError("An identity needs exactly one '=' between two terms", 0)
    lhs_text, rhs_text = parts
    lhs = parse_term(lhs_text, sig)
    try:
        rhs = parse_term(rhs_text, sig)
    except TermSyntaxError as exc:
        raise TermSyntaxError(exc.message, exc.offset + len(lhs_text) + 1) from None
    return Identity(lhs, rhs)


def render_term(t: Term) -> str:
    if isinstance(t, Variable):
        return f"x{t.index}"
    if not t.children:
        return t.symbol
    return f"{t.symbol}({','.join(render_term(child) for child in t.children)})"


def render_identity(e: Identity) -> str:
    return f"{render_term(e.lhs)} = {render_term(e.rhs)}"


def check_term(t: Term, sig: Signature) -> None:
    if isinstance(t, Variable):
        return
    if t.symbol not in sig:
        raise SignatureError(f"Symbol {t.symbol!r} is not in the signature {sig.render()}")
    if sig.arity(t.symbol) != len(t.children):
        raise SignatureError(f"Symbol {t.symbol!r} used with {len(t.children)} argument(s)")
    for child in t.children:
        check_term(child, sig)


# ---------------------------------------------------------------------------
# ordering


def term_key(t: Term) -> Tuple:
    if isinstance(t, Variable):
        return (0, t.index)
    return (1, t.symbol, tuple(term_key(child) for child in t.children))


def sorted_terms(terms: Iterable[Term]) -> List[Term]:
    return sorted(terms, key=term_key)


# ---------------------------------------------------------------------------
# positions


def render_position(p: Position, dotted: Optional[bool] = None) -> str:
    if not p:
        return "e"
    if dotted is None:
        dotted = any(step > 9 for step in p)
    if dotted:
        return ".".join(str(step) for step in p)
    return "".join(str(step) for step in p)


def position_renderer(sig: Optional[Signature]):
    dotted = bool(sig and sig.max_arity > 9)
    return lambda p: render_position(p, dotted=dotted or None)


def parse_position(text: str, sig: Optional[Signature] = None) -> Position:
    text = text.strip()
    if text in {"e", "ε", ""}:
        return ROOT
    if "." in text or (sig is not None and sig.max_arity > 9):
        chunks = text.split(".")
    else:
        chunks = list(text)
    steps: List[int] = []
    for chunk in chunks:
        if not chunk.isdigit() or int(chunk) < 1:
            raise InvalidPositionError(f"Invalid position {text!r}")
        steps.append(int(chunk))
    return tuple(steps)


def _walk(t: Term, prefix: Position) -> Iterator[Tuple[Position, Term]]:
    yield prefix, t
    if isinstance(t, Apply):
        for index, child in enumerate(t.children, start=1):
            yield from _walk(child, prefix + (index,))


def occurrences(t: Term) -> List[Tuple[Position, Term]]:
    """Every (position, subterm) pair of t in preorder."""
    return list(_walk(t, ROOT))


def positions(t: Term) -> Tuple[Position, ...]:
    return tuple(p for p, _ in _walk(t, ROOT))


def positions_of(t: Term, r: Term) -> Tuple[Position, ...]:
    return tuple(p for p, sub in _walk(t, ROOT) if sub == r)


def subterm_at(t: Term, p: Position) -> Term:
    node = t
    for step in p:
        if not isinstance(node, Apply) or not 1 <= step <= len(node.children):
            raise InvalidPositionError(f"Position {render_position(p)} is not valid for {render_term(t)}")
        node = node.children[step - 1]
    return node


def subterms(t: Term) -> FrozenSet[Term]:
    return frozenset(sub for _, sub in _walk(t, ROOT))


def size(t: Term) -> int:
    if isinstance(t, Variable):
        return 1
    return 1 + sum(size(child) for child in t.children)


def depth(t: Term) -> int:
    if isinstance(t, Variable) or not t.children:
        return 0
    return 1 + max(depth(child) for child in t.children)


def variables(t: Term) -> FrozenSet[int]:
    return frozenset(sub.index for _, sub in _walk(t, ROOT) if isinstance(sub, Variable))


def leaf_variables(t: Term) -> List[int]:
    return [sub.index for _, sub in _walk(t, ROOT) if isinstance(sub, Variable)]


def fresh_index(*terms: Term) -> int:
    """1 + the largest variable index among the terms (0 when there is none)."""
    return 1 + max((max(variables(t), default=0) for t in terms), default=0)


def is_prefix(p: Position, q: Position) -> bool:
    return len(p) <= len(q) and q[: len(p)] == p


def comparable(p: Position, q: Position) -> bool:
    return is_prefix(p, q) or is_prefix(q, p)


def minimal_positions(ps: Iterable[Position]) -> Tuple[Position, ...]:
    ordered = sorted(set(ps))
    kept: List[Position] = []
    for p in ordered:
        # sorted order puts every prefix before its extensions
        if not any(is_prefix(q, p) for q in kept):
            kept.append(p)
    return tuple(kept)


# ---------------------------------------------------------------------------
# composition


def _replace(t: Term, p: Position, r: Term) -> Term:
    if not p:
        return r
    assert isinstance(t, Apply)
    index = p[0] - 1
    children = list(t.children)
    children[index] = _replace(children[index], p[1:], r)
    return Apply(t.symbol, tuple(children))


def positional_compose(t: Term, p: Position, r: Term) -> Term:
    """t(p; r): replace the subterm at p, and only there."""
    subterm_at(t, p)
    return _replace(t, p, r)


def positional_compose_many(t: Term, ps: Sequence[Position], rs: Union[Term, Sequence[Term]]) -> Term:
    """t(p1,...,pm; r1,...,rm) for a ⪯-antichain of positions.

    A single term for ``rs`` is placed at every position.
    """
    ps = list(ps)
    if isinstance(rs, (Variable, Apply)):
        replacements: List[Term] = [rs] * len(ps)
    else:
        replacements = list(rs)
    if len(replacements) != len(ps):
        raise CompositionError("Positions and replacement terms differ in number")
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if comparable(ps[i], ps[j]):
                raise CompositionError(
                    f"Positions {render_position(ps[i])} and {render_position(ps[j])} are not incomparable"
                )
    for p in ps:
        subterm_at(t, p)
    result = t
    for p, r in zip(ps, replacements):
        result = _replace(result, p, r)
    return result


def inductive_compose(t: Term, r: Term, s: Term) -> Term:
    """t(r <- s): every occurrence of r in t replaced by s at once."""
    if t == r:
        return s
    if isinstance(t, Variable) or not t.children:
        return t
    return Apply(t.symbol, tuple(inductive_compose(child, r, s) for child in t.children))


def _compose_mapping(t: Term, mapping: Mapping[Term, Term]) -> Term:
    if t in mapping:
        return mapping[t]
    if isinstance(t, Variable) or not t.children:
        return t
    return Apply(t.symbol, tuple(_compose_mapping(child, mapping) for child in t.children))


def inductive_compose_many(t: Term, pairs: Sequence[Tuple[Term, Term]]) -> Term:
    patterns = [r for r, _ in pairs]
    for i, r_i in enumerate(patterns):
        for j, r_j in enumerate(patterns):
            if i != j and r_i in subterms(r_j):
                raise CompositionError(
                    f"Pattern {render_term(r_i)} occurs inside pattern {render_term(r_j)}"
                )
    return _compose_mapping(t, dict(pairs))


def substitute(t: Term, mapping: Mapping[int, Term]) -> Term:
    """Simultaneous substitution x_i <- mapping[i]."""
    if isinstance(t, Variable):
        return mapping.get(t.index, t)
    if not t.children:
        return t
    return Apply(t.symbol, tuple(substitute(child, mapping) for child in t.children))


def substitute_sequence(t: Term, terms: Sequence[Term]) -> Term:
    """The shorthand t(s1,...,sm) that puts s_i for x_i."""
    return substitute(t, {index: term for index, term in enumerate(terms, start=1)})


def leftmost(t: Term) -> int:
    leaves = leaf_variables(t)
    if not leaves:
        raise VariableFreeTermError(f"Term {render_term(t)} has no variables")
    return leaves[0]


def rightmost(t: Term) -> int:
    leaves = leaf_variables(t)
    if not leaves:
        raise VariableFreeTermError(f"Term {render_term(t)} has no variables")
    return leaves[-1]
