from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

from termalg.algebra import FiniteAlgebra, find_counterexample, load_algebra
from termalg.config import algebras_dir, load_settings, theories_dir
from termalg.errors import AlgebraError, BudgetError, SignatureError, TermSyntaxError, TheoryValidationError, field_error
from termalg.terms import Identity, Signature, Term, check_term, parse_identity, parse_term, render_identity, size, variables
from termalg.theory.builtin import canonical_axioms, canonical_witnesses, exact_equal
from termalg.theory.types import Budget, OracleKind, Theory


logger = logging.getLogger(__name__)

_KEYS = {"signature", "oracle", "axiom", "witness", "budget", "hint", "name"}
_SINGLE = {"signature", "oracle", "budget", "name"}
_SUFFIX = ".eq"


def resolve_theory_path(name_or_path: str) -> Path:
    """A path as given, or the name of a shipped fixture such as ``rb``."""
    candidate = Path(name_or_path)
    if candidate.exists():
        return candidate
    stem = candidate.name[: -len(_SUFFIX)] if candidate.name.endswith(_SUFFIX) else candidate.name
    shipped = (theories_dir() / f"{stem}{_SUFFIX}").resolve()
    if theories_dir().resolve() not in shipped.parents:
        raise TheoryValidationError("Invalid theory name", [field_error("theory", name_or_path)])
    if not shipped.exists():
        raise TheoryValidationError("Theory file not found", [field_error("theory", name_or_path)])
    return shipped


def _records(text: str, errors: List[Dict[str, Any]]) -> List[Tuple[int, str, str]]:
    records: List[Tuple[int, str, str]] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        field = f"line {lineno}"
        if not sep or key not in _KEYS:
            errors.append(field_error(field, "Expected 'key: value' with key one of " + ", ".join(sorted(_KEYS))))
            continue
        if key in _SINGLE and key in seen:
            errors.append(field_error(field, f"{key} given twice"))
            continue
        seen.add(key)
        records.append((lineno, key, value.strip()))
    return records


def _resolve_witness(value: str, base_dir: Path) -> Path:
    path = Path(value)
    if not path.is_absolute():
        local = base_dir / path
        if local.exists():
            return local
        shipped = algebras_dir() / path.name
        if shipped.exists():
            return shipped
        return local
    return path


def parse_theory(text: str, base_dir: Path, name: str = "") -> Theory:
    errors: List[Dict[str, Any]] = []
    records = _records(text, errors)
    values = {key: (lineno, value) for lineno, key, value in records if key in _SINGLE}

    sig: Optional[Signature] = None
    if "signature" not in values:
        errors.append(field_error("signature", "Field is required"))
    else:
        lineno, value = values["signature"]
        try:
            sig = Signature.parse(value)
        except SignatureError as exc:
            errors.append(field_error(f"line {lineno}", str(exc)))

    oracle = OracleKind.GENERIC
    if "oracle" in values:
        lineno, value = values["oracle"]
        try:
            oracle = OracleKind(value.lower())
        except ValueError:
            errors.append(field_error(f"line {lineno}", f"Unknown oracle {value!r}"))

    budget = load_settings().default_budget
    if "budget" in values:
        lineno, value = values["budget"]
        try:
            budget = Budget.parse(value, base=budget)
        except BudgetError as exc:
            errors.extend(field_error(f"line {lineno}", f"{err['field']}: {err['message']}") for err in exc.errors)

    if "name" in values:
        name = values["name"][1]

    axioms: List[Identity] = []
    hints: List[Identity] = []
    witnesses: List[FiniteAlgebra] = []
    if sig is not None:
        for lineno, key, value in records:
            field = f"line {lineno}"
            try:
                if key == "axiom":
                    axioms.append(parse_identity(value, sig))
                elif key == "hint":
                    hints.append(_parse_hint(value, sig))
                elif key == "witness":
                    witnesses.append(load_algebra(_resolve_witness(value, base_dir), sig))
            except (TermSyntaxError, SignatureError, AlgebraError) as exc:
                errors.append(field_error(field, str(exc)))

    if errors:
        raise TheoryValidationError("Invalid theory file", errors)
    assert sig is not None
    return build_theory(sig, oracle, axioms, witnesses, budget, hints, name)


def _parse_hint(value: str, sig: Signature) -> Identity:
    lhs, sep, rhs = value.partition("->")
    if not sep:
        raise TermSyntaxError("hint needs the form 'lhs -> rhs'", 0)
    return Identity(parse_term(lhs, sig), parse_term(rhs, sig))


def _unordered(axioms: Sequence[Identity]) -> FrozenSet[FrozenSet[Term]]:
    return frozenset(frozenset((axiom.lhs, axiom.rhs)) for axiom in axioms)


def build_theory(
    sig: Signature,
    oracle: OracleKind,
    axioms: Sequence[Identity] = (),
    witnesses: Sequence[FiniteAlgebra] = (),
    budget: Optional[Budget] = None,
    hints: Sequence[Identity] = (),
    name: str = "",
) -> Theory:
    """Validate the pieces of a theory and assemble it."""
    errors: List[Dict[str, Any]] = []
    canonical: Tuple[Identity, ...] = ()
    try:
        canonical = canonical_axioms(oracle, sig)
    except SignatureError as exc:
        errors.append(field_error("oracle", str(exc)))
    if errors:
        raise TheoryValidationError("Invalid theory", errors)

    for index, axiom in enumerate(axioms):
        try:
            check_term(axiom.lhs, sig)
            check_term(axiom.rhs, sig)
        except SignatureError as exc:
            errors.append(field_error(f"axiom[{index}]", str(exc)))
            continue
        if oracle.exact and not exact_equal(oracle, axiom.lhs, axiom.rhs):
            errors.append(field_error(f"axiom[{index}]", f"{render_identity(axiom)} does not hold under oracle {oracle.value}"))
    if oracle is OracleKind.EMPTY and axioms:
        errors.append(field_error("axiom", "the empty theory takes no axioms"))
    elif oracle.exact and axioms and not errors and _unordered(axioms) != _unordered(canonical):
        listed = "; ".join(render_identity(axiom) for axiom in canonical)
        errors.append(field_error("axiom", f"oracle {oracle.value} fixes its axioms to: {listed}"))
    if oracle.exact and not axioms:
        axioms = canonical

    registered = list(witnesses) + [w for w in canonical_witnesses(oracle, sig) if w not in witnesses]
    for index, algebra in enumerate(registered):
        if algebra.signature != sig:
            errors.append(field_error(f"witness[{index}]", "tables do not match the signature"))
            continue
        for axiom in (*axioms, *canonical):
            if find_counterexample(algebra, axiom) is not None:
                errors.append(
                    field_error(f"witness[{index}]", f"{algebra.name or 'algebra'} fails axiom {render_identity(axiom)}")
                )
                break

    for index, hint in enumerate(hints):
        if hint not in axioms and hint.mirror() not in axioms:
            errors.append(field_error(f"hint[{index}]", "a hint must be an axiom or its mirror"))
        if not variables(hint.rhs) <= variables(hint.lhs):
            errors.append(field_error(f"hint[{index}]", "right side introduces variables"))
        if size(hint.rhs) >= size(hint.lhs):
            errors.append(field_error(f"hint[{index}]", "right side must be smaller than the left side"))

    if errors:
        raise TheoryValidationError("Invalid theory", errors)
    logger.debug("built theory %s with %d axioms", name or oracle.value, len(axioms))
    return Theory(
        sig=sig,
        axioms=tuple(axioms),
        oracle=oracle,
        budget=budget or Budget(),
        witness_algebras=tuple(registered),
        hints=tuple(hints),
        name=name,
    )


def load_theory(path: Path) -> Theory:
    path = Path(path)
    if not path.exists():
        raise TheoryValidationError("Theory file not found", [field_error("path", str(path))])
    return parse_theory(path.read_text(encoding="utf-8"), path.parent, name=path.stem)
