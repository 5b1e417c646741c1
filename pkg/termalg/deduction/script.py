"""Plain-text proof scripts.

One step per line::

    <idx>: <lhs> = <rhs> ; <rule> [premises=i,j] [key=value ...]

Keys are ``var``, ``term``, ``host``, ``pos``, ``r``, ``v``, ``u``, ``w``
and ``map.<symbol>`` for H1. Blank lines and ``#`` comments are skipped.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from termalg.errors import InvalidPositionError, ProofScriptError, SignatureError, TermSyntaxError
from termalg.hyper import Hypersubstitution
from termalg.terms import (
    Signature,
    Term,
    Variable,
    parse_identity,
    parse_position,
    parse_term,
    position_renderer,
    render_identity,
    render_term,
)

from termalg.deduction.types import Proof, ProofStep, Rule


_HEAD_RE = re.compile(r"^\s*(\d+)\s*:\s*(.+?)\s*;\s*(\S+)\s*(.*)$")
_KEY_RE = re.compile(r"(?:^|\s)(premises|var|term|host|pos|r|v|u|w|map\.[A-Za-z_][A-Za-z0-9_]*)=")
_QUAD_KEYS = ("r", "v", "u", "w")


def _split_keys(text: str, line: int) -> Dict[str, str]:
    matches = list(_KEY_RE.finditer(text))
    if text.strip() and (not matches or text[: matches[0].start()].strip()):
        raise ProofScriptError(f"cannot read step data {text.strip()!r}", line)
    values: Dict[str, str] = {}
    for current, following in zip(matches, matches[1:] + [None]):
        end = following.start() if following else len(text)
        key = current.group(1)
        if key in values:
            raise ProofScriptError(f"{key} given twice", line)
        values[key] = text[current.end() : end].strip()
    return values


def _rule(name: str, line: int) -> Rule:
    for rule in Rule:
        if rule.value.lower() == name.lower():
            return rule
    raise ProofScriptError(f"unknown rule {name!r}", line)


def _variable(text: str, line: int) -> int:
    match = re.fullmatch(r"x([0-9]+)", text)
    if not match or int(match.group(1)) < 1:
        raise ProofScriptError(f"var must look like x1, got {text!r}", line)
    return int(match.group(1))


def parse_step(text: str, sig: Signature, line: int = 0) -> Tuple[int, ProofStep]:
    head = _HEAD_RE.match(text)
    if not head:
        raise ProofScriptError("expected '<idx>: <lhs> = <rhs> ; <rule> ...'", line)
    number, identity_text, rule_name, rest = head.groups()
    rule = _rule(rule_name, line)
    values = _split_keys(rest, line)
    try:
        conclusion = parse_identity(identity_text, sig)
        premises: Tuple[int, ...] = ()
        if "premises" in values:
            chunks = [chunk.strip() for chunk in values.pop("premises").split(",")]
            if not all(chunk.isdigit() for chunk in chunks):
                raise ProofScriptError("premises must be comma-separated step numbers", line)
            premises = tuple(int(chunk) for chunk in chunks)
        var = _variable(values.pop("var"), line) if "var" in values else None
        term = parse_term(values.pop("term"), sig) if "term" in values else None
        host = parse_term(values.pop("host"), sig) if "host" in values else None
        position = parse_position(values.pop("pos"), sig) if "pos" in values else None
        quad: Optional[Tuple[Term, Term, Term, Term]] = None
        if any(key in values for key in _QUAD_KEYS):
            missing = [key for key in _QUAD_KEYS if key not in values]
            if missing:
                raise ProofScriptError(f"SigmaR1 data is missing {', '.join(missing)}", line)
            quad = tuple(parse_term(values.pop(key), sig) for key in _QUAD_KEYS)  # type: ignore[assignment]
        hyper = None
        images = {key[len("map.") :]: parse_term(values.pop(key), sig) for key in list(values) if key.startswith("map.")}
        if images:
            hyper = Hypersubstitution.of(sig, images)
    except (TermSyntaxError, SignatureError, InvalidPositionError) as exc:
        raise ProofScriptError(str(exc), line) from None
    step = ProofStep(conclusion, rule, premises, var=var, term=term, host=host, position=position, quad=quad, hyper=hyper)
    return int(number), step


def parse_proof(text: str, sig: Signature, theory_name: str = "") -> Proof:
    steps: List[ProofStep] = []
    for line, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        number, step = parse_step(content, sig, line)
        if number != len(steps) + 1:
            raise ProofScriptError(f"expected step {len(steps) + 1}, got {number}", line)
        steps.append(step)
    if not steps:
        raise ProofScriptError("proof script has no steps")
    return Proof(tuple(steps), theory_name=theory_name)


def load_proof(path: Path, sig: Signature, theory_name: str = "") -> Proof:
    path = Path(path)
    if not path.exists():
        raise ProofScriptError(f"proof file not found: {path}")
    return parse_proof(path.read_text(encoding="utf-8"), sig, theory_name)


def render_step(number: int, step: ProofStep, sig: Optional[Signature] = None) -> str:
    parts = [f"{number}: {render_identity(step.conclusion)} ; {step.rule.value}"]
    if step.premises:
        parts.append("premises=" + ",".join(str(p) for p in step.premises))
    if step.var is not None:
        parts.append(f"var={Variable(step.var)}")
    if step.term is not None:
        parts.append(f"term={render_term(step.term)}")
    if step.host is not None:
        parts.append(f"host={render_term(step.host)}")
    if step.position is not None:
        parts.append(f"pos={position_renderer(sig)(step.position)}")
    if step.quad is not None:
        parts.extend(f"{key}={render_term(t)}" for key, t in zip(_QUAD_KEYS, step.quad))
    if step.hyper is not None:
        parts.extend(f"map.{name}={render_term(image)}" for name, image in step.hyper.mapping)
    return " ".join(parts)


def render_proof(proof: Proof, sig: Optional[Signature] = None) -> str:
    return "\n".join(render_step(number, step, sig) for number, step in enumerate(proof.steps, start=1)) + "\n"


def write_proof(path: Path, proof: Proof, sig: Optional[Signature] = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_proof(proof, sig), encoding="utf-8")
