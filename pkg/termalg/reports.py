"""Text and JSON renderings of command results."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined
from pydantic import BaseModel

from termalg.theory.types import Witness


def templates_dir() -> Path:
    return Path(__file__).resolve().parent / "templates"


@lru_cache(maxsize=1)
def _environment() -> Environment:
    return Environment(
        loader=FileSystemLoader(str(templates_dir())),
        autoescape=False,
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        undefined=StrictUndefined,
    )


def render(template: str, **context: Any) -> str:
    return _environment().get_template(template).render(**context)


def witness_context(witness: Optional[Witness]) -> Optional[Dict[str, Any]]:
    if witness is None:
        return None
    algebra = witness.algebra
    return {
        "name": algebra.name or "model",
        "carrier": algebra.carrier_size,
        "ops": [(symbol, list(entries)) for symbol, _, entries in algebra.tables],
        "assignment": witness.render_assignment() or "(no variables)",
    }


class JsonReport(BaseModel):
    command: str
    exit_code: int
    result: Dict[str, Any]


def json_report(command: str, exit_code: int, result: Dict[str, Any]) -> str:
    return JsonReport(command=command, exit_code=exit_code, result=result).model_dump_json(indent=2)
