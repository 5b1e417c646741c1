from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional


EventFn = Optional[Callable[[str, str], None]]


def emit(event_cb: EventFn, stage: str, message: str) -> None:
    if event_cb:
        event_cb(stage, message)


def append_event(path: Path, stage: str, message: str) -> None:
    payload = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "stage": stage,
        "message": message,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as handle:
        handle.write(json.dumps(payload, ensure_ascii=False) + "\n")


def jsonl_event_writer(path: Path) -> Callable[[str, str], None]:
    def _write(stage: str, message: str) -> None:
        append_event(path, stage, message)

    return _write


def read_events(path: Path, tail: int = 200) -> list:
    if not path.exists():
        return []
    lines = path.read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines[-tail:] if line.strip()]
