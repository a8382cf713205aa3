"""Deterministic JSON rendering: dicts indented, integer rows kept on one line."""

from __future__ import annotations

import json
from typing import Any


def _is_flat(x: Any) -> bool:
    return isinstance(x, list) and all(not isinstance(v, (list, dict)) for v in x)


def dumps(obj: Any, indent: int = 2) -> str:
    return _render(obj, 0, indent) + "\n"


def _render(obj: Any, level: int, step: int) -> str:
    pad = " " * (level * step)
    inner = " " * ((level + 1) * step)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_render(v, level + 1, step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        obj = list(obj)
        if _is_flat(obj):
            return "[" + ", ".join(json.dumps(v) for v in obj) + "]"
        if all(_is_flat(v) for v in obj):
            return "[" + ", ".join(_render(v, 0, step) for v in obj) + "]"
        items = [inner + _render(v, level + 1, step) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj)
