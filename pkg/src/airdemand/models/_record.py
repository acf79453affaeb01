"""Flat ``key = value`` text records used to serialise fitted models.

Values are floats, float lists (comma separated), or bare strings. Floats are
written with ``repr`` so a dump/load round trip is exact.
"""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np


def _fmt(v: Any) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    arr = np.asarray(v).reshape(-1)
    return ", ".join(_fmt(x.item()) for x in arr)


def dump(fields: Mapping[str, Any]) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in fields.items())


def load(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed record line: {line!r}")
        out[key.strip()] = value.strip()
    return out


def floats(value: str) -> np.ndarray:
    if not value:
        return np.zeros(0)
    return np.array([float(x) for x in value.split(",")])


def strings(value: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in value.split(",")) if value else ()
