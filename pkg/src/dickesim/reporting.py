"""Deterministic CSV/JSON writers shared by the CLI commands.

CSV files use '.' decimals, '\n' line endings and a mandatory header whose
numeric columns carry unit tags, e.g. duration[1/Gamma1D]; floats are
rendered with repr so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (np.integer,)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return f"{value.real!r}{value.imag:+}j" if value.imag else repr(value.real)
    return str(value)


def write_csv(path, header: list[str], rows) -> Path:
    """Write rows under a tagged header; every header entry must carry a
    bracketed unit tag."""
    for name in header:
        if "[" not in name or not name.endswith("]"):
            raise ValueError(f"header entry {name!r} lacks a unit tag")
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row width does not match header")
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
        newline="\n",
    )
    return path
