"""Deterministic CSV output: '#'-prefixed metadata block, column-name row,
then data rows with floats at 17 significant digits. No timestamps — equal
configs produce byte-identical files.
"""

from __future__ import annotations

import io
from typing import Iterable, Sequence

TOOL_NAME = "anisokrr"


def format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def render_csv(version: str, config: dict, master_seed,
               columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# {TOOL_NAME} v{version}\n")
    for key in sorted(config):
        buf.write(f"# config: {key}={config[key]}\n")
    buf.write(f"# master_seed: {master_seed}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path: str, version: str, config: dict, master_seed,
              columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    text = render_csv(version, config, master_seed, columns, rows)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
