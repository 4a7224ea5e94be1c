"""Reader for anisokrr result CSVs.

Only files carrying the tool's header block are accepted: a first line
``# anisokrr v<version>``, optional ``# config:`` / ``# master_seed:``
lines, then a column-name row and comma-separated data rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TOOL_PREFIX = "# anisokrr v"

SPECTRUM_COLUMNS = ("alpha", "rank", "beta", "degree", "lambda",
                    "predicted_lambda", "sector")
RISK_COLUMNS = ("alpha", "n", "seed_count", "target", "mean_risk", "std_err",
                "theory_risk", "theory_mode", "mean_risk_rel")


class SchemaError(ValueError):
    """Raised for files that are not anisokrr CSVs of the expected family."""


@dataclass
class ResultTable:
    version: str
    config: dict[str, str]
    master_seed: str
    columns: tuple[str, ...]
    rows: list[dict[str, str]] = field(repr=False, default_factory=list)

    def floats(self, column: str, rows=None) -> list[float]:
        return [float(r[column]) for r in (self.rows if rows is None else rows)]

    def alphas(self) -> list[str]:
        seen: list[str] = []
        for r in self.rows:
            if r["alpha"] not in seen:
                seen.append(r["alpha"])
        return seen

    def by_alpha(self, alpha: str) -> list[dict[str, str]]:
        return [r for r in self.rows if r["alpha"] == alpha]


def read_table(path: str, family: str) -> ResultTable:
    expected = {"spectrum": SPECTRUM_COLUMNS, "risk": RISK_COLUMNS}[family]
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].startswith(TOOL_PREFIX):
        raise SchemaError(
            f"{path}: missing '{TOOL_PREFIX}<version>' header; refusing "
            "a file not produced by the anisokrr tool")
    version = lines[0][len(TOOL_PREFIX):].strip()
    config: dict[str, str] = {}
    master_seed = ""
    body_start = 1
    for i, line in enumerate(lines[1:], start=1):
        if not line.startswith("#"):
            body_start = i
            break
        text = line.lstrip("# ").strip()
        if text.startswith("config:"):
            key, _, value = text[len("config:"):].strip().partition("=")
            config[key.strip()] = value.strip()
        elif text.startswith("master_seed:"):
            master_seed = text[len("master_seed:"):].strip()
    else:
        raise SchemaError(f"{path}: header block with no data rows")
    columns = tuple(lines[body_start].split(","))
    if columns != expected:
        raise SchemaError(
            f"{path}: columns {columns} do not match the {family} schema "
            f"{expected}")
    rows = []
    for line in lines[body_start + 1:]:
        if not line:
            continue
        values = line.split(",")
        if len(values) != len(columns):
            raise SchemaError(f"{path}: row width {len(values)} != "
                              f"{len(columns)}")
        rows.append(dict(zip(columns, values)))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return ResultTable(version=version, config=config,
                       master_seed=master_seed, columns=columns, rows=rows)
