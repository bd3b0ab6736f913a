"""Reference table of 3n+3^k sequences (columns n = 1..17, blocks k = 0..4).

The checked-in layout lists, under each n, the terms *after* n. Most columns
run one full lap past the first 3^k (t + 3 terms), but a few stop elsewhere,
so the printed length of every column is kept in ``data/golden_table.json``
and reused when rendering. Columns without a stored length get t + 3.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .core import Params, check_natural, default_budget, step, stream

__all__ = [
    "DEFAULT_KS",
    "DEFAULT_N_MAX",
    "golden_metadata",
    "golden_text",
    "column_length",
    "table_columns",
    "render_text",
    "render_csv",
    "render_json",
]

DEFAULT_KS = (0, 1, 2, 3, 4)
DEFAULT_N_MAX = 17


@lru_cache(maxsize=None)
def golden_metadata() -> dict:
    raw = resources.files(__package__).joinpath("data/golden_table.json").read_text("utf-8")
    return json.loads(raw)


def golden_text() -> str:
    return resources.files(__package__).joinpath("data/golden_table.txt").read_text("utf-8")


def column_length(n: int, k: int) -> int:
    stored = golden_metadata()["lengths"].get(str(k), {}).get(str(n))
    if stored is not None:
        return stored
    res = stream(n, Params(k), default_budget(n))
    if res.t is None:
        raise RuntimeError(f"n={n} did not reach 3^{k} within the default budget")
    return res.t + 3


def _column(n: int, k: int) -> list:
    params = Params(k)
    out = []
    x = n
    for _ in range(column_length(n, k)):
        x = step(x, params)
        out.append(x)
    return out


def table_columns(ks=DEFAULT_KS, n_max: int = DEFAULT_N_MAX) -> dict:
    """``{k: {n: [terms after n]}}`` by iteration."""
    check_natural(n_max, "n_max")
    return {k: {n: _column(n, k) for n in range(1, n_max + 1)} for k in ks}


def render_text(columns: dict) -> str:
    """Space-aligned blocks, one per k; every line right-stripped, LF endings."""
    blocks = []
    for k, cols in columns.items():
        ns = list(cols)
        width = 1 + max(len(str(v)) for n in ns for v in [n, *cols[n]])
        width = max(width, 3)
        lines = [f"3n+{3 ** k}", "n " + "".join(str(n).rjust(width) for n in ns)]
        depth = max(len(c) for c in cols.values())
        for row in range(depth):
            cells = [str(cols[n][row]) if row < len(cols[n]) else "" for n in ns]
            lines.append(("  " + "".join(c.rjust(width) for c in cells)).rstrip())
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def render_csv(columns: dict) -> str:
    lines = ["k,n,index,term"]
    for k, cols in columns.items():
        for n, terms in cols.items():
            lines.extend(f"{k},{n},{i},{v}" for i, v in enumerate(terms, start=1))
    return "\n".join(lines) + "\n"


def render_json(columns: dict) -> str:
    payload = {str(k): {str(n): terms for n, terms in cols.items()} for k, cols in columns.items()}
    return json.dumps(payload, indent=1) + "\n"
