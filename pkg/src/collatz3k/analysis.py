"""Per-start quantities: total stopping time, odd-term counts, entry pattern.

``odd_count`` counts odd terms among ``g^0 .. g^t`` inclusive, so the
terminal 3^k is always one of them; it equals ``m + 1`` where ``m`` is the
odd count of the length-t prefix used by the closed forms.
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import CycleTag, Params, check_natural, stream

__all__ = [
    "AnalysisRow",
    "analyze",
    "total_stopping_time",
    "odd_term_count",
    "classify_cycle_entry",
    "figure_dataset",
    "group_by_stopping_time",
    "unresolved",
    "FIGURE_WINDOWS",
]

FIGURE_WINDOWS = ((1, 100), (500, 600), (900, 1000))


@dataclass(frozen=True)
class AnalysisRow:
    """One bar pair of a stopping-time plot; ``t``/``odd_count`` are None if unresolved."""

    n: int
    k: int
    t: Optional[int]
    odd_count: Optional[int]
    tag: CycleTag


def analyze(n: int, params: Params, budget: Optional[int] = None) -> AnalysisRow:
    res = stream(n, params, budget)
    return AnalysisRow(n, params.k, res.t, res.odd_count, res.tag)


def total_stopping_time(n: int, params: Params, budget: Optional[int] = None) -> Optional[int]:
    """Smallest t with g^t(n) = 3^k, or None if not reached within ``budget``.

    None means "not known to be finite", not "infinite".
    """
    return stream(n, params, budget).t


def odd_term_count(n: int, params: Params, budget: Optional[int] = None) -> Optional[int]:
    return stream(n, params, budget).odd_count


def classify_cycle_entry(n: int, params: Params, budget: Optional[int] = None) -> CycleTag:
    """Entry pattern into 3^k, read off the term two steps before it.

    Raises :class:`~collatz3k.errors.InternalInvariantBroken` if that term is
    neither 4*3^k nor 3^(k-1).
    """
    return stream(n, params, budget).tag


def _rows(args):
    lo, hi, k, budget = args
    params = Params(k)
    return [analyze(n, params, budget) for n in range(lo, hi + 1)]


def _as_bounds(n_range) -> tuple:
    if isinstance(n_range, range):
        if n_range.step != 1 or len(n_range) == 0:
            raise ValueError("need a non-empty contiguous range")
        lo, hi = n_range.start, n_range.stop - 1
    else:
        lo, hi = n_range
    check_natural(lo, "range start")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    return lo, hi


def figure_dataset(n_range, params: Params, budget: Optional[int] = None,
                   jobs: int = 1) -> list:
    """Rows for every n in the inclusive range ``(lo, hi)``, ascending.

    With ``jobs > 1`` the range is split across processes; rows are merged
    back in order so the result does not depend on ``jobs``.
    """
    lo, hi = _as_bounds(n_range)
    if jobs <= 1 or hi - lo < 1000:
        return _rows((lo, hi, params.k, budget))
    size = -(-(hi - lo + 1) // (jobs * 4))
    parts = [(a, min(a + size - 1, hi), params.k, budget) for a in range(lo, hi + 1, size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        out = []
        for rows in pool.map(_rows, parts):
            out.extend(rows)
    return out


def group_by_stopping_time(rows_or_range, params: Optional[Params] = None,
                           budget: Optional[int] = None) -> dict:
    """Map t to ``[(n, odd_count, tag), ...]`` over terminating starts.

    Accepts either rows from :func:`figure_dataset` or an inclusive range plus
    ``params``.
    """
    if isinstance(rows_or_range, (range, tuple)):
        if params is None:
            raise TypeError("params is required when grouping a range")
        rows: Iterable[AnalysisRow] = figure_dataset(rows_or_range, params, budget)
    else:
        rows = rows_or_range
    groups = defaultdict(list)
    for row in rows:
        if row.t is not None:
            groups[row.t].append((row.n, row.odd_count, row.tag))
    return dict(sorted(groups.items()))


def unresolved(rows: Iterable[AnalysisRow]) -> list:
    return [r.n for r in rows if r.t is None]
