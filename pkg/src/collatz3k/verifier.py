"""Chunked, resumable sweeps checking that every start in a range reaches 3^k.

A sweep splits ``[start, end]`` into fixed chunks aligned on ``start``. Chunks
run concurrently but are merged, and checkpointed, strictly in ascending
order, so the report is the same for any ``jobs`` and any resume point.

Checkpoint files are JSON lines, one per finished chunk, appended and fsynced
as each chunk lands; the last line holds the progress marker. A torn final
line (crash mid-write) is ignored on resume.
"""

from __future__ import annotations

import json
import logging
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Callable, Optional

import numpy as np

from . import _kernel
from .core import (
    _unbounded_int_digits,
    CycleTag,
    Params,
    Status,
    check_natural,
    default_budget,
    detect_cycle,
    stream,
)
from .errors import CheckpointError

__all__ = [
    "SCHEMA_VERSION",
    "SweepConfig",
    "ChunkResult",
    "VerificationReport",
    "SpotCheck",
    "verify_chunk",
    "run_sweep",
    "spot_check_large",
    "load_checkpoint",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_TAG_BY_CODE = {
    _kernel.TAG_SHORT: CycleTag.SHORT,
    _kernel.TAG_STANDARD: CycleTag.STANDARD,
    _kernel.TAG_SHORTCUT: CycleTag.SHORTCUT,
}


@dataclass(frozen=True)
class SweepConfig:
    k: int
    start: int
    end: int
    budget: Optional[int] = None      # None: default_budget(n) per start
    chunk_size: int = 10_000
    jobs: int = 1
    checkpoint_path: Optional[str] = None
    fast: bool = True                 # allow the int64 kernel

    def __post_init__(self):
        Params(self.k)
        check_natural(self.start, "start")
        check_natural(self.end, "end")
        if self.start > self.end:
            raise ValueError(f"start {self.start} is after end {self.end}")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.budget is not None and self.budget < 1:
            raise ValueError("budget must be at least 1")

    @property
    def params(self) -> Params:
        return Params(self.k)

    def chunks(self, first: Optional[int] = None):
        """Inclusive ``(lo, hi)`` pairs from ``first`` (a chunk boundary) to ``end``."""
        lo = self.start if first is None else first
        while lo <= self.end:
            hi = min(lo + self.chunk_size - 1, self.end)
            yield lo, hi
            lo = hi + 1

    def echo(self) -> dict:
        return {"k": self.k, "start": str(self.start), "end": str(self.end),
                "budget": self.budget, "chunk_size": self.chunk_size}


@dataclass(frozen=True)
class ChunkResult:
    start: int
    end: int
    verified: int
    failures: tuple                    # ((n, Status), ...) ascending in n
    max_t: Optional[int]
    max_t_n: Optional[int]
    odd_max: Optional[int]
    odd_max_n: Optional[int]
    tags: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def size(self) -> int:
        return self.end - self.start + 1

    def to_dict(self) -> dict:
        return {
            "start": str(self.start),
            "end": str(self.end),
            "verified": self.verified,
            "failures": [[str(n), s.value] for n, s in self.failures],
            "max_t": self.max_t,
            "max_t_n": None if self.max_t_n is None else str(self.max_t_n),
            "odd_max": self.odd_max,
            "odd_max_n": None if self.odd_max_n is None else str(self.odd_max_n),
            "tags": {tag.value: c for tag, c in sorted(self.tags.items(), key=lambda kv: kv[0].value)},
            "elapsed": self.elapsed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChunkResult":
        def nat(v):
            return None if v is None else int(v)
        return cls(
            start=int(d["start"]),
            end=int(d["end"]),
            verified=d["verified"],
            failures=tuple((int(n), Status(s)) for n, s in d["failures"]),
            max_t=d["max_t"],
            max_t_n=nat(d["max_t_n"]),
            odd_max=d["odd_max"],
            odd_max_n=nat(d["odd_max_n"]),
            tags={CycleTag(t): c for t, c in d["tags"].items()},
            elapsed=d["elapsed"],
        )


def _classify_failure(n: int, params: Params, budget: int) -> Status:
    report = detect_cycle(n, params, budget)
    if report.found and params.target not in report.cycle_members:
        return Status.CYCLE_WITHOUT_TARGET
    return Status.BUDGET_EXHAUSTED


class _Tally:
    """Running chunk statistics; ties on a maximum go to the smallest n."""

    def __init__(self):
        self.verified = 0
        self.failures = []
        self.max_t = self.max_t_n = self.odd_max = self.odd_max_n = None
        self.tags = {}

    def _bump(self, value, n, best, best_n):
        if best is None or value > best or (value == best and n < best_n):
            return value, n
        return best, best_n

    def add(self, n, t, odd_count, tag, count=1):
        self.verified += count
        self.max_t, self.max_t_n = self._bump(t, n, self.max_t, self.max_t_n)
        self.odd_max, self.odd_max_n = self._bump(odd_count, n, self.odd_max, self.odd_max_n)
        self.tags[tag] = self.tags.get(tag, 0) + count

    def add_bulk(self, lo, t, odd, tag, idx):
        if idx.size == 0:
            return
        tt = t[idx]
        i = idx[np.argmax(tt)]
        self.max_t, self.max_t_n = self._bump(int(t[i]), lo + int(i), self.max_t, self.max_t_n)
        oo = odd[idx]
        i = idx[np.argmax(oo)]
        self.odd_max, self.odd_max_n = self._bump(int(odd[i]) + 1, lo + int(i),
                                                  self.odd_max, self.odd_max_n)
        self.verified += int(idx.size)
        counts = np.bincount(tag[idx], minlength=4)
        for code, name in _TAG_BY_CODE.items():
            if counts[code]:
                self.tags[name] = self.tags.get(name, 0) + int(counts[code])


def _verify_pure(n: int, params: Params, budget, tally: _Tally):
    b = default_budget(n) if budget is None else budget
    res = stream(n, params, b)
    if res.status is Status.REACHED_TARGET:
        tally.add(n, res.t, res.odd_count, res.tag)
    else:
        tally.failures.append((n, _classify_failure(n, params, b)))


def verify_chunk(cfg: SweepConfig, chunk_range) -> ChunkResult:
    """Check every start in the inclusive ``chunk_range``.

    Starts that do not reach 3^k within budget are recorded as failures,
    never raised. Uses the int64 kernel where it applies and Python ints for
    anything that overflows it.
    """
    lo, hi = chunk_range
    if lo < cfg.start or hi > cfg.end or lo > hi:
        raise ValueError(f"chunk [{lo}, {hi}] outside sweep [{cfg.start}, {cfg.end}]")
    params = cfg.params
    tally = _Tally()
    began = time.perf_counter()
    if cfg.fast and _kernel.usable(cfg.k, lo, hi):
        t, odd, tag, status = _kernel.sweep(lo, hi, cfg.k, cfg.budget)
        tally.add_bulk(lo, t, odd, tag, np.flatnonzero(status == _kernel.REACHED))
        for i in np.flatnonzero(status != _kernel.REACHED):
            n = lo + int(i)
            if status[i] == _kernel.EXHAUSTED:
                b = default_budget(n) if cfg.budget is None else cfg.budget
                tally.failures.append((n, _classify_failure(n, params, b)))
            else:
                # overflow, or a pattern the kernel could not place: redo exactly
                _verify_pure(n, params, cfg.budget, tally)
    else:
        for n in range(lo, hi + 1):
            _verify_pure(n, params, cfg.budget, tally)
    return ChunkResult(
        lo, hi, tally.verified, tuple(tally.failures),
        tally.max_t, tally.max_t_n, tally.odd_max, tally.odd_max_n,
        tally.tags, time.perf_counter() - began,
    )


@dataclass
class VerificationReport:
    config: dict
    chunks: list
    completed: bool
    elapsed: float

    @property
    def verified(self) -> int:
        return sum(c.verified for c in self.chunks)

    @property
    def failures(self) -> list:
        return [f for c in self.chunks for f in c.failures]

    @property
    def totals(self) -> dict:
        fails = self.failures
        return {
            "verified": self.verified,
            "failed": len(fails),
            "budget_exhausted": sum(s is Status.BUDGET_EXHAUSTED for _, s in fails),
            "cycle_without_target": sum(s is Status.CYCLE_WITHOUT_TARGET for _, s in fails),
        }

    def _best(self, value, arg):
        best = None
        for c in self.chunks:
            v = getattr(c, value)
            if v is not None and (best is None or v > best[0]):
                best = (v, getattr(c, arg))
        return best or (None, None)

    @property
    def max_t(self):
        return self._best("max_t", "max_t_n")

    @property
    def odd_max(self):
        return self._best("odd_max", "odd_max_n")

    @property
    def throughput(self) -> float:
        return self.verified / self.elapsed if self.elapsed > 0 else 0.0

    def to_dict(self) -> dict:
        max_t, max_t_n = self.max_t
        odd_max, odd_max_n = self.odd_max
        return {
            "schema_version": SCHEMA_VERSION,
            "config": dict(self.config),
            "totals": self.totals,
            "max_t": max_t,
            "max_t_n": None if max_t_n is None else str(max_t_n),
            "odd_max": odd_max,
            "odd_max_n": None if odd_max_n is None else str(odd_max_n),
            "completed": self.completed,
            "elapsed": self.elapsed,
            "throughput": self.throughput,
            "chunks": [c.to_dict() for c in self.chunks],
        }

    def canonical(self) -> dict:
        """``to_dict()`` without wall-clock fields; equal across jobs and resumes."""
        d = self.to_dict()
        del d["elapsed"], d["throughput"]
        for c in d["chunks"]:
            del c["elapsed"]
        return d


def _record(cfg: SweepConfig, chunk: ChunkResult, report: VerificationReport) -> dict:
    max_t, max_t_n = report.max_t
    return {
        "schema_version": SCHEMA_VERSION,
        "k": cfg.k,
        "budget": cfg.budget,
        "start": str(cfg.start),
        "end": str(cfg.end),
        "chunk_size": cfg.chunk_size,
        "next_start": str(chunk.end + 1),
        "verified_through": str(chunk.end),
        "max_t": max_t,
        "max_t_n": None if max_t_n is None else str(max_t_n),
        "elapsed_total": report.elapsed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "chunk": chunk.to_dict(),
    }


def load_checkpoint(cfg: SweepConfig) -> tuple:
    """Read ``cfg.checkpoint_path``; returns ``(chunks, next_start, elapsed_total)``."""
    path = cfg.checkpoint_path
    if path is None or not os.path.exists(path):
        return [], cfg.start, 0.0
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().split("\n") if ln.strip()]
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    records = []
    for i, line in enumerate(lines):
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            if i == len(lines) - 1:
                log.warning("ignoring torn last line of checkpoint %s", path)
                break
            raise CheckpointError(f"corrupt checkpoint line {i + 1} in {path}") from None
    chunks = []
    expect = cfg.start
    for rec in records:
        if rec.get("schema_version") != SCHEMA_VERSION:
            raise CheckpointError(f"unsupported checkpoint schema {rec.get('schema_version')!r}")
        mine = {"k": cfg.k, "budget": cfg.budget, "start": str(cfg.start),
                "end": str(cfg.end), "chunk_size": cfg.chunk_size}
        theirs = {key: rec.get(key) for key in mine}
        if theirs != mine:
            raise CheckpointError(f"checkpoint {path} belongs to a different sweep: {theirs}")
        chunk = ChunkResult.from_dict(rec["chunk"])
        if chunk.start != expect or int(rec["next_start"]) != chunk.end + 1:
            raise CheckpointError(f"checkpoint {path} skips or repeats at n={expect}")
        chunks.append(chunk)
        expect = chunk.end + 1
    elapsed = records[-1]["elapsed_total"] if records else 0.0
    return chunks, expect, elapsed


def _append(path: str, record: dict):
    try:
        with open(path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {path}: {exc}") from exc


def _run_chunk(args):
    cfg, bounds = args
    return verify_chunk(cfg, bounds)


def run_sweep(cfg: SweepConfig, max_chunks: Optional[int] = None,
              on_chunk: Optional[Callable[[ChunkResult], None]] = None) -> VerificationReport:
    """Verify ``[cfg.start, cfg.end]``, resuming from ``cfg.checkpoint_path`` if present.

    ``max_chunks`` stops after that many new chunks (the report then has
    ``completed=False``); it is how a partial run is produced on purpose.
    """
    chunks, next_start, elapsed_before = load_checkpoint(cfg)
    report = VerificationReport(cfg.echo(), chunks, next_start > cfg.end, elapsed_before)
    todo = cfg.chunks(next_start)
    if max_chunks is not None:
        todo = (c for _, c in zip(range(max_chunks), todo))
    began = time.perf_counter()

    def land(chunk: ChunkResult):
        report.chunks.append(chunk)
        report.elapsed = elapsed_before + (time.perf_counter() - began)
        if cfg.checkpoint_path is not None:
            _append(cfg.checkpoint_path, _record(cfg, chunk, report))
        if on_chunk is not None:
            on_chunk(chunk)

    if cfg.jobs == 1:
        for bounds in todo:
            land(verify_chunk(cfg, bounds))
    else:
        if cfg.fast:
            # compile (or load from cache) once before workers fork
            _kernel.sweep(1, 1, 0, 1)
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            pending = deque()
            try:
                for bounds in todo:
                    pending.append(pool.submit(_run_chunk, (cfg, bounds)))
                    if len(pending) >= 2 * cfg.jobs:
                        land(pending.popleft().result())
                while pending:
                    land(pending.popleft().result())
            except BaseException:
                for fut in pending:
                    fut.cancel()
                raise
    report.elapsed = elapsed_before + (time.perf_counter() - began)
    report.completed = (report.chunks[-1].end if report.chunks else cfg.start - 1) >= cfg.end
    return report


@dataclass(frozen=True)
class SpotCheck:
    n: int
    k: int
    status: Status
    t: Optional[int]
    steps: int
    odd_count: Optional[int]
    peak_bits: int
    elapsed: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_bits"] = self.n.bit_length()
        with _unbounded_int_digits():
            d["n"] = str(self.n)
        d["status"] = self.status.value
        return d


def spot_check_large(n: int, params: Params, budget: Optional[int] = None) -> SpotCheck:
    """Stopping time and peak bit-length of a single, possibly huge, start."""
    began = time.perf_counter()
    res = stream(n, params, budget)
    return SpotCheck(n, params.k, res.status, res.t, res.steps, res.odd_count,
                     res.peak_bits, time.perf_counter() - began)
