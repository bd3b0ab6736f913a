"""The generalized map g_k(n) = n/2 (n even), 3n + 3^k (n odd), and its orbits.

Every value is a plain Python ``int``, so trajectories are exact at any
magnitude. Two ways of walking an orbit are offered:

* :func:`trajectory` materializes every term and is what the closed-form
  checks and the table renderer consume;
* :func:`stream` keeps only the current value plus a handful of counters and
  is what the verifier and the large-input spot checks use.
"""

from __future__ import annotations

import enum
import re
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .errors import InternalInvariantBroken

__all__ = [
    "Params",
    "Status",
    "CycleTag",
    "Trajectory",
    "OddEvenProfile",
    "CycleReport",
    "StreamResult",
    "check_natural",
    "parse_natural",
    "default_budget",
    "step",
    "trajectory",
    "parity_profile",
    "iter_profiles",
    "three_adic_valuation",
    "brent",
    "detect_cycle",
    "stream",
]


@dataclass(frozen=True)
class Params:
    """Exponent ``k`` of the map; the odd-branch addend and the target are both 3^k."""

    k: int
    addend: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 0:
            raise ValueError(f"k must be a non-negative integer, got {self.k!r}")
        object.__setattr__(self, "addend", 3 ** self.k)

    @property
    def target(self) -> int:
        return self.addend


class Status(str, enum.Enum):
    REACHED_TARGET = "ReachedTarget"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    CYCLE_WITHOUT_TARGET = "CycleWithoutTarget"


class CycleTag(str, enum.Enum):
    """How an orbit enters 3^k.

    STANDARD   ... 4*3^k, 2*3^k, 3^k
    SHORTCUT   ... 3^(k-1), 2*3^k, 3^k   (k >= 1 only)
    SHORT      stopping time below 2, no pattern to read
    NONE       3^k was not reached
    """

    STANDARD = "Standard"
    SHORTCUT = "Shortcut"
    SHORT = "Short"
    NONE = "None"


def check_natural(n, name: str = "n") -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"{name} must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n}")
    return n


@contextmanager
def _unbounded_int_digits():
    # CPython >= 3.10.7 caps str<->int conversion at 4300 digits by default.
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    old = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


_TOKEN = re.compile(r"\s*(\d+|[-+*^()])")


def parse_natural(text: str) -> int:
    """Parse a positive integer written in decimal or as a small expression.

    Accepts ``+ - * ^`` and parentheses over decimal literals, so inputs like
    ``2^100000-1`` or ``9*2^1000`` need not be spelled out.

    >>> parse_natural("2^10 - 1")
    1023
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise ValueError("empty number")

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def atom():
        tok = take()
        if tok == "(":
            v = expr()
            if take() != ")":
                raise ValueError(f"unbalanced parentheses in {text!r}")
            return v
        if not tok.isdigit():
            raise ValueError(f"unexpected {tok!r} in {text!r}")
        with _unbounded_int_digits():
            return int(tok)

    def power():
        base = atom()
        if peek() == "^":
            take()
            return base ** power()
        return base

    def product():
        v = power()
        while peek() == "*":
            take()
            v *= power()
        return v

    def expr():
        v = product()
        while peek() in ("+", "-"):
            if take() == "+":
                v += product()
            else:
                v -= product()
        return v

    try:
        value = expr()
    except IndexError:
        raise ValueError(f"truncated expression {text!r}") from None
    if i != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return check_natural(value)


def default_budget(n: int) -> int:
    """Step cap used when none is given: 10 * bitlen(n)^2 + 10^4."""
    return 10 * n.bit_length() ** 2 + 10_000


def step(n: int, params: Params) -> int:
    check_natural(n)
    if n & 1:
        return 3 * n + params.addend
    return n >> 1


@dataclass(frozen=True)
class Trajectory:
    """Terms ``g^0(n), g^1(n), ...`` up to the first 3^k (or until the walk stopped).

    ``t`` is the index of the first term equal to 3^k when ``status`` is
    ``REACHED_TARGET`` and ``None`` otherwise.
    """

    start: int
    k: int
    terms: tuple
    status: Status
    t: Optional[int] = None

    @property
    def reached(self) -> bool:
        return self.status is Status.REACHED_TARGET


def _orbit(start: int, target: int, fn: Callable[[int], int], budget: int):
    terms = [start]
    seen = {start}
    x = start
    for _ in range(budget):
        if x == target:
            break
        x = fn(x)
        if x in seen and x != target:
            terms.append(x)
            return terms, Status.CYCLE_WITHOUT_TARGET, None
        seen.add(x)
        terms.append(x)
    if x == target:
        return terms, Status.REACHED_TARGET, len(terms) - 1
    return terms, Status.BUDGET_EXHAUSTED, None


def trajectory(n: int, params: Params, budget: Optional[int] = None) -> Trajectory:
    """Iterate g_k from ``n`` until the first arrival at 3^k.

    Stops early with ``BUDGET_EXHAUSTED`` after ``budget`` steps, or with
    ``CYCLE_WITHOUT_TARGET`` once a term repeats without 3^k appearing (the
    repeated term is appended so the closing edge is visible).
    """
    check_natural(n)
    if budget is None:
        budget = default_budget(n)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    add = params.addend
    terms, status, t = _orbit(
        n, params.target, lambda x: 3 * x + add if x & 1 else x >> 1, budget
    )
    return Trajectory(n, params.k, tuple(terms), status, t)


@dataclass(frozen=True)
class OddEvenProfile:
    """Parity run-lengths of the prefix ``terms[0:l]``.

    ``m`` odd terms; ``d[0]`` evens before the first odd, ``d[i]`` evens right
    after the i-th odd, the last run cut at the prefix boundary.
    """

    l: int
    m: int
    d: tuple

    def __post_init__(self):
        if self.l < 0 or self.m < 0 or len(self.d) != self.m + 1:
            raise ValueError(f"malformed profile l={self.l} m={self.m} d={self.d}")
        if sum(self.d) != self.l - self.m or min(self.d) < 0:
            raise ValueError(f"run lengths {self.d} do not sum to l - m = {self.l - self.m}")


def parity_profile(traj: Trajectory, l: int) -> OddEvenProfile:
    """Profile of the first ``l`` terms of ``traj`` (``l = 0`` gives the empty prefix)."""
    if l < 0 or l > len(traj.terms):
        raise ValueError(f"prefix length {l} outside 0..{len(traj.terms)}")
    d = [0]
    for x in traj.terms[:l]:
        if x & 1:
            d.append(0)
        else:
            d[-1] += 1
    return OddEvenProfile(l, len(d) - 1, tuple(d))


def iter_profiles(traj: Trajectory, stop: Optional[int] = None) -> Iterator[OddEvenProfile]:
    """Yield ``parity_profile(traj, l)`` for ``l = 0, 1, ..., stop`` in one pass."""
    if stop is None:
        stop = len(traj.terms) - 1
    if stop > len(traj.terms):
        raise ValueError(f"prefix length {stop} outside 0..{len(traj.terms)}")
    d = [0]
    yield OddEvenProfile(0, 0, (0,))
    for l, x in enumerate(traj.terms[:stop], start=1):
        if x & 1:
            d.append(0)
        else:
            d[-1] += 1
        yield OddEvenProfile(l, len(d) - 1, tuple(d))


def three_adic_valuation(n: int) -> int:
    check_natural(n)
    a = 0
    while n % 3 == 0:
        n //= 3
        a += 1
    return a


@dataclass(frozen=True)
class CycleReport:
    found: bool
    cycle_members: tuple = ()
    cycle_length: int = 0
    steps_used: int = 0
    tail_length: Optional[int] = None


class _OutOfBudget(Exception):
    pass


def brent(fn: Callable[[int], int], x0: int, budget: int) -> CycleReport:
    """Brent's cycle finder over an arbitrary iterated function.

    Counts every call of ``fn`` against ``budget``. ``cycle_members`` starts at
    the first cycle element the orbit of ``x0`` meets.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    calls = 0

    def f(x):
        nonlocal calls
        if calls >= budget:
            raise _OutOfBudget
        calls += 1
        return fn(x)

    try:
        power = lam = 1
        tortoise = x0
        hare = f(x0)
        while tortoise != hare:
            if power == lam:
                tortoise = hare
                power *= 2
                lam = 0
            hare = f(hare)
            lam += 1

        tortoise = hare = x0
        for _ in range(lam):
            hare = f(hare)
        mu = 0
        while tortoise != hare:
            tortoise = f(tortoise)
            hare = f(hare)
            mu += 1

        members = [tortoise]
        x = f(tortoise)
        while x != tortoise:
            members.append(x)
            x = f(x)
    except _OutOfBudget:
        return CycleReport(False, steps_used=budget)
    return CycleReport(True, tuple(members), lam, calls, mu)


def detect_cycle(n: int, params: Params, budget: Optional[int] = None) -> CycleReport:
    check_natural(n)
    if budget is None:
        budget = default_budget(n)
    add = params.addend
    return brent(lambda x: 3 * x + add if x & 1 else x >> 1, n, budget)


@dataclass(frozen=True)
class StreamResult:
    """Summary of one orbit walked without storing its terms.

    ``odd_terms`` is the number of odd terms strictly before 3^k (``m`` of the
    prefix of length ``t``); ``odd_count`` adds the terminal 3^k.
    """

    start: int
    k: int
    status: Status
    t: Optional[int]
    steps: int
    odd_terms: int
    tag: CycleTag
    peak_bits: int

    @property
    def odd_count(self) -> Optional[int]:
        return self.odd_terms + 1 if self.status is Status.REACHED_TARGET else None


def stream(n: int, params: Params, budget: Optional[int] = None) -> StreamResult:
    """Walk the orbit of ``n`` in O(bitlen) memory.

    Runs of halvings are applied in one shift. 3^k is odd, so inside a run
    only the final value can hit it and skipping the intermediate terms is
    exact. Never reports ``CYCLE_WITHOUT_TARGET``; callers that need that
    distinction run :func:`detect_cycle` on the budget-exhausted starts.
    """
    check_natural(n)
    if budget is None:
        budget = default_budget(n)
    target = add = params.addend
    x = n
    steps = odd = 0
    peak = n.bit_length()
    before_run = None   # odd term that produced the current halving run
    while True:
        if x & 1:
            if x == target:
                break
            if steps >= budget:
                return StreamResult(n, params.k, Status.BUDGET_EXHAUSTED, None,
                                    steps, odd, CycleTag.NONE, peak)
            before_run = x
            x = 3 * x + add
            steps += 1
            odd += 1
            bits = x.bit_length()
            if bits > peak:
                peak = bits
        else:
            tz = (x & -x).bit_length() - 1
            if steps + tz > budget:
                return StreamResult(n, params.k, Status.BUDGET_EXHAUSTED, None,
                                    budget, odd, CycleTag.NONE, peak)
            x >>= tz
            steps += tz
            if x == target:
                if steps < 2:
                    tag = CycleTag.SHORT
                elif tz >= 2:
                    tag = CycleTag.STANDARD
                elif before_run is not None and params.k >= 1 and before_run == target // 3:
                    tag = CycleTag.SHORTCUT
                else:
                    raise InternalInvariantBroken(
                        f"n={n} k={params.k}: term before 2*3^k is {before_run}"
                    )
                return StreamResult(n, params.k, Status.REACHED_TARGET, steps,
                                    steps, odd, tag, peak)
            before_run = None
    # only reachable when n itself is 3^k
    return StreamResult(n, params.k, Status.REACHED_TARGET, 0, 0, 0, CycleTag.SHORT, peak)
