"""Closed forms for the terms and total stopping time of 3n+3^k sequences.

For a prefix of ``l`` terms with parity profile ``(m; d_0..d_m)``::

    g^l(n) = 3^m / 2^(l-m) * n + 3^k * eps * S
    S      = sum_{j=1..m} 3^(m-j) / 2^(d_j + ... + d_m)
    eps    = 0 if m == 0 else 1

If the prefix stops right before the first 3^k (``l = t``), then::

    2^t = 2^m * 3^m * n / (3^k * (1 - eps * S))

Everything here is exact. These functions check a trajectory against itself:
the profile they take already encodes t, so they cannot predict t for an
unseen n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    OddEvenProfile,
    Params,
    Status,
    check_natural,
    iter_profiles,
    parity_profile,
    trajectory,
)
from .dyadic import DyadicRational
from .errors import FormulaDivisionByZero, NonIntegerResult, NotPowerOfTwo

__all__ = [
    "epsilon",
    "epsilon_sum",
    "one_minus_eps_sum",
    "eval_term_formula",
    "k0_term_formula",
    "total_stopping_time_formula",
    "same_time_partner",
    "CrossCheck",
    "cross_check",
]


def epsilon(profile: OddEvenProfile) -> int:
    return 0 if profile.m == 0 else 1


def epsilon_sum(profile: OddEvenProfile) -> DyadicRational:
    """The correction sum S, put over the common denominator 2^(d_1+...+d_m).

    Term j then has numerator 3^(m-j) * 2^(d_1+...+d_(j-1)), which a Horner
    pass accumulates without forming any intermediate fraction.
    """
    acc = 0
    run = 0
    d = profile.d
    for j in range(1, profile.m + 1):
        acc = 3 * acc + (1 << run)
        run += d[j]
    return DyadicRational(acc, run)


def one_minus_eps_sum(profile: OddEvenProfile) -> DyadicRational:
    return 1 - epsilon(profile) * epsilon_sum(profile)


def eval_term_formula(n: int, params: Params, profile: OddEvenProfile) -> int:
    """Term ``g^l_k(n)`` from ``n`` and the profile of its first ``l`` terms.

    Raises :class:`NonIntegerResult` when the value is fractional, which means
    ``profile`` was not taken from ``n``'s own trajectory.
    """
    check_natural(n)
    m = profile.m
    value = DyadicRational(3 ** m * n, profile.l - m)
    if epsilon(profile):
        value = value + params.addend * epsilon_sum(profile)
    if not value.is_integer():
        raise NonIntegerResult(
            f"term formula gives {value} for n={n}, k={params.k}, profile={profile}"
        )
    return value.numerator


def k0_term_formula(n: int, profile: OddEvenProfile) -> int:
    """The k = 0 (classical 3n+1) specialization of :func:`eval_term_formula`."""
    return eval_term_formula(n, Params(0), profile)


def total_stopping_time_formula(n: int, params: Params, profile: OddEvenProfile) -> int:
    """Recover t as log2 of ``2^m 3^m n / (3^k (1 - eps*S))``.

    ``profile`` must describe the first t terms of ``n``'s trajectory. The
    logarithm is an exact power-of-two test, never a float.
    """
    check_natural(n)
    m = profile.m
    rest = one_minus_eps_sum(profile)
    if rest.numerator == 0:
        raise FormulaDivisionByZero(profile)
    # R = 6^m n 2^e / (3^k a)  with  1 - eps*S = a / 2^e
    ratio = Fraction(6 ** m * n << rest.den_exp, params.addend * rest.numerator)
    if ratio.denominator != 1 or ratio.numerator <= 0:
        raise NotPowerOfTwo(f"stopping-time ratio {ratio} for n={n}, profile={profile}")
    r = ratio.numerator
    if r & (r - 1):
        raise NotPowerOfTwo(f"stopping-time ratio {r} for n={n}, profile={profile}")
    return r.bit_length() - 1


def same_time_partner(
    n1: int, profile1: OddEvenProfile, profile2: OddEvenProfile, params: Params
) -> int:
    """Solve for n2 sharing n1's total stopping time, given both profiles.

    n2 = (2^m1 3^m1 / 2^m2 3^m2) * (1 - eps S2) / (1 - eps S1) * n1
    """
    check_natural(n1)
    if profile1.l != profile2.l:
        raise ValueError(
            f"profiles cover different prefix lengths ({profile1.l} vs {profile2.l})"
        )
    rest1 = one_minus_eps_sum(profile1)
    if rest1.numerator == 0:
        raise FormulaDivisionByZero(profile1)
    rest2 = one_minus_eps_sum(profile2)
    value = (
        Fraction(6 ** profile1.m, 6 ** profile2.m)
        * rest2.to_fraction()
        / rest1.to_fraction()
        * n1
    )
    if value.denominator != 1:
        raise NonIntegerResult(f"partner of n1={n1} evaluates to {value}")
    return value.numerator


@dataclass(frozen=True)
class CrossCheck:
    """Outcome of checking one start against the closed forms.

    ``term_failures`` lists prefix lengths whose formula value differed from
    the iterated term; ``stopping_time_ok`` is ``None`` when 3^k was not
    reached within budget.
    """

    n: int
    k: int
    t: Optional[int]
    terms_checked: int
    term_failures: tuple
    stopping_time_ok: Optional[bool]

    @property
    def passed(self) -> bool:
        return self.stopping_time_ok is True and not self.term_failures


def cross_check(n: int, params: Params, budget: Optional[int] = None) -> CrossCheck:
    """Compare every term g^1..g^t and t itself against the closed forms."""
    traj = trajectory(n, params, budget)
    if traj.status is not Status.REACHED_TARGET:
        return CrossCheck(n, params.k, None, 0, (), None)
    failures = []
    terms = traj.terms
    profile = None
    for profile in iter_profiles(traj, traj.t):
        if profile.l == 0:
            continue
        try:
            ok = eval_term_formula(n, params, profile) == terms[profile.l]
        except NonIntegerResult:
            ok = False
        if not ok:
            failures.append(profile.l)
    if profile is None or profile.l != traj.t:
        profile = parity_profile(traj, traj.t)
    try:
        t_ok = total_stopping_time_formula(n, params, profile) == traj.t
    except (NotPowerOfTwo, FormulaDivisionByZero):
        t_ok = False
    return CrossCheck(n, params.k, traj.t, traj.t, tuple(failures), t_ok)
