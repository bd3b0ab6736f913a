"""Deliberately naive reference implementations; they share no code with the package."""

from fractions import Fraction


def g(n, k):
    return n // 2 if n % 2 == 0 else 3 * n + 3 ** k


def naive_sequence(n, k, limit=100_000):
    """n, g(n), ... through the first 3^k (inclusive)."""
    seq = [n]
    while seq[-1] != 3 ** k:
        if len(seq) > limit:
            raise RuntimeError("oracle limit hit")
        seq.append(g(seq[-1], k))
    return seq


def naive_profile(terms):
    """(m, d) by scanning parities one at a time."""
    m = 0
    d = [0]
    for x in terms:
        if x % 2 == 1:
            m += 1
            d.append(0)
        else:
            d[m] += 1
    return m, d


def direct_sum(m, d):
    """The correction sum, term by term, in Fraction arithmetic."""
    return sum((Fraction(3 ** (m - j), 2 ** sum(d[j:m + 1])) for j in range(1, m + 1)),
               Fraction(0))


def v3(n):
    a = 0
    while n % 3 == 0:
        n //= 3
        a += 1
    return a
