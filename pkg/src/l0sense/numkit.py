"""Special functions and binomial/entropy bracket checks.

Exact binomials use Python integers. Floating-point helpers (entropy, the
Gaussian tail and its inverse) are plain ``math`` evaluations; the inverse
tail starts from the stdlib normal quantile and takes one Newton step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist

from .errors import DomainError

__all__ = [
    "EXACT_BINOMIAL_CAP",
    "LemmaVerdict",
    "binomial",
    "log_binomial",
    "partial_binomial_sum",
    "binary_entropy",
    "q_function",
    "q_inverse",
    "lemma1_verdict",
    "lemma2_verdict",
    "lemma3_verdict",
]

# Largest m accepted by binomial(); callers needing more use log_binomial.
EXACT_BINOMIAL_CAP = 4096

_LN2 = math.log(2.0)
_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class LemmaVerdict:
    lower_value: float
    subject_value: float
    upper_value: float
    holds: bool


def _check_pair(m, l):
    if m < 0 or l < 0:
        raise DomainError(f"binomial arguments must be nonnegative, got ({m}, {l})")
    if l > m:
        raise DomainError(f"binomial lower index {l} exceeds upper index {m}")


def binomial(m: int, l: int) -> int:
    """Exact C(m, l) for ``m <= EXACT_BINOMIAL_CAP``."""
    _check_pair(m, l)
    if m > EXACT_BINOMIAL_CAP:
        raise DomainError(
            f"m={m} exceeds the exact cap {EXACT_BINOMIAL_CAP}; use log_binomial"
        )
    return math.comb(m, l)


def log_binomial(m: int, l: int) -> float:
    """Base-2 logarithm of C(m, l) via log-gamma."""
    _check_pair(m, l)
    if l == 0 or l == m:
        return 0.0
    return (math.lgamma(m + 1) - math.lgamma(l + 1) - math.lgamma(m - l + 1)) / _LN2


def partial_binomial_sum(m: int, r: int) -> int:
    """Sum of C(m, l) for l = 1..r (zero when r < 1)."""
    return sum(binomial(m, l) for l in range(1, min(r, m) + 1))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"entropy argument must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def q_function(a: float) -> float:
    """Standard normal upper tail probability P(Z > a)."""
    return 0.5 * math.erfc(a / math.sqrt(2.0))


def q_inverse(eps: float) -> float:
    """Inverse of :func:`q_function` on (0, 0.5); the result is positive."""
    if not 0.0 < eps < 0.5:
        raise DomainError(f"q_inverse needs 0 < eps < 0.5, got {eps}")
    x = -_STD_NORMAL.inv_cdf(eps)
    # Newton step on Q(x) - eps; Q'(x) = -pdf(x).
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    if pdf > 0.0:
        x += (q_function(x) - eps) / pdf
    return x


def lemma1_verdict(m: int, r: int) -> LemmaVerdict:
    """Bracket C(m,r) <= sum_{l<=r} C(m,l) <= C(m,r) / (1 - 2r/m).

    Requires ``1 <= r < m/2``. The comparison is done in exact rationals and
    the reported values are their correctly rounded floats.
    """
    if not (1 <= r and 2 * r < m):
        raise DomainError(f"lemma 1 needs 1 <= r < m/2, got m={m}, r={r}")
    lower = binomial(m, r)
    subject = partial_binomial_sum(m, r)
    upper = Fraction(lower * m, m - 2 * r)
    holds = lower <= subject <= upper
    return LemmaVerdict(float(lower), float(subject), float(upper), holds)


def lemma2_verdict(m: int, r: int) -> LemmaVerdict:
    """Entropy bracket on C(m, r) with p = r/m strictly inside (0, 1)."""
    if not 1 <= r <= m - 1:
        raise DomainError(f"lemma 2 needs 1 <= r <= m-1, got m={m}, r={r}")
    p = r / m
    spread = m * p * (1.0 - p)
    power = 2.0 ** (m * binary_entropy(p))
    lower = power / math.sqrt(8.0 * spread)
    upper = power / math.sqrt(2.0 * math.pi * spread)
    subject = float(binomial(m, r))
    return LemmaVerdict(lower, subject, upper, lower <= subject <= upper)


def lemma3_verdict(p: float, d: int) -> LemmaVerdict:
    """H(p) <= (2d / ln 2) * p^(1 - 1/d) for integer d >= 2 and 0 < p < 1/2."""
    if d < 2 or int(d) != d:
        raise DomainError(f"lemma 3 needs an integer d >= 2, got {d}")
    if not 0.0 < p < 0.5:
        raise DomainError(f"lemma 3 needs 0 < p < 0.5, got {p}")
    subject = binary_entropy(p)
    upper = (2.0 * d / _LN2) * p ** (1.0 - 1.0 / d)
    return LemmaVerdict(0.0, subject, upper, 0.0 <= subject <= upper)
