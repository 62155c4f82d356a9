"""Finite-(N, M) lower bounds on the l0 cost of non-adaptive sensing.

Every bound here is evaluated exactly at the given sizes rather than in
asymptotic form. Integer-valued bounds are Python ints; the rest are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations

from .errors import DomainError, InfeasibleError
from .numkit import binomial, q_inverse

__all__ = [
    "BoundReport",
    "PackingParams",
    "exact_min_binary_cost",
    "packing_capacity",
    "noisy_lower_bound",
    "higher_m_bound",
    "ksparse_lower_bound",
    "brute_force_min_cost",
    "BRUTE_FORCE_SUBSET_LIMIT",
]

BRUTE_FORCE_SUBSET_LIMIT = 10**6
HIGHER_M_D_RANGE = (2, 64)

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundReport:
    n: int
    m: int
    regime: str
    r0: int
    c_m: float
    lower_bound: int | float
    per_weight_capacity: tuple = ()
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PackingParams:
    """Column-norm cap ``tau``, target error ``eps``, amplitude ``mu`` and the
    pairwise separation ``d = 2 Q^{-1}(eps) / mu`` they imply."""

    tau: float
    eps: float
    mu: float
    d: float

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")
        if not self.mu > 0:
            raise DomainError(f"mu must be positive, got {self.mu}")
        expected = separation(self.eps, self.mu)
        if not math.isclose(self.d, expected, rel_tol=1e-9, abs_tol=0.0):
            raise DomainError(
                f"d={self.d} is inconsistent with eps={self.eps}, mu={self.mu} "
                f"(expected {expected})"
            )

    @classmethod
    def from_target(cls, tau: float, eps: float, mu: float) -> "PackingParams":
        return cls(tau=tau, eps=eps, mu=mu, d=separation(eps, mu))

    @property
    def ratio(self) -> float:
        """2 tau / d, the per-axis point budget of the packing bound."""
        return 2.0 * self.tau / self.d


def separation(eps: float, mu: float) -> float:
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}")
    return 2.0 * q_inverse(eps) / mu


def _growth_factor(n, m):
    return m / math.log2(n) if n >= 2 else math.inf


def _fill_by_weight(n, capacities):
    """Greedy fill of ``n`` columns over per-weight capacities (weight 1 first).

    Returns ``(r0, exhausted, cost)`` where ``exhausted`` is the total of the
    first ``r0`` capacities and ``exhausted < n <= exhausted + capacities[r0]``.
    """
    r0 = 0
    exhausted = 0
    cost = 0
    for weight, cap in enumerate(capacities, start=1):
        if exhausted + cap >= n:
            break
        exhausted += cap
        cost += cap * weight
        r0 = weight
    cost += (n - exhausted) * (r0 + 1)
    return r0, exhausted, cost


def exact_min_binary_cost(n: int, m: int) -> BoundReport:
    """Minimum l0 cost over binary M x N matrices with distinct nonzero columns.

    Weight classes 1..r0 are used completely and the leftover columns all
    have weight r0 + 1.
    """
    if n < 1 or m < 1:
        raise DomainError(f"n and m must be positive, got n={n}, m={m}")
    limit = 2**m - 1
    if n > limit:
        raise InfeasibleError(
            f"n={n} exceeds 2^m - 1 = {limit} distinct nonzero binary columns",
            capacity=limit,
        )
    capacities = [binomial(m, l) for l in range(1, m + 1)]
    r0, exhausted, cost = _fill_by_weight(n, capacities)
    denominator = sum(capacities[: max(r0, 1)])
    diagnostics = {"exhausted_columns": exhausted}
    if n >= 2:
        diagnostics["growth_factor_T"] = _growth_factor(n, m)
        diagnostics["cost_over_nlogn"] = cost / (n * math.log2(n))
    return BoundReport(
        n=n,
        m=m,
        regime="binary-noiseless",
        r0=r0,
        c_m=n / denominator,
        lower_bound=cost,
        per_weight_capacity=tuple(enumerate(capacities, start=1)),
        diagnostics=diagnostics,
    )


def packing_capacity(m: int, l: int, p: PackingParams) -> float:
    """Upper bound C(m, l) (2 tau / d)^l on separated weight-l points in the ball."""
    if not 1 <= l <= m:
        raise DomainError(f"weight must satisfy 1 <= l <= m, got l={l}, m={m}")
    return binomial(m, l) * p.ratio**l


def noisy_lower_bound(n: int, m: int, p: PackingParams) -> BoundReport:
    if n < 1 or m < 1:
        raise DomainError(f"n and m must be positive, got n={n}, m={m}")
    capacities = [packing_capacity(m, l, p) for l in range(1, m + 1)]
    total = math.fsum(capacities)
    if n > total:
        raise InfeasibleError(
            f"n={n} exceeds the packing capacity {total:.6g} for m={m}, "
            f"2tau/d={p.ratio:.6g}",
            capacity=math.floor(total),
        )
    r0, exhausted, cost = _fill_by_weight(n, capacities)
    denominator = math.fsum(capacities[: max(r0, 1)])
    diagnostics = {
        "ratio_2tau_over_d": p.ratio,
        "d": p.d,
        "max_packable_n": math.floor(total),
        # Theorem hypothesis: tau mu / Q^{-1}(eps) bounded; equals 2tau/d.
        "tau_mu_over_qinv": p.tau * p.mu / q_inverse(p.eps),
    }
    if n >= 2:
        diagnostics["growth_factor_T"] = _growth_factor(n, m)
    return BoundReport(
        n=n,
        m=m,
        regime="real-noisy",
        r0=r0,
        c_m=n / denominator,
        lower_bound=float(cost),
        per_weight_capacity=tuple(enumerate(capacities, start=1)),
        diagnostics=diagnostics,
    )


def higher_m_kernel(n: int, m: int, c_m: float, d: int) -> float:
    exponent = d / (d - 1)
    base = _LN2 * math.log2(n / c_m) / (2 * d)
    return n / m ** (1.0 / (d - 1)) * base**exponent


def higher_m_bound(n: int, m: int, c_m: float = 1.0, scale_c: float = 1.0):
    """Scan the entropy-power bound over integer d in [2, 64].

    Returns ``(scale_c * max_d B(d), argmax_d)``; ties keep the smallest d.
    """
    if not c_m > 0 or not n / c_m > 1:
        raise DomainError(f"need n / c_m > 1, got n={n}, c_m={c_m}")
    if m < 2:
        raise DomainError(f"m must be at least 2, got {m}")
    if not scale_c > 0:
        raise DomainError(f"scale_c must be positive, got {scale_c}")
    lo, hi = HIGHER_M_D_RANGE
    best_d = lo
    best = higher_m_kernel(n, m, c_m, lo)
    for d in range(lo + 1, hi + 1):
        value = higher_m_kernel(n, m, c_m, d)
        if value > best:
            best, best_d = value, d
    return scale_c * best, best_d


def ksparse_lower_bound(n: int, m: int, k: int) -> BoundReport:
    """K-sparse recovery inherits the one-sparse binary bound unchanged."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    report = exact_min_binary_cost(n, m)
    diagnostics = dict(report.diagnostics, k=k)
    if n >= 2:
        diagnostics["asymptotic_scale_nk_log2n"] = n * k * math.log2(n)
    return replace(report, diagnostics=diagnostics)


def brute_force_min_cost(n: int, m: int) -> int:
    """Minimum total weight over every n-subset of nonzero binary m-vectors."""
    if m > 4:
        raise DomainError(f"brute force is limited to m <= 4, got m={m}")
    columns = 2**m - 1
    if not 1 <= n <= columns:
        raise InfeasibleError(f"need 1 <= n <= {columns}, got n={n}", capacity=columns)
    subsets = math.comb(columns, n)
    if subsets > BRUTE_FORCE_SUBSET_LIMIT:
        raise DomainError(
            f"C({columns}, {n}) = {subsets} subsets exceeds the enumeration "
            f"limit {BRUTE_FORCE_SUBSET_LIMIT}"
        )
    weights = [bin(v).count("1") for v in range(1, columns + 1)]
    return min(sum(chosen) for chosen in combinations(weights, n))
