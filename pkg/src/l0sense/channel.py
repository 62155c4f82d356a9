"""Measurement acquisition y = A x + z, ML decoding and Monte Carlo error rates.

Randomness
----------
Every random draw comes from ``numpy.random.default_rng(seed)``. Monte Carlo
trial ``t`` under master seed ``s`` uses the seed ``mix_seed(s, t)``, which is
``splitmix64(splitmix64(s) XOR t)``. A trial draws its support with
``rng.integers(n)`` first and then its noise vector, so each trial is
reproducible on its own and the failure count does not depend on the order in
which trials run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .bounds import separation
from .errors import DomainError, InvalidMatrixError
from .matrices import AdaptivePlan, SensingMatrix
from .numkit import q_function, q_inverse

__all__ = [
    "OneSparseSignal",
    "MeasurementRecord",
    "ErrorEstimate",
    "splitmix64",
    "mix_seed",
    "measure",
    "ml_decode",
    "ml_decode_batch",
    "pairwise_error",
    "separation_distance",
    "run_bisection",
    "bisect_batch",
    "required_amplitude",
    "wilson_interval",
    "monte_carlo",
]

_MASK64 = (1 << 64) - 1
_DECODE_CHUNK = 2048


@dataclass(frozen=True)
class OneSparseSignal:
    n: int
    support: int
    mu: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"signal dimension must be positive, got {self.n}")
        if not 0 <= self.support < self.n:
            raise DomainError(f"support {self.support} out of range for n={self.n}")
        if not self.mu > 0:
            raise DomainError(f"amplitude must be positive, got {self.mu}")

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.n)
        x[self.support] = self.mu
        return x


@dataclass(frozen=True)
class MeasurementRecord:
    values: tuple
    noise_seed: int
    noisy: bool

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class ErrorEstimate:
    trials: int
    failures: int
    rate: float
    ci_low: float
    ci_high: float
    target: float | None = None

    @property
    def meets_target(self) -> bool | None:
        """True unless the whole 95% interval lies above the target."""
        if self.target is None:
            return None
        return self.ci_low <= self.target


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def splitmix64(state: int) -> int:
    """First output of a SplitMix64 generator started at ``state``."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, index: int) -> int:
    """Per-trial seed ``splitmix64(splitmix64(seed) XOR index)``.

    The master seed is scrambled before the XOR; otherwise nearby seeds would
    share almost all of their trial streams.
    """
    if index < 0:
        raise DomainError(f"trial index must be >= 0, got {index}")
    return splitmix64(splitmix64(_check_seed(seed)) ^ (int(index) & _MASK64))


def measure(a: SensingMatrix, x: OneSparseSignal, noisy: bool = False, seed: int = 0):
    if x.n != a.cols:
        raise DomainError(f"signal dimension {x.n} does not match {a.cols} matrix columns")
    y = x.mu * a.column(x.support)
    if noisy:
        y = y + np.random.default_rng(_check_seed(seed)).standard_normal(a.rows)
    return MeasurementRecord(tuple(y.tolist()), int(seed), bool(noisy))


def _require_decodable(a):
    if not a.columns_distinct_nonzero:
        raise InvalidMatrixError(
            "matrix has duplicate or zero columns; one-sparse supports are "
            "indistinguishable"
        )


def _nearest_columns(dense, Y, mu):
    # ||y - mu a_i||^2 = ||y||^2 - 2 mu <a_i, y> + mu^2 ||a_i||^2; drop ||y||^2.
    col_energy = mu * mu * np.einsum("ij,ij->j", dense, dense)
    out = np.empty(Y.shape[0], dtype=np.int64)
    for lo in range(0, Y.shape[0], _DECODE_CHUNK):
        block = Y[lo:lo + _DECODE_CHUNK]
        scores = col_energy[None, :] - 2.0 * mu * (block @ dense)
        out[lo:lo + _DECODE_CHUNK] = np.argmin(scores, axis=1)
    return out


def ml_decode_batch(a: SensingMatrix, Y, mu: float) -> np.ndarray:
    """Nearest scaled column for each row of ``Y`` (shape T x M)."""
    _require_decodable(a)
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    if Y.shape[1] != a.rows:
        raise DomainError(f"measurement length {Y.shape[1]} does not match {a.rows} rows")
    return _nearest_columns(a.to_dense(), Y, mu)


def ml_decode(a: SensingMatrix, y, mu: float) -> int:
    """Index i minimising ||y - mu A_i||_2; ties go to the smallest index."""
    values = y.as_array() if isinstance(y, MeasurementRecord) else y
    return int(ml_decode_batch(a, values, mu)[0])


def pairwise_error(ai, aj, mu: float) -> float:
    """ML error between two equiprobable columns under unit Gaussian noise."""
    ai = np.asarray(ai, dtype=np.float64)
    aj = np.asarray(aj, dtype=np.float64)
    if ai.shape != aj.shape:
        raise DomainError(f"vector shapes differ: {ai.shape} vs {aj.shape}")
    return q_function(mu * float(np.linalg.norm(ai - aj)) / 2.0)


def separation_distance(eps: float, mu: float) -> float:
    return separation(eps, mu)


def bisect_batch(plan: AdaptivePlan, supports, mu: float, noise=None):
    """Run the bisection plan for many supports at once.

    ``noise`` has shape (T, step_count); column t perturbs the t-th
    measurement of each run. Returns (decoded, measurements, cost) arrays.
    """
    supports = np.asarray(supports, dtype=np.int64)
    count = supports.shape[0]
    lo = np.zeros(count, dtype=np.int64)
    hi = np.full(count, plan.n, dtype=np.int64)
    used = np.zeros(count, dtype=np.int64)
    cost = np.zeros(count, dtype=np.int64)
    threshold = mu / 2.0
    for t in range(plan.step_count):
        active = hi - lo > 1
        if not active.any():
            break
        mid = lo + (hi - lo + 1) // 2
        y = np.where((supports >= lo) & (supports < mid), mu, 0.0)
        if noise is not None:
            y = y + noise[:, t]
        inside = y > threshold
        used += active
        cost += np.where(active, mid - lo, 0)
        hi = np.where(active & inside, mid, hi)
        lo = np.where(active & ~inside, mid, lo)
    return lo, used, cost


def run_bisection(plan: AdaptivePlan, x: OneSparseSignal, noisy: bool = False, seed: int = 0):
    """Adaptive bisection for one signal: ``(decoded, measurements, l0_cost)``."""
    if x.n != plan.n:
        raise DomainError(f"signal dimension {x.n} does not match plan size {plan.n}")
    noise = None
    if noisy:
        rng = np.random.default_rng(_check_seed(seed))
        noise = rng.standard_normal((1, plan.step_count))
    decoded, used, cost = bisect_batch(plan, [x.support], x.mu, noise)
    return int(decoded[0]), int(used[0]), int(cost[0])


def required_amplitude(n: int, eps: float) -> float:
    """Amplitude giving per-step error eps/steps, so total error <= eps by the union bound."""
    if n < 2:
        raise DomainError(f"bisection needs n >= 2, got {n}")
    steps = (n - 1).bit_length()
    return 2.0 * q_inverse(eps / steps)


def wilson_interval(failures: int, trials: int, z: float | None = None):
    """Wilson score interval; default z is the two-sided 95% quantile."""
    if z is None:
        z = NormalDist().inv_cdf(0.975)
    p = failures / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4 * trials * trials)) / denom
    # Clamp so rounding never leaves p outside its own interval.
    return max(0.0, min(centre - half, p)), min(1.0, max(centre + half, p))


def monte_carlo(strategy, mu: float, eps_target: float | None = None,
                trials: int = 10_000, seed: int = 0, noisy: bool = True) -> ErrorEstimate:
    """Support-recovery failure rate of a matrix (ML decode) or a bisection plan."""
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    if not mu > 0:
        raise DomainError(f"amplitude must be positive, got {mu}")
    seed = _check_seed(seed)
    if isinstance(strategy, AdaptivePlan):
        n, width = strategy.n, strategy.step_count
    elif isinstance(strategy, SensingMatrix):
        _require_decodable(strategy)
        n, width = strategy.cols, strategy.rows
    else:
        raise DomainError(f"unsupported strategy {type(strategy).__name__}")

    supports = np.empty(trials, dtype=np.int64)
    noise = np.zeros((trials, width))
    base = splitmix64(seed)  # mix_seed(seed, t) == splitmix64(base ^ t)
    for t in range(trials):
        rng = np.random.default_rng(splitmix64(base ^ t))
        supports[t] = rng.integers(n)
        if noisy:
            noise[t] = rng.standard_normal(width)

    if isinstance(strategy, AdaptivePlan):
        decoded, _, _ = bisect_batch(strategy, supports, mu, noise if noisy else None)
    else:
        dense = strategy.to_dense()
        Y = mu * dense[:, supports].T + noise
        decoded = _nearest_columns(dense, Y, mu)

    failures = int(np.count_nonzero(decoded != supports))
    low, high = wilson_interval(failures, trials)
    return ErrorEstimate(trials, failures, failures / trials, low, high, eps_target)
