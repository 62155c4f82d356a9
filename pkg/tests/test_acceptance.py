"""Acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line with its runtime. Run with
``pytest tests/test_acceptance.py -s`` to see them, or execute this file
directly.
"""

import functools
import io
import math
import time

import numpy as np

from l0sense import bounds, channel, numkit
from l0sense.cli import cli_main, lemma_summary
from l0sense.matrices import SensingMatrix, bisection_plan, grid_packing, l0_cost, min_cost_binary

SWEEP_N = [2**k for k in range(8, 17)]


def criterion(number, title, budget):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
                elapsed = time.perf_counter() - start
                assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
            except Exception as exc:
                print(f"[FAIL] {number}. {title}: {exc}")
                raise
            print(f"[PASS] {number}. {title} ({elapsed:.2f}s){': ' + detail if detail else ''}")

        return run

    return wrap


@criterion(1, "exact construction is optimal for m <= 4", 10)
def test_exact_construction_tightness():
    checked = 0
    for m in range(1, 5):
        for n in range(1, 2**m):
            brute = bounds.brute_force_min_cost(n, m)
            exact = bounds.exact_min_binary_cost(n, m).lower_bound
            built = l0_cost(min_cost_binary(n, m))
            assert brute == exact == built, (n, m, brute, exact, built)
            checked += 1
    return f"{checked} (n, m) pairs"


@criterion(2, "boundary cost / (N log2 N) in [0.30, 0.60]", 5)
def test_boundary_constant():
    ratios = []
    for k in (8, 10, 12, 14, 16):
        n = 2**k
        cost = bounds.exact_min_binary_cost(n, k + 1).lower_bound
        assert l0_cost(min_cost_binary(n, k + 1)) == cost
        ratio = cost / (n * k)
        assert 0.30 <= ratio <= 0.60, (n, ratio)
        ratios.append(ratio)
    assert bounds.exact_min_binary_cost(256, 9).lower_bound == 842
    return "ratios " + ", ".join(f"{r:.4f}" for r in ratios)


@criterion(3, "non-adaptive / adaptive separation", 5)
def test_separation():
    worst = math.inf
    for n in SWEEP_N:
        k = int(math.log2(n))
        # t = 1 gives M = log2 N, one short of feasible; the construction needs log2 N + 1.
        m = max(k, n.bit_length())
        nonadaptive = l0_cost(min_cost_binary(n, m))
        plan = bisection_plan(n)
        assert plan.total_cost <= n - 1
        ratio = nonadaptive / plan.total_cost
        assert ratio >= 0.3 * k, (n, ratio)
        worst = min(worst, ratio / k)
    return f"min ratio / log2 N = {worst:.4f}"


@criterion(4, "lemma suite", 5)
def test_lemma_suite():
    summary = lemma_summary(64)
    for name, (checked, failed) in summary.items():
        assert failed == 0, (name, failed)
    assert summary["lemma3"][0] == 1000
    return ", ".join(f"{name} {checked}" for name, (checked, _) in summary.items())


@criterion(5, "two-column Monte Carlo matches Q(mu |delta| / 2)", 30)
def test_noisy_calibration():
    a = SensingMatrix.from_dense([[1.0, 0.0], [0.0, 1.0]])
    delta = math.sqrt(2.0)
    trials = 100_000
    parts = []
    for arg in (0.5, 1.0, 2.0):
        mu = 2 * arg / delta
        expected = numkit.q_function(arg)
        est = channel.monte_carlo(a, mu, None, trials, seed=20 + int(arg * 10))
        half_width = 3 * math.sqrt(expected * (1 - expected) / trials)
        assert abs(est.rate - expected) <= half_width, (arg, est.rate, expected)
        parts.append(f"Q({arg})={expected:.5f} got {est.rate:.5f}")
    return "; ".join(parts)


@criterion(6, "noiseless exhaustive recovery", 60)
def test_noiseless_recovery():
    decoded = 0
    for m in range(1, 13):
        cap = 2**m - 1
        n_values = range(1, cap + 1) if m <= 7 else sorted({2 ** (m - 1), 2 ** (m - 1) + 1, 3 * 2 ** (m - 2), cap})
        for n in n_values:
            a = min_cost_binary(n, m)
            Y = a.to_dense().T.astype(float)  # row s is the noiseless record of support s
            assert np.array_equal(channel.ml_decode_batch(a, Y, 1.0), np.arange(n)), (n, m)
            decoded += n
    for n in range(2, 4097):
        supports = np.arange(n)
        got, _, _ = channel.bisect_batch(bisection_plan(n), supports, 1.0)
        assert np.array_equal(got, supports), n
    # spot-check the scalar path against the batch path
    for n in (2, 3, 1000, 4096):
        for s in (0, n // 2, n - 1):
            assert channel.run_bisection(bisection_plan(n), channel.OneSparseSignal(n, s, 1.0))[0] == s
    return f"{decoded} ML decodes, bisection for every n <= 4096"


@criterion(7, "noisy bisection meets eps = 0.05 at n = 1024", 30)
def test_noisy_bisection_target():
    n, eps = 1024, 0.05
    mu = channel.required_amplitude(n, eps)
    est = channel.monte_carlo(bisection_plan(n), mu, eps, 10_000, seed=7)
    slack = est.ci_high - est.rate
    assert est.rate <= eps + slack, (est.rate, est.ci_low, est.ci_high)
    return f"mu={mu:.4f} rate={est.rate:.4f} CI=[{est.ci_low:.4f}, {est.ci_high:.4f}]"


PACKING_CONFIGS = [
    (n, m, tau, d)
    for (m, tau, d) in [(3, 4.0, 1.0), (4, 3.0, 1.0), (5, 2.5, 0.9), (6, 4.0, 1.3)]
    for n in (2, 5, 11, 20, 30)
]


def packing_is_valid(a, tau, d):
    dense = a.to_dense()
    if np.any(np.linalg.norm(dense, axis=0) > tau * (1 + 1e-12)):
        return False
    for i in range(a.cols - 1):
        gaps = np.linalg.norm(dense[:, i + 1:] - dense[:, [i]], axis=0)
        if np.any(gaps < d * (1 - 1e-12)):
            return False
    return True


@criterion(8, "packing validity and bound consistency", 30)
def test_packing_consistency():
    eps = 0.1
    for n, m, tau, d in PACKING_CONFIGS:
        p = bounds.PackingParams.from_target(tau, eps, 2 * numkit.q_inverse(eps) / d)
        a = grid_packing(n, m, tau, p.d)
        assert packing_is_valid(a, tau, p.d), (n, m, tau, d)
        assert bounds.noisy_lower_bound(n, m, p).lower_bound <= l0_cost(a), (n, m, tau, d)
    unit = bounds.PackingParams.from_target(0.5, eps, 2 * numkit.q_inverse(eps))  # 2 tau / d == 1
    for m in range(1, 11):
        for n in range(1, 2**m):
            assert bounds.noisy_lower_bound(n, m, unit).lower_bound == bounds.exact_min_binary_cost(n, m).lower_bound
    return f"{len(PACKING_CONFIGS)} configurations"


@criterion(9, "sweep and simulate are byte-identical across runs", 10)
def test_determinism(tmp_path):
    def invoke(argv):
        out, err = io.StringIO(), io.StringIO()
        assert cli_main(argv, out, err) == 0, err.getvalue()
        return out.getvalue()

    csvs = []
    for name in ("first.csv", "second.csv"):
        path = tmp_path / name
        invoke(["sweep", "--n-min", "256", "--n-max", "65536", "--strategies", "min-binary,bisection,gaussian",
                "--seed", "42", "--out", str(path)])
        csvs.append(path.read_bytes())
    assert csvs[0] == csvs[1]
    sims = [
        invoke(["simulate", "--strategy", "bisection", "--n", "1024", "--mu", "5", "--noisy",
                "--trials", "2000", "--seed", "42", "--eps", "0.05"])
        for _ in range(2)
    ]
    sims += [
        invoke(["simulate", "--strategy", "nonadaptive", "--n", "100", "--mu", "2", "--noisy",
                "--trials", "2000", "--seed", "42"])
        for _ in range(2)
    ]
    assert sims[0] == sims[1] and sims[2] == sims[3]
    return f"{len(csvs[0])} CSV bytes"


if __name__ == "__main__":
    import pathlib
    import sys
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_"):
            continue
        try:
            if name == "test_determinism":
                with tempfile.TemporaryDirectory() as tmp:
                    fn(pathlib.Path(tmp))
            else:
                fn()
        except Exception:
            failed += 1
    sys.exit(1 if failed else 0)
