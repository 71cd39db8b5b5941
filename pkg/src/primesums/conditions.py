"""Finite-evidence checks of the conditions under which

    sum_{p<=n} f(p)  /  sum_{k=2}^n f(k)/log k  ->  1.

A limit cannot be decided from finitely many n, so every verdict is a
trend rule over a decade-spaced grid and carries its evidence trail.
Verdicts are ``holds``, ``fails``, ``inconclusive`` and, for constant f,
``degenerate-convergent``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .catalog import FunctionSpec
from .errors import InvalidRange
from .sieve import default_engine
from .summation import Accumulator, LogAccumulator, exact_sum

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"
DEGENERATE = "degenerate-convergent"

DEFAULT_GRID = (10**3, 10**4, 10**5, 10**6, 10**7)
MIN_GRID = 4
CHUNK = 1 << 21


@dataclass(frozen=True)
class Thresholds:
    ratio_distance: float = 0.05     # condition 1: |stat - 1| must stay above this
    divergence_growth: float = 0.10  # condition 3: growth of |integral| per decade
    increment_ratio: float = 0.70    # condition 3: slowest admissible decay of decade increments
    necessary_decay: float = 0.25    # r(p) must drop by this fraction per decade
    necessary_fail_level: float = 0.5
    increasing_floor: float = 0.05   # f/(n f') must stay above this


@dataclass(frozen=True)
class BSum:
    n: int
    value: float


@dataclass(frozen=True)
class ConditionResult:
    name: str
    verdict: str
    evidence: tuple[tuple[int, float], ...]
    statistic: str = ""


@dataclass(frozen=True)
class ConditionReport:
    function: str
    grid: tuple[int, ...]
    conditions: tuple[ConditionResult, ...] = field(default_factory=tuple)

    @property
    def verdicts(self) -> dict[str, str]:
        return {c.name: c.verdict for c in self.conditions}

    @property
    def overall(self) -> str:
        v = [c.verdict for c in self.conditions]
        if FAILS in v:
            return FAILS
        if DEGENERATE in v:
            return DEGENERATE
        if all(x == HOLDS for x in v):
            return HOLDS
        return INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "grid": list(self.grid),
            "overall": self.overall,
            "conditions": [
                {
                    "name": c.name,
                    "verdict": c.verdict,
                    "statistic": c.statistic,
                    "evidence": [[n, s] for n, s in c.evidence],
                }
                for c in self.conditions
            ],
        }


def _check_grid(grid, what="grid") -> tuple[int, ...]:
    grid = tuple(int(n) for n in grid)
    if len(grid) < MIN_GRID:
        raise ValueError(f"{what} needs at least {MIN_GRID} points, got {len(grid)}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"{what} must be strictly increasing")
    if grid[0] < 3 or grid[-1] > 10**9:
        raise ValueError(f"{what} must lie in [3, 1e9]")
    return grid


def _decades(grid, i):
    return math.log10(grid[i + 1] / grid[i])


def _top(seq):
    return seq[len(seq) // 2 :]


# -- B(n) and the smooth comparator sums -------------------------------------


def _comparator_partials(spec: FunctionSpec | None, points) -> list[tuple[float, int]]:
    """``sum_{k=2}^{p} f(k)/log k`` at each p in ``points`` as ``(log|S|, sign)``
    for exponential f, else ``(S, compensation)``.  ``spec=None`` means f = 1."""
    points = sorted(points)
    log_space = spec is not None and spec.exponential
    acc = LogAccumulator() if log_space else Accumulator()
    out = []
    lo = 2
    for p in points:
        while lo <= p:
            hi = min(lo + CHUNK, p + 1)
            k = np.arange(lo, hi, dtype=float)
            logk = np.log(k)
            if spec is None:
                acc.add_array(1.0 / logk)
            elif log_space:
                lf, sg = spec.log_abs(k)
                acc.add_array(np.asarray(lf, dtype=float) - np.log(logk), np.asarray(sg))
            else:
                acc.add_array(np.asarray(spec.eval(k), dtype=float) / logk)
            lo = hi
        out.append(acc.result() if log_space else (acc.value, acc.c))
    return out


def b_sum(n: int) -> BSum:
    """B(n) = sum_{k=2}^n 1/log k."""
    n = int(n)
    if n < 2:
        raise InvalidRange(f"n must be >= 2, got {n}")
    return BSum(n, _comparator_partials(None, [n])[0][0])


def empirical_ratio(spec: FunctionSpec, n: int) -> float:
    """sum_{p<=n} f(p) / sum_{k=2}^n f(k)/log k."""
    num = exact_sum(spec, n)
    (den, sign), = _comparator_partials(spec, [n])
    if spec.exponential:
        return num.sign * sign * math.exp(num.value - den)
    return num.value / den


# -- sufficient conditions ----------------------------------------------------


def _inner_integral(spec: FunctionSpec, n: float) -> tuple[float, float, float | None]:
    """``(I / (n f(n)/log n), log|I|, I)`` for ``I(n) = integral_2^n t f'(t)/log t dt``.

    For exponential f the ratio is computed with f(n) scaled out and I itself
    is returned as None.
    """
    ln = math.log(n)
    if spec.exponential:
        lfn = float(spec.log_abs(n)[0])

        def g(t):
            lf = np.asarray(spec.log_abs(t)[0], dtype=float)
            return t / np.log(t) * spec.dlog(t) * np.exp(lf - lfn)

        scaled = quadrature.integrate(g, 2.0, n).value  # I / f(n)
        return scaled * ln / n, lfn + math.log(abs(scaled)), None
    inner = quadrature.integrate(lambda t: t * spec.deriv(t) / np.log(t), 2.0, n).value
    denom = n * float(spec.eval(n)) / ln
    return inner / denom, (math.log(abs(inner)) if inner else -math.inf), inner


def _condition_ratio(grid, stats, th: Thresholds) -> str:
    dist = [abs(s - 1.0) for s in stats]
    top = _top(dist)
    non_shrinking = all(b >= a * (1 - 1e-9) for a, b in zip(top, top[1:]))
    if min(top) >= th.ratio_distance and non_shrinking:
        return HOLDS
    if dist[-1] < th.ratio_distance and all(b < a for a, b in zip(top, top[1:])):
        return FAILS
    return INCONCLUSIVE


def _condition_divergence(grid, logs, th: Thresholds) -> str:
    """Divergence of |I(n)| judged from ``log|I|`` on the grid."""
    if not all(math.isfinite(x) for x in logs):
        return INCONCLUSIVE
    steps = range(len(grid) - 1)
    growth = [logs[i + 1] - logs[i] for i in steps]
    if all(growth[i] >= math.log1p(th.divergence_growth) * _decades(grid, i) for i in steps):
        return HOLDS
    if not all(g > 0 for g in growth):
        return INCONCLUSIVE
    # increments of |I| per decade: slow (logarithmic-type) decay still diverges,
    # geometric decay means a finite limit
    mags = [math.exp(x - logs[-1]) for x in logs]
    inc = [(mags[i + 1] - mags[i]) / _decades(grid, i) for i in steps]
    rates = [(inc[i + 1] / inc[i]) ** (1 / _decades(grid, i + 1)) for i in range(len(inc) - 1)]
    if all(r >= th.increment_ratio for r in rates):
        return HOLDS
    if all(r <= 0.5 for r in _top(rates)):
        return FAILS
    return INCONCLUSIVE


def check_sufficient(spec: FunctionSpec, grid=DEFAULT_GRID, thresholds: Thresholds | None = None) -> ConditionReport:
    """Conditions (1)-(3) of the sufficient criterion, in integral form:

    1. I(n) / (n f(n)/log n) stays away from 1, I(n) = integral_2^n t f'(t)/log t dt
    2. f monotone with f' != 0
    3. |I(n)| -> infinity

    Constant f is reported as degenerate-convergent: the ratio is then
    pi(n)/B(n), which tends to 1 on its own.
    """
    th = thresholds or Thresholds()
    grid = _check_grid(grid)
    rows = [_inner_integral(spec, float(n)) for n in grid]
    ratio_stats = [r[0] for r in rows]
    logs = [r[1] for r in rows]

    if spec.exponential:
        slope = [float(spec.dlog(float(n))) for n in grid]
        div_evidence, div_stat = tuple(zip(grid, logs)), "log|integral_2^n t f'(t)/log t dt|"
    else:
        slope = [float(spec.deriv(float(n))) for n in grid]
        div_evidence, div_stat = tuple(zip(grid, (r[2] for r in rows))), "integral_2^n t f'(t)/log t dt"

    if spec.is_constant():
        v1 = v2 = v3 = DEGENERATE
    else:
        v1 = _condition_ratio(grid, ratio_stats, th)
        if spec.monotone == "none":
            v2 = INCONCLUSIVE
        elif all(s > 0 for s in slope) and spec.monotone == "increasing":
            v2 = HOLDS
        elif all(s < 0 for s in slope) and spec.monotone == "decreasing":
            v2 = HOLDS
        else:
            v2 = FAILS
        v3 = _condition_divergence(grid, logs, th)

    return ConditionReport(
        spec.label,
        grid,
        (
            ConditionResult("ratio-not-one", v1, tuple(zip(grid, ratio_stats)),
                            "I(n) / (n f(n)/log n)"),
            ConditionResult("monotone-nonzero-derivative", v2, tuple(zip(grid, slope)),
                            "f'(n)/f(n)" if spec.exponential else "f'(n)"),
            ConditionResult("integral-diverges", v3, div_evidence, div_stat),
        ),
    )


def check_monotone_increasing(spec: FunctionSpec, probe=None, thresholds: Thresholds | None = None) -> ConditionResult:
    """The increasing special case: f -> infinity, f' > 0 and
    f(n)/(n f'(n)) bounded away from 0."""
    th = thresholds or Thresholds()
    probe = tuple(probe or (10**k for k in range(1, 9)))
    if spec.exponential:
        stat = [1.0 / (n * float(spec.dlog(float(n)))) for n in probe]
        slope = [float(spec.dlog(float(n))) for n in probe]
    else:
        slope = [float(spec.deriv(float(n))) for n in probe]
        stat = [float(spec.eval(float(n))) / (n * d) if d else math.inf for n, d in zip(probe, slope)]
    evidence = tuple(zip(probe, stat))
    name = "increasing-to-infinity"
    if spec.monotone != "increasing" or not all(d > 0 for d in slope) or spec.growth == "bounded":
        return ConditionResult(name, FAILS, evidence, "f(n)/(n f'(n))")

    top = _top(list(range(len(probe))))
    rates = [(stat[i + 1] / stat[i]) ** (1 / _decades(probe, i)) for i in top[:-1]]
    if all(stat[i] >= th.increasing_floor for i in top) and all(r >= 1 - th.necessary_decay for r in rates):
        verdict = HOLDS
    elif stat[-1] < th.increasing_floor and all(r <= 0.5 for r in rates):
        verdict = FAILS
    else:
        verdict = INCONCLUSIVE
    return ConditionResult(name, verdict, evidence, "f(n)/(n f'(n))")


# -- necessary condition ------------------------------------------------------


def default_prime_grid(grid=DEFAULT_GRID) -> tuple[int, ...]:
    """Smallest prime >= each grid point."""
    engine = default_engine()
    out = []
    for n in grid:
        seg = engine.sieve_range(max(int(n), 2), max(int(n), 2) + 2000)
        out.append(int(seg.primes()[0]))
    return tuple(out)


def necessary_ratios(spec: FunctionSpec, primes) -> list[float]:
    """log r(p) with r(p) = |f(p) / sum_{k=2}^p f(k)/log k|."""
    partial = _comparator_partials(spec, primes)
    out = []
    for p, (s, aux) in zip(sorted(primes), partial):
        lf = float(spec.log_abs(float(p))[0])
        if spec.exponential:
            out.append(lf - s)
        else:
            out.append(lf - math.log(abs(s)) if s else math.inf)
    return out


def check_necessary(spec: FunctionSpec, prime_grid=None, thresholds: Thresholds | None = None) -> ConditionReport:
    """r(p) -> 0 along primes is necessary for the ratio to tend to 1."""
    th = thresholds or Thresholds()
    grid = _check_grid(prime_grid or default_prime_grid(), "prime grid")
    engine = default_engine()
    for p in grid:
        if not engine.sieve_range(p, p + 1).is_prime(p):
            raise ValueError(f"{p} in the prime grid is not prime")
    logs = necessary_ratios(spec, grid)
    r = [math.exp(x) for x in logs]
    steps = range(len(grid) - 1)
    top = _top(list(steps))
    if all(logs[i + 1] - logs[i] <= math.log1p(-th.necessary_decay) * _decades(grid, i) for i in steps):
        verdict = HOLDS
    elif all(r[i + 1] >= r[i] for i in top) and r[-1] > th.necessary_fail_level:
        verdict = FAILS
    else:
        verdict = INCONCLUSIVE
    return ConditionReport(
        spec.label,
        grid,
        (ConditionResult("vanishing-last-term", verdict, tuple(zip(grid, r)),
                         "|f(p) / sum_{k<=p} f(k)/log k|"),),
    )
