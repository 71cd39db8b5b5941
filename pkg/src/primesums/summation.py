"""Exact sums of f over primes, streamed segment by segment.

Each segment's contribution is summed with ``math.fsum`` (correctly
rounded) and the segment totals are folded into a Neumaier accumulator,
whose running correction is reported as ``compensation``.  Exponential f
is summed in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import FunctionSpec, builtin
from .errors import InvalidRange, ResourceLimit
from .sieve import PrimeEngine, default_engine


class Accumulator:
    """Running sum with a Neumaier compensation term."""

    def __init__(self, value: float = 0.0):
        self.s = float(value)
        self.c = 0.0

    def add(self, x: float) -> None:
        s = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - s) + x
        else:
            self.c += (x - s) + self.s
        self.s = s

    def add_array(self, xs: np.ndarray) -> None:
        if not xs.size:
            return
        if not np.all(np.isfinite(xs)):
            # fsum raises on inf/nan; let the non-finite value propagate instead
            self.add(float(np.sum(xs)))
            return
        try:
            self.add(math.fsum(xs.tolist()))
        except OverflowError:
            self.add(math.inf if np.sum(np.sign(xs)) >= 0 else -math.inf)

    @property
    def value(self) -> float:
        return self.s + self.c


class LogAccumulator:
    """Streaming log-sum-exp of signed terms given as ``(log|x|, sign)``."""

    def __init__(self):
        self.shift = -math.inf
        self.pos = Accumulator()
        self.neg = Accumulator()

    def add_array(self, logs: np.ndarray, signs: np.ndarray) -> None:
        if logs.size == 0:
            return
        top = float(np.max(logs))
        if top > self.shift:
            if self.shift > -math.inf:
                scale = math.exp(self.shift - top)
                self.pos.s, self.pos.c = self.pos.s * scale, self.pos.c * scale
                self.neg.s, self.neg.c = self.neg.s * scale, self.neg.c * scale
            self.shift = top
        w = np.exp(logs - self.shift)
        self.pos.add_array(w[signs > 0])
        self.neg.add_array(w[signs < 0])

    def result(self) -> tuple[float, int]:
        """``(log|sum|, sign)``; ``(-inf, 0)`` for an exact zero."""
        diff = self.pos.value - self.neg.value
        if diff == 0:
            return -math.inf, 0
        return self.shift + math.log(abs(diff)), (1 if diff > 0 else -1)


@dataclass(frozen=True)
class ExactSum:
    """Sum of f(p) over primes p <= n.

    With ``log_space`` set, ``value`` holds ``log|sum|`` and ``sign`` the sign.
    """

    n: int
    value: float
    terms: int
    compensation: float = 0.0
    log_space: bool = False
    sign: int = 1

    def as_float(self) -> float:
        """The plain value; may overflow to inf for log-space results."""
        if not self.log_space:
            return self.value
        try:
            return self.sign * math.exp(self.value)
        except OverflowError:
            return self.sign * math.inf


def _check_n(n) -> int:
    n = int(n)
    if n < 2:
        raise InvalidRange(f"n must be >= 2, got {n}")
    return n


def exact_sum(spec: FunctionSpec, n: int, engine: PrimeEngine | None = None) -> ExactSum:
    """Sum f(p) over all primes p <= n."""
    n = _check_n(n)
    engine = engine or default_engine()
    terms = 0
    if spec.exponential:
        acc = LogAccumulator()
        for primes in engine.iter_prime_arrays(n):
            logs, signs = spec.log_abs(primes.astype(float))
            acc.add_array(np.asarray(logs, dtype=float), np.asarray(signs))
            terms += primes.size
        value, sign = acc.result()
        return ExactSum(n, value, terms, 0.0, log_space=True, sign=sign)

    acc = Accumulator()
    for primes in engine.iter_prime_arrays(n):
        acc.add_array(np.asarray(spec.eval(primes.astype(float)), dtype=float))
        terms += primes.size
    if not math.isfinite(acc.value):
        raise ResourceLimit(f"sum of {spec.label} overflowed; declare exponential growth")
    return ExactSum(n, acc.value, terms, acc.c)


def abel_sum(spec: FunctionSpec, n: int, engine: PrimeEngine | None = None) -> ExactSum:
    """The sum via the telescoped Abel identity

        A(n) f(n) - sum_{k=2}^{n-1} A(k) (f(k+1) - f(k)),   A = pi,

    which is ``A(n)f(n) - integral_1^n A(t) f'(t) dt`` for the step function A.
    """
    n = _check_n(n)
    engine = engine or default_engine()
    acc = Accumulator()
    count = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for seg in engine.segments_upto(n):
            top = min(seg.hi, n + 1)
            size = top - seg.lo
            indicator = np.zeros(size, dtype=np.int64)
            odd = seg.first_odd + 2 * np.flatnonzero(seg.odd_mask()).astype(np.int64)
            indicator[odd[odd < top] - seg.lo] = 1
            if seg.has_two:
                indicator[2 - seg.lo] = 1
            a = count + np.cumsum(indicator)
            count = int(a[-1])
            k = np.arange(seg.lo, min(top, n), dtype=float)
            if k.size:
                df = np.asarray(spec.eval(k + 1.0), dtype=float) - np.asarray(spec.eval(k), dtype=float)
                acc.add_array(-a[: k.size] * df)
        boundary = count * float(spec.eval(float(n)))
    acc.add(boundary)
    if not math.isfinite(acc.value):
        raise ResourceLimit(f"Abel sum of {spec.label} is not representable at n={n}")
    return ExactSum(n, acc.value, count, acc.c)


def log_product_primes(n: int, engine: PrimeEngine | None = None) -> float:
    """log of the product of primes <= n, i.e. sum of log p (Chebyshev theta)."""
    return exact_sum(builtin("log"), n, engine).value
