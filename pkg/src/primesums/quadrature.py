"""Adaptive Simpson quadrature for the logarithmic-integral main terms and
the remainder-bound integrals.

The integrator is breadth-first and vectorized: every refinement pass
evaluates the integrand once on all still-active intervals, so integrands
must accept numpy arrays.  Ranges with ``b/a > 1e3`` are integrated in
``u = log t``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .catalog import FunctionSpec
from .errors import MaxSubdivisionsExceeded, ResourceLimit

MAIN_REL_TOL = 1e-9
BOUND_REL_TOL = 1e-6
ABS_TOL = 1e-14
MAX_SUBDIVISIONS = 10**6
LOG_SUBSTITUTION_RATIO = 1e3
WEIGHTS = ("crude", "pnt", "rh")


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    subdivisions: int


def _evaluator(g):
    def call(x):
        y = np.asarray(g(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
        if not np.all(np.isfinite(y)):
            raise ResourceLimit("integrand is not finite on the integration range")
        return y

    return call


def _simpson(g, lo, hi, rel_tol, abs_tol, max_subdivisions, initial):
    x = np.linspace(lo, hi, 2 * initial + 1)
    y = g(x)
    a, m, b = x[0:-1:2], x[1::2], x[2::2]
    fa, fm, fb = y[0:-1:2], y[1::2], y[2::2]
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    width = hi - lo

    parts: list[float] = []
    errors: list[float] = []
    accepted = 0
    while a.size:
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        fy = g(np.concatenate([lm, rm]))
        flm, frm = fy[: a.size], fy[a.size :]
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole

        estimate = math.fsum(parts) + float(np.sum(left + right))
        tol = max(rel_tol * abs(estimate), abs_tol)
        err = np.abs(delta) / 15.0
        if math.fsum(errors) + float(np.sum(err)) <= 0.5 * tol:
            # whole remaining error budget met: take everything
            ok = np.ones(a.size, dtype=bool)
        else:
            local = tol * (b - a) / width
            unresolved = (b - a) <= 64 * np.finfo(float).eps * np.maximum(np.abs(a), np.abs(b))
            ok = (err <= local) | unresolved

        if ok.any():
            parts.extend((left[ok] + right[ok] + delta[ok] / 15.0).tolist())
            errors.extend(err[ok].tolist())
            accepted += int(ok.sum())
        keep = ~ok
        if not keep.any():
            break
        if accepted + 2 * int(keep.sum()) > max_subdivisions:
            raise MaxSubdivisionsExceeded(
                f"more than {max_subdivisions} subintervals on [{lo:g}, {hi:g}]"
            )
        a_k, m_k, b_k = a[keep], m[keep], b[keep]
        a = np.concatenate([a_k, m_k])
        b = np.concatenate([m_k, b_k])
        m = np.concatenate([lm[keep], rm[keep]])
        fa, fb = np.concatenate([fa[keep], fm[keep]]), np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
    return QuadResult(math.fsum(parts), math.fsum(errors), max(accepted, 1))


def integrate(
    g,
    a: float,
    b: float,
    rel_tol: float = MAIN_REL_TOL,
    *,
    abs_tol: float = ABS_TOL,
    max_subdivisions: int = MAX_SUBDIVISIONS,
    initial: int = 32,
) -> QuadResult:
    """Integrate ``g`` over ``[a, b]`` with ``2 <= a <= b``.

    Intervals are bisected until the Simpson halves agree to the local share
    of ``max(rel_tol*|I|, abs_tol)``, or until the summed error estimate of
    all pieces is within half that budget; accepted pieces get the Richardson
    correction.  Raises MaxSubdivisionsExceeded past ``max_subdivisions``.
    """
    a, b = float(a), float(b)
    if not 2.0 <= a <= b:
        raise ValueError(f"need 2 <= a <= b, got a={a}, b={b}")
    if not 1e-12 <= rel_tol <= 1e-2:
        raise ValueError(f"rel_tol must lie in [1e-12, 1e-2], got {rel_tol}")
    if a == b:
        return QuadResult(0.0, 0.0, 1)
    if b / a > LOG_SUBSTITUTION_RATIO:
        def h(u):
            t = np.exp(u)
            return g(t) * t

        return _simpson(_evaluator(h), math.log(a), math.log(b), rel_tol, abs_tol, max_subdivisions, initial)
    return _simpson(_evaluator(g), a, b, rel_tol, abs_tol, max_subdivisions, initial)


def li_main(spec: FunctionSpec, n: float, rel_tol: float = MAIN_REL_TOL) -> QuadResult:
    """``integral_2^n f(t)/log t dt``."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return integrate(lambda t: spec.eval(t) / np.log(t), 2.0, n, rel_tol)


def remainder_weight(weight: str, c: float = 1.0, theta: float = 0.5):
    """The factor multiplying |f'(t)| in each remainder integral."""
    if weight == "crude":
        return lambda t: t / np.log(t) ** 2
    if weight == "pnt":
        if not c > 0:
            raise ValueError(f"c must be positive, got {c}")
        return lambda t: t * np.exp(-c * np.log(t) ** theta)
    if weight == "rh":
        return lambda t: np.sqrt(t) * np.log(t)
    raise ValueError(f"weight must be one of {WEIGHTS}, got {weight!r}")


def remainder_integral(
    spec: FunctionSpec,
    n: float,
    weight: str,
    c: float = 1.0,
    rel_tol: float = BOUND_REL_TOL,
    theta: float = 0.5,
) -> QuadResult:
    """``integral_2^n |f'(t)| w(t) dt`` for the crude, pnt or rh weight w."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    w = remainder_weight(weight, c, theta)
    return integrate(lambda t: np.abs(spec.deriv(t)) * w(t), 2.0, n, rel_tol)


def _inv_log(t):
    return 1.0 / np.log(t)


class LogIntegralTable:
    """``J1(t) = integral_2^t du/log u`` for many t at once.

    J1 is tabulated cumulatively at geometric breakpoints ``2*ratio**j``
    (each piece by :func:`integrate`); a query adds a 20-point Gauss-Legendre
    piece from the nearest breakpoint below.  The table grows on demand
    under a lock.
    """

    def __init__(self, ratio: float = 1.05, rel_tol: float = 1e-12):
        self.ratio = ratio
        self.rel_tol = rel_tol
        self._bp = [2.0]
        self._cum = [0.0]
        self._nodes, self._weights = np.polynomial.legendre.leggauss(20)
        self._lock = threading.Lock()

    def _extend(self, t_max: float) -> None:
        with self._lock:
            while self._bp[-1] < t_max:
                lo = self._bp[-1]
                hi = lo * self.ratio
                self._cum.append(self._cum[-1] + integrate(_inv_log, lo, hi, self.rel_tol).value)
                self._bp.append(hi)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 2.0):
            raise ValueError("J1 is defined here for t >= 2")
        self._extend(float(np.max(t)) if t.size else 2.0)
        bp = np.asarray(self._bp)
        idx = np.searchsorted(bp, t, side="right") - 1
        base = bp[idx]
        half = 0.5 * (t - base)
        u = (base + half)[..., None] + half[..., None] * self._nodes
        local = half * np.sum(self._weights / np.log(u), axis=-1)
        return np.asarray(self._cum)[idx] + local


_J1 = LogIntegralTable()


def parts_identity(spec: FunctionSpec, n: float, rel_tol: float = MAIN_REL_TOL, table: LogIntegralTable | None = None):
    """Both sides of the integration-by-parts identity

        integral_2^n J1(t) f'(t) dt  =  f(n) J1(n) - integral_2^n f(t)/log t dt

    evaluated independently.  Returns ``(lhs, rhs)``.
    """
    table = table or _J1
    lhs = integrate(lambda t: table(t) * spec.deriv(t), 2.0, n, rel_tol).value
    rhs = float(spec.eval(float(n))) * float(table(float(n))) - li_main(spec, n, rel_tol).value
    return lhs, rhs
