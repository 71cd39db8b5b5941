"""Main terms and remainder-bound values for sums over primes.

Three error models for pi(n) feed the estimates:

* ``crude``  pi(n) = n/log n + O(n/log^2 n)
* ``pnt``    pi(n) = J1(n) + O(n exp(-c (log n)^theta)),  theta = 1/2 by default
* ``rh``     pi(n) = J1(n) + O(n^(1/2) log n), conditional on RH

Bounds are reported with every O-constant set to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .catalog import QUADRATURE_ONLY, FunctionSpec, entry
from .errors import HypothesisViolation

KINDS = ("crude", "pnt", "rh")


@dataclass(frozen=True)
class ErrorModel:
    kind: str = "pnt"
    c: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    epsilon: float = 0.05
    theta: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"model kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("c", "c1", "c2", "theta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")


@dataclass(frozen=True)
class AsymptoticEstimate:
    n: float
    model: ErrorModel
    main_pieces: dict[str, float] = field(default_factory=dict)
    bound_pieces: dict[str, float] = field(default_factory=dict)

    @property
    def main(self) -> float:
        return math.fsum(self.main_pieces.values())

    @property
    def bound(self) -> float:
        return math.fsum(self.bound_pieces.values())

    @property
    def pieces(self) -> dict[str, float]:
        return {**self.main_pieces, **self.bound_pieces}


def _check_n(n):
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return float(n)


def _require_monotone(spec: FunctionSpec, what: str) -> None:
    if spec.monotone == "none":
        raise HypothesisViolation(f"{what} needs a monotone f; {spec.label} is not monotone on [2, inf)")


def estimate_crude(spec: FunctionSpec, n, model: ErrorModel | None = None,
                   rel_tol: float = quadrature.MAIN_REL_TOL) -> AsymptoticEstimate:
    """Estimate from pi(n) = n/log n + O(n/log^2 n); f need not be monotone.

    main  = n f(n)/log n - integral_2^n t f'(t)/log t dt
    bound = n |f(n)|/log^2 n + integral_2^n t |f'(t)|/log^2 t dt
    """
    n = _check_n(n)
    model = model or ErrorModel("crude")
    ln = math.log(n)
    fn = float(spec.eval(n))
    inner = quadrature.integrate(lambda t: t * spec.deriv(t) / np.log(t), 2.0, n, rel_tol).value
    tail = quadrature.remainder_integral(spec, n, "crude").value
    return AsymptoticEstimate(
        n,
        model,
        {"boundary": n * fn / ln, "integral": -inner},
        {"boundary_bound": n * abs(fn) / ln**2, "integral_bound": tail},
    )


def _li_estimate(spec, n, model, rel_tol, boundary_bound, weight):
    _require_monotone(spec, f"the {weight} estimate")
    main = quadrature.li_main(spec, n, rel_tol).value
    tail = quadrature.remainder_integral(spec, n, weight, model.c, theta=model.theta).value
    fn = abs(float(spec.eval(n)))
    return AsymptoticEstimate(
        n,
        model,
        {"li_main": main},
        {"boundary_bound": fn * boundary_bound, "integral_bound": tail},
    )


def estimate_pnt(spec: FunctionSpec, n, model: ErrorModel | None = None,
                 rel_tol: float = quadrature.MAIN_REL_TOL) -> AsymptoticEstimate:
    """main = integral_2^n f/log; bound = |f(n)| n e^{-c log^theta n} + integral t|f'| e^{-c log^theta t}."""
    n = _check_n(n)
    model = model or ErrorModel("pnt")
    decay = n * math.exp(-model.c * math.log(n) ** model.theta)
    return _li_estimate(spec, n, model, rel_tol, decay, "pnt")


def estimate_rh(spec: FunctionSpec, n, model: ErrorModel | None = None,
                rel_tol: float = quadrature.MAIN_REL_TOL) -> AsymptoticEstimate:
    """main = integral_2^n f/log; bound = |f(n)| n^{1/2} log n + integral |f'| t^{1/2} log t."""
    n = _check_n(n)
    model = model or ErrorModel("rh")
    return _li_estimate(spec, n, model, rel_tol, math.sqrt(n) * math.log(n), "rh")


def estimate(spec: FunctionSpec, n, model: ErrorModel) -> AsymptoticEstimate:
    return {"crude": estimate_crude, "pnt": estimate_pnt, "rh": estimate_rh}[model.kind](spec, n, model)


def closed_main(spec: FunctionSpec, n) -> float | None:
    """Leading closed-form main term, or None when only quadrature is available."""
    n = float(n)
    ln = math.log(n)
    p = spec.param
    key = entry(spec.id, **p).closed_main
    if key == QUADRATURE_ONLY:
        return None
    if key == "one":
        return n / ln
    if key == "log":
        return n
    if key == "recip":
        return math.log(ln)
    if key == "log_over_t":
        return ln
    if key == "power":
        m = p["m"]
        return n ** (m + 1) / ((m + 1) * ln)
    if key == "power_log":
        # one integration by parts of integral t^m log^(k-1) t dt
        m, k = p["m"], p["k"]
        return n ** (m + 1) * ln ** (k - 1) / (m + 1)
    return None


def product_bound_log(n, model: ErrorModel | None = None) -> float:
    """log of the upper bound for the product of primes <= n.

    ``n + c1 n/log n`` for the crude and pnt models, ``n + c2 n^(1/2+eps)`` for rh.
    """
    model = model or ErrorModel("crude")
    n = float(n)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if model.kind == "rh":
        return n + model.c2 * n ** (0.5 + model.epsilon)
    return n + model.c1 * n / math.log(n)


@dataclass(frozen=True)
class Consistency:
    """The li main term against the crude main term at one n.

    Integration by parts gives exactly
    ``main_li - main_crude = integral_2^n f/log^2 t dt - 2 f(2)/log 2``;
    ``identity_residual`` is how far the computed difference misses that.
    """

    n: float
    main_li: float
    main_crude: float
    difference: float
    correction: float
    crude_bound: float

    @property
    def identity_residual(self) -> float:
        return self.difference - self.correction

    @property
    def bound_ratio(self) -> float:
        """|difference| / crude bound: the effective O-constant needed."""
        return abs(self.difference) / self.crude_bound if self.crude_bound else math.inf


def consistency_transform(spec: FunctionSpec, n, rel_tol: float = quadrature.MAIN_REL_TOL) -> Consistency:
    n = _check_n(n)
    li = quadrature.li_main(spec, n, rel_tol).value
    crude = estimate_crude(spec, n, rel_tol=rel_tol)
    extra = quadrature.integrate(lambda t: spec.eval(t) / np.log(t) ** 2, 2.0, n, rel_tol).value
    correction = extra - 2.0 * float(spec.eval(2.0)) / math.log(2.0)
    return Consistency(n, li, crude.main, li - crude.main, correction, crude.bound)
