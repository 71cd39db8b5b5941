"""Functions whose prime sums are studied.

Every callable on a :class:`FunctionSpec` accepts floats or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParams, UnknownFunction

MONOTONE = ("increasing", "decreasing", "none")
GROWTH = ("bounded", "polylog", "polynomial", "exponential")
PROBE_GRID = (2.0, 10.0, 100.0, 1e4, 1e6)
FD_REL_TOL = 1e-6
QUADRATURE_ONLY = "quadrature-only"
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class FunctionSpec:
    """A function f on [2, inf) together with f', shape and growth metadata.

    ``monotone`` is meant in the weak sense: a constant is "increasing".
    ``log_eval(t)`` returns ``(log|f(t)|, sign)`` and ``dlog(t)`` returns
    f'(t)/f(t); both are needed when f overflows a float.
    """

    id: str
    params: tuple[tuple[str, float], ...]
    eval: Callable = field(repr=False)
    deriv: Callable = field(repr=False)
    monotone: str
    growth: str
    log_eval: Callable | None = field(default=None, repr=False)
    dlog: Callable | None = field(default=None, repr=False)

    def __call__(self, t):
        return self.eval(t)

    @property
    def param(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def label(self) -> str:
        if not self.params:
            return self.id
        return self.id + "(" + ",".join(f"{k}={v:g}" for k, v in self.params) + ")"

    @property
    def exponential(self) -> bool:
        return self.growth == "exponential"

    def log_abs(self, t):
        """``(log|f(t)|, sign(f(t)))``, via ``log_eval`` when available."""
        if self.log_eval is not None:
            return self.log_eval(t)
        v = np.asarray(self.eval(t), dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(v)), np.sign(v)

    def is_constant(self) -> bool:
        """True when f' vanishes on the whole probe grid."""
        return all(float(self.deriv(t)) == 0.0 for t in PROBE_GRID)


@dataclass(frozen=True)
class CatalogEntry:
    spec: FunctionSpec
    closed_main: str  # formula key understood by estimators.closed_main, or QUADRATURE_ONLY


def _one():
    return FunctionSpec(
        "one", (), lambda t: t * 0.0 + 1.0, lambda t: t * 0.0, "increasing", "bounded"
    )


def _log():
    return FunctionSpec("log", (), np.log, lambda t: 1.0 / t, "increasing", "polylog")


def _recip():
    return FunctionSpec("recip", (), lambda t: 1.0 / t, lambda t: -1.0 / (t * t), "decreasing", "bounded")


def _log_over_t():
    # increasing on [2, e], decreasing afterwards
    return FunctionSpec(
        "log_over_t",
        (),
        lambda t: np.log(t) / t,
        lambda t: (1.0 - np.log(t)) / (t * t),
        "none",
        "bounded",
    )


def _check_m(m: float) -> float:
    m = float(m)
    if not m > -1.0:
        raise InvalidParams(f"exponent m must satisfy m > -1, got {m}")
    return m


def _power(m: float = 1.0):
    m = _check_m(m)
    if m > 0:
        monotone, growth = "increasing", "polynomial"
    elif m == 0:
        monotone, growth = "increasing", "bounded"
    else:
        monotone, growth = "decreasing", "bounded"
    return FunctionSpec(
        "power",
        (("m", m),),
        lambda t: np.power(t, m),
        lambda t: m * np.power(t, m - 1.0),
        monotone,
        growth,
    )


def _power_log(m: float = 1.0, k: float = 1):
    m = _check_m(m)
    if float(k) != int(k) or int(k) < 0:
        raise InvalidParams(f"log power k must be a non-negative integer, got {k}")
    k = int(k)

    def f(t):
        return np.power(t, m) * np.log(t) ** k

    def df(t):
        lt = np.log(t)
        tail = k * lt ** (k - 1) if k else 0.0
        return np.power(t, m - 1.0) * (m * lt**k + tail)

    if m > 0:
        monotone, growth = "increasing", "polynomial"
    elif m == 0:
        monotone, growth = "increasing", ("polylog" if k else "bounded")
    else:
        # m log t + k changes sign at t = exp(-k/m) > e when k >= 1
        monotone, growth = ("decreasing" if k == 0 else "none"), "bounded"
    return FunctionSpec("power_log", (("m", m), ("k", float(k))), f, df, monotone, growth)


def _exp2():
    def log_eval(t):
        t = np.asarray(t, dtype=float)
        return t * LOG2, np.ones_like(t)

    def f(t):
        with np.errstate(over="ignore"):
            return np.exp2(t)

    def df(t):
        with np.errstate(over="ignore"):
            return LOG2 * np.exp2(t)

    return FunctionSpec(
        "exp2", (), f, df, "increasing", "exponential",
        log_eval=log_eval, dlog=lambda t: t * 0.0 + LOG2,
    )


_BUILDERS: dict[str, tuple[Callable[..., FunctionSpec], tuple[str, ...], str]] = {
    "one": (_one, (), "one"),
    "log": (_log, (), "log"),
    "recip": (_recip, (), "recip"),
    "log_over_t": (_log_over_t, (), "log_over_t"),
    "power": (_power, ("m",), "power"),
    "power_log": (_power_log, ("m", "k"), "power_log"),
    "exp2": (_exp2, (), QUADRATURE_ONLY),
}

IDS = tuple(_BUILDERS)


def entry(id: str, **params) -> CatalogEntry:
    try:
        build, names, closed = _BUILDERS[id]
    except KeyError:
        raise UnknownFunction(f"unknown function id {id!r}; choose from {', '.join(IDS)}") from None
    extra = set(params) - set(names)
    if extra:
        raise InvalidParams(f"{id} takes parameters {names or '()'}, got {sorted(extra)}")
    return CatalogEntry(build(**params), closed)


def builtin(id: str, **params) -> FunctionSpec:
    """Build a catalog function, e.g. ``builtin("power", m=1)``."""
    return entry(id, **params).spec


def validate(spec: FunctionSpec) -> list[str]:
    """Violations of the derivative and monotonicity contracts; empty when sound."""
    problems = []
    if spec.monotone not in MONOTONE:
        problems.append(f"monotone flag {spec.monotone!r} not in {MONOTONE}")
    if spec.growth not in GROWTH:
        problems.append(f"growth class {spec.growth!r} not in {GROWTH}")
    if spec.exponential and (spec.log_eval is None or spec.dlog is None):
        problems.append("exponential growth requires log_eval and dlog")
        return problems

    with np.errstate(all="ignore"):
        for t in PROBE_GRID:
            h = t * 1e-6
            if spec.exponential:
                exact = float(spec.dlog(t))
                fd = (float(spec.log_eval(t + h)[0]) - float(spec.log_eval(t - h)[0])) / (2 * h)
            else:
                exact = float(spec.deriv(t))
                if not math.isfinite(exact) or abs(exact) < 1e-300:
                    continue
                fd = (float(spec.eval(t + h)) - float(spec.eval(t - h))) / (2 * h)
            if abs(exact - fd) / max(abs(exact), 1e-12) > FD_REL_TOL:
                problems.append(f"derivative mismatch at t={t:g}: f'={exact:.6g}, finite difference {fd:.6g}")
            if spec.monotone == "increasing" and exact < 0:
                problems.append(f"flagged increasing but f'({t:g}) < 0")
            if spec.monotone == "decreasing" and exact > 0:
                problems.append(f"flagged decreasing but f'({t:g}) > 0")
    return problems
