"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from oracles import naive_sieve
from primesums.catalog import builtin
from primesums.conditions import FAILS, HOLDS, b_sum, check_necessary, check_sufficient, necessary_ratios
from primesums.estimators import ErrorModel, closed_main, estimate_pnt, estimate_rh, product_bound_log
from primesums.quadrature import integrate, li_main, parts_identity
from primesums.sieve import PrimeEngine, prime_count
from primesums.summation import abel_sum, exact_sum, log_product_primes

# fixed-step Simpson, 10^7 points, of integral_2^1000 dt/log t
J1_1000 = 176.56449421003472


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}  {detail}".rstrip())
        assert ok, f"criterion {number}: {title} {detail}"

    return emit


def test_c01_exact_prime_count(report):
    engine = PrimeEngine()
    start = time.perf_counter()
    count = engine.prime_count(10**6)
    elapsed = time.perf_counter() - start
    got = np.zeros(10**6 + 1, dtype=np.uint8)
    for arr in PrimeEngine(segment_odds=1 << 14).iter_prime_arrays(10**6):
        got[arr] = 1
    same = got.tobytes() == bytes(naive_sieve(10**6))
    report(1, "pi(1e6) = 78498, bitwise equal to naive sieve, < 1 s",
           count == 78498 and same and elapsed < 1.0, f"count={count} identical={same} t={elapsed:.3f}s")


def test_c02_abel_identity(report):
    engine = PrimeEngine()
    families = [("one", {}), ("log", {}), ("recip", {}), ("log_over_t", {}), ("power", {"m": 1}), ("power", {"m": 0.5})]
    start = time.perf_counter()
    worst = 0.0
    for fid, params in families:
        f = builtin(fid, **params)
        e, a = exact_sum(f, 10**4, engine).value, abel_sum(f, 10**4, engine).value
        worst = max(worst, abs(a - e) / abs(e))
    elapsed = time.perf_counter() - start
    report(2, "Abel sum equals exact sum at 1e4 to 1e-9, < 1 s",
           worst <= 1e-9 and elapsed < 1.0, f"max_rel={worst:.2e} t={elapsed:.3f}s")


def test_c03_theta_over_n(report):
    dev = {k: abs(log_product_primes(10**k) / 10**k - 1) for k in (5, 7)}
    report(3, "|theta(n)/n - 1| <= 0.01 at 1e7 and smaller than at 1e5",
           dev[7] <= 0.01 and dev[7] < dev[5], f"dev(1e5)={dev[5]:.5f} dev(1e7)={dev[7]:.5f}")


def test_c04_reciprocal_sum(report):
    d = {k: exact_sum(builtin("recip"), 10**k).value - math.log(math.log(10**k)) for k in (5, 7)}
    report(4, "d(n) = sum 1/p - log log n stabilises",
           abs(d[7] - d[5]) <= 0.02 and abs(d[7]) <= 1, f"d(1e5)={d[5]:.6f} d(1e7)={d[7]:.6f}")


def test_c05_power_sum(report):
    engine = PrimeEngine()
    start = time.perf_counter()
    ratio = {}
    for k in (6, 7):
        n = 10**k
        ratio[k] = exact_sum(builtin("power", m=1), n, engine).value / (n * n / (2 * math.log(n)))
    elapsed = time.perf_counter() - start
    ok = 1.0 <= ratio[6] <= 1.1 and abs(ratio[7] - 1) < abs(ratio[6] - 1) and elapsed < 60
    report(5, "sum p / (n^2/(2 log n)) in [1, 1.1] at 1e6, closer to 1 at 1e7, < 60 s",
           ok, f"r(1e6)={ratio[6]:.5f} r(1e7)={ratio[7]:.5f} t={elapsed:.2f}s")


def test_c06_quadrature(report):
    li = integrate(lambda t: 1 / np.log(t), 2, 1000).value
    rel_li = abs(li - J1_1000) / J1_1000
    worst = 0.0
    families = [("one", {}), ("log", {}), ("recip", {}), ("log_over_t", {}), ("power", {"m": 1}),
                ("power", {"m": 0.5}), ("power", {"m": -0.5}), ("power_log", {"m": 1, "k": 2})]
    n = 10**5
    for fid, params in families:
        f = builtin(fid, **params)
        lhs, rhs = parts_identity(f, n)
        # f = 1 makes both sides zero; scale by the boundary term f(n) J1(n) instead
        scale = max(abs(lhs), abs(rhs)) if not f.is_constant() else li_main(f, n).value
        worst = max(worst, abs(lhs - rhs) / scale)
    report(6, "J1(1000) to 1e-8 of oracle; parts identity to 1e-6 at 1e5",
           rel_li <= 1e-8 and worst <= 1e-6, f"li_rel={rel_li:.1e} parts_max_rel={worst:.1e}")


def test_c07_closed_vs_li(report):
    worst = -math.inf
    for m in (0, 1, 2):
        for n in (10**4, 10**6):
            f = builtin("power", m=m)
            gap = abs(closed_main(f, n) / li_main(f, n).value - 1)
            worst = max(worst, gap * math.log(n) / 3)
    report(7, "|closed/li - 1| <= 3/log n for power m = 0, 1, 2",
           worst <= 1, f"max gap as fraction of 3/log n = {worst:.3f}")


def test_c08_model_decay(report):
    one = builtin("one")
    ratios = [estimate_rh(one, 10.0**k).bound / estimate_pnt(one, 10.0**k, ErrorModel("pnt", c=1)).bound
              for k in (6, 8, 10, 12)]
    report(8, "bound_rh/bound_pnt decreasing over 1e6..1e12",
           all(b < a for a, b in zip(ratios, ratios[1:])), " ".join(f"{r:.4g}" for r in ratios))


def test_c09_product_bounds(report):
    crude, rh = ErrorModel("crude", c1=1), ErrorModel("rh", c2=1, epsilon=0.05)
    slack = []
    for k in range(1, 8):
        n = 10**k
        theta = log_product_primes(n)
        slack.append(min(product_bound_log(n, crude), product_bound_log(n, rh)) - theta)
    report(9, "theta(n) below both product bounds for n = 10..1e7",
           all(s > 0 for s in slack), f"min slack={min(slack):.4g}")


def test_c10_conditions(report):
    no_fails = {}
    for fid, params in [("recip", {}), ("log", {}), ("power", {"m": 1}), ("log_over_t", {})]:
        rep = check_sufficient(builtin(fid, **params))
        no_fails[rep.function] = FAILS not in rep.verdicts.values()
    exp2 = check_necessary(builtin("exp2"))
    r11, r997 = necessary_ratios(builtin("exp2"), [11, 997])
    recip = check_necessary(builtin("recip"))
    ok = all(no_fails.values()) and exp2.overall == FAILS and r997 > r11 and recip.overall == HOLDS
    report(10, "sufficient: no fails; necessary: exp2 fails, recip holds", ok,
           f"exp2 log r(11)={r11:.4f} log r(997)={r997:.4f} recip={recip.overall}")


def test_c11_b_over_pi(report):
    ratio = {k: b_sum(10**k).value / prime_count(10**k) for k in (5, 6, 7)}
    ok = 0.99 <= ratio[6] <= 1.03 and abs(ratio[7] - 1) < abs(ratio[5] - 1)
    report(11, "B(n)/pi(n) in [0.99, 1.03] at 1e6, closer to 1 at 1e7 than at 1e5",
           ok, " ".join(f"{k}:{r:.5f}" for k, r in ratio.items()))


def test_c12_determinism(report, tmp_path):
    cmd = [sys.executable, "-m", "primesums", "table", "--function", "recip", "--grid", "1000:1000000:g10"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    report(12, "two table runs are byte-identical", outs[0] == outs[1] and len(outs[0]) > 0,
           f"{len(outs[0])} bytes")
