"""Command-line front end: ``primesums {table,conditions,product-bound,verify}``.

Exit codes: 0 success, 1 a verification case failed, 2 usage/config
error, 3 hypothesis violation (or a condition verdict "fails"),
4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .catalog import IDS, builtin
from .conditions import (
    DEFAULT_GRID,
    FAILS,
    check_monotone_increasing,
    check_necessary,
    check_sufficient,
    default_prime_grid,
)
from .errors import (
    HypothesisViolation,
    InvalidParams,
    InvalidRange,
    MaxSubdivisionsExceeded,
    PrimeSumsError,
    RangeTooLarge,
    ResourceLimit,
    UnknownFunction,
)
from .estimators import ErrorModel, estimate_crude, estimate_pnt, estimate_rh, product_bound_log
from .quadrature import parts_identity
from .summation import abel_sum, exact_sum, log_product_primes

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_RESOURCE = 0, 1, 2, 3, 4

TABLE_COLUMNS = (
    "n", "exact", "main_crude", "bound_crude", "main_li", "bound_pnt", "bound_rh",
    "ratio_exact_over_li", "err_li", "err_over_bound_pnt", "err_over_bound_rh",
)
PRODUCT_COLUMNS = ("n", "theta", "bound_crude_log", "bound_rh_log", "slack")
DEFAULT_GRIDS = {
    "table": "1000:1000000:g10",
    "conditions": ",".join(str(n) for n in DEFAULT_GRID),
    "product-bound": "10:10000000:g10",
}


@dataclass
class RunConfig:
    command: str
    function: str = "one"
    params: dict = field(default_factory=dict)
    grid: tuple = ()
    c: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    epsilon: float = 0.05
    theta: float = 0.5
    rel_tol: float = 1e-9
    format: str = "csv"
    out: str | None = None
    jobs: int = 1

    def model(self, kind: str) -> ErrorModel:
        return ErrorModel(kind, self.c, self.c1, self.c2, self.epsilon, self.theta)

    def echo(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        d.pop("out")
        d.pop("jobs")
        return d


def _number(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"grid point {text!r} is not an integer")
    return int(value)


def parse_grid(text: str) -> tuple[int, ...]:
    """``a:b:gN`` (geometric, ratio N) or an explicit comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].startswith("g"):
            raise ValueError(f"grid {text!r} must look like a:b:gN")
        a, b, ratio = _number(parts[0]), _number(parts[1]), float(parts[2][1:])
        if ratio <= 1:
            raise ValueError("geometric ratio must exceed 1")
        grid, x = [], float(a)
        while x <= b * (1 + 1e-12):
            grid.append(int(round(x)))
            x *= ratio
    else:
        grid = [_number(t) for t in text.split(",") if t.strip()]
    if not grid:
        raise ValueError("empty grid")
    if any(q <= p for p, q in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    return tuple(grid)


def parse_params(items) -> dict:
    params = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--param expects key=value, got {item!r}")
        params[key.strip()] = float(value)
    return params


def fmt(x) -> str:
    if isinstance(x, (int, str)):
        return str(x)
    return format(float(x), ".12g")


def _round(x):
    return x if isinstance(x, (int, str)) else float(format(float(x), ".12g"))


def render(config: RunConfig, columns, rows, extra: dict | None = None) -> str:
    if config.format == "json":
        doc = {"config": config.echo(), "columns": list(columns),
               "rows": [[_round(v) for v in row] for row in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def _table_row(args):
    function, params, n, model_args, rel_tol = args
    spec = builtin(function, **params)
    crude = estimate_crude(spec, n, ErrorModel("crude", *model_args), rel_tol)
    pnt = estimate_pnt(spec, n, ErrorModel("pnt", *model_args), rel_tol)
    rh = estimate_rh(spec, n, ErrorModel("rh", *model_args), rel_tol)
    exact = exact_sum(spec, n).as_float()
    values = (exact, crude.main, crude.bound, pnt.main, pnt.bound, rh.bound)
    if not all(math.isfinite(v) for v in values):
        raise ResourceLimit(f"values for {spec.label} at n={n} exceed floating-point range")
    err = exact - pnt.main
    return (n, exact, crude.main, crude.bound, pnt.main, pnt.bound, rh.bound,
            exact / pnt.main, err, err / pnt.bound if pnt.bound else math.inf,
            err / rh.bound if rh.bound else math.inf)


def cmd_table(config: RunConfig):
    builtin(config.function, **config.params)
    model_args = (config.c, config.c1, config.c2, config.epsilon, config.theta)
    ErrorModel("pnt", *model_args)
    jobs = [(config.function, config.params, n, model_args, config.rel_tol) for n in config.grid]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            rows = list(pool.map(_table_row, jobs))
    else:
        rows = [_table_row(j) for j in jobs]
    return TABLE_COLUMNS, rows, None, EXIT_OK


def cmd_conditions(config: RunConfig):
    spec = builtin(config.function, **config.params)
    reports = [check_sufficient(spec, config.grid), check_necessary(spec, default_prime_grid(config.grid))]
    results = [(r.function, "sufficient" if i == 0 else "necessary", c)
               for i, r in enumerate(reports) for c in r.conditions]
    if spec.monotone == "increasing" and spec.growth != "bounded":
        results.append((spec.label, "increasing", check_monotone_increasing(spec)))
    rows = [(label, check, c.name, c.verdict, n, s)
            for label, check, c in results for n, s in c.evidence]
    failed = any(c.verdict == FAILS for _, _, c in results)
    extra = {
        "reports": [r.to_dict() for r in reports],
        "verdicts": [{"check": check, "condition": c.name, "verdict": c.verdict} for _, check, c in results],
    }
    columns = ("function", "check", "condition", "verdict", "n", "statistic")
    return columns, rows, extra, (EXIT_HYPOTHESIS if failed else EXIT_OK)


def cmd_product_bound(config: RunConfig):
    crude, rh = config.model("crude"), config.model("rh")
    rows = []
    for n in config.grid:
        theta = log_product_primes(n)
        bc, br = product_bound_log(n, crude), product_bound_log(n, rh)
        rows.append((n, theta, bc, br, min(bc, br) - theta))
    ok = all(r[-1] > 0 for r in rows)
    return PRODUCT_COLUMNS, rows, None, (EXIT_OK if ok else EXIT_HYPOTHESIS)


VERIFY_FUNCTIONS = (
    ("one", {}), ("log", {}), ("recip", {}), ("log_over_t", {}),
    ("power", {"m": 1.0}), ("power", {"m": 0.5}), ("power_log", {"m": 1.0, "k": 2.0}),
)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def cmd_verify(config: RunConfig):
    rows = []
    for fid, params in VERIFY_FUNCTIONS:
        spec = builtin(fid, **params)
        for n in (10, 100, 1000, 10**4):
            e, a = exact_sum(spec, n).value, abel_sum(spec, n).value
            d = _rel(e, a)
            rows.append(("abel", spec.label, n, e, a, d, "pass" if d <= 1e-9 else "FAIL"))
        for n in (10**3, 10**5):
            lhs, rhs = parts_identity(spec, n, config.rel_tol)
            d = abs(lhs - rhs) if spec.is_constant() else _rel(lhs, rhs)
            rows.append(("parts", spec.label, n, lhs, rhs, d, "pass" if d <= 1e-6 else "FAIL"))
    ok = all(r[-1] == "pass" for r in rows)
    return ("suite", "function", "n", "lhs", "rhs", "rel_diff", "status"), rows, None, (EXIT_OK if ok else EXIT_VERIFY)


COMMANDS = {
    "table": cmd_table,
    "conditions": cmd_conditions,
    "product-bound": cmd_product_bound,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primesums", description="Sums of functions over primes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--function", default="one", choices=IDS)
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--grid", default=None, help="a:b:gN or n1,n2,...")
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--c1", type=float, default=1.0)
        p.add_argument("--c2", type=float, default=1.0)
        p.add_argument("--epsilon", type=float, default=0.05)
        p.add_argument("--theta", type=float, default=0.5)
        p.add_argument("--rel-tol", type=float, default=1e-9)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None)
        p.add_argument("--jobs", type=int, default=1)
    return parser


def config_from_args(args) -> RunConfig:
    grid = parse_grid(args.grid or DEFAULT_GRIDS.get(args.command, "1000"))
    config = RunConfig(
        command=args.command, function=args.function, params=parse_params(args.param),
        grid=grid, c=args.c, c1=args.c1, c2=args.c2, epsilon=args.epsilon, theta=args.theta,
        rel_tol=args.rel_tol, format=args.format, out=args.out, jobs=args.jobs,
    )
    config.model("pnt")
    if config.jobs < 1:
        raise ValueError("--jobs must be at least 1")
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        columns, rows, extra, status = COMMANDS[config.command](config)
    except HypothesisViolation as exc:
        print(f"primesums: hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ResourceLimit, RangeTooLarge, MaxSubdivisionsExceeded, MemoryError) as exc:
        print(f"primesums: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, InvalidParams, InvalidRange, UnknownFunction, PrimeSumsError) as exc:
        print(f"primesums: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(config, columns, rows, extra)
    if config.out:
        with open(config.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
