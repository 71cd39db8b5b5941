"""Exact and asymptotic sums of functions over primes."""

__version__ = "0.1.0"

from .catalog import FunctionSpec, builtin, validate
from .conditions import b_sum, check_monotone_increasing, check_necessary, check_sufficient
from .estimators import (
    ErrorModel,
    closed_main,
    consistency_transform,
    estimate_crude,
    estimate_pnt,
    estimate_rh,
    product_bound_log,
)
from .quadrature import integrate, li_main, remainder_integral
from .sieve import PrimeEngine, prime_count, sieve_range, stream_primes
from .summation import abel_sum, exact_sum, log_product_primes

__all__ = [
    "ErrorModel", "FunctionSpec", "PrimeEngine", "abel_sum", "b_sum", "builtin",
    "check_monotone_increasing", "check_necessary", "check_sufficient", "closed_main",
    "consistency_transform", "estimate_crude", "estimate_pnt", "estimate_rh", "exact_sum",
    "integrate", "li_main", "log_product_primes", "prime_count", "product_bound_log",
    "remainder_integral", "sieve_range", "stream_primes", "validate",
]
