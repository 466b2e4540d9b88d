"""Integer-order Bessel J of the first kind via its ascending power series.

Everything downstream (field evaluation, trace series, constraint rows) is
built on J_m and its exact series coefficients, so this module is kept
dependency-free: float64 summation where it is accurate, stdlib Decimal
where cancellation would eat the 1e-12 budget, exact Fractions for the
coefficient table used by the constraint assembler.
"""

from __future__ import annotations

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np

T_MAX = 50.0

# Below this argument the float64 ascending series keeps ~1e-14 accuracy;
# above it the alternating terms grow large enough that cancellation matters
# and we switch to Decimal with guard digits.
_FLOAT_T_MAX = 8.0

_COEFF_RANGE = 40   # m + k cap for exact series coefficients
_DECIMAL_PREC = 50

__all__ = [
    "T_MAX",
    "DomainError",
    "bessel_j",
    "bessel_j_orders",
    "bessel_series_coefficient",
    "gamma_int",
]


class DomainError(ValueError):
    """Argument outside the documented evaluation domain."""


def bessel_series_coefficient(m: int, k: int) -> Fraction:
    """Exact coefficient of t^(m+2k) in the ascending series of J_m(t).

    The series is J_m(t) = sum_k (-1)^k (t/2)^(m+2k) / (k! (m+k)!), so the
    coefficient is (-1)^k / (2^(m+2k) k! (m+k)!).
    """
    if m < 0 or k < 0:
        raise DomainError(f"need m >= 0 and k >= 0, got m={m}, k={k}")
    if m + k > _COEFF_RANGE:
        raise OverflowError(
            f"series coefficient out of documented range: m+k={m + k} > {_COEFF_RANGE}"
        )
    sign = -1 if k % 2 else 1
    return Fraction(sign, (1 << (m + 2 * k)) * math.factorial(k) * math.factorial(m + k))


def gamma_int(n: int) -> float:
    """Gamma(n) = (n-1)! for integer n >= 1."""
    if n < 1:
        raise DomainError(f"gamma_int needs n >= 1, got {n}")
    if n > 170:
        raise OverflowError(f"gamma_int overflows float64 for n={n} > 170")
    return float(math.factorial(n - 1))


def _series_float(m: int, t: float) -> float:
    # plain alternating series; safe for t <= _FLOAT_T_MAX
    x = 0.5 * t
    term = x**m / math.factorial(m)
    total = term
    k = 0
    while True:
        k += 1
        term *= -(x * x) / (k * (m + k))
        total += term
        if abs(term) < 1e-18 * (abs(total) + 1e-300) and k > m // 2 + 2:
            return total


def _series_decimal(m: int, t: float) -> float:
    getcontext().prec = _DECIMAL_PREC
    x = Decimal(t) / 2
    term = x**m / Decimal(math.factorial(m))
    total = term
    x2 = x * x
    k = 0
    tiny = Decimal(10) ** (-(_DECIMAL_PREC - 5))
    while True:
        k += 1
        term *= -x2 / (k * (m + k))
        total += term
        if abs(term) < tiny * (abs(total) + tiny):
            return float(total)


def bessel_j(m: int, t: float) -> float:
    """J_m(t) for integer m (negative allowed) and 0 <= t <= T_MAX.

    Negative orders use J_{-m}(t) = (-1)^m J_m(t).  Accuracy is at least
    1e-12 absolute on the documented domain.
    """
    if t < 0.0 or t > T_MAX:
        raise DomainError(f"bessel_j argument t={t} outside [0, {T_MAX}]")
    sign = 1
    if m < 0:
        m = -m
        if m % 2:
            sign = -1
    if t <= _FLOAT_T_MAX:
        return sign * _series_float(m, t)
    return sign * _series_decimal(m, t)


def bessel_j_orders(t, n_max: int) -> np.ndarray:
    """J_0(t) .. J_{n_max}(t) for array t, stacked on a leading axis.

    Fast float64 path used by the field/trace evaluators, whose arguments
    stay well below _FLOAT_T_MAX in every scenario of this artifact.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > _FLOAT_T_MAX):
        raise DomainError(
            f"vectorized Bessel path needs 0 <= t <= {_FLOAT_T_MAX}; "
            "use bessel_j for larger arguments"
        )
    x = 0.5 * t
    # terms k = 0..K-1 for every order at once; K chosen so the first
    # omitted term is below 1e-18 for t <= _FLOAT_T_MAX
    K = 26
    out = np.empty((n_max + 1,) + t.shape)
    x2 = x * x
    for n in range(n_max + 1):
        term = x**n / math.factorial(n)
        total = term.copy()
        for k in range(1, K):
            term = term * (-x2) / (k * (n + k))
            total += term
        out[n] = total
    return out
