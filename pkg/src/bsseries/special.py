"""Special functions used by the pricers.

Reciprocal Gamma at half-integers is exact up to two roundings (integer
double factorials, then one division by sqrt(pi)).  Complex Gamma is a
Lanczos approximation with reflection, evaluated in log space so that the
Mellin-Barnes integrands far up the imaginary axis neither overflow nor
underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PoleError

SQRT_PI = math.sqrt(math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos g = 7, n = 9 (Godfrey's coefficient set, as tabulated in Numerical
# Recipes 3rd ed. / Wikipedia "Lanczos approximation"); ~1e-15 relative for Re(s) >= 1/2.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

MAX_FACTORIAL_ARG = 170


@dataclass(frozen=True)
class HalfInteger:
    """An exact multiple of 1/2, stored as twice its value."""

    twice_value: int

    def __post_init__(self) -> None:
        if isinstance(self.twice_value, bool) or int(self.twice_value) != self.twice_value:
            raise TypeError("twice_value must be an integer")
        object.__setattr__(self, "twice_value", int(self.twice_value))

    @classmethod
    def from_value(cls, value: float) -> "HalfInteger":
        twice = 2 * value
        if twice != int(twice):
            raise ValueError(f"{value!r} is not a multiple of 1/2")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.twice_value / 2

    @property
    def is_pole(self) -> bool:
        return self.twice_value <= 0 and self.twice_value % 2 == 0


def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@lru_cache(maxsize=4096)
def _recip_gamma_twice(k: int) -> float:
    if k % 2 == 0:
        a = k // 2
        if a <= 0:
            return 0.0
        return 1 / math.factorial(a - 1)
    if k > 0:
        # Gamma(k/2) = sqrt(pi) (k-2)!! / 2^((k-1)/2)
        return (1 << ((k - 1) // 2)) / _double_factorial(k - 2) / SQRT_PI
    # k/2 = 1/2 - j:  1/Gamma = (-1)^j (2j-1)!! / (2^j sqrt(pi))
    j = (1 - k) // 2
    sign = -1.0 if j % 2 else 1.0
    return sign * (_double_factorial(2 * j - 1) / (1 << j)) / SQRT_PI


def recip_gamma_half_integer(a: HalfInteger) -> float:
    """1/Gamma(a) for a in Z/2; exactly 0.0 at the poles a = 0, -1, -2, ..."""
    if not isinstance(a, HalfInteger):
        a = HalfInteger.from_value(a)
    return _recip_gamma_twice(a.twice_value)


def factorial(n: int) -> float:
    if int(n) != n or n < 0:
        raise ValueError(f"factorial needs a non-negative integer, got {n!r}")
    if n > MAX_FACTORIAL_ARG:
        raise OverflowError(f"{n}! overflows binary64")
    return float(math.factorial(int(n)))


def normal_cdf(x: float) -> float:
    # erfc keeps full relative accuracy in the left tail
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _lanczos_log_gamma(s: np.ndarray) -> np.ndarray:
    # valid for Re(s) >= 1/2
    s = s - 1.0
    acc = np.full_like(s, _LANCZOS_COEF[0])
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc = acc + c / (s + i)
    t = s + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (s + 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi(s: np.ndarray) -> np.ndarray:
    """log(sin(pi s)) modulo 2 pi i, without overflow for large |Im s|."""
    k = np.round(s.real)
    r = s - k  # exact shift; |Re r| <= 1/2
    upper = r.imag >= 0
    # sin(pi r) = e^{-i pi r} (e^{2 i pi r} - 1) / (2i)     for Im r >= 0
    #           = e^{ i pi r} (1 - e^{-2 i pi r}) / (2i)    for Im r <  0
    w = np.where(upper, r, -r)
    core = -1j * np.pi * w + np.log(np.expm1(2j * np.pi * w))
    core = np.where(upper, core, core + 1j * np.pi)
    return core - np.log(2j) + 1j * np.pi * k


def complex_log_gamma(s):
    """log Gamma(s) for complex s (array or scalar), determined modulo 2 pi i.

    Raises PoleError if any entry is a non-positive integer.
    """
    arr = np.asarray(s, dtype=complex)
    poles = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    if np.any(poles):
        raise PoleError("Gamma has a pole at non-positive integers")
    left = arr.real < 0.5
    right_arg = np.where(left, 1.0 - arr, arr)
    out = _lanczos_log_gamma(right_arg)
    if np.any(left):
        reflected = math.log(math.pi) - _log_sin_pi(arr) - out
        out = np.where(left, reflected, out)
    if np.ndim(s) == 0:
        return complex(out)
    return out


def complex_gamma(s: complex) -> complex:
    s = complex(s)
    return complex(np.exp(complex_log_gamma(s)))


def real_gamma(x: float) -> float:
    """Gamma on the real line through the complex kernel."""
    return complex_gamma(complex(x, 0.0)).real
