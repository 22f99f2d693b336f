"""Double-series evaluation of the European call.

    V = (K e^{-r tau} / 2) * sum_{n>=0, m>=1} (-1)^n / (n! Gamma(1 + (m-n)/2))
                              * (Z^2 - [log])^n * Z^(m-n)

with Z = sigma sqrt(tau) / sqrt(2) and [log] = log(S/K) + r tau.

Terms are summed column by column (over n for fixed m), and the column sums
are then accumulated over m.  This is the order in which the partial prices
of the printed term tables are read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import ConfigError, DegenerateError, NotAtmForwardError
from .market import MarketParams, SeriesVariables, derive_variables
from .special import MAX_FACTORIAL_ARG, HalfInteger, factorial, recip_gamma_half_integer

ATM_GATE = 1e-12


@dataclass(frozen=True)
class SeriesConfig:
    max_n: int = 20
    max_m: int = 20
    tolerance: Optional[float] = None

    def __post_init__(self) -> None:
        if int(self.max_n) != self.max_n or not 0 <= self.max_n <= MAX_FACTORIAL_ARG:
            raise ConfigError(f"max_n must be an integer in [0, {MAX_FACTORIAL_ARG}], got {self.max_n}")
        if int(self.max_m) != self.max_m or self.max_m < 1:
            raise ConfigError(f"max_m must be an integer >= 1, got {self.max_m}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive when given, got {self.tolerance}")


@dataclass(frozen=True)
class TermGrid:
    """terms[n, m-1] is the (n, m) term, prefactor included; columns are indexed by m = 1..max_m."""

    terms: np.ndarray
    column_sums: np.ndarray
    cumulative_price: np.ndarray
    max_n: int
    max_m: int
    max_abs_term: float

    def term(self, n: int, m: int) -> float:
        return float(self.terms[n, m - 1])

    def column_sum(self, m: int) -> float:
        return float(self.column_sums[m - 1])

    def cumulative(self, m: int) -> float:
        return float(self.cumulative_price[m - 1])

    @property
    def price(self) -> float:
        return float(self.cumulative_price[-1])


def is_pole(n: int, m: int) -> bool:
    """True when 1 + (m-n)/2 is a non-positive integer, i.e. m - n in {-2, -4, ...}."""
    return HalfInteger(2 + m - n).is_pole


@lru_cache(maxsize=64)
def _coefficients(max_n: int, max_m: int) -> np.ndarray:
    coef = np.empty((max_n + 1, max_m))
    for n in range(max_n + 1):
        sign = -1.0 if n % 2 else 1.0
        inv_fact = 1.0 / factorial(n)
        for m in range(1, max_m + 1):
            coef[n, m - 1] = sign * recip_gamma_half_integer(HalfInteger(2 + m - n)) * inv_fact
    coef.setflags(write=False)
    return coef


@lru_cache(maxsize=64)
def _exponents(max_n: int, max_m: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(max_n + 1, dtype=float)[:, None]
    m = np.arange(1, max_m + 1, dtype=float)[None, :]
    return n, m - n


def series_term(vars: SeriesVariables, strike_discount: float, n: int, m: int) -> float:
    if n < 0 or m < 1:
        raise ValueError(f"need n >= 0 and m >= 1, got (n, m) = ({n}, {m})")
    if vars.big_z == 0.0 and m < n:
        raise DegenerateError("negative power of Z = 0")
    if is_pole(n, m):
        return 0.0
    sign = -1.0 if n % 2 else 1.0
    coef = sign * recip_gamma_half_integer(HalfInteger(2 + m - n)) / factorial(n)
    return 0.5 * strike_discount * coef * vars.forward_gap ** n * vars.big_z ** (m - n)


def _term_matrix(scale: float, coef: np.ndarray, base: float, base_exp: np.ndarray,
                 big_z: float, z_exp: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        raw = (0.5 * scale) * coef * np.power(base, base_exp) * np.power(big_z, z_exp)
    # Gamma poles: keep exact zeros even when Z^(m-n) overflows
    return np.where(coef == 0.0, 0.0, raw)


def _accumulate(terms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    column_sums = terms.sum(axis=0)
    return column_sums, np.cumsum(column_sums)


def _effective_columns(column_sums: np.ndarray, tolerance: Optional[float]) -> int:
    if tolerance is None:
        return len(column_sums)
    small = np.abs(column_sums) < tolerance
    for idx in range(1, len(column_sums)):
        if small[idx] and small[idx - 1]:
            return idx + 1
    return len(column_sums)


def _grid(terms: np.ndarray, cfg: SeriesConfig) -> TermGrid:
    column_sums, cumulative = _accumulate(terms)
    width = _effective_columns(column_sums, cfg.tolerance)
    if width < terms.shape[1]:
        terms = terms[:, :width]
        column_sums, cumulative = _accumulate(terms)
    return TermGrid(
        terms=terms,
        column_sums=column_sums,
        cumulative_price=cumulative,
        max_n=cfg.max_n,
        max_m=width,
        max_abs_term=float(np.max(np.abs(terms))),
    )


def _general_terms(params: MarketParams, cfg: SeriesConfig) -> np.ndarray:
    if params.is_degenerate:
        raise DegenerateError("the series needs sigma*sqrt(tau) > 0")
    v = derive_variables(params)
    n_exp, z_exp = _exponents(cfg.max_n, cfg.max_m)
    return _term_matrix(params.strike * v.discount, _coefficients(cfg.max_n, cfg.max_m),
                        v.forward_gap, n_exp, v.big_z, z_exp)


def build_term_grid(params: MarketParams, cfg: SeriesConfig | None = None) -> TermGrid:
    cfg = cfg or SeriesConfig()
    return _grid(_general_terms(params, cfg), cfg)


def price_series(params: MarketParams, cfg: SeriesConfig | None = None) -> float:
    cfg = cfg or SeriesConfig()
    terms = _general_terms(params, cfg)
    if cfg.tolerance is not None:
        return _grid(terms, cfg).price
    return float(_accumulate(terms)[1][-1])


def atm_term_grid(params: MarketParams, cfg: SeriesConfig | None = None) -> TermGrid:
    """Term grid of the [log] = 0 specialisation: (S/2) sum (-1)^n Z^(n+m) / (n! Gamma(1+(m-n)/2))."""
    cfg = cfg or SeriesConfig()
    if params.is_degenerate:
        raise DegenerateError("the series needs sigma*sqrt(tau) > 0")
    v = derive_variables(params)
    if abs(v.log_moneyness) > ATM_GATE:
        raise NotAtmForwardError(
            f"|[log]| = {abs(v.log_moneyness):.3e} exceeds the ATM-forward gate {ATM_GATE:g}")
    n_exp, z_exp = _exponents(cfg.max_n, cfg.max_m)
    terms = _term_matrix(params.spot, _coefficients(cfg.max_n, cfg.max_m),
                         1.0, np.zeros_like(n_exp), v.big_z, z_exp + 2.0 * n_exp)
    return _grid(terms, cfg)


def price_atm_series(params: MarketParams, cfg: SeriesConfig | None = None) -> float:
    return atm_term_grid(params, cfg).price


def leading_atm_term(params: MarketParams) -> float:
    """The (n, m) = (0, 1) term at [log] = 0, equal to S sigma sqrt(tau) / sqrt(2 pi)."""
    return params.spot * params.total_vol / math.sqrt(2.0 * math.pi)
