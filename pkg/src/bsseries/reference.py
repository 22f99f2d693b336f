"""Independent call-price references: closed form, Green-function quadrature, Brenner-Subrahmanyam."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigError, DegenerateError
from .market import MarketParams, derive_variables
from .special import normal_cdf

BRENNER_COEFFICIENT = 0.4


@dataclass(frozen=True)
class DPlusMinus:
    d_plus: float
    d_minus: float


@dataclass(frozen=True)
class QuadratureConfig:
    """Truncation half-width in units of sigma*sqrt(tau) and the node count of the composite rule."""

    half_width: float = 12.0
    node_count: int = 2001

    def __post_init__(self) -> None:
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise ConfigError(f"half_width must be positive, got {self.half_width}")
        if int(self.node_count) != self.node_count or self.node_count < 3 or self.node_count % 2 == 0:
            raise ConfigError(f"node_count must be an odd integer >= 3, got {self.node_count}")


def d_plus_minus(params: MarketParams) -> DPlusMinus:
    if params.is_degenerate:
        raise DegenerateError("d+/d- are undefined for sigma*sqrt(tau) == 0")
    v = derive_variables(params)
    d_plus = v.log_moneyness / v.z + 0.5 * v.z
    return DPlusMinus(d_plus=d_plus, d_minus=d_plus - v.z)


def closed_form_call(params: MarketParams) -> float:
    """Black-Scholes call; the discounted intrinsic value when sigma*sqrt(tau) == 0."""
    strike_pv = params.strike * math.exp(-params.rate * params.tau)
    if params.is_degenerate:
        return max(params.spot - strike_pv, 0.0)
    d = d_plus_minus(params)
    return params.spot * normal_cdf(d.d_plus) - strike_pv * normal_cdf(d.d_minus)


def _composite(f: np.ndarray, y: np.ndarray) -> float:
    fine = simpson(f, x=y)
    if (len(y) - 1) % 4:
        return float(fine)
    # one Richardson step on the same nodes cancels the h^4 endpoint term at the kink
    coarse = simpson(f[::2], x=y[::2])
    return float(fine + (fine - coarse) / 15.0)


def green_quadrature_call(params: MarketParams, cfg: QuadratureConfig | None = None) -> float:
    """Call price as payoff x heat kernel, integrated over the Green variable y.

    The payoff is zero left of y* = z^2/2 - [log], so only [max(y*, -W), W]
    is integrated and the kink is always the first node.
    """
    cfg = cfg or QuadratureConfig()
    if params.is_degenerate:
        raise DegenerateError("the Green kernel is a delta function when sigma*sqrt(tau) == 0")
    v = derive_variables(params)
    z = v.z
    width = cfg.half_width * z
    kink = 0.5 * z * z - v.log_moneyness
    lo = max(kink, -width)
    if lo >= width:
        return 0.0
    y = np.linspace(lo, width, int(cfg.node_count))
    drift = (params.rate - 0.5 * params.volatility ** 2) * params.tau
    payoff = np.maximum(params.spot * np.exp(drift + y) - params.strike, 0.0)
    kernel = np.exp(-0.5 * (y / z) ** 2) / (z * math.sqrt(2.0 * math.pi))
    return v.discount * _composite(payoff * kernel, y)


def brenner_approx(params: MarketParams) -> float:
    """0.4 * S * sigma * sqrt(tau), with the rounded coefficient 0.4 rather than 1/sqrt(2 pi)."""
    return BRENNER_COEFFICIENT * params.spot * params.total_vol
