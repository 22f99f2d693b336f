"""Market inputs and the derived variables the series is written in."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class MarketParams:
    """Spot, strike, rate (continuous), volatility (per sqrt year) and time to maturity (years)."""

    spot: float
    strike: float
    rate: float
    volatility: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("spot", "strike", "rate", "volatility", "tau"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.spot <= 0.0:
            raise DomainError(f"spot must be positive, got {self.spot}")
        if self.strike <= 0.0:
            raise DomainError(f"strike must be positive, got {self.strike}")
        if self.volatility < 0.0:
            raise DomainError(f"volatility must be non-negative, got {self.volatility}")
        if self.tau < 0.0:
            raise DomainError(f"tau must be non-negative, got {self.tau}")

    @property
    def total_vol(self) -> float:
        return self.volatility * math.sqrt(self.tau)

    @property
    def is_degenerate(self) -> bool:
        # sigma = 0 or tau = 0: the heat kernel collapses to a delta
        return self.total_vol == 0.0

    def replace(self, **changes: float) -> "MarketParams":
        fields = dict(spot=self.spot, strike=self.strike, rate=self.rate,
                      volatility=self.volatility, tau=self.tau)
        fields.update(changes)
        return MarketParams(**fields)


@dataclass(frozen=True)
class SeriesVariables:
    log_moneyness: float  # log(S/K) + r tau
    z: float              # sigma sqrt(tau)
    big_z: float          # z / sqrt(2)
    discount: float       # exp(-r tau)
    forward_gap: float    # big_z**2 - log_moneyness

    @property
    def is_atm_forward(self) -> bool:
        return self.log_moneyness == 0.0


def derive_variables(params: MarketParams) -> SeriesVariables:
    if not isinstance(params, MarketParams):
        raise TypeError("derive_variables expects MarketParams")
    log_moneyness = math.log(params.spot / params.strike) + params.rate * params.tau
    z = params.total_vol
    big_z = z / math.sqrt(2.0)
    return SeriesVariables(
        log_moneyness=log_moneyness,
        z=z,
        big_z=big_z,
        discount=math.exp(-params.rate * params.tau),
        forward_gap=big_z * big_z - log_moneyness,
    )


def atm_forward_spot(strike: float, rate: float, tau: float) -> float:
    """Spot at which S = K exp(-r tau), i.e. [log] = 0 up to rounding."""
    return strike * math.exp(-rate * tau)
