"""Numerical Mellin-Barnes checks: the Cahen-Mellin integral and the 2-D call-price integral.

The 2-D integrand, in t = (t1, t2) on c + iR^2, is

    x2^{-t2} 2^{1/2 - t1} Gamma(t2) Gamma(1-t2) Gamma(-2 + 2 t1 + t2) / Gamma(t1 + 1/2)
        * X^{2 - 2 t1 - t2} z^{2 t1 - 1},        X = z^2/2 - [log] > 0,

times K e^{-r tau} / (2 i pi)^2.  The call price corresponds to x2 = -1 =
e^{i pi}.  For a base x2 = rho e^{i theta} the integrand decays along every
direction of R^2 only while |theta| < 3 pi / 4 (the direction (y1, y2) ~
(1, -2) is the binding one), so at theta = pi the truncated trapezoid sum
grows without bound as the truncation height increases.

The residue sum over the compatible cone at a general base is the series
with column m weighted by q^{m-1}, q = rho e^{i (theta - pi)}.  That is an
entire function of q, so the call price (q = 1) is recovered by fitting a
polynomial in q to contour values taken at admissible phases and evaluating
it at q = 1.  Every input to the fit is a convergent contour integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ContourError, DegenerateError, DomainError
from .market import MarketParams, derive_variables
from .series import SeriesConfig, build_term_grid
from .special import complex_log_gamma

# phases |theta| < 3 pi / 4 give an absolutely convergent integral
ADMISSIBLE_PHASE = 0.75 * math.pi

CONTINUATION_MAX_PHASE = 0.6 * math.pi
CONTINUATION_RADIUS = 2.0
CONTINUATION_DEGREE = 24
CONTINUATION_SAMPLES = 201

# linear parts of the Gamma arguments in the call-price 2-form
OMEGA_NUMERATOR = ((0, 1), (0, -1), (2, 1))
OMEGA_DENOMINATOR = ((1, 0),)

_ROW_CHUNK = 512


@dataclass(frozen=True)
class ContourSpec:
    """Abscissas of the vertical lines plus truncation height and step along Im."""

    c1: float = 1.2
    c2: float = 0.5
    height: float = 60.0
    step: float = 0.05

    def __post_init__(self) -> None:
        for name in ("c1", "c2", "height", "step"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.height <= 0:
            raise ConfigError(f"height must be positive, got {self.height}")
        if self.step <= 0 or self.step > self.height:
            raise ConfigError(f"step must be in (0, height], got {self.step}")

    def in_polyhedron(self) -> bool:
        return 2 * self.c1 + self.c2 > 2 and 0 < self.c2 < 1

    def check_2d(self) -> None:
        if not self.in_polyhedron():
            raise ContourError(
                f"contour outside convergence polyhedron: (c1, c2) = ({self.c1}, {self.c2}) "
                "needs 2*c1 + c2 > 2 and 0 < c2 < 1")

    def check_1d(self) -> None:
        if self.c1 <= 0:
            raise ContourError(f"contour outside convergence strip: c1 = {self.c1} must be > 0")

    def ordinates(self) -> np.ndarray:
        half = int(round(self.height / self.step))
        return self.step * np.arange(-half, half + 1)


def cahen_mellin_inverse(x: float, spec: ContourSpec | None = None) -> float:
    """e^{-x} as the inverse Mellin transform of Gamma along Re(s) = spec.c1."""
    spec = spec or ContourSpec()
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    spec.check_1d()
    s = spec.c1 + 1j * spec.ordinates()
    values = np.exp(complex_log_gamma(s) - s * math.log(x))
    return float(np.sum(values).real * spec.step / (2 * math.pi))


def residue_series_exponential(x: float, terms: int) -> float:
    """Sum of the residues of Gamma(s) x^{-s} at s = 0, -1, ..., -(terms-1)."""
    acc = []
    term = 1.0
    for n in range(terms):
        if n:
            term *= -x / n
        acc.append(term)
    return math.fsum(acc)


def characteristic_vector(numerator: Sequence[Sequence[int]] = OMEGA_NUMERATOR,
                          denominator: Sequence[Sequence[int]] = OMEGA_DENOMINATOR) -> tuple[int, ...]:
    """Sum of numerator Gamma-argument coefficient vectors minus the denominator ones."""
    vectors = list(numerator) + list(denominator)
    if not vectors:
        raise ValueError("need at least one Gamma factor")
    dim = len(vectors[0])
    if any(len(v) != dim for v in vectors):
        raise ValueError("coefficient vectors must share a dimension")
    out = [0] * dim
    for v in numerator:
        out = [a + b for a, b in zip(out, v)]
    for v in denominator:
        out = [a - b for a, b in zip(out, v)]
    return tuple(out)


class MellinBarnes2D:
    """Tensor-product trapezoid for the 2-D Mellin-Barnes call-price integral.

    The t1 line is summed once at construction.  Only the t2-dependent base
    factor x2^{-t2} changes between evaluations, so many bases are cheap.
    """

    def __init__(self, params: MarketParams, spec: ContourSpec | None = None):
        spec = spec or ContourSpec()
        spec.check_2d()
        if params.is_degenerate:
            raise DegenerateError("the contour integral needs sigma*sqrt(tau) > 0")
        v = derive_variables(params)
        gap = 0.5 * v.z * v.z - v.log_moneyness
        if not gap > 0:
            raise DomainError(
                f"z^2/2 - [log] = {gap:.6g} <= 0: the power base is not positive real")
        self.params = params
        self.spec = spec
        self.prefactor = params.strike * v.discount

        h = spec.step
        y = spec.ordinates()
        count = len(y)
        half = count // 2
        t1 = spec.c1 + 1j * y
        self.t2 = spec.c2 + 1j * y
        log_x, log_z = math.log(gap), math.log(v.z)

        # Gamma(-2 + 2 t1 + t2): Im part is h * (2i + j - 3*half) on the lattice
        lattice = np.arange(3 * (count - 1) + 1) - 3 * half
        log_mixed = complex_log_gamma(-2 + 2 * spec.c1 + spec.c2 + 1j * h * lattice)
        log_row = (-complex_log_gamma(t1 + 0.5) + (0.5 - t1) * math.log(2.0)
                   + (2 - 2 * t1) * log_x + (2 * t1 - 1) * log_z)

        inner = np.zeros(count, dtype=complex)
        cols = np.arange(count)
        for lo in range(0, count, _ROW_CHUNK):
            rows = np.arange(lo, min(lo + _ROW_CHUNK, count))
            idx = 2 * rows[:, None] + cols[None, :]
            inner += np.exp(log_row[rows, None] + log_mixed[idx]).sum(axis=0)
        inner *= h / (2 * math.pi)

        log_outer = complex_log_gamma(self.t2) + complex_log_gamma(1 - self.t2) - self.t2 * log_x
        self.weights = np.exp(log_outer) * inner * h / (2 * math.pi)

    def integral(self, phase: float = math.pi, modulus: float = 1.0) -> complex:
        """Truncated integral with x2 = modulus * e^{i phase}; phase = pi is the call-price form."""
        if not modulus > 0:
            raise DomainError("modulus must be positive")
        log_base = math.log(modulus) + 1j * phase
        return complex(self.prefactor * np.sum(self.weights * np.exp(-self.t2 * log_base)))

    def continuation_fit(self, degree: int = CONTINUATION_DEGREE,
                         radius: float = CONTINUATION_RADIUS,
                         max_phase: float = CONTINUATION_MAX_PHASE,
                         samples: int = CONTINUATION_SAMPLES) -> np.ndarray:
        """Coefficients a_k of P(q) = sum a_k q^k fitted to contour values at admissible bases.

        a_k estimates the (k+1)-th column sum of the series.
        """
        if not 0 < max_phase < ADMISSIBLE_PHASE:
            raise ConfigError(f"max_phase must lie in (0, 3 pi / 4), got {max_phase}")
        if samples <= degree:
            raise ConfigError("need more samples than polynomial degree")
        phases = np.linspace(-max_phase, max_phase, samples)
        values = np.array([self.integral(th, radius) for th in phases])
        unit = np.exp(1j * (phases - math.pi))
        vander = np.vander(unit, degree + 1, increasing=True)
        scaled, *_ = np.linalg.lstsq(vander, values, rcond=None)
        return scaled / radius ** np.arange(degree + 1)

    def continued_price(self, **fit_options) -> complex:
        return complex(np.sum(self.continuation_fit(**fit_options)))


def contour_integral_2d(params: MarketParams, spec: ContourSpec | None = None,
                        phase: float = math.pi, modulus: float = 1.0) -> complex:
    return MellinBarnes2D(params, spec).integral(phase, modulus)


def contour_price_2d(params: MarketParams, spec: ContourSpec | None = None) -> float:
    """Call price from 2-D contour quadrature, continued from admissible bases to x2 = -1."""
    return MellinBarnes2D(params, spec).continued_price().real


def phase_weighted_series(params: MarketParams, phase: float, modulus: float = 1.0,
                          cfg: SeriesConfig | None = None) -> complex:
    """Residue sum matching MellinBarnes2D.integral(phase, modulus)."""
    grid = build_term_grid(params, cfg or SeriesConfig(max_n=40, max_m=60))
    q = modulus * np.exp(1j * (phase - math.pi))
    return complex(np.sum(grid.column_sums * q ** np.arange(grid.max_m)))
