"""Double-series Black-Scholes call pricing with closed-form, quadrature and Mellin-Barnes cross-checks."""

from .errors import ConfigError, ContourError, DegenerateError, DomainError, NotAtmForwardError, PoleError
from .market import MarketParams, SeriesVariables, atm_forward_spot, derive_variables
from .mellin import (ContourSpec, MellinBarnes2D, cahen_mellin_inverse, characteristic_vector,
                     contour_integral_2d, contour_price_2d, phase_weighted_series,
                     residue_series_exponential)
from .reference import (DPlusMinus, QuadratureConfig, brenner_approx, closed_form_call, d_plus_minus,
                        green_quadrature_call)
from .series import (SeriesConfig, TermGrid, build_term_grid, price_atm_series, price_series,
                     series_term)
from .special import (HalfInteger, complex_gamma, complex_log_gamma, factorial, normal_cdf,
                      real_gamma, recip_gamma_half_integer)

__version__ = "0.1.0"
