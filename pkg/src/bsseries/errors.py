"""Exception hierarchy shared by the pricers and the CLI."""


class DomainError(ValueError):
    """Inputs outside the mathematical domain of an operation."""


class DegenerateError(DomainError):
    """sigma * sqrt(tau) == 0 where the operation needs a non-degenerate kernel."""


class NotAtmForwardError(DomainError):
    """The ATM-forward specialisation was called away from [log] == 0."""


class ContourError(DomainError):
    """Contour abscissas outside the region where the Mellin-Barnes integral converges."""


class PoleError(DomainError):
    """Evaluation at a pole of the Gamma function."""


class ConfigError(ValueError):
    """Invalid numerical configuration (node counts, truncation bounds, ...)."""
