"""Exception types raised by the aggregation engines."""

from __future__ import annotations


class FGMError(Exception):
    """Base class for all package errors."""


class ValidationError(FGMError, ValueError):
    """Invalid input: wrong dimension, parameter out of range, bad config."""


class InadmissibleCopulaError(ValidationError):
    """FGM parameters violate the sign-vector constraints.

    ``epsilon`` holds the first violating sign vector and ``value`` the
    corresponding (negative) value of ``1 + sum theta_A prod eps_j``.
    """

    def __init__(self, epsilon: tuple[int, ...], value: float):
        self.epsilon = tuple(int(e) for e in epsilon)
        self.value = float(value)
        super().__init__(
            f"inadmissible FGM parameters: constraint 1 + sum(theta * prod(eps)) = {value:.6g} < 0 "
            f"at eps = {self.epsilon}"
        )


class NumericalError(FGMError, RuntimeError):
    """A numerical procedure failed (DFT residue, bracket search, ...)."""


class TruncationError(NumericalError):
    """An infinite series could not be truncated within the configured caps."""
