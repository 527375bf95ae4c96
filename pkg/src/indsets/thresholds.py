"""Closed-form thresholds of the hard-core model on bounded-degree graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError

MAX_DELTA = 10**6
# Above this degree the power formula is evaluated in the log domain.
LOG_DOMAIN_DELTA = 300


def _check_delta(delta: int) -> None:
    if int(delta) != delta or delta < 3:
        raise PreconditionError(f"maximum degree must be an integer >= 3, got {delta}")
    if delta > MAX_DELTA:
        raise PreconditionError(f"maximum degree capped at {MAX_DELTA}")


def lambda_c(delta: int, exact: bool = False):
    """Uniqueness threshold (D-1)^(D-1) / (D-2)^D of the infinite D-regular tree.

    ``exact=True`` returns a ``Fraction``.
    """
    _check_delta(delta)
    if exact:
        return Fraction((delta - 1) ** (delta - 1), (delta - 2) ** delta)
    if delta <= LOG_DOMAIN_DELTA:
        # int / int true division is correctly rounded even for huge operands
        return (delta - 1) ** (delta - 1) / (delta - 2) ** delta
    return math.exp((delta - 1) * math.log1p(1.0 / (delta - 2))) / (delta - 2)


def clique_occupancy(delta: int, lam):
    """Occupancy fraction of K_{delta+1}: lam / (1 + lam (delta+1))."""
    if lam < 0:
        raise PreconditionError("fugacity must be non-negative")
    return lam / (1 + lam * (delta + 1))


def alpha_c(delta: int, exact: bool = False):
    """Critical density: the clique occupancy at the uniqueness threshold."""
    lc = lambda_c(delta, exact=exact)
    return lc / (1 + (delta + 1) * lc)


def lambda_star(alpha, delta: int):
    """Fugacity at which K_{delta+1} has occupancy ``alpha``."""
    if not 0 < alpha < alpha_c(delta):
        raise PreconditionError(
            f"need 0 < alpha < alpha_c({delta}) = {alpha_c(delta):.6g}, got {alpha}"
        )
    return alpha / (1 - alpha * (delta + 1))


def lambda_star_triangle_free(delta: int):
    """Fugacity lambda_c(delta) - 1/delta^2 used for triangle-free inputs."""
    _check_delta(delta)
    if delta <= LOG_DOMAIN_DELTA:
        return float(lambda_c(delta, exact=True) - Fraction(1, delta * delta))
    return lambda_c(delta) - 1.0 / delta**2


@dataclass(frozen=True)
class ThresholdSet:
    delta: int
    lambda_c: float
    alpha_c: float

    def lambda_star(self, alpha) -> float:
        return lambda_star(alpha, self.delta)


def thresholds(delta: int) -> ThresholdSet:
    return ThresholdSet(delta, lambda_c(delta), alpha_c(delta))
