"""Closed-form theory for unambiguous discrimination of d symmetric states.

The d input states live in d dimensions, have only real amplitudes, and share
a common pairwise overlap controlled by a single angle theta:

    <Psi_i|Psi_j> = (d cos^2(theta) - 1) / (d - 1),   i != j.

All angles are radians; the CLI converts from degrees at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvalidDimensionError, UnsupportedConfigurationError

#: Absolute slack applied when comparing an angle against theta_max.
THETA_TOL = 1e-12


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def theta_max(d: int) -> float:
    """Largest admissible angle, arccos(sqrt(1/d)); the states are orthogonal there."""
    d = _check_dim(d)
    return math.acos(math.sqrt(1.0 / d))


def _check_theta(d: int, theta: float) -> float:
    tmax = theta_max(d)
    if not (-THETA_TOL <= theta <= tmax + THETA_TOL):
        raise DomainError(
            f"theta must lie in [0, {tmax!r}] rad (theta_max for d={d}); got {theta!r}"
        )
    return min(max(float(theta), 0.0), tmax)


def overlap(d: int, theta: float) -> float:
    """Pairwise overlap (d cos^2(theta) - 1)/(d - 1), clipped to [0, 1]."""
    d = _check_dim(d)
    theta = _check_theta(d, theta)
    value = (d * math.cos(theta) ** 2 - 1.0) / (d - 1.0)
    return min(max(value, 0.0), 1.0)


def usd_probabilities(d: int, theta: float) -> tuple[float, float, float]:
    """Success, error, and inconclusive probabilities of ideal USD.

    p_suc = d sin^2(theta)/(d-1), p_err = 0, p_inc = overlap(d, theta).
    The three sum to one; the error probability is zero by construction.
    """
    d = _check_dim(d)
    theta = _check_theta(d, theta)
    p_suc = min(d * math.sin(theta) ** 2 / (d - 1.0), 1.0)
    p_inc = overlap(d, theta)
    return p_suc, 0.0, p_inc


def theta_for_overlap(d: int, target: float) -> float:
    """Angle that produces a given pairwise overlap.

    Inverts the overlap formula: theta = arccos(sqrt((1 + (d-1)*target)/d)).
    Used to hold the MESD bound constant while sweeping the dimension.
    """
    d = _check_dim(d)
    if not 0.0 <= target <= 1.0:
        raise DomainError(f"overlap must lie in [0, 1], got {target!r}")
    return math.acos(math.sqrt((1.0 + (d - 1.0) * target) / d))


def mesd_bound_from_overlap(s: float) -> float:
    """Minimum-error bound (1 - sqrt(1 - s^2))/2 for pairwise overlap s."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"overlap must lie in [0, 1], got {s!r}")
    return 0.5 * (1.0 - math.sqrt(max(1.0 - s * s, 0.0)))


def mesd_bound(d: int, theta: float) -> float:
    """Minimum achievable average error of minimum-error discrimination.

    For equal priors and equal pairwise overlap the general trace-distance
    bound collapses to (1 - sqrt(1 - |<Psi_i|Psi_j>|^2))/2, which depends on
    (d, theta) only through the overlap.
    """
    return mesd_bound_from_overlap(overlap(d, theta))


def mesd_bound_general(priors: list[float] | tuple[float, ...], gram_offdiag: float, d: int) -> float:
    """Minimum-error bound evaluated through the explicit pairwise sum.

    Follows the reduction for equal priors eta_i = 1/d and pure states with a
    common overlap: each of the (d^2 - d)/2 pairs contributes a trace distance
    2*sqrt(1 - s^2), and the pair count cancels the 1/(d-1) and 2/d factors.

    Args:
        priors: a priori probabilities; must be uniform (each 1/d).
        gram_offdiag: the common pairwise overlap s.
        d: dimension / number of states.

    Raises:
        UnsupportedConfigurationError: for non-uniform priors, which fall
            outside the symmetric scope of this toolkit.
    """
    d = _check_dim(d)
    priors = [float(p) for p in priors]
    if len(priors) != d:
        raise UnsupportedConfigurationError(
            f"expected {d} priors, got {len(priors)}"
        )
    if abs(sum(priors) - 1.0) > 1e-12:
        raise UnsupportedConfigurationError(f"priors must sum to 1, got {sum(priors)!r}")
    if any(abs(p - 1.0 / d) > 1e-12 for p in priors):
        raise UnsupportedConfigurationError(
            "non-uniform priors are outside the symmetric equal-prior scope"
        )
    if not 0.0 <= abs(gram_offdiag) <= 1.0:
        raise DomainError(f"overlap must lie in [-1, 1], got {gram_offdiag!r}")
    pair_count = (d * d - d) // 2
    trace_term = 2.0 * math.sqrt(max(1.0 - gram_offdiag * gram_offdiag, 0.0))
    return 0.5 * (1.0 - pair_count * trace_term / (d * (d - 1.0)))


@dataclass(frozen=True)
class TheoryPoint:
    """Closed-form quantities at one (d, theta) point."""

    dim: int
    theta: float
    overlap: float
    p_suc: float
    p_err: float
    p_inc: float
    mesd_bound: float


def theory_point(d: int, theta: float) -> TheoryPoint:
    """Evaluate all closed-form quantities at (d, theta)."""
    p_suc, p_err, p_inc = usd_probabilities(d, theta)
    return TheoryPoint(
        dim=_check_dim(d),
        theta=float(theta),
        overlap=overlap(d, theta),
        p_suc=p_suc,
        p_err=p_err,
        p_inc=p_inc,
        mesd_bound=mesd_bound(d, theta),
    )
