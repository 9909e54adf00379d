"""Convert raw counts into probabilities, uncertainties, and error verdicts.

The chain follows the experimental normalization: the quantum contrast
Q_ij = (C_ij / T) / (s_Ai * s_Bj * t) compares the coincidence rate of a cell
against the accidental rate of two independent streams (s are singles rates,
t the coincidence window), so uncorrelated settings sit at Q = 1.  The
contrast is converted to probabilities by P_ij = (Q_ij - 1)/sum_j(Q_ij - 1);
negative (Q_ij - 1) values from noise are kept, not clipped.  Uncertainties
come from first-order Gaussian propagation of sqrt(N) count deviations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import theory
from .errors import DegenerateRowError, InsufficientDataError, InvalidDimensionError
from .experiment import CountsRecord

VERDICT_BELOW = "below_by_one_sigma"
VERDICT_OVERLAPPING = "overlapping"
VERDICT_ABOVE = "above"


@dataclass(frozen=True)
class OutcomeTable:
    """Normalized outcome probabilities with propagated uncertainties."""

    dim: int
    theta: float
    probabilities: np.ndarray
    sigmas: np.ndarray
    quantum_contrast: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        s = np.array(self.sigmas, dtype=float)
        q = np.array(self.quantum_contrast, dtype=float)
        for arr in (p, s, q):
            arr.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "sigmas", s)
        object.__setattr__(self, "quantum_contrast", q)
        d = self.dim
        if p.shape != (d, d + 1) or s.shape != (d, d + 1) or q.shape != (d, d + 1):
            raise InvalidDimensionError("outcome matrices must have shape (d, d+1)")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-12:
            raise DegenerateRowError("probability rows must sum to one")
        if np.any(s < 0.0) or not np.all(np.isfinite(s)):
            raise DegenerateRowError("sigmas must be nonnegative and finite")


@dataclass(frozen=True)
class ErrorSummary:
    """Mean total error rate of a run compared against the MESD bound."""

    dim: int
    theta: float
    per_state_error: tuple[float, ...]
    mean_total_error: float
    mean_error_sigma: float
    mesd_bound: float
    verdict: str


def quantum_contrast(record: CountsRecord) -> np.ndarray:
    """Coincidence rates normalized by the singles rates and the window.

    Q_ij = C_ij * T / (S_Ai * S_Bj * t) with S the singles totals over the
    integration time T and t the coincidence window; two uncorrelated
    streams give Q = 1 in expectation.
    """
    sa = np.asarray(record.singles_a, dtype=float)
    sb = np.asarray(record.singles_b, dtype=float)
    for name, arr in (("S_A", sa), ("S_B", sb)):
        zeros = np.where(arr <= 0.0)[0]
        if zeros.size:
            raise InsufficientDataError(
                f"{name} has zero singles at setting index {int(zeros[0])}; "
                "quantum contrast is undefined"
            )
    c = np.asarray(record.coincidences, dtype=float)
    return c * record.integration_time / (sa[:, None] * sb[None, :] * record.coincidence_window)


def normalize_probabilities(contrast: np.ndarray) -> np.ndarray:
    """Row-normalize (Q - 1) into probabilities; keeps negative entries.

    Raises:
        DegenerateRowError: if a row of Q - 1 sums to a nonpositive value,
            meaning that preparation shows no correlated signal.
    """
    excess = np.asarray(contrast, dtype=float) - 1.0
    denominators = excess.sum(axis=1)
    bad = np.where(denominators <= 0.0)[0]
    if bad.size:
        raise DegenerateRowError(
            f"row {int(bad[0])} has nonpositive contrast excess {denominators[bad[0]]!r}; "
            "no correlated signal in that preparation"
        )
    return excess / denominators[:, None]


def gaussian_propagation(record: CountsRecord) -> np.ndarray:
    """First-order sigma of every P_ij from sqrt(N) count deviations.

    Every count N (coincidences and singles) is treated as an independent
    variable with variance max(N, 1); the floor keeps zero-count cells from
    claiming zero uncertainty.  The partial derivatives of
    P_ij = (Q_ij - 1)/sum_k(Q_ik - 1) are evaluated at the measured values,
    including the common S_Ai factor and the per-column S_Bk factors.
    """
    q = quantum_contrast(record)
    excess = q - 1.0
    denominators = excess.sum(axis=1)
    bad = np.where(denominators <= 0.0)[0]
    if bad.size:
        raise DegenerateRowError(
            f"row {int(bad[0])} has nonpositive contrast excess; sigma is undefined"
        )
    p = excess / denominators[:, None]
    c = np.asarray(record.coincidences, dtype=float)
    sa = np.asarray(record.singles_a, dtype=float)
    sb = np.asarray(record.singles_b, dtype=float)
    var_c = np.maximum(c, 1.0)
    var_sa = np.maximum(sa, 1.0)
    var_sb = np.maximum(sb, 1.0)
    d_plus_1 = record.dim + 1
    dq_dc = record.integration_time / (sa[:, None] * sb[None, :] * record.coincidence_window)
    identity = np.eye(d_plus_1)
    variances = np.zeros_like(p)
    for i in range(record.dim):
        # selector[j, k] = delta_jk - P_ij: how cell k of the row moves P_ij
        selector = identity - p[i][:, None]
        coincidence_terms = (selector * dq_dc[i][None, :] / denominators[i]) ** 2 @ var_c[i]
        column_terms = (selector * q[i][None, :] / (denominators[i] * sb[None, :])) ** 2 @ var_sb
        row_term = (q[i] - p[i] * q[i].sum()) / (denominators[i] * sa[i])
        variances[i] = coincidence_terms + column_terms + row_term**2 * var_sa[i]
    return np.sqrt(variances)


def outcome_table(record: CountsRecord) -> OutcomeTable:
    """Full analysis of one counts record: contrast, probabilities, sigmas."""
    q = quantum_contrast(record)
    return OutcomeTable(
        dim=record.dim,
        theta=record.theta,
        probabilities=normalize_probabilities(q),
        sigmas=gaussian_propagation(record),
        quantum_contrast=q,
    )


def classify(mean_total_error: float, mean_error_sigma: float, mesd_bound: float) -> str:
    """Three-way verdict of the mean error against the MESD bound."""
    if mean_total_error + mean_error_sigma < mesd_bound:
        return VERDICT_BELOW
    if mean_total_error > mesd_bound:
        return VERDICT_ABOVE
    return VERDICT_OVERLAPPING


def error_summary(table: OutcomeTable, mesd_bound: float | None = None) -> ErrorSummary:
    """Per-state and mean error rates of a run, classified against MESD.

    The per-state error sums the conclusive off-diagonal probabilities of a
    row; the mean averages over input states.  ``mean_error_sigma`` is the
    sample standard deviation of the per-state errors, i.e. the spread
    attached to the mean point when classifying it against the bound, and the
    verdict is below_by_one_sigma / overlapping / above accordingly.
    """
    d = table.dim
    p = np.asarray(table.probabilities)
    off_diagonal = ~np.eye(d, dtype=bool)
    per_state = np.where(off_diagonal, p[:, :d], 0.0).sum(axis=1)
    mean_error = float(per_state.mean())
    sigma = float(per_state.std(ddof=1)) if d > 1 else 0.0
    bound = theory.mesd_bound(d, table.theta) if mesd_bound is None else float(mesd_bound)
    return ErrorSummary(
        dim=d,
        theta=table.theta,
        per_state_error=tuple(float(e) for e in per_state),
        mean_total_error=mean_error,
        mean_error_sigma=sigma,
        mesd_bound=bound,
        verdict=classify(mean_error, sigma, bound),
    )


def outcome_to_json(table: OutcomeTable) -> str:
    return json.dumps(
        {
            "dim": table.dim,
            "theta_rad": float(table.theta),
            "probabilities": np.asarray(table.probabilities).tolist(),
            "sigmas": np.asarray(table.sigmas).tolist(),
            "quantum_contrast": np.asarray(table.quantum_contrast).tolist(),
        },
        indent=2,
        sort_keys=True,
    )


def summary_to_json(summary: ErrorSummary) -> str:
    return json.dumps(
        {
            "dim": summary.dim,
            "theta_rad": float(summary.theta),
            "per_state_error": list(summary.per_state_error),
            "mean_total_error": summary.mean_total_error,
            "mean_error_sigma": summary.mean_error_sigma,
            "mesd_bound": summary.mesd_bound,
            "verdict": summary.verdict,
        },
        indent=2,
        sort_keys=True,
    )
