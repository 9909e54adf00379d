"""Stochastic virtual experiment: heralded preparation, projection, counting.

One run mimics the real apparatus: for every preparation/measurement pair
(i, j) a 30 s coincidence count is drawn from a Poisson law whose mean is the
heralding rate of |Psi_i> times the detection probability |<D_j|Psi_i>|^2,
plus an accidental floor, while each arm accumulates background singles.

Modeling choices (all configurable, none dictated by the measured data):

* Per-state heralding rates follow a Gaussian spiral-bandwidth envelope
  exp(-l^2 / (2 sigma^2)) over the OAM labels, so high-|l| states are slower
  and high-dimensional sweeps grow statistical uncertainty.
* Imperfections are folded into a single depolarizing parameter epsilon that
  mixes each outcome row with the uniform distribution over d+1 outcomes;
  epsilon = 0.01*(d+1) reproduces a 1% misidentification probability per
  incorrect conclusive outcome.
* Singles are background-dominated Poisson streams at ``singles_rate_scale``
  per arm; the accidental coincidence floor is rate_A * rate_B * window, so
  the quantum contrast of uncorrelated settings is 1 in expectation.  The
  configuration is rejected if the background is too small for the
  coincidence counts it must dominate (the per-cell counts bound).

Per-cell Poisson streams are derived from (seed, i, j), so a run is
deterministic and independent of evaluation order.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, InvalidDimensionError, ShapeMismatchError
from .states import DiscriminationBasis, OamMap, StateFamily, embedded_vectors, oam_map

#: Expected counts beyond this overflow the int64 draw.
MAX_EXPECTED_COUNTS = float(2**62)


@dataclass(frozen=True)
class ExperimentConfig:
    """Source, noise, and counting parameters for one virtual experiment."""

    dim: int
    theta: float
    integration_time: float = 30.0
    coincidence_window: float = 25e-9
    max_coincidence_rate: float = 350.0
    spiral_bandwidth_sigma: float = 2.4
    crosstalk_epsilon: float = 0.0
    singles_rate_scale: float = 500.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.integration_time <= 0.0:
            raise ConfigurationError("integration_time must be positive")
        if self.coincidence_window <= 0.0:
            raise ConfigurationError("coincidence_window must be positive")
        if not 0.0 <= self.crosstalk_epsilon < 0.5:
            raise ConfigurationError("crosstalk_epsilon must lie in [0, 0.5)")
        if self.spiral_bandwidth_sigma <= 0.0:
            raise ConfigurationError("spiral_bandwidth_sigma must be positive")
        if self.max_coincidence_rate < 0.0:
            raise ConfigurationError("max_coincidence_rate must be nonnegative")
        if self.singles_rate_scale < 0.0:
            raise ConfigurationError("singles_rate_scale must be nonnegative")


@dataclass(frozen=True)
class CountsRecord:
    """Raw counts of one run: coincidence matrix plus per-setting singles."""

    dim: int
    theta: float
    coincidences: np.ndarray
    singles_a: np.ndarray
    singles_b: np.ndarray
    integration_time: float
    coincidence_window: float = 25e-9
    seed: int | None = None
    config: ExperimentConfig | None = field(default=None, compare=False)

    def __post_init__(self):
        # integer dtype is preserved for generated records; synthetic records
        # holding expected values may be float
        c = np.array(self.coincidences)
        sa = np.array(self.singles_a)
        sb = np.array(self.singles_b)
        for arr in (c, sa, sb):
            if not np.issubdtype(arr.dtype, np.number):
                raise ConfigurationError("counts must be numeric")
            arr.setflags(write=False)
        object.__setattr__(self, "coincidences", c)
        object.__setattr__(self, "singles_a", sa)
        object.__setattr__(self, "singles_b", sb)
        d = self.dim
        if c.shape != (d, d + 1) or sa.shape != (d,) or sb.shape != (d + 1,):
            raise InvalidDimensionError(
                f"inconsistent count shapes {c.shape}, {sa.shape}, {sb.shape} for d={d}"
            )
        if np.any(c < 0.0) or np.any(sa < 0.0) or np.any(sb < 0.0):
            raise ConfigurationError("counts must be nonnegative")
        if np.any(c > np.minimum(sa[:, None], sb[None, :])):
            raise ConfigurationError("coincidences cannot exceed either arm's singles")
        if self.integration_time <= 0.0 or self.coincidence_window <= 0.0:
            raise ConfigurationError("integration time and window must be positive")


def epsilon_for_percell_error(d: int, per_cell: float = 0.01) -> float:
    """Depolarization strength giving ``per_cell`` probability per wrong outcome.

    The uniform mixture puts epsilon/(d+1) in every off-diagonal conclusive
    cell, so epsilon = per_cell * (d + 1).
    """
    eps = per_cell * (d + 1)
    if not 0.0 <= eps < 0.5:
        raise ConfigurationError(
            f"per-cell error {per_cell!r} needs epsilon={eps!r}, outside [0, 0.5)"
        )
    return eps


def ideal_detection_matrix(family: StateFamily, basis: DiscriminationBasis) -> np.ndarray:
    """Probability matrix |<D_j|Psi_i>|^2; rows sum to one."""
    if family.dim != basis.dim:
        raise ShapeMismatchError(
            f"family dimension {family.dim} does not match basis dimension {basis.dim}"
        )
    if abs(family.theta - basis.theta) > 1e-9:
        raise ShapeMismatchError(
            f"family theta {family.theta!r} does not match basis theta {basis.theta!r}"
        )
    amplitudes = embedded_vectors(family) @ np.asarray(basis.vectors).T
    return amplitudes**2


def apply_noise(ideal: np.ndarray, config: ExperimentConfig) -> np.ndarray:
    """Mix each outcome row with the uniform distribution over d+1 outcomes."""
    probs = np.asarray(ideal, dtype=float)
    if np.max(np.abs(probs.sum(axis=1) - 1.0)) > 1e-9:
        raise ConfigurationError("ideal detection rows must sum to one")
    eps = config.crosstalk_epsilon
    return (1.0 - eps) * probs + eps / probs.shape[1]


def spiral_weights(mapping: OamMap, sigma: float) -> np.ndarray:
    """Gaussian spiral-bandwidth weights exp(-l^2/(2 sigma^2)), max-normalized."""
    if sigma <= 0.0:
        raise ConfigurationError("spiral bandwidth sigma must be positive")
    ells = np.array(mapping.state_ells, dtype=float)
    weights = np.exp(-(ells**2) / (2.0 * sigma * sigma))
    return weights / weights.max()


def _expected_means(
    family: StateFamily, basis: DiscriminationBasis, config: ExperimentConfig
) -> tuple[np.ndarray, float]:
    """Per-cell expected coincidence counts and the expected singles count."""
    probs = apply_noise(ideal_detection_matrix(family, basis), config)
    weights = spiral_weights(oam_map(family.dim), config.spiral_bandwidth_sigma)
    rates = config.max_coincidence_rate * weights
    accidental_rate = config.singles_rate_scale**2 * config.coincidence_window
    lam = (rates[:, None] * probs + accidental_rate) * config.integration_time
    singles_mean = config.singles_rate_scale * config.integration_time
    return lam, singles_mean


def _check_config_consistency(family: StateFamily, config: ExperimentConfig) -> None:
    if config.dim != family.dim:
        raise ShapeMismatchError(
            f"config dimension {config.dim} does not match family dimension {family.dim}"
        )
    if abs(config.theta - family.theta) > 1e-9:
        raise ShapeMismatchError(
            f"config theta {config.theta!r} does not match family theta {family.theta!r}"
        )


def run_experiment(
    family: StateFamily, basis: DiscriminationBasis, config: ExperimentConfig
) -> CountsRecord:
    """Draw one seeded counts record for all d*(d+1) preparation/measurement pairs.

    The coincidence count of cell (i, j) is Poisson with mean
    R_i * p_noisy(i, j) * T + accidental floor, where R_i is the heralding
    rate of state i after the spiral-bandwidth envelope.  Singles are
    background Poisson streams; the background must dominate the coincidence
    counts so that every generated record satisfies C_ij <= min(S_Ai, S_Bj).
    """
    _check_config_consistency(family, config)
    lam, singles_mean = _expected_means(family, basis, config)
    lam_max = float(lam.max())
    if lam_max >= MAX_EXPECTED_COUNTS or singles_mean >= MAX_EXPECTED_COUNTS:
        raise ConfigurationError(
            f"expected counts {max(lam_max, singles_mean)!r} overflow the integer draw"
        )
    if lam_max > 0.0 and singles_mean - lam_max < 10.0 * math.sqrt(singles_mean + lam_max):
        raise ConfigurationError(
            "singles_rate_scale is too low for the coincidence rates: expected "
            f"singles {singles_mean!r} must dominate the largest cell mean {lam_max!r}; "
            "raise singles_rate_scale or lower the coincidence scale"
        )
    d, seed = family.dim, config.rng_seed
    counts = np.zeros((d, d + 1), dtype=np.int64)
    for i in range(d):
        for j in range(d + 1):
            counts[i, j] = np.random.default_rng([seed, 2, i, j]).poisson(lam[i, j])
    singles_a = np.array(
        [np.random.default_rng([seed, 0, i]).poisson(singles_mean) for i in range(d)],
        dtype=np.int64,
    )
    singles_b = np.array(
        [np.random.default_rng([seed, 1, j]).poisson(singles_mean) for j in range(d + 1)],
        dtype=np.int64,
    )
    return CountsRecord(
        dim=d,
        theta=family.theta,
        coincidences=counts,
        singles_a=singles_a,
        singles_b=singles_b,
        integration_time=config.integration_time,
        coincidence_window=config.coincidence_window,
        seed=seed,
        config=config,
    )


def expected_record(
    family: StateFamily, basis: DiscriminationBasis, config: ExperimentConfig
) -> CountsRecord:
    """Noiseless record holding the exact expected values instead of draws.

    Coincidence cells carry the Poisson means (signal plus accidental floor)
    and the singles carry their background means; feeding this record through
    the analysis chain reproduces the noisy detection matrix exactly.
    """
    _check_config_consistency(family, config)
    lam, singles_mean = _expected_means(family, basis, config)
    d = family.dim
    return CountsRecord(
        dim=d,
        theta=family.theta,
        coincidences=lam,
        singles_a=np.full(d, singles_mean),
        singles_b=np.full(d + 1, singles_mean),
        integration_time=config.integration_time,
        coincidence_window=config.coincidence_window,
        seed=None,
        config=config,
    )


def record_to_json(record: CountsRecord) -> str:
    """Serialize a counts record (and its config, if known) to JSON."""
    doc: dict = {
        "dim": record.dim,
        "theta_rad": float(record.theta),
        "integration_time_s": float(record.integration_time),
        "coincidence_window_s": float(record.coincidence_window),
        "coincidences": np.asarray(record.coincidences).tolist(),
        "singles_a": np.asarray(record.singles_a).tolist(),
        "singles_b": np.asarray(record.singles_b).tolist(),
        "seed": record.seed,
    }
    if record.config is not None:
        doc["config"] = asdict(record.config)
    return json.dumps(doc, indent=2, sort_keys=True)


def record_from_json(text: str) -> CountsRecord:
    doc = json.loads(text)
    config = None
    if doc.get("config") is not None:
        config = ExperimentConfig(**doc["config"])
    return CountsRecord(
        dim=int(doc["dim"]),
        theta=float(doc["theta_rad"]),
        coincidences=doc["coincidences"],
        singles_a=doc["singles_a"],
        singles_b=doc["singles_b"],
        integration_time=float(doc["integration_time_s"]),
        coincidence_window=float(doc["coincidence_window_s"]),
        seed=doc.get("seed"),
        config=config,
    )


def with_seed(config: ExperimentConfig, seed: int) -> ExperimentConfig:
    """Copy of the configuration with a different RNG seed."""
    return replace(config, rng_seed=seed)
