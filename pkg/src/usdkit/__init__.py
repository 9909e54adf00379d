"""Unambiguous discrimination of symmetric qudit states.

Builds the (d+1)-outcome measurement basis that identifies any of d equally
overlapping states without error, evaluates the closed-form success /
inconclusive probabilities and the minimum-error (MESD) bound, simulates the
heralded photon-counting experiment with configurable noise, and analyzes
counts back into probabilities and error verdicts.
"""

from .analysis import (
    ErrorSummary,
    OutcomeTable,
    classify,
    error_summary,
    gaussian_propagation,
    normalize_probabilities,
    outcome_table,
    quantum_contrast,
)
from .errors import (
    ConfigurationError,
    DegenerateFamilyError,
    DegenerateRowError,
    DomainError,
    InsufficientDataError,
    InvalidDimensionError,
    LiftabilityError,
    ShapeMismatchError,
    UnsupportedConfigurationError,
    UsdError,
)
from .experiment import (
    CountsRecord,
    ExperimentConfig,
    apply_noise,
    epsilon_for_percell_error,
    expected_record,
    ideal_detection_matrix,
    run_experiment,
    spiral_weights,
)
from .states import (
    ComplementSet,
    DiscriminationBasis,
    OamMap,
    StateFamily,
    build_complements,
    build_family_and_basis,
    build_projected_vectors,
    build_state_family,
    embedded_vectors,
    lift_to_basis,
    oam_map,
)
from .theory import (
    TheoryPoint,
    mesd_bound,
    mesd_bound_from_overlap,
    mesd_bound_general,
    overlap,
    theory_point,
    theta_for_overlap,
    theta_max,
    usd_probabilities,
)

__version__ = "0.1.0"
