"""Construction of the symmetric input states and the discrimination basis.

The pipeline is: d maximally-separated unit vectors in d-1 dimensions are
lifted by an angle theta onto a common axis to form the input states
|Psi_i>; Gram-Schmidt orthogonalization against each (d-1)-subset yields the
complement states |Psi-perp_i>; appending one ancilla component
sqrt(-<Psi-perp_1|Psi-perp_2>) and normalizing produces d orthonormal
measurement states |D_i>, completed by the inconclusive state |D_{d+1}>.

Measuring |D_i> identifies |Psi_i> with certainty; |D_{d+1}> gives no
information.  Basis indices map to orbital-angular-momentum mode labels
through ``oam_map``.

All construction functions are pure and the returned objects hold read-only
arrays, so they are safe to share across concurrent readers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import theory
from .errors import (
    DegenerateFamilyError,
    DomainError,
    InvalidDimensionError,
    LiftabilityError,
)

#: Tolerance for orthogonality / completeness checks.
ORTHO_TOL = 1e-10
#: Tolerance for closed-form comparisons and unit norms.
EXACT_TOL = 1e-12
#: Angles closer to zero than this leave the family numerically collinear.
MIN_THETA = 1e-9


def _freeze(vectors) -> np.ndarray:
    arr = np.array(vectors, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateFamily:
    """The d symmetric input states (rows) in the computational/OAM basis."""

    dim: int
    theta: float
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", _freeze(self.vectors))
        d, th, v = self.dim, self.theta, self.vectors
        if v.shape != (d, d):
            raise InvalidDimensionError(f"expected {(d, d)} vectors, got {v.shape}")
        norms = np.linalg.norm(v, axis=1)
        if np.max(np.abs(norms - 1.0)) > EXACT_TOL:
            raise DegenerateFamilyError("state vectors must have unit norm")
        if np.max(np.abs(v[:, -1] - math.cos(th))) > EXACT_TOL:
            raise DegenerateFamilyError("last component of every state must equal cos(theta)")
        gram = v @ v.T
        target = (d * math.cos(th) ** 2 - 1.0) / (d - 1.0)
        off = gram[~np.eye(d, dtype=bool)]
        if np.max(np.abs(off - target)) > EXACT_TOL:
            raise DegenerateFamilyError("pairwise overlaps must all equal the symmetric value")


@dataclass(frozen=True)
class ComplementSet:
    """Unnormalized complements; row i is orthogonal to every |Psi_j>, j != i."""

    dim: int
    theta: float
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", _freeze(self.vectors))
        d, v = self.dim, self.vectors
        if v.shape != (d, d):
            raise InvalidDimensionError(f"expected {(d, d)} vectors, got {v.shape}")
        gram = v @ v.T
        off = gram[~np.eye(d, dtype=bool)]
        if off.size and np.max(np.abs(off - off[0])) > ORTHO_TOL:
            raise DegenerateFamilyError("complement overlaps must all be equal")


@dataclass(frozen=True)
class DiscriminationBasis:
    """Orthonormal (d+1)-dimensional measurement basis; last row is inconclusive."""

    dim: int
    theta: float
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", _freeze(self.vectors))
        d, v = self.dim, self.vectors
        if v.shape != (d + 1, d + 1):
            raise InvalidDimensionError(f"expected {(d + 1, d + 1)} vectors, got {v.shape}")
        gram = v @ v.T
        if np.max(np.abs(gram - np.eye(d + 1))) > ORTHO_TOL:
            raise DegenerateFamilyError("measurement states must be orthonormal")

    def completeness_residual(self) -> float:
        """Max elementwise deviation of sum_j |D_j><D_j| from the identity."""
        resolution = self.vectors.T @ self.vectors
        return float(np.max(np.abs(resolution - np.eye(self.dim + 1))))


@dataclass(frozen=True)
class OamMap:
    """OAM mode labels for the d basis states plus the ancilla dimension."""

    dim: int
    state_ells: tuple[int, ...]
    ancilla_ell: int

    def __post_init__(self):
        labels = set(self.state_ells) | {self.ancilla_ell}
        if len(labels) != self.dim + 1:
            raise InvalidDimensionError("OAM labels must be distinct")


def build_projected_vectors(d: int) -> np.ndarray:
    """The d maximally-separated unit vectors in d-1 dimensions.

    Pairwise overlaps all equal -1/(d-1).  Constructed iteratively: the first
    vector is (1, 0, ..., 0); for each later vector the leading components
    follow from the overlap conditions with the previous vectors, the next
    from normalization, and the rest are zero.
    """
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    target = -1.0 / (d - 1.0)
    v = np.zeros((d, d - 1))
    v[0, 0] = 1.0
    for i in range(1, d):
        for k in range(min(i, d - 1)):
            v[i, k] = (target - v[i, :k] @ v[k, :k]) / v[k, k]
        if i <= d - 2:
            v[i, i] = math.sqrt(1.0 - v[i, :i] @ v[i, :i])
    return v


def build_state_family(d: int, theta: float) -> StateFamily:
    """Lift the projected vectors by theta onto the last axis.

    Row i is sin(theta) |Psi'_i> + cos(theta) |d>, so every state carries the
    same cos(theta) component along the lift axis and the pairwise overlap is
    (d cos^2(theta) - 1)/(d - 1).
    """
    tmax = theory.theta_max(d)
    if not (0.0 <= theta <= tmax + theory.THETA_TOL):
        raise DomainError(
            f"theta must lie in [0, {tmax!r}] rad (theta_max for d={d}); got {theta!r}"
        )
    theta = min(float(theta), tmax)
    projected = build_projected_vectors(d)
    vectors = np.zeros((d, d))
    vectors[:, : d - 1] = math.sin(theta) * projected
    vectors[:, d - 1] = math.cos(theta)
    return StateFamily(dim=d, theta=theta, vectors=vectors)


def _orthonormalize(rows: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass per vector."""
    out: list[np.ndarray] = []
    for row in rows:
        u = np.array(row, dtype=float)
        for _ in range(2):
            for w in out:
                u -= (w @ u) * w
        norm = np.linalg.norm(u)
        if norm < ORTHO_TOL:
            raise DegenerateFamilyError(
                "state subset is numerically rank deficient; cannot orthogonalize"
            )
        out.append(u / norm)
    return np.array(out)


def build_complements(family: StateFamily) -> ComplementSet:
    """Complement vectors via Gram-Schmidt against each (d-1)-subset.

    Row i is the residual of |Psi_i> after projecting out the orthonormalized
    span of the other states, so <Psi-perp_i|Psi_j> = 0 for j != i while
    <Psi-perp_i|Psi_i> equals the squared residual norm and is positive.
    """
    if family.theta < MIN_THETA:
        raise DegenerateFamilyError(
            f"theta={family.theta!r} leaves all states coincident; no complements exist"
        )
    d = family.dim
    vectors = np.zeros((d, d))
    for i in range(d):
        subset = np.delete(np.asarray(family.vectors), i, axis=0)
        basis = _orthonormalize(subset)
        residual = np.array(family.vectors[i])
        for _ in range(2):
            for w in basis:
                residual -= (w @ residual) * w
        if np.linalg.norm(residual) < ORTHO_TOL:
            raise DegenerateFamilyError("complement vector vanished; family is degenerate")
        if residual @ family.vectors[i] < 0.0:
            residual = -residual
        vectors[i] = residual
    return ComplementSet(dim=d, theta=family.theta, vectors=vectors)


def lift_to_basis(complements: ComplementSet) -> DiscriminationBasis:
    """Extend the complements by one ancilla dimension into an orthonormal basis.

    Each measurement state is the normalized |Psi-perp_i> +
    sqrt(-<Psi-perp_1|Psi-perp_2>) |d+1>; the common ancilla weight cancels
    the equal negative overlaps.  The inconclusive state is the remaining
    basis direction, found by Gram-Schmidt against the first d rows, with its
    ancilla component fixed positive.
    """
    d = complements.dim
    comp = np.asarray(complements.vectors)
    mutual = float(comp[0] @ comp[1])
    scale = np.linalg.norm(comp[0]) * np.linalg.norm(comp[1])
    if mutual > ORTHO_TOL * max(scale, 1.0):
        raise LiftabilityError(
            "complement overlap is positive; the states admit no single-ancilla "
            f"orthonormal lift (<perp_1|perp_2> = {mutual!r})"
        )
    # sqrt would amplify a float-level residual overlap into a visible
    # ancilla weight; the fully orthogonal case gets an exact zero
    if -mutual <= 1e-13 * max(scale, 1.0):
        mutual = 0.0
    ancilla = math.sqrt(max(-mutual, 0.0))
    vectors = np.zeros((d + 1, d + 1))
    for i in range(d):
        lifted = np.concatenate([comp[i], [ancilla]])
        vectors[i] = lifted / np.linalg.norm(lifted)
    # complete the basis: take the standard axis with the largest residual
    best_residual, best_norm = None, -1.0
    for k in range(d, -1, -1):
        residual = np.zeros(d + 1)
        residual[k] = 1.0
        for _ in range(2):
            for w in vectors[:d]:
                residual -= (w @ residual) * w
        norm = np.linalg.norm(residual)
        if norm > best_norm:
            best_residual, best_norm = residual, norm
    inconclusive = best_residual / best_norm
    anchor = inconclusive[d]
    if abs(anchor) <= EXACT_TOL:
        anchor = inconclusive[int(np.argmax(np.abs(inconclusive)))]
    if anchor < 0.0:
        inconclusive = -inconclusive
    vectors[d] = inconclusive
    return DiscriminationBasis(dim=d, theta=complements.theta, vectors=vectors)


def build_family_and_basis(d: int, theta: float) -> tuple[StateFamily, DiscriminationBasis]:
    """One-call construction of the input states and their measurement basis."""
    family = build_state_family(d, theta)
    return family, lift_to_basis(build_complements(family))


def embedded_vectors(family: StateFamily) -> np.ndarray:
    """The input states embedded in d+1 dimensions with zero ancilla component."""
    d = family.dim
    embedded = np.zeros((d, d + 1))
    embedded[:, :d] = family.vectors
    return embedded


def oam_map(d: int) -> OamMap:
    """OAM labels closest to zero for the d states plus one ancilla label.

    State labels break |l| ties toward positive l (d=2 uses {0, 1}); the
    ancilla label breaks ties toward negative l (d=3 ancilla is -2, d=5 is
    -3), matching the published table in both conventions.
    """
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    pool = range(-(d + 2), d + 3)
    by_state = sorted(pool, key=lambda ell: (abs(ell), 0 if ell > 0 else 1))
    states = tuple(sorted(by_state[:d]))
    by_ancilla = sorted(
        (ell for ell in pool if ell not in states),
        key=lambda ell: (abs(ell), 0 if ell < 0 else 1),
    )
    return OamMap(dim=d, state_ells=states, ancilla_ell=by_ancilla[0])


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj: StateFamily | ComplementSet | DiscriminationBasis) -> str:
    """Serialize a vector set to JSON with 17-significant-digit amplitudes."""
    rows = ",\n    ".join(
        "[" + ", ".join(_fmt(x) for x in row) + "]" for row in np.asarray(obj.vectors)
    )
    return (
        "{\n"
        f'  "dim": {obj.dim},\n'
        f'  "theta_rad": {_fmt(obj.theta)},\n'
        f'  "vectors": [\n    {rows}\n  ]\n'
        "}"
    )


def family_from_json(text: str) -> StateFamily:
    doc = json.loads(text)
    return StateFamily(dim=int(doc["dim"]), theta=float(doc["theta_rad"]), vectors=doc["vectors"])


def basis_from_json(text: str) -> DiscriminationBasis:
    doc = json.loads(text)
    return DiscriminationBasis(
        dim=int(doc["dim"]), theta=float(doc["theta_rad"]), vectors=doc["vectors"]
    )


def oam_map_to_json(mapping: OamMap) -> str:
    return json.dumps(
        {
            "dim": mapping.dim,
            "state_ells": list(mapping.state_ells),
            "ancilla_ell": mapping.ancilla_ell,
        },
        indent=2,
    )


def oam_map_from_json(text: str) -> OamMap:
    doc = json.loads(text)
    return OamMap(
        dim=int(doc["dim"]),
        state_ells=tuple(int(ell) for ell in doc["state_ells"]),
        ancilla_ell=int(doc["ancilla_ell"]),
    )
