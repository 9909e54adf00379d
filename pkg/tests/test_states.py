"""Construction of symmetric states, complements, and the lifted basis."""

import math

import numpy as np
import pytest

from usdkit import states, theory
from usdkit.errors import (
    DegenerateFamilyError,
    DomainError,
    InvalidDimensionError,
    LiftabilityError,
)

CHECK_DIMS = list(range(2, 15))


def closed_form_basis_d3(theta):
    """The four measurement states in d=3, written out in closed form.

    The first component of row 1 is sqrt(2/3): it is pinned by <D_1|D_2> = 0
    together with unit norm, given the shared tan/sec components below.
    """
    tan, sec = math.tan(theta), 1.0 / math.cos(theta)
    q = 3.0 * math.cos(theta) ** 2 - 1.0
    return np.array(
        [
            [math.sqrt(2 / 3), 0.0, tan / math.sqrt(6), math.sqrt(q / 6) * sec],
            [-1 / math.sqrt(6), 1 / math.sqrt(2), tan / math.sqrt(6), math.sqrt(q / 6) * sec],
            [-1 / math.sqrt(6), -1 / math.sqrt(2), tan / math.sqrt(6), math.sqrt(q / 6) * sec],
            [0.0, 0.0, -math.sqrt(q / 2) * sec, tan / math.sqrt(2)],
        ]
    )


# ---------------------------------------------------------------- projected


def test_projected_vectors_d2():
    assert np.allclose(states.build_projected_vectors(2), [[1.0], [-1.0]], atol=1e-15)


def test_projected_vectors_d3_trine():
    expected = [[1.0, 0.0], [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2]]
    assert np.allclose(states.build_projected_vectors(3), expected, atol=1e-15)


def test_projected_vectors_d5_gram():
    v = states.build_projected_vectors(5)
    gram = v @ v.T
    off = gram[~np.eye(5, dtype=bool)]
    assert np.max(np.abs(np.diag(gram) - 1.0)) < 1e-12
    assert np.max(np.abs(off + 0.25)) < 1e-12


@pytest.mark.parametrize("d", CHECK_DIMS)
def test_projected_vectors_structure(d):
    v = states.build_projected_vectors(d)
    assert v.shape == (d, d - 1)
    assert np.allclose(v[0], np.eye(d - 1)[0], atol=1e-15)
    gram = v @ v.T
    off = gram[~np.eye(d, dtype=bool)]
    assert np.max(np.abs(off + 1.0 / (d - 1))) < 1e-12


def test_projected_vectors_invalid_dimension():
    with pytest.raises(InvalidDimensionError):
        states.build_projected_vectors(1)


# ------------------------------------------------------------------ family


def test_family_d3_first_state():
    theta = math.radians(33.0)
    family = states.build_state_family(3, theta)
    expected = [math.sin(theta), 0.0, math.cos(theta)]
    assert np.allclose(family.vectors[0], expected, atol=1e-15)


def test_family_theta_zero_collapses():
    family = states.build_state_family(5, 0.0)
    for row in family.vectors:
        assert np.allclose(row, [0, 0, 0, 0, 1], atol=1e-15)


def test_family_overlap_frozen_value():
    family = states.build_state_family(6, math.radians(40.0))
    gram = family.vectors @ family.vectors.T
    off = gram[~np.eye(6, dtype=bool)]
    assert np.max(np.abs(off - 0.5041889066001582)) < 1e-12


def test_family_admits_theta_max_exactly():
    family = states.build_state_family(7, theory.theta_max(7))
    gram = family.vectors @ family.vectors.T
    assert np.max(np.abs(gram - np.eye(7))) < 1e-12


def test_family_rejects_theta_outside_interval():
    with pytest.raises(DomainError) as err:
        states.build_state_family(3, theory.theta_max(3) + 1e-6)
    assert "[0," in str(err.value)
    with pytest.raises(DomainError):
        states.build_state_family(3, -0.2)


def test_family_validation_catches_bad_vectors():
    good = states.build_state_family(3, 0.5)
    with pytest.raises(DegenerateFamilyError):
        states.StateFamily(dim=3, theta=0.5, vectors=np.asarray(good.vectors) * 1.001)


# ------------------------------------------------------------- complements


def test_complements_d3_closed_form_direction():
    theta = math.radians(33.0)
    family = states.build_state_family(3, theta)
    comp = states.build_complements(family)
    reference = np.array(
        [math.sqrt(3) * math.cos(theta) * math.sin(theta), 0.0, math.sqrt(3) / 2 * math.sin(theta) ** 2]
    )
    got = comp.vectors[0] / np.linalg.norm(comp.vectors[0])
    assert np.allclose(got, reference / np.linalg.norm(reference), atol=1e-12)
    assert comp.vectors[0] @ family.vectors[0] > 0.0


def test_complements_d2_perpendicular():
    family = states.build_state_family(2, math.radians(45.0))
    comp = states.build_complements(family)
    assert abs(comp.vectors[0] @ family.vectors[1]) < 1e-14
    assert comp.vectors[0] @ family.vectors[0] > 0.0


def test_complements_d4_orthogonality():
    family = states.build_state_family(4, math.radians(30.0))
    comp = states.build_complements(family)
    for i in range(4):
        for j in range(4):
            inner = comp.vectors[i] @ family.vectors[j]
            if i == j:
                assert inner > 0.0
            else:
                assert abs(inner) < 1e-12


@pytest.mark.parametrize("d", [2, 5, 9, 14])
def test_complements_mutual_overlaps_equal_and_nonpositive(d):
    family = states.build_state_family(d, 0.6 * theory.theta_max(d))
    comp = states.build_complements(family)
    gram = comp.vectors @ comp.vectors.T
    off = gram[~np.eye(d, dtype=bool)]
    assert np.max(np.abs(off - off[0])) < 1e-10
    assert np.all(off <= 1e-12)


def test_complements_reject_degenerate_theta():
    with pytest.raises(DegenerateFamilyError):
        states.build_complements(states.build_state_family(3, 0.0))
    with pytest.raises(DegenerateFamilyError):
        states.build_complements(states.build_state_family(3, 1e-10))


# -------------------------------------------------------------------- lift


@pytest.mark.parametrize("deg", [15.0, 33.0, 45.0])
def test_basis_matches_closed_form_d3(deg):
    theta = math.radians(deg)
    _, basis = states.build_family_and_basis(3, theta)
    reference = closed_form_basis_d3(theta)
    for row, ref in zip(np.asarray(basis.vectors), reference):
        diff = min(np.max(np.abs(row - ref)), np.max(np.abs(row + ref)))
        assert diff < 1e-12


def test_basis_at_theta_max_has_no_ancilla_weight():
    d = 5
    family = states.build_state_family(d, theory.theta_max(d))
    comp = states.build_complements(family)
    basis = states.lift_to_basis(comp)
    vectors = np.asarray(basis.vectors)
    assert np.max(np.abs(vectors[:d, d])) < 1e-12
    assert np.allclose(vectors[d], np.eye(d + 1)[d], atol=1e-12)
    embedded = states.embedded_vectors(family)
    p_inc = (embedded @ vectors[d]) ** 2
    assert np.max(p_inc) < 1e-20


def test_basis_gram_identity_d6():
    _, basis = states.build_family_and_basis(6, math.radians(40.0))
    gram = np.asarray(basis.vectors) @ np.asarray(basis.vectors).T
    assert np.max(np.abs(gram - np.eye(7))) < 1e-10


def test_basis_sign_conventions():
    _, basis = states.build_family_and_basis(4, 0.5)
    vectors = np.asarray(basis.vectors)
    assert np.all(vectors[:4, 4] > 0.0)
    assert vectors[4, 4] > 0.0


def test_lift_rejects_positive_complement_overlap():
    bad = states.ComplementSet(
        dim=2, theta=0.4, vectors=np.array([[1.0, 0.3], [0.3, 1.0]])
    )
    with pytest.raises(LiftabilityError):
        states.lift_to_basis(bad)


@pytest.mark.parametrize("d", CHECK_DIMS)
def test_grid_invariants(d):
    tmax = theory.theta_max(d)
    for k in range(1, 13):
        theta = k * tmax / 12
        family, basis = states.build_family_and_basis(d, theta)
        assert basis.completeness_residual() < 1e-10
        embedded = states.embedded_vectors(family)
        amplitudes = embedded @ np.asarray(basis.vectors).T
        probs = amplitudes**2
        off = probs[:, :d][~np.eye(d, dtype=bool)]
        assert np.max(off) < 1e-20
        closure = np.abs(np.diag(probs[:, :d]) + probs[:, d] - 1.0)
        assert np.max(closure) < 1e-12
        diag = np.diag(probs[:, :d])
        assert np.max(diag) - np.min(diag) < 1e-12
        p_suc, _, p_inc = theory.usd_probabilities(d, theta)
        assert np.max(np.abs(diag - p_suc)) < 1e-12
        assert np.max(np.abs(probs[:, d] - p_inc)) < 1e-12


# ----------------------------------------------------------------- OAM map


@pytest.mark.parametrize(
    "d,state_ells,ancilla",
    [
        (2, (0, 1), -1),
        (3, (-1, 0, 1), -2),
        (4, (-1, 0, 1, 2), -2),
        (5, (-2, -1, 0, 1, 2), -3),
    ],
)
def test_oam_map_published_rows(d, state_ells, ancilla):
    mapping = states.oam_map(d)
    assert mapping.state_ells == state_ells
    assert mapping.ancilla_ell == ancilla


@pytest.mark.parametrize("d", CHECK_DIMS)
def test_oam_map_minimality(d):
    mapping = states.oam_map(d)
    labels = set(mapping.state_ells) | {mapping.ancilla_ell}
    assert len(labels) == d + 1
    assert max(abs(ell) for ell in mapping.state_ells) == d // 2
    assert abs(mapping.ancilla_ell) == (d + 1) // 2
    assert mapping.ancilla_ell not in mapping.state_ells


# ----------------------------------------------------------- serialization


def test_family_json_round_trip():
    family = states.build_state_family(6, math.radians(40.0))
    text = states.to_json(family)
    back = states.family_from_json(text)
    assert back.dim == family.dim
    assert back.theta == family.theta
    assert np.array_equal(np.asarray(back.vectors), np.asarray(family.vectors))


def test_basis_json_round_trip_is_exact():
    _, basis = states.build_family_and_basis(5, 0.7)
    back = states.basis_from_json(states.to_json(basis))
    assert np.array_equal(np.asarray(back.vectors), np.asarray(basis.vectors))


def test_json_prints_17_significant_digits():
    family = states.build_state_family(2, math.radians(30.0))
    text = states.to_json(family)
    assert "0.49999999999999994" in text  # sin(30deg) in doubles, all 17 digits


def test_oam_map_json_round_trip():
    mapping = states.oam_map(7)
    assert states.oam_map_from_json(states.oam_map_to_json(mapping)) == mapping
