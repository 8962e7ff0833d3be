"""Ordered bases, dual bases, phase splits, and cell decompositions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfnorms.bases import (
    OrderedBasis,
    PhaseSplitBasis,
    dual_basis,
    phase_split,
    refine,
    scaled_basis,
    self_dual_scale,
    standard_basis,
)
from tfnorms.errors import SingularityError, ValidationError


def test_standard_dual_is_2pi():
    E = standard_basis(2)
    D = dual_basis(E)
    assert np.allclose(D.matrix, 2 * np.pi * np.eye(2))


def test_dual_of_scale_two_is_pi():
    D = dual_basis(scaled_basis([2.0]))
    assert np.allclose(D.matrix, [[np.pi]])


def test_dual_pairing_sheared_basis():
    E = OrderedBasis(np.array([[1.0, 0.0], [1.0, 1.0]]))
    D = dual_basis(E)
    gram = E.matrix.T @ D.matrix
    assert np.allclose(gram, 2 * np.pi * np.eye(2), atol=1e-12)


def test_dual_is_involution():
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = rng.standard_normal((3, 3))
        if abs(np.linalg.det(m)) < 0.1:
            continue
        E = OrderedBasis(m)
        back = dual_basis(dual_basis(E))
        assert back.close_to(E, tol=1e-10)


def test_singular_matrix_rejected():
    with pytest.raises(SingularityError):
        OrderedBasis(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_refine_divides_columns():
    E = scaled_basis([3.0, 6.0])
    R = refine(E, 3)
    assert np.allclose(R.matrix, np.diag([1.0, 2.0]))
    with pytest.raises(ValidationError):
        refine(E, 0)


def test_refine_keeps_original_lattice_points():
    E = OrderedBasis(np.array([[1.0, 0.0], [1.0, 1.0]]))
    R = refine(E, 3)
    # every original lattice point must have integer coordinates in the
    # refined basis
    j = np.array([[2, -1], [0, 4], [-3, 5]], dtype=float)
    pts = j @ E.matrix.T
    coords = np.linalg.solve(R.matrix, pts.T).T
    assert np.allclose(coords, np.round(coords), atol=1e-10)


def test_cell_index_half_open_boundary():
    E = standard_basis(1)
    assert E.cell_index(np.array([2.5]))[0] == 2
    assert E.cell_index(np.array([3.0]))[0] == 3
    assert E.cell_index(np.array([-0.25]))[0] == -1


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_cells_tile_without_overlap(seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((2, 2))
    if abs(np.linalg.det(m)) < 0.1:
        return
    E = OrderedBasis(m)
    x = rng.uniform(-20, 20, size=(200, 2))
    j = E.cell_index(x)
    # membership: x - T j has coordinates in [0, 1)^2
    rel = np.linalg.solve(E.matrix, (x - j @ E.matrix.T).T).T
    assert np.all(rel >= -1e-12)
    assert np.all(rel < 1.0 + 1e-12)


def test_phase_split_accepts_self_dual_pair():
    s = self_dual_scale()
    B = scaled_basis([s, s])
    split = phase_split(B)
    assert split.is_self_dual
    assert split.dim == 1


def test_phase_split_standard_pair():
    # x part standard, xi part 2pi-scaled: the classic configuration
    split = PhaseSplitBasis(standard_basis(1), scaled_basis([2 * np.pi]))
    assert not split.is_self_dual
    assert np.allclose(split.product.matrix, np.diag([1.0, 2 * np.pi]))


def test_phase_split_rejects_mismatched_pair():
    with pytest.raises(ValidationError):
        PhaseSplitBasis(standard_basis(1), standard_basis(1))


def test_phase_split_rejects_off_diagonal_coupling():
    m = np.array([[1.0, 0.5], [0.0, 2 * np.pi]])
    with pytest.raises(ValidationError):
        phase_split(OrderedBasis(m))


def test_self_dual_scale_value():
    s = self_dual_scale()
    assert s == pytest.approx(np.sqrt(2 * np.pi), rel=0, abs=0)
    E = scaled_basis([s, s, s])
    assert dual_basis(E).close_to(E)


def test_basis_json_round_trip():
    E = OrderedBasis(np.array([[1.0, 0.0], [1.0, 1.0]]))
    again = OrderedBasis.from_json(E.to_json())
    assert again.close_to(E)
    with pytest.raises(ValidationError):
        OrderedBasis.from_json({"rows": [[1]]})
