"""Iterated norms over arrays, lattices, and the quasi-triangle data."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfnorms import (
    ExponentVector,
    GridSpec,
    InvalidArgumentError,
    LatticeSeq,
    MixedNormSpec,
    SampledField,
    ValidationError,
    discrete_mixed_norm,
    mixed_norm,
    quasi_triangle_check,
    scaled_basis,
    standard_basis,
    weigh,
)
from tfnorms.mixed import compensated_sum, reduce_axes
from tfnorms.weights import polynomial_weight


def field_on_cells(values, d=None):
    """Unit-cell field with one sample per cell, so measures are all 1."""
    values = np.asarray(values, dtype=complex)
    d = values.ndim if d is None else d
    grid = GridSpec(
        standard_basis(d),
        (1,) * d,
        tuple((0, n - 1) for n in values.shape),
    )
    return SampledField(grid, values)


def test_l1_dyadic_oracle():
    # sum of 2^-n over n = 0..7 is 2 - 2^-7, exactly representable
    f = field_on_cells(2.0 ** -np.arange(8))
    spec = MixedNormSpec(ExponentVector((1.0,)))
    assert mixed_norm(f, spec) == pytest.approx(1.9921875, abs=1e-15)


def test_geometric_half_power_oracle():
    # separable 2^-(i+j)/2 on an 8 x 8 box; each axis sums the geometric
    # series with ratio 2^-1/2, so the L^1(L^1) norm is the squared ratio sum
    i = np.arange(8)
    f = field_on_cells(np.sqrt(2.0) ** -(i[:, None] + i[None, :]))
    spec = MixedNormSpec(ExponentVector((1.0, 1.0)))
    expected = ((1.0 - 2.0**-4) / (1.0 - 2.0**-0.5)) ** 2
    assert mixed_norm(f, spec) == pytest.approx(expected, rel=1e-14)


def test_sup_norm_and_coordinate_steps():
    g = GridSpec(standard_basis(1), (4,), ((0, 1),))
    vals = np.linspace(0.0, 3.0, 8)
    f = SampledField(g, vals)
    sup = MixedNormSpec(ExponentVector((np.inf,)))
    assert mixed_norm(f, sup) == 3.0
    # L^2 squared is step times the squared-sample sum
    l2 = MixedNormSpec(ExponentVector((2.0,)))
    assert mixed_norm(f, l2) == pytest.approx(np.sqrt(np.sum(vals**2) * 0.25), rel=1e-14)


def test_basis_volume_enters_steps():
    # the same samples over a stretched basis: steps are still 1/m in basis
    # coordinates, so the norm does not change; volume enters elsewhere
    vals = np.arange(1.0, 9.0)
    f1 = SampledField(GridSpec(standard_basis(1), (8,), ((0, 0),)), vals)
    f2 = SampledField(GridSpec(scaled_basis([5.0]), (8,), ((0, 0),)), vals)
    spec = MixedNormSpec(ExponentVector((1.0,)))
    assert mixed_norm(f1, spec) == mixed_norm(f2, spec)


def test_weight_matches_weighed_field():
    rng = np.random.default_rng(3)
    g = GridSpec(standard_basis(2), (2, 3), ((-1, 0), (0, 1)))
    f = SampledField(g, rng.normal(size=g.shape))
    w = polynomial_weight(1.5, 2)
    spec_w = MixedNormSpec(ExponentVector((1.0, 2.0)), weight=w)
    spec = MixedNormSpec(ExponentVector((1.0, 2.0)))
    assert mixed_norm(f, spec_w) == pytest.approx(mixed_norm(weigh(f, w), spec), rel=1e-14)


def test_region_restriction():
    rng = np.random.default_rng(4)
    g = GridSpec(standard_basis(1), (3,), ((-2, 2),))
    f = SampledField(g, rng.normal(size=g.shape))
    spec = MixedNormSpec(ExponentVector((2.0,)), region=((0, 1),))
    inner = SampledField(GridSpec(standard_basis(1), (3,), ((0, 1),)), f.values[6:12])
    assert mixed_norm(f, spec) == mixed_norm(inner, MixedNormSpec(ExponentVector((2.0,))))
    bad = MixedNormSpec(ExponentVector((2.0,)), region=((-3, 0),))
    with pytest.raises(InvalidArgumentError, match="outside grid"):
        mixed_norm(f, bad)


def test_permutation_changes_mixed_but_not_pure():
    vals = np.array([[1.0, 0.0], [0.0, 1.0]])
    f = field_on_cells(vals)
    p_mixed = ExponentVector((1.0, np.inf))
    fwd = mixed_norm(f, MixedNormSpec(p_mixed, permutation=(0, 1)))
    rev = mixed_norm(f, MixedNormSpec(p_mixed, permutation=(1, 0)))
    # inner sup then outer sum sees each row peak: total 2; the other order
    # sums columns first (each 1) then takes the sup: total 1
    assert (fwd, rev) == (1.0, 2.0)
    p_pure = ExponentVector((2.0, 2.0))
    same_a = mixed_norm(f, MixedNormSpec(p_pure, permutation=(0, 1)))
    same_b = mixed_norm(f, MixedNormSpec(p_pure, permutation=(1, 0)))
    assert same_a == pytest.approx(same_b, rel=1e-14)


def test_reduce_axes_rejects_stale_axis():
    arr = np.abs(np.random.default_rng(0).normal(size=(3, 4)))
    with pytest.raises(InvalidArgumentError, match="reduced twice or out of range"):
        reduce_axes(arr, [(1, 2.0, 1.0), (1, 1.0, 1.0)])


@given(
    p=st.sampled_from([0.5, 1.0, 2.0]),
    q=st.sampled_from([0.5, 1.0, np.inf]),
    seed=st.integers(min_value=0, max_value=10**6),
)
@settings(max_examples=60, deadline=None)
def test_quasi_triangle_inequality(p, q, seed):
    """norm(f+g)^r <= norm(f)^r + norm(g)^r at the spec's own order r."""
    rng = np.random.default_rng(seed)
    g = GridSpec(standard_basis(2), (2, 2), ((0, 1), (0, 1)))
    f1 = SampledField(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    f2 = SampledField(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    rep = quasi_triangle_check(f1, f2, MixedNormSpec(ExponentVector((p, q))))
    assert rep["lhs"] <= rep["rhs"] * (1.0 + 1e-12)


@given(seed=st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_single_cell_norm_monotone_in_p(seed):
    """On one cell the sample measure is a probability, so p -> norm rises."""
    rng = np.random.default_rng(seed)
    g = GridSpec(standard_basis(1), (16,), ((0, 0),))
    f = SampledField(g, rng.normal(size=g.shape))
    ps = [0.5, 1.0, 2.0, 4.0, np.inf]
    norms = [mixed_norm(f, MixedNormSpec(ExponentVector((p,)))) for p in ps]
    for a, b in zip(norms, norms[1:]):
        assert a <= b * (1.0 + 1e-12)


def test_discrete_norm_counts_lattice_points():
    a = LatticeSeq(standard_basis(1), (-2,), np.ones(5))
    assert discrete_mixed_norm(a, ExponentVector((1.0,))) == pytest.approx(5.0)
    assert discrete_mixed_norm(a, ExponentVector((2.0,))) == pytest.approx(np.sqrt(5.0))
    assert discrete_mixed_norm(a, ExponentVector((np.inf,))) == 1.0


def test_discrete_norm_weight_uses_physical_points():
    # lattice of the doubled basis: index j sits at 2j, so the weight sees 2j
    b = scaled_basis([2.0])
    a = LatticeSeq(b, (0,), np.ones(3))
    w = polynomial_weight(2.0, 1)
    got = discrete_mixed_norm(a, ExponentVector((1.0,)), weight=w)
    expected = sum(1.0 + (2.0 * j) ** 2 for j in range(3))
    assert got == pytest.approx(expected, rel=1e-14)


def test_pc_extension_matches_sequence_norm():
    rng = np.random.default_rng(9)
    vals = rng.normal(size=(3, 4))
    a = LatticeSeq(standard_basis(2), (-1, 0), vals)
    f = a.pc_extension((4, 2))
    assert f.grid.ranges == ((-1, 1), (0, 3))
    # piecewise-constant extension: the integral norm equals the sum norm
    p = ExponentVector((1.0, 2.0))
    assert mixed_norm(f, MixedNormSpec(p)) == pytest.approx(
        discrete_mixed_norm(a, p), rel=1e-13
    )


def test_compensated_sum_matches_fsum():
    import math

    a = np.array([1.0] + [1e-16] * 10)
    running = 0.0
    for x in a:
        running += x
    assert running == 1.0  # the naive accumulator drops every small addend
    assert float(compensated_sum(a, 0)) == math.fsum(a)
    stacked = np.stack([a, np.ones(11)], axis=1)
    assert np.array_equal(compensated_sum(stacked, 0), [math.fsum(a), 11.0])


def test_spec_json_round_trip():
    spec = MixedNormSpec(
        ExponentVector((0.5, np.inf)),
        weight=polynomial_weight(1.0, 2),
        permutation=(1, 0),
        region=((0, 2), (-1, 1)),
    )
    back = MixedNormSpec.from_json(spec.to_json())
    assert back.exponents == spec.exponents
    assert back.permutation == (1, 0)
    assert back.region == ((0, 2), (-1, 1))
    with pytest.raises(ValidationError, match="needs 'exponents'"):
        MixedNormSpec.from_json({})
    with pytest.raises(ValidationError, match="not a permutation"):
        MixedNormSpec(ExponentVector((1.0, 1.0)), permutation=(0, 0))
