"""Guarded modulation norms and the two-window equivalence study."""

import numpy as np
import pytest

from tfnorms import (
    ExponentVector,
    GridSpec,
    InvalidArgumentError,
    ModSpec,
    SampledField,
    TruncationError,
    build_corpus,
    equivalence_study,
    gaussian_window,
    mod_norm,
    phase_fields,
    sample,
    scaled_basis,
    self_dual_scale,
    standard_basis,
    stft,
)


def gaussian_phase_field(m=8, cells=(-4, 3)):
    t = GridSpec(standard_basis(1), (20,), ((-10, 9),))
    f = sample(t, lambda p: np.pi**-0.25 * np.exp(-0.5 * p[..., 0] ** 2))
    g = GridSpec(standard_basis(2), (m, m), (cells, cells))
    return stft(f, gaussian_window(1.0), g)


def test_moyal_flavor_norm():
    # with the unitary convention the transform is an isometry onto the
    # plane, so the L^2(L^2) mass of the normalized Gaussian pair is one;
    # unit cells make coordinate and physical measure agree here
    F = gaussian_phase_field(m=8, cells=(-10, 9))
    spec = ModSpec("M", ExponentVector((2.0,)), ExponentVector((2.0,)))
    assert mod_norm(F, spec) == pytest.approx(1.0, rel=1e-9)


def test_flavor_exchange_on_separable_magnitude():
    # |V| of the Gaussian pair factorizes in (x, xi), so both reduction
    # orders give the same number for any exponent pair
    F = gaussian_phase_field(m=8, cells=(-10, 9))
    m_spec = ModSpec("M", ExponentVector((1.0,)), ExponentVector((2.0,)))
    w_spec = ModSpec("W", ExponentVector((1.0,)), ExponentVector((2.0,)))
    assert mod_norm(F, m_spec) == pytest.approx(mod_norm(F, w_spec), rel=1e-10)


def test_truncation_guard_fires_on_small_box():
    # a box two cells wide leaves Gaussian mass on the outermost layer
    F = gaussian_phase_field(m=8, cells=(-1, 0))
    spec = ModSpec("M", ExponentVector((2.0,)), ExponentVector((2.0,)))
    with pytest.raises(TruncationError, match="enlarge the phase-space box"):
        mod_norm(F, spec)


def test_guard_tolerance_is_adjustable():
    F = gaussian_phase_field(m=8, cells=(-1, 0))
    lax = ModSpec("M", ExponentVector((2.0,)), ExponentVector((2.0,)), guard_tol=1.0)
    assert mod_norm(F, lax) > 0.0


def test_periodic_axis_skips_guard():
    # comb transforms tag their x axes periodic; the same magnitudes with
    # the tag stripped trip the guard because a comb never decays in x
    window = gaussian_window(1.0)
    entries = [e for e in build_corpus() if e.entry_id == "comb-0"]
    # x cells of width exactly one 2 pi period, unit frequency cells
    phase = GridSpec(scaled_basis([2.0 * np.pi, 1.0]), (8, 8), ((0, 0), (-16, 15)))
    t = GridSpec(standard_basis(1), (20,), ((-10, 9),))
    ((eid, F),) = phase_fields(entries, window, phase, t)
    assert eid == "comb-0"
    assert any(F.metadata["x_period_cells"])
    spec = ModSpec("M", ExponentVector((np.inf,)), ExponentVector((2.0,)))
    val = mod_norm(F, spec)
    assert val > 0.0
    stripped = SampledField(F.grid, F.values, F.codomain, {})
    with pytest.raises(TruncationError):
        mod_norm(stripped, spec)


def test_odd_dimension_rejected():
    g = GridSpec(standard_basis(1), (4,), ((0, 1),))
    f = SampledField(g, np.ones(g.shape))
    spec = ModSpec("M", ExponentVector((2.0,)), ExponentVector((2.0,)))
    with pytest.raises(InvalidArgumentError, match="even dimension"):
        mod_norm(f, spec)
    with pytest.raises(InvalidArgumentError, match="flavor"):
        ModSpec("X", ExponentVector((2.0,)), ExponentVector((2.0,)))


def test_equivalence_study_rows_and_spreads():
    window_a = gaussian_window(1.0)
    window_b = gaussian_window(1.3)
    entries = [e for e in build_corpus() if e.entry_id.startswith("gauss-s1")]
    s = self_dual_scale()
    phase = GridSpec(scaled_basis([s, s]), (8, 8), ((-4, 3), (-4, 3)))
    t = GridSpec(standard_basis(1), (20,), ((-10, 9),))
    fields_a = phase_fields(entries, window_a, phase, t)
    fields_b = phase_fields(entries, window_b, phase, t)
    items = [
        (eid, Fa, Fb) for (eid, Fa), (_, Fb) in zip(fields_a, fields_b)
    ]
    out = equivalence_study(items, p=ExponentVector((2.0, 2.0)), r=0.5, weight=None)
    assert len(out["rows"]) == len(entries)
    for row in out["rows"]:
        assert 0.0 < row["ratio_wr_winf"] <= 1.0 + 1e-12
        assert row["l_norm"] > 0.0
    assert out["spread_wr_winf"] >= 1.0
    assert out["spread_l_winf"] >= 1.0


def test_equivalence_study_rejects_empty():
    with pytest.raises(InvalidArgumentError, match="empty corpus"):
        equivalence_study([], p=ExponentVector((2.0, 2.0)), r=0.5, weight=None)
