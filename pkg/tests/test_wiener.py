"""Amalgam norms: local-global splits, variants, and the embedding chains."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfnorms import (
    ExponentVector,
    GridSpec,
    MixedNormSpec,
    PreconditionError,
    ResolutionError,
    SampledField,
    WienerSpec,
    embedding_check,
    gaussian_window,
    local_control_sequence,
    sample,
    scaled_basis,
    script_norms,
    self_dual_scale,
    standard_basis,
    stft,
    weigh,
    wiener_norm,
    wiener_var1,
    wiener_var2,
)
from tfnorms.weights import polynomial_weight


def decay_field(n_cells=12, m=8):
    g = GridSpec(standard_basis(1), (m,), ((0, n_cells - 1),))
    return sample(g, lambda p: np.exp(-p[..., 0]))


def test_sup_l1_amalgam_geometric_oracle():
    # local sup of exp(-x) on cell j is at the first midpoint sample,
    # exp(-(j + 1/(2m))), so the amalgam sums a geometric series exactly
    n, m = 12, 8
    f = decay_field(n, m)
    spec = WienerSpec(ExponentVector(("inf",)), ExponentVector((1.0,)))
    expected = np.exp(-1.0 / (2 * m)) * (1.0 - np.exp(-float(n))) / (1.0 - np.exp(-1.0))
    assert wiener_norm(f, spec) == pytest.approx(expected, rel=1e-14)


def test_cell_measure_is_probability():
    # the within-cell measure integrates to one, so a piecewise-constant
    # field has local norm equal to its level for every exponent r
    g = GridSpec(standard_basis(1), (4,), ((0, 4),))
    f = SampledField(g, np.full(g.shape, 3.0))
    for r in (0.5, 1.0, 2.0, np.inf):
        spec = WienerSpec(ExponentVector((r,)), ExponentVector((1.0,)))
        assert wiener_norm(f, spec) == pytest.approx(15.0, rel=1e-14)


@given(seed=st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_local_exponent_monotone(seed):
    """Probability cell measure makes the amalgam rise with the local exponent."""
    rng = np.random.default_rng(seed)
    g = GridSpec(standard_basis(1), (8,), ((-2, 2),))
    f = SampledField(g, rng.normal(size=g.shape))
    rs = [0.5, 1.0, 2.0, np.inf]
    norms = [
        wiener_norm(f, WienerSpec(ExponentVector((r,)), ExponentVector((1.0,))))
        for r in rs
    ]
    for a, b in zip(norms, norms[1:]):
        assert a <= b * (1.0 + 1e-12)


def test_phase_weight_equals_weighed_field():
    rng = np.random.default_rng(7)
    g = GridSpec(standard_basis(2), (4, 4), ((-1, 1), (0, 2)))
    f = SampledField(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    w = polynomial_weight(1.0, 2)
    spec_w = WienerSpec(
        ExponentVector((2.0, 1.0)), ExponentVector((1.0, 2.0)), phase_weight=w
    )
    spec = WienerSpec(ExponentVector((2.0, 1.0)), ExponentVector((1.0, 2.0)))
    assert wiener_norm(f, spec_w) == pytest.approx(wiener_norm(weigh(f, w), spec), rel=1e-13)


def test_cell_basis_guard():
    f = decay_field()
    spec = WienerSpec(
        ExponentVector(("inf",)),
        ExponentVector((1.0,)),
        basis=scaled_basis([1.5]),
    )
    with pytest.raises(ResolutionError, match="not commensurate"):
        wiener_norm(f, spec)


def phase_field():
    t = GridSpec(standard_basis(1), (20,), ((-10, 9),))
    f = sample(t, lambda p: np.pi**-0.25 * np.exp(-0.5 * p[..., 0] ** 2))
    s = self_dual_scale()
    g = GridSpec(scaled_basis([s, s]), (16, 16), ((-4, 3), (-4, 3)))
    return stft(f, gaussian_window(1.0), g)


def test_variants_agree_on_gaussian_between_bounds():
    # var1 reduces frequency outside, var2 inside; on a nonnegative
    # separable magnitude both factorizations describe the same product,
    # so for the Gaussian pair they come out close
    F = phase_field()
    companion = MixedNormSpec(ExponentVector((2.0,)))
    v1 = wiener_var1(
        F,
        WienerSpec(
            ExponentVector((2.0,)),
            ExponentVector((1.0,)),
            variant="var1",
            companion=companion,
        ),
    )
    v2 = wiener_var2(
        F,
        WienerSpec(
            ExponentVector((2.0,)),
            ExponentVector((1.0,)),
            variant="var2",
            companion=companion,
        ),
    )
    assert v1 > 0 and v2 > 0
    assert v1 == pytest.approx(v2, rel=0.05)
    both = script_norms(
        F,
        WienerSpec(
            ExponentVector((2.0,)),
            ExponentVector(("inf",)),
            variant="var1",
            companion=companion,
        ),
    )
    # script_norms forces the global sup; sups are below the l1 reductions
    assert both[0] <= v1 + 1e-12
    assert both[1] <= v2 + 1e-12


def test_variant_spec_mismatch():
    F = phase_field()
    companion = MixedNormSpec(ExponentVector((2.0,)))
    spec = WienerSpec(
        ExponentVector((2.0,)),
        ExponentVector((1.0,)),
        variant="var2",
        companion=companion,
    )
    with pytest.raises(Exception, match="evaluates the var1 variant"):
        wiener_var1(F, spec)
    with pytest.raises(Exception, match="needs a companion"):
        WienerSpec(ExponentVector((2.0,)), ExponentVector((1.0,)), variant="var1")


def test_local_control_sequence_bounds_integral():
    # cell-wise local norms with r <= 1 control the full integral norm:
    # with the probability cell measure, the r = 1 control is the integral
    rng = np.random.default_rng(11)
    g = GridSpec(standard_basis(1), (8,), ((-2, 2),))
    f = SampledField(g, np.abs(rng.normal(size=g.shape)))
    a = local_control_sequence(f, 1.0)
    assert a.index_ranges == ((-2, 2),)
    total = float(np.sum(np.abs(f.values))) / 8.0
    assert float(np.sum(np.abs(a.values))) == pytest.approx(total, rel=1e-13)
    # with the probability cell measure the local norm rises with r
    a_half = local_control_sequence(f, 0.5)
    assert np.all(np.abs(a_half.values) <= np.abs(a.values) + 1e-12)


def test_embedding_chains_on_gaussian():
    F = phase_field()
    rep = embedding_check(
        F,
        p=ExponentVector((1.0,)),
        q=ExponentVector((1.0,)),
        r=ExponentVector((2.0,)),
        r1=1.0,
        r2=1.0,
    )
    left1, mid1, right1 = rep["chain1"]
    left2, mid2, right2 = rep["chain2"]
    # the first inequality in each chain needs no constant at all
    assert mid1 <= left1 * (1.0 + 1e-12)
    assert mid2 <= left2 * (1.0 + 1e-12)
    assert right1 > 0 and right2 > 0


def test_embedding_preconditions():
    F = phase_field()
    kw = dict(
        p=ExponentVector((1.0,)),
        q=ExponentVector((1.0,)),
        r=ExponentVector((2.0,)),
    )
    with pytest.raises(PreconditionError, match="r1 <= min"):
        embedding_check(F, r1=2.0, r2=1.0, **kw)
    with pytest.raises(PreconditionError, match="r2 <= min"):
        embedding_check(F, r1=1.0, r2=2.0, **kw)
    # unit x-cells against 2 pi frequency cells pair correctly but are not
    # self-dual, and chain 2 needs the self-dual decomposition
    t = GridSpec(standard_basis(1), (20,), ((-10, 9),))
    f = sample(t, lambda p: np.pi**-0.25 * np.exp(-0.5 * p[..., 0] ** 2))
    g = GridSpec(scaled_basis([1.0, 2.0 * np.pi]), (16, 16), ((-4, 3), (-1, 0)))
    F_skew = stft(f, gaussian_window(1.0), g)
    with pytest.raises(PreconditionError, match="self-dual"):
        embedding_check(F_skew, r1=1.0, r2=1.0, **kw)
