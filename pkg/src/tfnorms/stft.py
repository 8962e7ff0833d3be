"""Short-time Fourier transforms on phase-space grids.

Convention, fixed package-wide and recorded in field metadata:

    V_phi f(x, xi) = (2 pi)^(-d/2) Int f(t) conj(phi(t - x)) e^(-i<t,xi>) dt .

Two evaluation routes exist.  The quadrature route integrates over the
signal's own sample grid and works for any window; it requires the time and
phase grids to be axis-aligned (diagonal bases) so the oscillatory kernel
factorizes per axis.  The trigonometric route is exact for finite frequency
combs: a character e^(i<alpha,t>) contributes

    c_alpha e^(-i<x, xi - alpha>) Phi(xi - alpha),  Phi(eta) = conj(phi^(-eta)),

so the whole transform is a short sum of analytically known bumps.  The two
routes agreeing on synthesized polynomials is one of the package's standing
cross-checks.

Phase-space fields put the d configuration axes first, then the d frequency
axes.  metadata["x_period_cells"] records, per x axis, how many grid cells
make one period of |V| (0 when not periodic); the modulation norms use it
to skip truncation checks along periodic axes.
"""

from __future__ import annotations

from math import pi

import numpy as np

from .errors import (
    AliasingError,
    InvalidArgumentError,
    PreconditionError,
    ResolutionError,
)
from .fields import GridSpec, SampledField
from .windows import Window

__all__ = ["StftField", "stft", "stft_at", "stft_trigpoly", "subharmonic_check"]

# A phase-space field is an ordinary SampledField whose metadata carries the
# window description and the transform convention.
StftField = SampledField

CONVENTION = "unitary-angular"


def _diag_or_raise(basis, what: str) -> np.ndarray:
    m = basis.matrix
    d = np.diag(np.diag(m))
    if not np.allclose(m, d, rtol=0.0, atol=1e-12 * max(np.abs(m).max(), 1.0)):
        raise InvalidArgumentError(f"{what} must be axis-aligned (diagonal basis)")
    return np.diag(m).copy()


def _window_values(window: Window, pts: np.ndarray) -> np.ndarray:
    """Window values at physical points, including the sampled case."""
    if window.kind != "sampled":
        return window(pts)
    wf = window.samples
    if not isinstance(wf, SampledField):
        raise InvalidArgumentError(
            "sampled windows need a SampledField value table for quadrature STFTs"
        )
    coords = wf.grid.basis.to_coords(pts)
    out = np.zeros(pts.shape[:-1], dtype=complex)
    idx = []
    valid = np.ones(pts.shape[:-1], dtype=bool)
    for k in range(wf.grid.dim):
        lo, _ = wf.grid.ranges[k]
        i = np.rint((coords[..., k] - lo) * wf.grid.m[k] - 0.5).astype(int)
        valid &= (i >= 0) & (i < wf.grid.shape[k])
        idx.append(np.clip(i, 0, wf.grid.shape[k] - 1))
    out[valid] = wf.values[tuple(ix[valid] for ix in idx)]
    return out


def _conj_window_at(window: Window, pts: np.ndarray) -> np.ndarray:
    return np.conj(_window_values(window, pts))


def _check_resolution(window: Window, t_steps: np.ndarray):
    if window.kind == "sampled":
        return
    step = float(np.max(np.abs(t_steps)))
    if window.sigma < 4.0 * step:
        raise ResolutionError(
            f"window width {window.sigma} is under 4 sample steps ({step}); refine the signal grid"
        )


def _check_aliasing(xi_axes, t_steps):
    for k, (xi, dt) in enumerate(zip(xi_axes, t_steps)):
        limit = 0.5 * pi / abs(dt)
        top = float(np.max(np.abs(xi)))
        if top > limit:
            raise AliasingError(
                f"frequency axis {k} reaches {top:.3g}, above the half-Nyquist limit "
                f"{limit:.3g} of the signal grid"
            )


def stft(
    f: SampledField,
    window: Window,
    grid: GridSpec,
    check: bool = True,
    metadata: dict | None = None,
) -> SampledField:
    """Quadrature STFT of a sampled signal onto a phase-space grid."""
    d = f.dim
    if grid.dim != 2 * d:
        raise InvalidArgumentError(
            f"phase grid dimension {grid.dim} does not match signal dimension {d}"
        )
    t_diag = _diag_or_raise(f.grid.basis, "signal grid")
    p_diag = _diag_or_raise(grid.basis, "phase grid")
    t_axes = [f.grid.axis_coords(k) * t_diag[k] for k in range(d)]
    x_axes = [grid.axis_coords(k) * p_diag[k] for k in range(d)]
    xi_axes = [grid.axis_coords(d + k) * p_diag[d + k] for k in range(d)]
    t_steps = np.array([t_diag[k] / f.grid.m[k] for k in range(d)])
    if check:
        _check_resolution(window, t_steps)
        _check_aliasing(xi_axes, t_steps)

    pref = (2.0 * pi) ** (-d / 2.0) * f.grid.node_volume
    meta = dict(metadata or {})
    meta.update(window=window.describe(), convention=CONVENTION, source="quadrature")

    if d == 1:
        t, x, xi = t_axes[0], x_axes[0], xi_axes[0]
        diffs = (t[None, :] - x[:, None])[..., None]
        amp = _conj_window_at(window, diffs) * f.values[None, :]
        phase = np.exp(-1j * np.outer(t, xi))
        vals = pref * (amp @ phase)
        return SampledField(grid, vals, "phase-space", meta)

    t_mesh = np.stack(np.meshgrid(*t_axes, indexing="ij"), axis=-1)
    phases = [np.exp(-1j * np.outer(t_axes[k], xi_axes[k])) for k in range(d)]
    x_shape = tuple(len(a) for a in x_axes)
    xi_shape = tuple(len(a) for a in xi_axes)
    out = np.empty(x_shape + xi_shape, dtype=complex)
    for idx in np.ndindex(*x_shape):
        xvec = np.array([x_axes[k][idx[k]] for k in range(d)])
        cur = f.values * _conj_window_at(window, t_mesh - xvec)
        for k in range(d):
            cur = np.tensordot(cur, phases[k], axes=([0], [0]))
        out[idx] = pref * cur
    return SampledField(grid, out, "phase-space", meta)


def stft_at(f: SampledField, window: Window, points) -> np.ndarray:
    """STFT values at arbitrary phase-space points (x_1..x_d, xi_1..xi_d).

    Direct quadrature per point; meant for probing closed forms at exact
    locations that need not lie on any grid.
    """
    d = f.dim
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 2 * d:
        raise InvalidArgumentError("probe points must have 2 d components")
    t_pts = f.grid.points.reshape(-1, d)
    fv = f.values.reshape(-1)
    pref = (2.0 * pi) ** (-d / 2.0) * f.grid.node_volume
    out = np.empty(len(pts), dtype=complex)
    for i, z in enumerate(pts):
        x, xi = z[:d], z[d:]
        w = _conj_window_at(window, t_pts - x)
        out[i] = pref * np.sum(fv * w * np.exp(-1j * (t_pts @ xi)))
    return out


def _period_cells(tp, grid: GridSpec, d: int) -> list:
    """Cells per x-period for each configuration axis, 0 when unknown."""
    out = [0] * d
    try:
        pm = tp.basis.matrix
        gm = grid.basis.matrix[:d, :d]
        # Axis k is periodic with n cells when n steps along it land on the
        # period lattice, i.e. n * pm^{-1} gm e_k is an integer vector.
        coeffs = np.linalg.solve(pm, gm)
        for k in range(d):
            col = coeffs[:, k]
            for n in range(1, 65):
                if np.allclose(n * col, np.round(n * col), atol=1e-9):
                    out[k] = n
                    break
    except AttributeError:
        pass
    return out


def stft_trigpoly(
    tp, window: Window, grid: GridSpec, metadata: dict | None = None
) -> SampledField:
    """Exact STFT of a finite frequency comb on a phase-space grid.

    tp provides .frequencies (N, d) physical frequency vectors and
    .coefficient_values (N,) complex amplitudes.  Windows without an analytic
    transform fall back to the quadrature route on the window's own grid.
    """
    if window.kind == "sampled":
        wf = window.samples
        if not isinstance(wf, SampledField):
            raise InvalidArgumentError("sampled window without a grid cannot synthesize")
        from .fields import sample as _sample

        f = _sample(wf.grid, tp.evaluate)
        return stft(f, window, grid, metadata=metadata)

    freqs = np.atleast_2d(np.asarray(tp.frequencies, dtype=float))
    coeffs = np.asarray(tp.coefficient_values, dtype=complex)
    if grid.dim % 2 != 0:
        raise InvalidArgumentError("phase grid must be even-dimensional")
    d = grid.dim // 2
    x_shape = grid.shape[:d]
    xi_shape = grid.shape[d:]
    meta = dict(metadata or {})
    meta.update(window=window.describe(), convention=CONVENTION, source="trigpoly")
    meta.setdefault("x_period_cells", _period_cells(tp, grid, d))
    if coeffs.size == 0:
        return SampledField(grid, np.zeros(x_shape + xi_shape, dtype=complex), "phase-space", meta)
    if freqs.shape[1] != d:
        raise InvalidArgumentError(
            f"frequencies have dimension {freqs.shape[1]}, grid expects {d}"
        )

    # Flatten x and xi nodes separately; every factor is a small dense matrix.
    xg = np.stack(
        np.meshgrid(*[grid.axis_coords(k) for k in range(d)], indexing="ij"), axis=-1
    ).reshape(-1, d)
    x_nodes = xg @ grid.basis.matrix[:d, :d].T
    xig = np.stack(
        np.meshgrid(*[grid.axis_coords(d + k) for k in range(d)], indexing="ij"), axis=-1
    ).reshape(-1, d)
    xi_nodes = xig @ grid.basis.matrix[d:, d:].T

    p0 = np.exp(-1j * (x_nodes @ xi_nodes.T))
    u = np.exp(1j * (x_nodes @ freqs.T))
    eta = xi_nodes[None, :, :] - freqs[:, None, :]
    phi = np.conj(window.fourier(-eta))
    vals = p0 * (u @ (coeffs[:, None] * phi))
    return SampledField(grid, vals.reshape(x_shape + xi_shape), "phase-space", meta)


def subharmonic_check(F: SampledField, p: float, r: float) -> float:
    """Largest |F(X)| / ||F||_{L^p(B_r(X))} over grid nodes.

    Sub-mean-value control of STFT magnitudes holds for Gaussian windows, so
    the field's metadata must name one.  The measured constant depends on the
    window and the radius; the useful property is its stability, checked by
    the test suite, not any universal value.
    """
    wmeta = (F.metadata or {}).get("window", {})
    if wmeta.get("kind") != "gaussian":
        raise PreconditionError("ball-average control is only claimed for Gaussian windows")
    if not (r > 0):
        raise InvalidArgumentError("ball radius must be positive")
    diag = _diag_or_raise(F.grid.basis, "phase grid")
    steps = np.array([abs(diag[k]) / F.grid.m[k] for k in range(F.dim)])
    if r < 8.0 * steps.max():
        raise ResolutionError(
            f"radius {r} spans under 8 samples at step {steps.max():.3g}"
        )
    absF = np.abs(F.values)
    reach = [int(np.floor(r / s)) for s in steps]
    offsets = []
    for off in np.ndindex(*[2 * n + 1 for n in reach]):
        o = np.array(off) - np.array(reach)
        if np.sum((o * steps) ** 2) <= r * r:
            offsets.append(tuple(o))

    def shifted_view(arr, off):
        src = []
        dst = []
        for n, o in zip(arr.shape, off):
            src.append(slice(max(0, o), min(n, n + o)))
            dst.append(slice(max(0, -o), min(n, n - o)))
        return tuple(src), tuple(dst)

    if np.isinf(p):
        local = np.zeros_like(absF)
        for off in offsets:
            src, dst = shifted_view(absF, off)
            np.maximum(local[dst], absF[src], out=local[dst])
    else:
        acc = np.zeros_like(absF)
        powF = absF**p
        for off in offsets:
            src, dst = shifted_view(absF, off)
            acc[dst] += powF[src]
        local = (acc * F.grid.node_volume) ** (1.0 / p)
    mask = local > 0.0
    if not mask.any():
        return 0.0
    return float(np.max(absF[mask] / local[mask]))
