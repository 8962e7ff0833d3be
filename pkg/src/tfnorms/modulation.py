"""Modulation-type norms of phase-space fields, with a truncation guard.

A phase-space field only covers a box, so any function norm computed from it
is silently a truncated surrogate unless the mass near the box boundary is
negligible.  mod_norm therefore measures the contribution of the outermost
sample layer and refuses (TruncationError) when it exceeds a small fraction
of the total.  Axes along which the field is known to be periodic (the
metadata entry x_period_cells, filled in by the exact comb transform) are
exempt: there the boundary carries the same mass as any other layer and the
box is one or more full periods by construction.

equivalence_study compares, per corpus entry, a modulation-type mixed norm
of one window's transform against Wiener amalgam norms of another window's
transform, reporting the ratio spreads that the norm-equivalence statements
predict to be bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, TruncationError
from .exponents import ExponentVector
from .fields import SampledField
from .mixed import MixedNormSpec, mixed_norm, reduce_axes
from .weights import Weight
from .wiener import WienerSpec, wiener_norm

__all__ = ["ModSpec", "mod_norm", "equivalence_study"]

GUARD_TOL = 1e-8


@dataclass(frozen=True)
class ModSpec:
    """Which modulation-type norm to take.

    flavor "M": inner norm over the configuration axes (exponents p) for
    each frequency node, then the q norm over frequency.  flavor "W": the
    exchanged order.  Both use the grid's coordinate measure.  weight is an
    optional phase-space weight multiplied in first.
    """

    flavor: str
    p: ExponentVector
    q: ExponentVector
    weight: Weight | None = None
    guard_tol: float = GUARD_TOL

    def __post_init__(self):
        if self.flavor not in ("M", "W"):
            raise InvalidArgumentError(f"flavor must be 'M' or 'W', got {self.flavor!r}")


def _plan(spec: ModSpec, grid, d: int):
    px = [(k, spec.p[k], grid.coord_steps[k]) for k in range(d)]
    pxi = [(d + k, spec.q[k], grid.coord_steps[d + k]) for k in range(d)]
    return px + pxi if spec.flavor == "M" else pxi + px


def _boundary_mask(shape, axes) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    for ax in axes:
        sl = [slice(None)] * len(shape)
        sl[ax] = 0
        mask[tuple(sl)] = True
        sl[ax] = shape[ax] - 1
        mask[tuple(sl)] = True
    return mask


def mod_norm(F: SampledField, spec: ModSpec) -> float:
    """Mixed function norm of a phase-space field, guarded against truncation."""
    if F.dim % 2 != 0:
        raise InvalidArgumentError("phase-space field must have even dimension")
    d = F.dim // 2
    spec.p.check_length(d, "p")
    spec.q.check_length(d, "q")
    vals = np.abs(F.values)
    if spec.weight is not None and not spec.weight.is_constant:
        vals = vals * spec.weight(F.grid.points)
    plan = _plan(spec, F.grid, d)
    total = float(reduce_axes(vals, plan))

    period = F.metadata.get("x_period_cells", [0] * d)
    guarded_axes = [k for k in range(d) if not period[k]] + list(range(d, 2 * d))
    if guarded_axes and total > 0.0:
        ring = np.where(_boundary_mask(vals.shape, guarded_axes), vals, 0.0)
        ring_norm = float(reduce_axes(ring, plan))
        if ring_norm > spec.guard_tol * total:
            raise TruncationError(
                "boundary layer holds {:.3e} of the norm (limit {:.1e}); "
                "enlarge the phase-space box".format(ring_norm / total, spec.guard_tol)
            )
    return total


def equivalence_study(
    items,
    p: ExponentVector,
    r,
    weight: Weight | None = None,
) -> dict:
    """Mixed-window norm comparison across a corpus of phase-space fields.

    items: iterable of (field_id, F_a, F_b) where F_a and F_b are transforms
    of the same signal under two windows.  For each item computes the mixed
    L^p norm of F_a and the amalgam norms of F_b with local exponent r and
    local sup, global p.  Returns per-item rows and the max/min spreads of
    the two ratios; bounded spreads are what the equivalence statements
    predict, and their stability under grid refinement is checked elsewhere.
    """
    items = list(items)
    if not items:
        raise InvalidArgumentError("empty corpus")
    rows = []
    for field_id, F_a, F_b in items:
        dim = F_a.dim
        p.check_length(dim, "p")
        l_norm = mixed_norm(F_a, MixedNormSpec(exponents=p, weight=weight))
        w_r = wiener_norm(
            F_b,
            WienerSpec(
                local=ExponentVector.broadcast(r, dim),
                global_exponents=p,
                global_weight=weight,
            ),
        )
        w_inf = wiener_norm(
            F_b,
            WienerSpec(
                local=ExponentVector.broadcast("inf", dim),
                global_exponents=p,
                global_weight=weight,
            ),
        )
        rows.append(
            {
                "field_id": field_id,
                "l_norm": l_norm,
                "w_r": w_r,
                "w_inf": w_inf,
                "ratio_wr_winf": w_r / w_inf if w_inf > 0 else np.inf,
                "ratio_l_winf": l_norm / w_inf if w_inf > 0 else np.inf,
            }
        )

    def spread(key):
        vals = [row[key] for row in rows if np.isfinite(row[key]) and row[key] > 0]
        return max(vals) / min(vals) if vals else np.inf

    return {
        "rows": rows,
        "spread_wr_winf": spread("ratio_wr_winf"),
        "spread_l_winf": spread("ratio_l_winf"),
    }
