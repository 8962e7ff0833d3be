"""Mixed (quasi-)norms of sampled fields and of sequences on lattices.

The continuous norm works in basis coordinates: integrating axis k uses the
coordinate step 1/m_k and no Jacobian.  Norms of a field over a basis E are
therefore norms of the coordinate representative, which is also what makes
the discrete norm of a sequence equal the continuous norm of its
piecewise-constant extension with no stray determinant factor.

Axes are reduced innermost first, axis 0 by default.  A permutation changes
the reduction order only; the pairing of axis k with exponent q_k is fixed.
Exponents below one use compensated power sums, since those norms feed
ratio checks with tolerances near machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bases import OrderedBasis
from .errors import InvalidArgumentError, ValidationError
from .exponents import ExponentVector
from .fields import GridSpec, SampledField
from .weights import Weight

__all__ = [
    "MixedNormSpec",
    "LatticeSeq",
    "mixed_norm",
    "discrete_mixed_norm",
    "reduce_axes",
    "compensated_sum",
    "quasi_triangle_check",
]


def compensated_sum(a: np.ndarray, axis: int) -> np.ndarray:
    """Kahan summation along one axis."""
    a = np.moveaxis(np.asarray(a, dtype=float), axis, 0)
    s = np.zeros(a.shape[1:])
    c = np.zeros(a.shape[1:])
    for x in a:
        y = x - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def _reduce_one(arr: np.ndarray, axis: int, q: float, delta: float) -> np.ndarray:
    """One iterated-norm step over nonnegative data."""
    if np.isinf(q):
        return np.max(arr, axis=axis)
    p = arr**q
    ps = compensated_sum(p, axis) if q < 1.0 else np.sum(p, axis=axis)
    return (ps * delta) ** (1.0 / q)


def reduce_axes(arr: np.ndarray, plan) -> np.ndarray:
    """Apply iterated norm steps (axis, exponent, delta) in the given order.

    Axes are numbered in the original array; axes not named in the plan
    survive into the result.  arr must be nonnegative.
    """
    remaining = list(range(arr.ndim))
    out = arr
    for axis, q, delta in plan:
        try:
            pos = remaining.index(axis)
        except ValueError:
            raise InvalidArgumentError(f"axis {axis} reduced twice or out of range")
        out = _reduce_one(out, pos, q, delta)
        remaining.pop(pos)
    return out


@dataclass(frozen=True)
class MixedNormSpec:
    """What to compute: exponents per axis, optional weight, order, region.

    permutation lists the axes in reduction order (innermost first);
    region restricts to an inclusive per-axis cell range before reducing,
    which is the zero-extension restriction.
    """

    exponents: ExponentVector
    weight: Weight | None = None
    basis: OrderedBasis | None = None
    permutation: tuple | None = None
    region: tuple | None = None

    def __post_init__(self):
        if self.permutation is not None:
            p = tuple(int(v) for v in self.permutation)
            if sorted(p) != list(range(len(self.exponents))):
                raise ValidationError(f"permutation {p} is not a permutation of the axes")
            object.__setattr__(self, "permutation", p)
        if self.region is not None:
            object.__setattr__(
                self, "region", tuple((int(lo), int(hi)) for lo, hi in self.region)
            )

    def order(self) -> float:
        return self.exponents.order

    def to_json(self) -> dict:
        out = {"exponents": self.exponents.to_json()}
        if self.weight is not None:
            out["weight"] = self.weight.to_json()
        if self.basis is not None:
            out["basis"] = self.basis.to_json()
        if self.permutation is not None:
            out["permutation"] = list(self.permutation)
        if self.region is not None:
            out["region"] = [list(r) for r in self.region]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "MixedNormSpec":
        try:
            exps = ExponentVector.from_json(data["exponents"])
        except (KeyError, TypeError):
            raise ValidationError("norm spec JSON needs 'exponents'")
        return cls(
            exponents=exps,
            weight=Weight.from_json(data["weight"]) if "weight" in data else None,
            basis=OrderedBasis.from_json(data["basis"]) if "basis" in data else None,
            permutation=tuple(data["permutation"]) if "permutation" in data else None,
            region=tuple(tuple(r) for r in data["region"]) if "region" in data else None,
        )


def _region_slices(grid: GridSpec, region) -> tuple:
    out = []
    for k, (lo, hi) in enumerate(region):
        glo, ghi = grid.ranges[k]
        if lo < glo or hi > ghi or hi < lo:
            raise InvalidArgumentError(
                f"region axis {k} cell range ({lo},{hi}) outside grid ({glo},{ghi})"
            )
        out.append(slice((lo - glo) * grid.m[k], (hi - glo + 1) * grid.m[k]))
    return tuple(out)


def mixed_norm(f: SampledField, spec: MixedNormSpec) -> float:
    """Iterated coordinate-measure norm of a sampled field."""
    d = f.dim
    spec.exponents.check_length(d, "exponent vector")
    if spec.basis is not None and not spec.basis.close_to(f.grid.basis):
        raise InvalidArgumentError("norm spec basis differs from the field's grid basis")
    vals = np.abs(f.values)
    if spec.weight is not None and not spec.weight.is_constant:
        if spec.weight.dim != d:
            raise InvalidArgumentError("weight dimension does not match the field")
        vals = vals * spec.weight(f.grid.points)
    if spec.region is not None:
        if len(spec.region) != d:
            raise InvalidArgumentError("region needs one cell range per axis")
        vals = vals[_region_slices(f.grid, spec.region)]
    scale = float(vals.max()) if vals.size else 0.0
    if scale == 0.0:
        return 0.0
    vals = vals / scale
    order = spec.permutation if spec.permutation is not None else tuple(range(d))
    plan = [(k, spec.exponents[k], f.grid.coord_steps[k]) for k in order]
    return float(reduce_axes(vals, plan)) * scale


@dataclass(frozen=True, eq=False)
class LatticeSeq:
    """Finitely supported values on the lattice of a basis.

    values[i1, ..., id] sits at lattice index offset + (i1, ..., id).
    """

    basis: OrderedBasis
    offset: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if not np.iscomplexobj(v):
            v = v.astype(complex)
        if v.ndim != self.basis.dim:
            raise InvalidArgumentError("sequence array rank must equal the basis dimension")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "offset", tuple(int(o) for o in self.offset))

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def index_ranges(self) -> tuple:
        return tuple(
            (o, o + n - 1) for o, n in zip(self.offset, self.values.shape)
        )

    @cached_property
    def points(self) -> np.ndarray:
        """Physical lattice positions, shape (*values.shape, d)."""
        axes = [np.arange(o, o + n) for o, n in zip(self.offset, self.values.shape)]
        idx = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).astype(float)
        return self.basis.from_coords(idx)

    def pc_extension(self, m) -> SampledField:
        """Piecewise-constant field equal to values[j] on cell j."""
        m = tuple(int(v) for v in (m if np.iterable(m) else (m,) * self.dim))
        vals = self.values
        for k, mk in enumerate(m):
            vals = np.repeat(vals, mk, axis=k)
        grid = GridSpec(self.basis, m, self.index_ranges)
        return SampledField(grid, vals)


def discrete_mixed_norm(
    a: LatticeSeq,
    exponents: ExponentVector,
    weight: Weight | None = None,
    permutation: tuple | None = None,
) -> float:
    """Iterated sequence norm, weight evaluated at physical lattice points."""
    exponents.check_length(a.dim, "exponent vector")
    vals = np.abs(a.values)
    if weight is not None and not weight.is_constant:
        if weight.dim != a.dim:
            raise InvalidArgumentError("weight dimension does not match the lattice")
        vals = vals * weight(a.points)
    scale = float(vals.max()) if vals.size else 0.0
    if scale == 0.0:
        return 0.0
    vals = vals / scale
    order = permutation if permutation is not None else tuple(range(a.dim))
    if sorted(order) != list(range(a.dim)):
        raise ValidationError(f"permutation {order} is not a permutation of the axes")
    plan = [(k, exponents[k], 1.0) for k in order]
    return float(reduce_axes(vals, plan)) * scale


def quasi_triangle_check(f: SampledField, g: SampledField, spec: MixedNormSpec) -> dict:
    """Evaluate the r-power triangle inequality data for the pair (f, g).

    Returns the three norms and the order r; the inequality asserts
    norm(f+g)^r <= norm(f)^r + norm(g)^r.
    """
    if not f.grid.same_as(g.grid):
        raise InvalidArgumentError("fields must share a grid")
    r = spec.order()
    nf = mixed_norm(f, spec)
    ng = mixed_norm(g, spec)
    ns = mixed_norm(f.with_values(f.values + g.values), spec)
    return {
        "order": r,
        "norm_sum": ns,
        "norm_f": nf,
        "norm_g": ng,
        "lhs": ns**r,
        "rhs": nf**r + ng**r,
    }
