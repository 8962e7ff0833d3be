"""Cell-centered sample grids and sampled fields.

A GridSpec places m_k midpoint samples per unit cell along basis axis k,
over an inclusive range of cell indices per axis.  Sample locations on axis
k are lo_k + (i + 1/2) / m_k in basis coordinates; physical positions are
the basis image of those coordinate tuples.  Midpoint sampling is what makes
several of the norm inequalities in this package exact at sample level, so
the placement is part of the contract, not an implementation detail.

Fields store one complex value per grid node, axis k of the value array
matching basis axis k.  Phase-space fields on R^(2d) put the d x-axes first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product as _iproduct

import numpy as np

from .bases import OrderedBasis
from .errors import InvalidArgumentError, RangeError, ValidationError

__all__ = [
    "GridSpec",
    "SampledField",
    "sample",
    "quadrature",
    "restrict",
    "weigh",
    "export_csv",
    "save_binary",
    "load_binary",
]

_BINARY_MAGIC = "tfnorms-field"


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Midpoint sample grid subordinate to a basis cell decomposition."""

    basis: OrderedBasis
    m: tuple
    ranges: tuple

    def __post_init__(self):
        d = self.basis.dim
        m = tuple(int(v) for v in self.m)
        ranges = tuple((int(lo), int(hi)) for lo, hi in self.ranges)
        if len(m) != d or len(ranges) != d:
            raise InvalidArgumentError("need one m and one cell range per basis axis")
        if any(v < 1 for v in m):
            raise InvalidArgumentError("samples per cell must be >= 1")
        if any(hi < lo for lo, hi in ranges):
            raise InvalidArgumentError("empty cell range")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "ranges", ranges)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def spans(self) -> tuple:
        return tuple(hi - lo + 1 for lo, hi in self.ranges)

    @property
    def shape(self) -> tuple:
        return tuple(s * mk for s, mk in zip(self.spans, self.m))

    @property
    def coord_steps(self) -> tuple:
        """Per-axis sample spacing in basis coordinates."""
        return tuple(1.0 / mk for mk in self.m)

    @property
    def node_volume(self) -> float:
        """Physical volume carried by one sample node."""
        vol = self.basis.cell_volume
        for mk in self.m:
            vol /= mk
        return vol

    def axis_coords(self, k: int) -> np.ndarray:
        lo, hi = self.ranges[k]
        n = (hi - lo + 1) * self.m[k]
        return lo + (np.arange(n) + 0.5) / self.m[k]

    @cached_property
    def coords(self) -> tuple:
        return tuple(self.axis_coords(k) for k in range(self.dim))

    @cached_property
    def points(self) -> np.ndarray:
        """Physical sample positions, shape (*shape, d)."""
        mesh = np.meshgrid(*self.coords, indexing="ij")
        u = np.stack(mesh, axis=-1)
        return self.basis.from_coords(u)

    def cell_indices(self):
        """Iterate cell index tuples in lexicographic order."""
        axes = [range(lo, hi + 1) for lo, hi in self.ranges]
        return _iproduct(*axes)

    def cell_slice(self, j) -> tuple:
        """Slices selecting the sample block of cell j."""
        j = tuple(int(v) for v in j)
        out = []
        for k, jk in enumerate(j):
            lo, hi = self.ranges[k]
            if not (lo <= jk <= hi):
                raise RangeError(f"cell {j} outside grid ranges {self.ranges}")
            s = (jk - lo) * self.m[k]
            out.append(slice(s, s + self.m[k]))
        return tuple(out)

    def single_cell(self, j) -> "GridSpec":
        j = tuple(int(v) for v in j)
        return GridSpec(self.basis, self.m, tuple((jk, jk) for jk in j))

    def scaled(self, factor: int) -> "GridSpec":
        """Same cells, factor times more samples per cell on every axis."""
        if factor < 1:
            raise InvalidArgumentError("resolution scale must be >= 1")
        return GridSpec(self.basis, tuple(mk * factor for mk in self.m), self.ranges)

    def same_as(self, other: "GridSpec") -> bool:
        return (
            self.m == other.m
            and self.ranges == other.ranges
            and self.basis.close_to(other.basis)
        )

    def to_json(self) -> dict:
        return {
            "basis": self.basis.to_json(),
            "m": list(self.m),
            "ranges": [list(r) for r in self.ranges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GridSpec":
        try:
            return cls(
                OrderedBasis.from_json(data["basis"]),
                tuple(data["m"]),
                tuple(tuple(r) for r in data["ranges"]),
            )
        except (KeyError, TypeError):
            raise ValidationError("grid JSON needs 'basis', 'm', 'ranges'")


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples on a GridSpec.  codomain tags what the values mean."""

    grid: GridSpec
    values: np.ndarray
    codomain: str = "function"
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if not np.iscomplexobj(v):
            v = v.astype(complex)
        if v.shape != self.grid.shape:
            raise InvalidArgumentError(
                f"values shape {v.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("field values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.grid.dim

    def with_values(self, values: np.ndarray) -> "SampledField":
        return SampledField(self.grid, values, self.codomain, dict(self.metadata))


def sample(grid: GridSpec, fn, codomain: str = "function", metadata: dict | None = None) -> SampledField:
    """Evaluate fn on the grid's physical points.  fn maps (..., d) -> (...)."""
    vals = np.asarray(fn(grid.points))
    return SampledField(grid, vals, codomain, metadata or {})


def quadrature(f: SampledField) -> complex:
    """Physical integral of f by the midpoint rule.

    Accumulates one partial sum per cell, scaled by the node volume, added
    across cells in lexicographic order.  This exact operation order is what
    makes quadrature additive under the cell partition bit for bit: summing
    quadrature(restrict(f, j)) over all j reproduces the same floats.
    """
    vol = f.grid.node_volume
    total = 0.0 + 0.0j
    for j in f.grid.cell_indices():
        block = np.ascontiguousarray(f.values[f.grid.cell_slice(j)])
        total = total + complex(np.sum(block.ravel())) * vol
    return total


def restrict(f: SampledField, j) -> SampledField:
    """The samples of f on cell j, as a field over that single cell."""
    block = np.ascontiguousarray(f.values[f.grid.cell_slice(j)])
    return SampledField(f.grid.single_cell(j), block, f.codomain, dict(f.metadata))


def weigh(f: SampledField, weight, axes=None) -> SampledField:
    """Multiply f by a weight evaluated at its sample points.

    axes selects which point coordinates the weight sees (e.g. the xi block
    of a phase-space field for a frequency weight); default is all of them.
    """
    pts = f.grid.points
    if axes is not None:
        pts = pts[..., list(axes)]
    return f.with_values(f.values * weight(pts))


def export_csv(f: SampledField, path: str):
    """Write one row per node: physical coordinates, then re and im parts."""
    pts = f.grid.points.reshape(-1, f.dim)
    vals = f.values.reshape(-1)
    with open(path, "w") as fh:
        cols = [f"x{k + 1}" for k in range(f.dim)] + ["re", "im"]
        fh.write(",".join(cols) + "\n")
        for p, v in zip(pts, vals):
            row = [repr(float(c)) for c in p] + [repr(float(v.real)), repr(float(v.imag))]
            fh.write(",".join(row) + "\n")


def save_binary(f: SampledField, path: str):
    """Little-endian complex128 dump with a one-line JSON header."""
    header = {
        "format": _BINARY_MAGIC,
        "version": 1,
        "grid": f.grid.to_json(),
        "codomain": f.codomain,
        "dtype": "complex128",
        "byteorder": "little",
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("utf-8"))
        fh.write(np.ascontiguousarray(f.values.astype("<c16")).tobytes())


def weight_aware_radius(weight, sigma: float = 1.0, tail_digits: float = 23.0) -> float:
    """Truncation radius so that Gaussian tails under the weight are negligible.

    The envelope rate r of the weight shifts where the weighted Gaussian
    factor peaks; beyond rate + sigma sqrt(2 tail_digits ln 10) the factor is
    below 10^-tail_digits of its maximum.  Studies size frequency boxes with
    this and then verify the boundary-ring contribution directly.
    """
    from .weights import exp_envelope

    rate = exp_envelope(weight).rate if not weight.is_constant else 0.0
    return rate + sigma * np.sqrt(2.0 * tail_digits * np.log(10.0))


def load_binary(path: str) -> SampledField:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise ValidationError(f"not a field file: {path}")
        if header.get("format") != _BINARY_MAGIC:
            raise ValidationError(f"not a field file: {path}")
        grid = GridSpec.from_json(header["grid"])
        raw = fh.read()
    n = int(np.prod(grid.shape))
    vals = np.frombuffer(raw, dtype="<c16", count=n).reshape(grid.shape)
    return SampledField(grid, vals.astype(complex), header.get("codomain", "function"))
