"""Ordered bases of R^d, their lattices, cells, and dual bases.

A basis is stored as the matrix whose columns are the basis vectors, so the
coordinate map is x = T @ u and the lattice it generates is T @ Z^d.  The
fundamental cell is the half-open set T @ [0,1)^d; every x then lies in
exactly one translated cell, indexed by an integer vector.

The dual basis is normalized so that <e_j, e'_k> = 2 pi delta_jk, i.e.
T' = 2 pi inv(T).T.  Phase-space bases on R^(2d) are products E1 x E2 and are
handled by PhaseSplitBasis, which also certifies the "E2 is a permutation of
the dual of E1" relation used throughout the lattice studies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as _iproduct

import numpy as np

from .errors import InvalidArgumentError, SingularityError, ValidationError

__all__ = [
    "OrderedBasis",
    "PhaseSplitBasis",
    "dual_basis",
    "refine",
    "standard_basis",
    "scaled_basis",
]

# Relative condition threshold beyond which a basis is treated as singular.
_COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class OrderedBasis:
    """An ordered basis of R^d, columns of ``matrix`` in order."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"basis matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("basis matrix has non-finite entries")
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] == 0.0 or sv[0] / sv[-1] > _COND_LIMIT:
            raise SingularityError(
                f"basis matrix is singular or ill-conditioned (cond ~ {sv[0] / max(sv[-1], 1e-300):.3g})"
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.linalg.inv(self.matrix)
        inv.flags.writeable = False
        return inv

    @cached_property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def cell_volume(self) -> float:
        """Volume of the fundamental cell T [0,1)^d."""
        return abs(self.det)

    def vector(self, j: int) -> np.ndarray:
        return self.matrix[:, j]

    def to_coords(self, x: np.ndarray) -> np.ndarray:
        """Basis coordinates of points x (last axis is the R^d component)."""
        x = np.asarray(x, dtype=float)
        return x @ self.inverse.T

    def from_coords(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return u @ self.matrix.T

    def cell_index(self, x: np.ndarray) -> np.ndarray:
        """Integer index j of the half-open cell containing each point x.

        x lies in T (j + [0,1)^d).  Vectorized over leading axes of x.
        """
        return np.floor(self.to_coords(x)).astype(int)

    def lattice_points(self, ranges) -> np.ndarray:
        """Physical lattice points T j for j in the given index box.

        ranges is a sequence of inclusive (lo, hi) integer pairs, one per
        axis.  Returns an array of shape (n_1, ..., n_d, d).
        """
        ranges = list(ranges)
        if len(ranges) != self.dim:
            raise InvalidArgumentError("one index range per basis axis required")
        axes = [np.arange(lo, hi + 1) for lo, hi in ranges]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).astype(float)
        return self.from_coords(grid)

    def to_json(self) -> dict:
        return {"columns": [list(map(float, self.matrix[:, j])) for j in range(self.dim)]}

    @classmethod
    def from_json(cls, data: dict) -> "OrderedBasis":
        try:
            cols = data["columns"]
        except (KeyError, TypeError):
            raise ValidationError("basis JSON needs a 'columns' field")
        m = np.asarray(cols, dtype=float).T
        return cls(m)

    def close_to(self, other: "OrderedBasis", tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.matrix).max(), 1.0)
        return self.dim == other.dim and np.allclose(
            self.matrix, other.matrix, rtol=0.0, atol=tol * scale
        )


def standard_basis(d: int) -> OrderedBasis:
    return OrderedBasis(np.eye(d))


def scaled_basis(scales) -> OrderedBasis:
    """Diagonal basis with the given per-axis scales."""
    return OrderedBasis(np.diag(np.asarray(scales, dtype=float)))


def dual_basis(basis: OrderedBasis) -> OrderedBasis:
    """The 2 pi normalized dual: <e_j, e'_k> = 2 pi delta_jk."""
    return OrderedBasis(2.0 * np.pi * basis.inverse.T)


def refine(basis: OrderedBasis, n: int) -> OrderedBasis:
    """Shrink every basis vector by the integer factor n (lattice refinement)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgumentError(f"refinement factor must be a positive integer, got {n!r}")
    return OrderedBasis(basis.matrix / float(n))


def _signed_permutation_from(g: np.ndarray, tol: float) -> np.ndarray | None:
    """Return the signed permutation matrix g is (within tol), else None."""
    d = g.shape[0]
    p = np.zeros_like(g)
    used = set()
    for i in range(d):
        row = g[i]
        k = int(np.argmax(np.abs(row)))
        if k in used:
            return None
        s = np.sign(row[k])
        if abs(abs(row[k]) - 1.0) > tol:
            return None
        rest = np.delete(row, k)
        if rest.size and np.max(np.abs(rest)) > tol:
            return None
        used.add(k)
        p[i, k] = s
    return p


@dataclass(frozen=True, eq=False)
class PhaseSplitBasis:
    """A basis of R^(2d) split as E1 x E2 (x-part columns first, then xi-part).

    The product basis matrix is block diagonal: diag(T_{E1}, T_{E2}).  The
    split records whether E2 is a (signed) permutation of the dual of E1,
    which is the compatibility condition the phase-space norms rely on.
    """

    x_basis: OrderedBasis
    xi_basis: OrderedBasis
    permutation: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.x_basis.dim != self.xi_basis.dim:
            raise InvalidArgumentError("x and xi parts must have equal dimension")
        d = self.x_basis.dim
        # E2 is a signed permutation of dual(E1) iff E1^T E2 = 2 pi P with P a
        # signed permutation matrix.  Checking the Gram matrix directly avoids
        # the d! column-matching search.
        gram = self.x_basis.matrix.T @ self.xi_basis.matrix / (2.0 * np.pi)
        p = _signed_permutation_from(gram, tol=1e-9)
        if p is None:
            raise ValidationError(
                "xi basis is not a signed permutation of the dual of the x basis"
            )
        p.flags.writeable = False
        object.__setattr__(self, "permutation", p)

    @property
    def dim(self) -> int:
        """Dimension d of each factor (the product lives on R^(2d))."""
        return self.x_basis.dim

    @cached_property
    def product(self) -> OrderedBasis:
        d = self.dim
        m = np.zeros((2 * d, 2 * d))
        m[:d, :d] = self.x_basis.matrix
        m[d:, d:] = self.xi_basis.matrix
        return OrderedBasis(m)

    @property
    def is_self_dual(self) -> bool:
        """True when both factors equal their own duals (T = sqrt(2 pi) O)."""
        return self.x_basis.close_to(dual_basis(self.x_basis)) and self.xi_basis.close_to(
            dual_basis(self.xi_basis)
        )


def phase_split(basis: OrderedBasis) -> PhaseSplitBasis:
    """Split a block-diagonal basis of R^(2d) into its x and xi factors.

    Raises ValidationError when the matrix is not block diagonal with two
    d x d blocks or when the blocks fail the permuted-dual relation.
    """
    n = basis.dim
    if n % 2 != 0:
        raise ValidationError("phase split needs an even-dimensional basis")
    d = n // 2
    m = basis.matrix
    off = max(np.abs(m[:d, d:]).max(), np.abs(m[d:, :d]).max())
    if off > 1e-12 * max(np.abs(m).max(), 1.0):
        raise ValidationError("basis does not decompose into x and xi blocks")
    return PhaseSplitBasis(OrderedBasis(m[:d, :d]), OrderedBasis(m[d:, d:]))


def self_dual_scale() -> float:
    """The scale s with scaled_basis([s]*d) equal to its own dual basis."""
    return float(np.sqrt(2.0 * np.pi))


def integer_points_in_ball(d: int, radius: float) -> np.ndarray:
    """All j in Z^d with |j| <= radius, ordered lexicographically."""
    r = int(np.floor(radius))
    pts = [j for j in _iproduct(range(-r, r + 1), repeat=d) if np.dot(j, j) <= radius**2]
    return np.asarray(pts, dtype=int).reshape(len(pts), d)
