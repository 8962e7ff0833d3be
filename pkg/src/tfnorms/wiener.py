"""Wiener amalgam norms: local cell norms with a discrete global component.

The plain norm first takes, on every lattice cell, the local mixed norm with
exponents r (coordinate measure, weight 1), multiplies by a lattice weight
at the cell's lattice point, and then applies a discrete mixed norm across
cells.  The two phase-space variants differ in how the frequency variable
is handled:

  var1: for each frequency node, the plain Wiener norm in x of the weighted
        field; then a function norm over the frequency axes.
  var2: first the function norm in frequency for each x sample; then the
        plain Wiener norm in x of the result.

Both keep the x/xi split of the field's axes; cell geometry enters through
the grid's basis.  Embedding chains between these norms are evaluated by
embedding_check, which follows the inequalities' own reduction orders, so
the first inequality of each chain holds with constant one by construction
of the discretization (midpoint samples, unit coordinate cell volume).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, PreconditionError, ResolutionError
from .exponents import ExponentVector
from .fields import SampledField
from .mixed import LatticeSeq, MixedNormSpec, discrete_mixed_norm, mixed_norm, reduce_axes
from .weights import Weight

__all__ = [
    "WienerSpec",
    "cell_local_norms",
    "wiener_norm",
    "wiener_var1",
    "wiener_var2",
    "script_norms",
    "embedding_check",
    "local_control_sequence",
]


@dataclass(frozen=True)
class WienerSpec:
    """Configuration of a Wiener amalgam norm.

    local: cell exponents r (one per cell axis: all axes for plain, the x
    axes for var1/var2).  global_exponents and global_weight make up the
    discrete component.  phase_weight is the weight multiplied into a
    phase-space field before anything else (the F_omega of the variants).
    companion is the function-norm spec for the frequency variable of
    var1/var2 (exponents, optional weight; measured in grid coordinates).
    """

    local: ExponentVector
    global_exponents: ExponentVector
    global_weight: Weight | None = None
    variant: str = "plain"
    phase_weight: Weight | None = None
    companion: MixedNormSpec | None = None
    basis: object = None
    global_permutation: tuple | None = None

    def __post_init__(self):
        if self.variant not in ("plain", "var1", "var2"):
            raise InvalidArgumentError(f"unknown Wiener variant {self.variant!r}")
        if self.variant != "plain" and self.companion is None:
            raise InvalidArgumentError(f"{self.variant} needs a companion norm spec")


def cell_local_norms(values: np.ndarray, grid, axes, exponents: ExponentVector) -> np.ndarray:
    """Local mixed norms per cell along the chosen axes.

    Splits each listed axis into (cell, within-cell) parts and reduces the
    within-cell parts with the given exponents, coordinate measure 1/m,
    lowest axis innermost.  Returns an array whose listed axes now index
    cells; other axes pass through.  values must be nonnegative.
    """
    axes = sorted(int(a) for a in axes)
    if len(exponents) != len(axes):
        raise InvalidArgumentError("one local exponent per cell axis required")
    shape = []
    sub_positions = {}
    for k in range(values.ndim):
        if k in axes:
            span = grid.spans[k]
            shape.extend([span, grid.m[k]])
            sub_positions[k] = len(shape) - 1
        else:
            shape.append(values.shape[k])
    arr = values.reshape(shape)
    plan = [
        (sub_positions[a], exponents[i], 1.0 / grid.m[a]) for i, a in enumerate(axes)
    ]
    return reduce_axes(arr, plan)


def _check_cell_basis(f: SampledField, basis):
    if basis is not None and not basis.close_to(f.grid.basis):
        raise ResolutionError(
            "field grid is not commensurate with the requested cell basis"
        )


def wiener_norm(f: SampledField, spec: WienerSpec) -> float:
    """Plain amalgam norm: local L^r per cell, weighted discrete norm across cells."""
    if spec.variant != "plain":
        raise InvalidArgumentError("wiener_norm evaluates the plain variant")
    _check_cell_basis(f, spec.basis)
    d = f.dim
    spec.local.check_length(d, "local exponent vector")
    spec.global_exponents.check_length(d, "global exponent vector")
    vals = np.abs(f.values)
    if spec.phase_weight is not None and not spec.phase_weight.is_constant:
        vals = vals * spec.phase_weight(f.grid.points)
    h = cell_local_norms(vals, f.grid, range(d), spec.local)
    seq = LatticeSeq(f.grid.basis, tuple(lo for lo, _ in f.grid.ranges), h)
    return discrete_mixed_norm(
        seq, spec.global_exponents, spec.global_weight, spec.global_permutation
    )


def _split_dims(F: SampledField) -> int:
    if F.dim % 2 != 0:
        raise InvalidArgumentError("phase-space field must have even dimension")
    return F.dim // 2


def _weighted_abs(F: SampledField, phase_weight) -> np.ndarray:
    vals = np.abs(F.values)
    if phase_weight is not None and not phase_weight.is_constant:
        if phase_weight.dim != F.dim:
            raise InvalidArgumentError("phase weight dimension must match the field")
        vals = vals * phase_weight(F.grid.points)
    return vals


def _xi_weight_array(F: SampledField, d: int, weight) -> np.ndarray | None:
    if weight is None or weight.is_constant:
        return None
    mesh = np.meshgrid(*[F.grid.axis_coords(d + k) for k in range(d)], indexing="ij")
    u = np.stack(mesh, axis=-1)
    xi_pts = u @ F.grid.basis.matrix[d:, d:].T
    return weight(xi_pts)


def _companion_plan(F: SampledField, d: int, companion: MixedNormSpec):
    companion.exponents.check_length(d, "companion exponent vector")
    return [(d + k, companion.exponents[k], F.grid.coord_steps[d + k]) for k in range(d)]


def wiener_var1(F: SampledField, spec: WienerSpec) -> float:
    """Frequency-outside variant: x-amalgam per frequency node, then the companion norm."""
    if spec.variant != "var1":
        raise InvalidArgumentError("wiener_var1 evaluates the var1 variant")
    _check_cell_basis(F, spec.basis)
    d = _split_dims(F)
    spec.local.check_length(d, "local exponent vector")
    spec.global_exponents.check_length(d, "global exponent vector")
    vals = _weighted_abs(F, spec.phase_weight)
    w = _xi_weight_array(F, d, spec.companion.weight)
    if w is not None:
        vals = vals * w
    h = cell_local_norms(vals, F.grid, range(d), spec.local)
    order = spec.global_permutation or tuple(range(d))
    plan = [(k, spec.global_exponents[k], 1.0) for k in order]
    plan += _companion_plan(F, d, spec.companion)
    return float(reduce_axes(h, plan))


def wiener_var2(F: SampledField, spec: WienerSpec) -> float:
    """Frequency-inside variant: companion norm per x sample, then the x-amalgam."""
    if spec.variant != "var2":
        raise InvalidArgumentError("wiener_var2 evaluates the var2 variant")
    _check_cell_basis(F, spec.basis)
    d = _split_dims(F)
    spec.local.check_length(d, "local exponent vector")
    spec.global_exponents.check_length(d, "global exponent vector")
    vals = _weighted_abs(F, spec.phase_weight)
    w = _xi_weight_array(F, d, spec.companion.weight)
    if w is not None:
        vals = vals * w
    psi = reduce_axes(vals, _companion_plan(F, d, spec.companion))
    h = cell_local_norms(psi, F.grid, range(d), spec.local)
    seq_basis_matrix = F.grid.basis.matrix[:d, :d]
    from .bases import OrderedBasis

    seq = LatticeSeq(
        OrderedBasis(seq_basis_matrix),
        tuple(lo for lo, _ in F.grid.ranges[:d]),
        h,
    )
    return discrete_mixed_norm(
        seq, spec.global_exponents, spec.global_weight, spec.global_permutation
    )


def script_norms(F: SampledField, spec: WienerSpec) -> tuple:
    """The two alternative-modulation values: (var1, var2) with global sup.

    Takes an already computed STFT field; the global component is forced to
    the componentwise sup as the definition requires.
    """
    d = _split_dims(F)
    sup = ExponentVector.broadcast("inf", d)
    m_spec = WienerSpec(
        local=spec.local,
        global_exponents=sup,
        variant="var1",
        phase_weight=spec.phase_weight,
        companion=spec.companion,
        basis=spec.basis,
    )
    w_spec = WienerSpec(
        local=spec.local,
        global_exponents=sup,
        variant="var2",
        phase_weight=spec.phase_weight,
        companion=spec.companion,
        basis=spec.basis,
    )
    return wiener_var1(F, m_spec), wiener_var2(F, w_spec)


def local_control_sequence(f: SampledField, r: float) -> LatticeSeq:
    """a(j) = local L^r norm of f on cell j, as a lattice sequence."""
    rr = ExponentVector.broadcast(r, f.dim)
    h = cell_local_norms(np.abs(f.values), f.grid, range(f.dim), rr)
    return LatticeSeq(f.grid.basis, tuple(lo for lo, _ in f.grid.ranges), h)


def _wiener_2d_value(vals, grid, d, local: ExponentVector, p, q, xi_cells_first: bool) -> float:
    h = cell_local_norms(vals, grid, range(2 * d), local)
    if xi_cells_first:
        order = list(range(d, 2 * d)) + list(range(d))
    else:
        order = list(range(2 * d))
    exps = list(p) + list(q)
    plan = [(k, exps[k], 1.0) for k in order]
    return float(reduce_axes(h, plan))


def embedding_check(
    F: SampledField,
    p: ExponentVector,
    q: ExponentVector,
    r: ExponentVector,
    r1: float,
    r2: float,
    omega: Weight | None = None,
) -> dict:
    """Evaluate both three-norm embedding chains on one phase-space field.

    Chain 1 relates the (r, sup)-local amalgam with x-cells reduced first to
    the var1 norm and then to the scalar-r1 amalgam; chain 2 relates the
    sup-local amalgam with frequency cells reduced first to the var2 norm
    and then to the scalar-r2 amalgam on the same cell geometry.  The cell
    decomposition must be self-dual so that the dual-lattice cells of the
    second chain coincide with the primal ones.

    Returns {"chain1": (left, mid, right), "chain2": (left, mid, right)}.
    The first inequality of each chain (mid <= left) is exact here; the
    second is a measured constant, reported not asserted.
    """
    d = _split_dims(F)
    p.check_length(d, "p")
    q.check_length(d, "q")
    r.check_length(d, "r")
    min_pqr = min(min(p), min(q), min(r), 1.0)
    if r1 > min_pqr + 1e-15:
        raise PreconditionError(
            f"chain 1 needs r1 <= min(1, p, q, r) = {min_pqr}, got r1 = {r1}"
        )
    if r2 > min(q) + 1e-15:
        raise PreconditionError(f"chain 2 needs r2 <= min(q) = {min(q)}, got r2 = {r2}")
    from .bases import phase_split

    if not phase_split(F.grid.basis).is_self_dual:
        raise PreconditionError(
            "chain 2 norms live on dual-basis cells; use a self-dual cell basis "
            "so both chains share the grid"
        )
    vals = _weighted_abs(F, omega)

    inf_d = ("inf",) * d
    local_r_inf = ExponentVector(tuple(r) + inf_d)
    left1 = _wiener_2d_value(vals, F.grid, d, local_r_inf, p, q, xi_cells_first=False)
    h_x = cell_local_norms(vals, F.grid, range(d), r)
    mid1_plan = [(k, p[k], 1.0) for k in range(d)] + [
        (d + k, q[k], F.grid.coord_steps[d + k]) for k in range(d)
    ]
    mid1 = float(reduce_axes(h_x, mid1_plan))
    local_r1 = ExponentVector.broadcast(r1, 2 * d)
    right1 = _wiener_2d_value(vals, F.grid, d, local_r1, p, q, xi_cells_first=False)

    local_inf = ExponentVector(inf_d + inf_d)
    left2 = _wiener_2d_value(vals, F.grid, d, local_inf, p, q, xi_cells_first=True)
    psi = reduce_axes(
        vals, [(d + k, q[k], F.grid.coord_steps[d + k]) for k in range(d)]
    )
    h2 = cell_local_norms(psi, F.grid, range(d), ExponentVector.broadcast(r2, d))
    mid2 = float(reduce_axes(h2, [(k, p[k], 1.0) for k in range(d)]))
    local_r2 = ExponentVector.broadcast(r2, 2 * d)
    right2 = _wiener_2d_value(vals, F.grid, d, local_r2, p, q, xi_cells_first=True)

    return {"chain1": (left1, mid1, right1), "chain2": (left2, mid2, right2)}
