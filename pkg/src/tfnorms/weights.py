"""Weight functions on R^d and empirical moderateness certificates.

The closed family is: the constant weight, polynomial weights <x>^s with
<x> = sqrt(1 + |x|^2), exponential weights e^(s|x|), and finite products of
those.  All are strictly positive, so they can divide.

A weight omega is v-moderate when omega(x+y) <= C v(x) omega(y).  That
inequality is what lets lattice translations act boundedly on the weighted
spaces, so the certificate machinery here is used as a precondition check by
the norm studies rather than as a proof: it reports the largest ratio found
on a finite grid of point pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, RangeError, ValidationError

__all__ = [
    "Weight",
    "constant_weight",
    "polynomial_weight",
    "exponential_weight",
    "product_weight",
    "theta_rho",
    "certify_moderate",
    "exp_envelope",
    "ModeratenessCertificate",
    "EnvelopeReport",
]

_FORMS = ("constant", "polynomial", "exponential", "product")


@dataclass(frozen=True)
class Weight:
    """A weight from the closed family, evaluated on points of shape (..., d)."""

    form: str
    dim: int
    params: tuple = ()
    factors: tuple = ()

    def __post_init__(self):
        if self.form not in _FORMS:
            raise ValidationError(f"unknown weight form {self.form!r}")
        if self.dim < 1:
            raise ValidationError("weight dimension must be >= 1")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if not all(np.isfinite(self.params)):
            raise ValidationError("weight parameters must be finite")
        if self.form in ("polynomial", "exponential") and len(self.params) != 1:
            raise ValidationError(f"{self.form} weight takes exactly one parameter")
        if self.form == "product":
            if not self.factors:
                raise ValidationError("product weight needs at least one factor")
            for f in self.factors:
                if f.dim != self.dim:
                    raise InvalidArgumentError("product factors must share the dimension")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise InvalidArgumentError(
                f"points have dimension {x.shape[-1]}, weight expects {self.dim}"
            )
        if self.form == "constant":
            return np.ones(x.shape[:-1])
        if self.form == "product":
            out = np.ones(x.shape[:-1])
            for f in self.factors:
                out = out * f(x)
            return out
        r = np.sqrt(np.sum(x * x, axis=-1))
        (s,) = self.params
        with np.errstate(over="ignore"):
            if self.form == "polynomial":
                out = (1.0 + r * r) ** (s / 2.0)
            else:
                out = np.exp(s * r)
        if not np.all(np.isfinite(out)):
            bad = np.argwhere(~np.isfinite(np.atleast_1d(out)))[0]
            raise RangeError(f"weight overflow at grid position {tuple(bad)}")
        return out

    @property
    def is_constant(self) -> bool:
        if self.form == "constant":
            return True
        if self.form == "product":
            return all(f.is_constant for f in self.factors)
        return self.params[0] == 0.0

    def to_json(self) -> dict:
        if self.form == "product":
            return {
                "form": "product",
                "dim": self.dim,
                "factors": [f.to_json() for f in self.factors],
            }
        return {"form": self.form, "dim": self.dim, "params": list(self.params)}

    @classmethod
    def from_json(cls, data: dict) -> "Weight":
        try:
            form = data["form"]
            dim = int(data["dim"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError("weight JSON needs 'form' and 'dim'")
        if form == "product":
            factors = tuple(cls.from_json(f) for f in data.get("factors", []))
            return cls("product", dim, (), factors)
        return cls(form, dim, tuple(data.get("params", ())))


def constant_weight(dim: int) -> Weight:
    return Weight("constant", dim)


def polynomial_weight(s: float, dim: int) -> Weight:
    return Weight("polynomial", dim, (s,))


def exponential_weight(s: float, dim: int) -> Weight:
    return Weight("exponential", dim, (s,))


def product_weight(*factors: Weight) -> Weight:
    if not factors:
        raise InvalidArgumentError("product_weight needs factors")
    return Weight("product", factors[0].dim, (), tuple(factors))


def theta_rho(v: Weight, r: float, d: int, strict: bool = False) -> Weight:
    """Attach the bracket power that compensates a quasi-norm order r.

    Returns v * <.>^rho with rho = 2 d (1/min(1,r) - 1), plus one when
    strict is requested.  For r >= 1 and strict=False this is v itself.
    """
    if not (r > 0):
        raise InvalidArgumentError("order r must be positive")
    r_eff = min(1.0, float(r))
    rho = 2.0 * d * (1.0 / r_eff - 1.0)
    if strict:
        rho += 1.0
    if rho == 0.0:
        return v
    return product_weight(v, polynomial_weight(rho, v.dim))


@dataclass(frozen=True)
class ModeratenessCertificate:
    """Largest omega(x+y) / (v(x) omega(y)) found over grid point pairs."""

    constant: float
    grid_radius: float
    grid_points: int
    worst_x: tuple
    worst_y: tuple

    def satisfied(self, bound: float) -> bool:
        return self.constant <= bound


def _grid_points(dim: int, radius: float, per_axis: int, cap: int = 1500) -> np.ndarray:
    axes = [np.linspace(-radius, radius, per_axis)] * dim
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    if len(pts) > cap:
        rng = np.random.default_rng(0)
        keep = rng.choice(len(pts), size=cap, replace=False)
        keep.sort()
        pts = pts[keep]
    return pts


def certify_moderate(
    omega: Weight, v: Weight, radius: float = 8.0, per_axis: int = 17
) -> ModeratenessCertificate:
    """Empirically certify omega(x+y) <= C v(x) omega(y) on a grid.

    Scans all pairs (x, y) from a uniform grid in [-radius, radius]^d (a
    seeded subsample when the full grid would be too large) and records the
    maximal ratio together with the pair attaining it.  Overflow inside the
    weight evaluation surfaces as RangeError.
    """
    if omega.dim != v.dim:
        raise InvalidArgumentError("weight and companion must share the dimension")
    pts = _grid_points(omega.dim, radius, per_axis)
    n = len(pts)
    vx = v(pts)
    wy = omega(pts)
    best = -np.inf
    bi = bj = 0
    block = max(1, int(2e6) // max(n, 1))
    for start in range(0, n, block):
        xs = pts[start : start + block]
        sums = xs[:, None, :] + pts[None, :, :]
        ratio = omega(sums) / (vx[start : start + block, None] * wy[None, :])
        k = int(np.argmax(ratio))
        i, j = divmod(k, n)
        if ratio[i, j] > best:
            best = float(ratio[i, j])
            bi, bj = start + i, j
    return ModeratenessCertificate(
        constant=best,
        grid_radius=radius,
        grid_points=n,
        worst_x=tuple(pts[bi]),
        worst_y=tuple(pts[bj]),
    )


@dataclass(frozen=True)
class EnvelopeReport:
    """Empirical envelope omega(x) <= constant * exp(rate |x|) on the scan grid."""

    rate: float
    constant: float
    grid_radius: float


def exp_envelope(omega: Weight, radius: float = 8.0, per_axis: int = 33) -> EnvelopeReport:
    """Smallest grid-certified exponential envelope of a weight.

    The constant is the weight's maximum over the unit ball portion of the
    grid; the rate is the largest log(omega/constant)/|x| outside it.
    """
    pts = _grid_points(omega.dim, radius, per_axis, cap=5000)
    vals = omega(pts)
    r = np.sqrt(np.sum(pts * pts, axis=-1))
    inner = r <= 1.0
    c = float(max(1.0, vals[inner].max() if inner.any() else 1.0))
    outer = ~inner
    if outer.any():
        rate = float(np.max(np.log(vals[outer] / c) / r[outer]))
        rate = max(0.0, rate)
    else:
        rate = 0.0
    return EnvelopeReport(rate=rate, constant=c, grid_radius=radius)


def restrict_weight_to_axes(omega: Weight, keep: Sequence[int], dim: int) -> Weight:
    """Weight on the kept axes obtained by zeroing the dropped coordinates.

    For the closed family this is again a member of the family with the same
    parameters (the bracket and the euclidean norm only see the kept block
    when the others vanish), so the restriction is taken literally.
    """
    if omega.form == "product":
        return Weight("product", len(keep), (), tuple(
            restrict_weight_to_axes(f, keep, dim) for f in omega.factors
        ))
    return Weight(omega.form, len(keep), omega.params)
