"""Exponent vectors for mixed (quasi-)norms.

Entries live in (0, inf].  Values below one are allowed everywhere; they are
what makes the norms quasi-norms, and the order min(1, min_k q_k) is the
exponent for which the r-power triangle inequality holds.

String forms accepted: "inf" (any case, also "Infinity"), plain decimals,
and fractions like "1/2".  Serialization uses "inf" or the shortest decimal
that round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError, ValidationError

__all__ = ["ExponentVector", "parse_exponent", "format_exponent"]


def parse_exponent(token) -> float:
    if isinstance(token, (int, float)):
        q = float(token)
    elif isinstance(token, str):
        t = token.strip().lower()
        if t in ("inf", "infinity", "+inf"):
            return np.inf
        try:
            q = float(Fraction(t)) if "/" in t else float(t)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"cannot parse exponent {token!r}")
    else:
        raise ValidationError(f"cannot parse exponent {token!r}")
    if not (q > 0):
        raise ValidationError(f"exponents must be positive, got {token!r}")
    return q


def format_exponent(q: float) -> str:
    if np.isinf(q):
        return "inf"
    if float(q).is_integer():
        return str(int(q))
    return repr(float(q))


@dataclass(frozen=True)
class ExponentVector:
    """An ordered tuple of exponents, one per integration axis."""

    values: tuple

    def __post_init__(self):
        vals = tuple(parse_exponent(v) for v in self.values)
        if not vals:
            raise ValidationError("exponent vector must not be empty")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, *values) -> "ExponentVector":
        return cls(tuple(values))

    @classmethod
    def broadcast(cls, value, dim: int) -> "ExponentVector":
        return cls((value,) * dim)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    @property
    def order(self) -> float:
        """min(1, min_k q_k), the exactness order of the triangle inequality."""
        return min(1.0, min(self.values))

    @property
    def is_finite(self) -> bool:
        return all(np.isfinite(q) for q in self.values)

    def check_length(self, dim: int, what: str = "exponent vector"):
        if len(self.values) != dim:
            raise InvalidArgumentError(
                f"{what} has {len(self.values)} entries for {dim} axes"
            )

    def concat(self, other: "ExponentVector") -> "ExponentVector":
        return ExponentVector(self.values + other.values)

    def to_json(self) -> list:
        return [format_exponent(q) for q in self.values]

    @classmethod
    def from_json(cls, data) -> "ExponentVector":
        if isinstance(data, (int, float, str)):
            data = [data]
        return cls(tuple(data))

    def __str__(self) -> str:
        return "(" + ",".join(format_exponent(q) for q in self.values) + ")"
