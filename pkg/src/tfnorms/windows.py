"""Analysis windows: Gaussians, Hermite functions, and raw samples.

Analytic windows know their own Fourier transform under the unitary
angular-frequency convention

    f^(xi) = (2 pi)^(-d/2) Int f(x) e^(-i<x,xi>) dx ,

which is what the trigonometric fast path of the STFT consumes.  Tensor
products are taken per axis with a single width (and order) shared by all
axes; that covers every window the studies need.

A sampled window is just an index-aligned value table.  It can drive the
quadrature STFT but has no analytic transform, and anything derived from it
is flagged as sample-based in study metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi, sqrt

import numpy as np
from numpy.polynomial import hermite as _herm

from .errors import InvalidArgumentError, ValidationError

__all__ = ["Window", "gaussian_window", "hermite_window", "sampled_window"]


def _hermite_poly(n: int, t: np.ndarray) -> np.ndarray:
    """Physicists' Hermite polynomial H_n."""
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    return _herm.hermval(t, coeffs)


@dataclass(frozen=True, eq=False)
class Window:
    """One analysis window.  kind is 'gaussian', 'hermite', or 'sampled'."""

    kind: str
    dim: int = 1
    sigma: float = 1.0
    order: int = 0
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "hermite", "sampled"):
            raise ValidationError(f"unknown window kind {self.kind!r}")
        if self.kind != "sampled" and not (self.sigma > 0):
            raise ValidationError("window width must be positive")
        if self.kind == "hermite" and self.order < 0:
            raise ValidationError("hermite order must be >= 0")
        if self.kind == "sampled":
            if self.samples is None:
                raise ValidationError("sampled window needs samples")
            object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))

    @property
    def has_transform(self) -> bool:
        return self.kind != "sampled"

    def __call__(self, t) -> np.ndarray:
        """Window values at points of shape (..., dim)."""
        if self.kind == "sampled":
            raise InvalidArgumentError("sampled windows are index tables, not functions")
        t = np.asarray(t, dtype=float)
        if t.shape[-1] != self.dim:
            raise InvalidArgumentError(
                f"points have dimension {t.shape[-1]}, window expects {self.dim}"
            )
        s = self.sigma
        if self.kind == "gaussian":
            c = (s * s * pi) ** (-0.25)
            out = np.ones(t.shape[:-1])
            for k in range(self.dim):
                out = out * (c * np.exp(-t[..., k] ** 2 / (2 * s * s)))
            return out
        n = self.order
        c = 1.0 / sqrt(s) / sqrt(2.0**n * factorial(n) * sqrt(pi))
        out = np.ones(t.shape[:-1])
        for k in range(self.dim):
            u = t[..., k] / s
            out = out * (c * _hermite_poly(n, u) * np.exp(-u * u / 2.0))
        return out

    def fourier(self, xi) -> np.ndarray:
        """Analytic Fourier transform at points of shape (..., dim)."""
        if not self.has_transform:
            raise InvalidArgumentError("sampled windows have no analytic transform")
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.dim:
            raise InvalidArgumentError(
                f"points have dimension {xi.shape[-1]}, window expects {self.dim}"
            )
        s = self.sigma
        if self.kind == "gaussian":
            c = (s * s / pi) ** 0.25
            out = np.ones(xi.shape[:-1], dtype=complex)
            for k in range(self.dim):
                out = out * (c * np.exp(-s * s * xi[..., k] ** 2 / 2.0))
            return out
        # Hermite functions are Fourier eigenfunctions: h_n -> (-i)^n h_n,
        # and the width moves to the reciprocal side.
        n = self.order
        c = sqrt(s) / sqrt(2.0**n * factorial(n) * sqrt(pi))
        out = np.ones(xi.shape[:-1], dtype=complex)
        for k in range(self.dim):
            u = s * xi[..., k]
            out = out * ((-1j) ** n * c * _hermite_poly(n, u) * np.exp(-u * u / 2.0))
        return out

    def l2_norm(self) -> float:
        """Exact L2 norm for analytic windows (they are built normalized)."""
        if self.kind == "sampled":
            raise InvalidArgumentError("no exact norm for sampled windows")
        return 1.0

    def describe(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.kind == "gaussian":
            out["sigma"] = self.sigma
        elif self.kind == "hermite":
            out["sigma"] = self.sigma
            out["order"] = self.order
        else:
            out["n_samples"] = int(self.samples.size)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Window":
        kind = data.get("kind")
        if kind == "gaussian":
            return gaussian_window(float(data.get("sigma", 1.0)), int(data.get("dim", 1)))
        if kind == "hermite":
            return hermite_window(
                int(data.get("order", 0)), float(data.get("sigma", 1.0)), int(data.get("dim", 1))
            )
        raise ValidationError(f"cannot build a window from {data!r}")


def gaussian_window(sigma: float = 1.0, dim: int = 1) -> Window:
    """L2-normalized Gaussian (sigma^2 pi)^(-1/4) exp(-t^2 / (2 sigma^2)) per axis."""
    return Window("gaussian", dim=dim, sigma=sigma)


def hermite_window(order: int, sigma: float = 1.0, dim: int = 1) -> Window:
    """L2-normalized Hermite function of the given order per axis."""
    return Window("hermite", dim=dim, sigma=sigma, order=order)


def sampled_window(samples) -> Window:
    return Window("sampled", samples=np.asarray(samples))
