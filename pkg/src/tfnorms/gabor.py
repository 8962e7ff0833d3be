"""Gabor frames on a finite cyclic model, plus semidiscrete convolution.

Everything here lives on Z_L: atoms are cyclic shifts by multiples of a and
modulations by multiples of b (both dividing L), so frame questions reduce
to finite linear algebra and every identity can be checked to rounding
error.  The frame operator is assembled as a dense matrix; the canonical
dual window is computed independently by a Jacobi-preconditioned conjugate
gradient solve so the two routes can be compared.

The discrete transform uses the same unitary-angular prefactor as the
continuous one.  In this normalization the window-change bound is

    |V_{phi0} f| <= (2pi)^{d/2} * sum_lambda |V_phi f(lambda)| a(w - lambda)

with a(z) = |V_psi phi0(-z)| and psi the canonical dual on the (refined)
lattice; the sign of the exponent is fixed by how the expansion
coefficients relate to transform samples, and the inequality is exact on
Z_L up to the kernel truncation.

semidiscrete_convolution also covers sampled fields on continuous grids
(lattice shifts by whole cells), which is what the Young-type estimate
checks consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DefinitenessError,
    InvalidArgumentError,
    PreconditionError,
    ResolutionError,
)
from .exponents import ExponentVector
from .fields import GridSpec, SampledField
from .mixed import LatticeSeq, MixedNormSpec, discrete_mixed_norm, mixed_norm
from .bases import standard_basis

__all__ = [
    "GaborSystem",
    "analysis",
    "synthesis",
    "frame_operator",
    "frame_bounds",
    "is_frame",
    "canonical_dual",
    "discrete_stft",
    "semidiscrete_convolution",
    "young_estimate_check",
    "window_change_domination",
    "min_frame_refinement",
    "frame_report",
]

EIG_TOL = 1e-12
COND_LIMIT = 1e8
CG_TOL = 1e-10
KERNEL_TRUNC = 1e-12


@dataclass(frozen=True, eq=False)
class GaborSystem:
    """Cyclic Gabor system: shifts by a, modulations by b, on Z_length."""

    length: int
    a: int
    b: int
    window: np.ndarray

    def __post_init__(self):
        if self.length <= 0 or self.a <= 0 or self.b <= 0:
            raise InvalidArgumentError("length and lattice parameters must be positive")
        if self.length % self.a or self.length % self.b:
            raise InvalidArgumentError(
                f"lattice parameters ({self.a}, {self.b}) must divide the length {self.length}"
            )
        w = np.asarray(self.window, dtype=complex)
        if w.shape != (self.length,):
            raise InvalidArgumentError("window must be a vector of the model length")
        object.__setattr__(self, "window", w)

    @property
    def n_time(self) -> int:
        return self.length // self.a

    @property
    def n_freq(self) -> int:
        return self.length // self.b

    @property
    def n_atoms(self) -> int:
        return self.n_time * self.n_freq

    @property
    def oversampling(self) -> float:
        return self.length / (self.a * self.b)

    def atom(self, k: int, l: int) -> np.ndarray:
        n = np.arange(self.length)
        return np.roll(self.window, self.a * k) * np.exp(
            2j * np.pi * self.b * l * n / self.length
        )

    @cached_property
    def atom_matrix(self) -> np.ndarray:
        """All atoms as rows, time index major."""
        L = self.length
        shifts = np.stack([np.roll(self.window, self.a * k) for k in range(self.n_time)])
        mods = np.exp(
            2j * np.pi * self.b * np.outer(np.arange(self.n_freq), np.arange(L)) / L
        )
        return (shifts[:, None, :] * mods[None, :, :]).reshape(self.n_atoms, L)

    def refined(self, n: int) -> "GaborSystem":
        """Densify the lattice by n along both axes (n must divide a and b)."""
        if n <= 0 or self.a % n or self.b % n:
            raise InvalidArgumentError(
                f"refinement {n} must divide the lattice parameters ({self.a}, {self.b})"
            )
        return GaborSystem(self.length, self.a // n, self.b // n, self.window)

    def window_field(self) -> SampledField:
        """The window as a sampled field, for the binary container format."""
        grid = GridSpec(standard_basis(1), (1,), ((0, self.length - 1),))
        return SampledField(grid, self.window, "signal", {"model_length": self.length})


def periodized_gaussian(length: int) -> np.ndarray:
    """Unit-norm Gaussian centered on the cyclic group, the stock test window."""
    n = np.arange(length)
    centered = ((n + length // 2) % length) - length // 2
    w = np.exp(-np.pi * centered.astype(float) ** 2 / length)
    return w / np.linalg.norm(w)


def analysis(f: np.ndarray, G: GaborSystem) -> np.ndarray:
    """Inner products against every atom, shape (n_time, n_freq).

    Plain sums over Z_length; no measure factor is applied, and the
    convention's (2pi)^{-d/2} belongs to the transform, not to these
    coefficients.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != (G.length,):
        raise InvalidArgumentError(
            f"signal length {f.shape} does not match the model length {G.length}"
        )
    rows = np.stack(
        [f * np.conj(np.roll(G.window, G.a * k)) for k in range(G.n_time)]
    )
    return np.fft.fft(rows, axis=1)[:, :: G.b]


def synthesis(coeffs: np.ndarray, G: GaborSystem) -> np.ndarray:
    """Adjoint of analysis: weighted sum of atoms."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (G.n_time, G.n_freq):
        raise InvalidArgumentError("coefficient array shape does not match the system")
    period = G.n_freq
    z = np.fft.ifft(coeffs, axis=1) * period
    z_full = np.tile(z, (1, G.b))
    out = np.zeros(G.length, dtype=complex)
    for k in range(G.n_time):
        out += z_full[k] * np.roll(G.window, G.a * k)
    return out


def frame_operator(G: GaborSystem) -> np.ndarray:
    """S = synthesis after analysis, as a dense Hermitian matrix."""
    A = G.atom_matrix
    return A.T @ np.conj(A)


def frame_bounds(G: GaborSystem) -> tuple:
    """(lower, upper, condition) from the frame operator's spectrum."""
    eigs = np.linalg.eigvalsh(frame_operator(G))
    lo = float(max(eigs[0], 0.0))
    hi = float(eigs[-1])
    cond = hi / lo if lo > EIG_TOL * max(hi, 1.0) else np.inf
    return lo, hi, cond


def is_frame(G: GaborSystem) -> bool:
    lo, hi, _ = frame_bounds(G)
    return lo > EIG_TOL * max(hi, 1.0)


def _jacobi_diagonal(G: GaborSystem) -> np.ndarray:
    # S(n, n) = (L / b) * sum_k |w(n - a k)|^2, from summing |modulations|^2.
    acc = np.zeros(G.length)
    for k in range(G.n_time):
        acc += np.abs(np.roll(G.window, G.a * k)) ** 2
    return G.n_freq * acc


def canonical_dual(G: GaborSystem) -> np.ndarray:
    """Dual window S^{-1} w by preconditioned conjugate gradients.

    Uses the fast analysis/synthesis application of S, so the result can be
    cross-checked against the dense-matrix route.  Refuses non-frames and
    systems conditioned worse than COND_LIMIT.
    """
    lo, hi, cond = frame_bounds(G)
    if not lo > EIG_TOL * max(hi, 1.0):
        raise DefinitenessError(
            f"not a frame: min eigenvalue {lo:.3e} against max {hi:.3e}"
        )
    if cond > COND_LIMIT:
        raise DefinitenessError(
            f"frame operator condition {cond:.3e} exceeds {COND_LIMIT:.0e}"
        )

    def apply_s(v):
        return synthesis(analysis(v, G), G)

    diag = _jacobi_diagonal(G)
    if np.any(diag <= 0):
        raise DefinitenessError("frame operator has a vanishing diagonal entry")
    b = G.window
    x = np.zeros_like(b)
    r = b - apply_s(x)
    z = r / diag
    p = z.copy()
    rz = np.vdot(r, z)
    bnorm = np.linalg.norm(b)
    for _ in range(10 * G.length):
        if np.linalg.norm(r) <= CG_TOL * bnorm:
            break
        sp = apply_s(p)
        alpha = rz / np.vdot(p, sp)
        x = x + alpha * p
        r = r - alpha * sp
        if np.linalg.norm(r) <= CG_TOL * bnorm:
            break
        z = r / diag
        rz_new = np.vdot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    else:
        raise DefinitenessError("dual-window solve did not reach the residual target")
    return x


def discrete_stft(f: np.ndarray, window: np.ndarray) -> np.ndarray:
    """Full-grid transform on Z_L x Z_L with the unitary-angular prefactor."""
    f = np.asarray(f, dtype=complex)
    window = np.asarray(window, dtype=complex)
    L = f.shape[0]
    if window.shape != (L,):
        raise InvalidArgumentError("window and signal lengths differ")
    rows = np.stack([f * np.conj(np.roll(window, u)) for u in range(L)])
    return (2.0 * np.pi) ** (-0.5) * np.fft.fft(rows, axis=1)


def semidiscrete_convolution(
    seq: LatticeSeq, f: SampledField, periodic_axes=()
) -> SampledField:
    """(a * f)(x) = sum_j a(j) f(x - T j) for a lattice sequence a.

    Shifts must be whole grid cells (the sequence's basis equals the field's).
    Along axes listed in periodic_axes the field is treated as one full
    period per its box and shifts wrap; other axes extend the output box to
    hold every translate.
    """
    if not seq.basis.close_to(f.grid.basis):
        raise ResolutionError("lattice shifts are not commensurate with the grid cells")
    d = f.dim
    periodic_axes = set(int(ax) for ax in periodic_axes)
    out_ranges = []
    for k in range(d):
        flo, fhi = f.grid.ranges[k]
        slo, shi = seq.index_ranges[k]
        if k in periodic_axes:
            out_ranges.append((flo, fhi))
        else:
            out_ranges.append((flo + slo, fhi + shi))
    out_grid = GridSpec(f.grid.basis, f.grid.m, tuple(out_ranges))
    out = np.zeros(out_grid.shape, dtype=complex)
    for idx in np.ndindex(*seq.values.shape):
        amp = seq.values[idx]
        if amp == 0:
            continue
        j = tuple(seq.index_ranges[k][0] + idx[k] for k in range(d))
        block = f.values
        slices = []
        for k in range(d):
            if k in periodic_axes:
                block = np.roll(block, j[k] * f.grid.m[k], axis=k)
                slices.append(slice(None))
            else:
                start = (j[k] - seq.index_ranges[k][0]) * f.grid.m[k]
                slices.append(slice(start, start + f.values.shape[k]))
        out[tuple(slices)] += amp * block
    meta = dict(f.metadata)
    meta["semidiscrete_terms"] = int(np.count_nonzero(seq.values))
    return SampledField(out_grid, out, f.codomain, meta)


def young_estimate_check(
    seq: LatticeSeq,
    f: SampledField,
    p: ExponentVector,
    r: ExponentVector,
    v=None,
    omega=None,
    periodic_axes=(),
) -> dict:
    """Measured constant in ||a*f||_p <= C ||a||_r ||f||_p.

    Requires r_k <= min(1, p_1, ..., p_k) axis by axis, the hypothesis under
    which the estimate holds; the failing inequality is named.  Weights: v
    on the sequence, omega on both field norms.  Norms use the grid's
    coordinate measure, so C is unit-free.
    """
    d = f.dim
    p.check_length(d, "p")
    r.check_length(d, "r")
    for k in range(d):
        if r[k] > 1.0 + 1e-15:
            raise PreconditionError(
                f"estimate needs r_{k + 1} <= 1, got r_{k + 1} = {r[k]}"
            )
        for m in range(k + 1):
            if r[k] > p[m] + 1e-15:
                raise PreconditionError(
                    f"estimate needs r_{k + 1} <= p_{m + 1}, got "
                    f"r_{k + 1} = {r[k]} > p_{m + 1} = {p[m]}"
                )
    conv = semidiscrete_convolution(seq, f, periodic_axes)
    lhs = mixed_norm(conv, MixedNormSpec(exponents=p, weight=omega))
    a_norm = discrete_mixed_norm(seq, r, v)
    f_norm = mixed_norm(f, MixedNormSpec(exponents=p, weight=omega))
    denom = a_norm * f_norm
    return {
        "lhs": lhs,
        "a_norm": a_norm,
        "f_norm": f_norm,
        "constant": lhs / denom if denom > 0 else np.inf,
    }


def window_change_domination(
    f: np.ndarray, phi: np.ndarray, phi0: np.ndarray, n: int, a: int, b: int
) -> dict:
    """Check |V_phi0 f| <= (2pi)^{1/2} (|V_phi f| on the lattice) * kernel.

    The kernel is a(z) = |V_psi phi0(-z)| with psi the canonical dual of phi
    on the n-fold refined lattice, truncated below KERNEL_TRUNC of its max.
    Both sides are evaluated on the full Z_L x Z_L grid; returns the largest
    signed gap lhs - rhs (nonpositive means the bound held everywhere) plus
    the gap relative to the peak of the left side.
    """
    f = np.asarray(f, dtype=complex)
    L = f.shape[0]
    G = GaborSystem(L, a, b, phi).refined(n)
    psi = canonical_dual(G)

    lhs = np.abs(discrete_stft(f, phi0))
    F = np.abs(discrete_stft(f, phi))
    A = np.abs(discrete_stft(phi0, psi))
    # a(z) = A(-z) on the cyclic group: reverse both axes then realign 0.
    kernel = np.roll(np.flip(A, axis=(0, 1)), shift=(1, 1), axis=(0, 1))
    peak = kernel.max()
    if peak > 0:
        kernel = np.where(kernel >= KERNEL_TRUNC * peak, kernel, 0.0)

    rhs = np.zeros_like(lhs)
    for k in range(G.n_time):
        for l in range(G.n_freq):
            amp = F[G.a * k, G.b * l]
            if amp == 0.0:
                continue
            rhs += amp * np.roll(kernel, shift=(G.a * k, G.b * l), axis=(0, 1))
    rhs *= (2.0 * np.pi) ** 0.5
    gap = lhs - rhs
    defect = float(gap.max())
    scale = float(lhs.max())
    return {
        "defect": defect,
        "defect_rel": defect / scale if scale > 0 else 0.0,
        "lhs_max": scale,
        "lattice": (G.a, G.b),
    }


def min_frame_refinement(G: GaborSystem, n_cap: int = 8) -> int:
    """Smallest refinement n (dividing a and b) whose system is a frame."""
    for n in range(1, n_cap + 1):
        if G.a % n or G.b % n:
            continue
        if is_frame(G.refined(n)):
            return n
    raise DefinitenessError(
        f"no refinement up to {n_cap} produced a frame (lattice {G.a}, {G.b})"
    )


def frame_report(G: GaborSystem, n_cap: int = 8) -> dict:
    """Frame bounds, conditioning, and the smallest frame-producing refinement."""
    lo, hi, cond = frame_bounds(G)
    report = {
        "A": lo,
        "B": hi,
        "condition": cond if np.isfinite(cond) else None,
        "n_min": None,
    }
    try:
        report["n_min"] = min_frame_refinement(G, n_cap)
    except DefinitenessError:
        pass
    return report
