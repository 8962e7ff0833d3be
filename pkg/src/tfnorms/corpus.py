"""The bundled signal corpus used by the comparison studies.

Twenty one-dimensional signals: six Gaussians over a small width/center
grid, the first four Hermite functions, four linear chirps under a Gaussian
envelope, and six random frequency combs with five active integer
frequencies each.  The combs double as the periodic-study corpus.

Entries are deterministic: the random amplitudes come from a fixed seed,
and CORPUS_VERSION is bumped whenever anything here changes, so study CSVs
can name the exact corpus they were computed from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bases import scaled_basis
from .errors import InvalidArgumentError
from .fields import GridSpec, SampledField, sample
from .periodic import TrigPolynomial
from .stft import stft, stft_trigpoly
from .windows import Window

__all__ = ["CORPUS_VERSION", "CORPUS_SEED", "CorpusEntry", "build_corpus", "comb_entries", "phase_fields"]

CORPUS_VERSION = 1
CORPUS_SEED = 0x5EED


@dataclass(frozen=True)
class CorpusEntry:
    """One test signal: either a pointwise function or a frequency comb."""

    entry_id: str
    kind: str
    func: object = None
    comb: TrigPolynomial | None = None

    def signal_field(self, t_grid: GridSpec) -> SampledField:
        if self.func is not None:
            return sample(t_grid, self.func, "signal", {"entry": self.entry_id})
        return sample(
            t_grid, lambda pts: self.comb.evaluate(pts), "signal", {"entry": self.entry_id}
        )


def _gaussian_entry(sigma: float, center: float) -> CorpusEntry:
    c = (sigma * sigma * np.pi) ** (-0.25)

    def f(pts):
        t = pts[..., 0] - center
        return c * np.exp(-(t * t) / (2.0 * sigma * sigma))

    return CorpusEntry(f"gauss-s{sigma}-c{center:g}", "gaussian", func=f)


def _hermite_entry(order: int) -> CorpusEntry:
    w = Window("hermite", dim=1, sigma=1.0, order=order)
    return CorpusEntry(f"hermite-{order}", "hermite", func=lambda pts: w(pts))


def _chirp_entry(rate: float) -> CorpusEntry:
    c = np.pi ** (-0.25)

    def f(pts):
        t = pts[..., 0]
        return c * np.exp(-t * t / 2.0) * np.exp(0.5j * rate * t * t)

    return CorpusEntry(f"chirp-{rate:g}", "chirp", func=f)


def comb_entries() -> list:
    """Six random five-term combs on the 2 pi period lattice, fixed seed."""
    rng = np.random.default_rng(CORPUS_SEED)
    basis = scaled_basis([2.0 * np.pi])
    out = []
    for i in range(6):
        freqs = rng.choice(np.arange(-4, 5), size=5, replace=False)
        amps = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        tp = TrigPolynomial(basis, freqs.reshape(-1, 1), amps)
        out.append(CorpusEntry(f"comb-{i}", "comb", comb=tp))
    return out


def build_corpus() -> list:
    entries = []
    for sigma in (0.5, 1.0, 2.0):
        for center in (0.0, 2.0):
            entries.append(_gaussian_entry(sigma, center))
    for order in range(4):
        entries.append(_hermite_entry(order))
    for rate in (0.5, 1.0, 2.0, 3.0):
        entries.append(_chirp_entry(rate))
    entries.extend(comb_entries())
    return entries


def phase_fields(
    entries, window: Window, phase_grid: GridSpec, t_grid: GridSpec
) -> list:
    """(entry_id, field) pairs: each entry transformed onto the phase grid.

    Combs go through the exact comb fast path; sampled signals through the
    quadrature route on t_grid.  Raises on an empty entry list because every
    downstream study does.
    """
    entries = list(entries)
    if not entries:
        raise InvalidArgumentError("empty corpus")
    out = []
    for entry in entries:
        if entry.comb is not None:
            F = stft_trigpoly(entry.comb, window, phase_grid, {"entry": entry.entry_id})
        else:
            F = stft(entry.signal_field(t_grid), window, phase_grid)
        out.append((entry.entry_id, F))
    return out
