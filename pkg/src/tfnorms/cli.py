"""Batch study runner.

Reads a JSON study config, executes the requested computation, and writes
CSV (plus, for some kinds, JSON) reports.  Output is deterministic: rows
are emitted in submission order regardless of --threads, floats are
serialized with repr, and files are written atomically (temp file plus
rename), so two runs of the same config produce identical bytes.

Exit codes: 0 success; 2 for validation, precondition, or range problems
(bad config, violated exponent hypotheses, empty corpus); 3 for resolution,
truncation, or aliasing refusals.  Errors are reported as a JSON object on
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bases import OrderedBasis, scaled_basis, self_dual_scale, standard_basis
from .corpus import build_corpus, phase_fields
from .errors import (
    AliasingError,
    InvalidArgumentError,
    PreconditionError,
    RangeError,
    ResolutionError,
    TfnormsError,
    TruncationError,
    ValidationError,
)
from .exponents import ExponentVector, parse_exponent
from .fields import GridSpec, SampledField, sample, save_binary
from .gabor import (
    GaborSystem,
    analysis,
    canonical_dual,
    frame_report,
    periodized_gaussian,
    semidiscrete_convolution,
    synthesis,
    young_estimate_check,
)
from .mixed import LatticeSeq, MixedNormSpec, mixed_norm
from .modulation import ModSpec, equivalence_study, mod_norm
from .periodic import (
    TrigPolynomial,
    coefficient_norm,
    fourier_coefficients,
    periodic_equivalence_study,
)
from .stft import stft, stft_trigpoly
from .weights import Weight
from .wiener import WienerSpec, embedding_check, wiener_norm
from .windows import Window

__all__ = ["main", "run_config", "validate_config"]

KINDS = (
    "stft",
    "norm",
    "wiener",
    "modnorm",
    "coeffs",
    "equiv-wiener-r",
    "equiv-periodic",
    "embedding-rel1",
    "young",
    "gabor-dual",
)


def _basis_from_json(data) -> OrderedBasis:
    if not isinstance(data, dict):
        raise ValidationError("basis: needs an object with a 'kind' or 'columns'")
    if "kind" not in data:
        return OrderedBasis.from_json(data)
    kind = data["kind"]
    if kind == "standard":
        return standard_basis(int(data["dim"]))
    if kind == "scaled":
        return scaled_basis(data["scales"])
    if kind == "self-dual":
        return scaled_basis([self_dual_scale()] * int(data["dim"]))
    if kind == "columns":
        return OrderedBasis(np.array(data["columns"], dtype=float).T)
    raise ValidationError(f"basis: unknown kind {kind!r}")


def _grid_from_json(data, scale: int) -> GridSpec:
    try:
        basis = _basis_from_json(data["basis"])
        m = tuple(int(v) * scale for v in data["m"])
        ranges = tuple((int(lo), int(hi)) for lo, hi in data["ranges"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError("grid: needs 'basis', 'm', 'ranges'")
    return GridSpec(basis, m, ranges)


def _weight_from_json(data) -> Weight | None:
    if data is None:
        return None
    return Weight.from_json(data)


def _signal_func(spec: dict):
    stype = spec.get("type")
    if stype == "gaussian":
        s = float(spec.get("sigma", 1.0))
        c0 = float(spec.get("center", 0.0))
        amp = (s * s * np.pi) ** (-0.25)
        return lambda pts: amp * np.exp(-((pts[..., 0] - c0) ** 2) / (2 * s * s))
    if stype == "hermite":
        w = Window("hermite", dim=1, sigma=float(spec.get("sigma", 1.0)), order=int(spec["order"]))
        return lambda pts: w(pts)
    if stype == "chirp":
        g = float(spec["rate"])
        amp = np.pi ** (-0.25)
        return lambda pts: amp * np.exp(-pts[..., 0] ** 2 / 2.0) * np.exp(
            0.5j * g * pts[..., 0] ** 2
        )
    raise ValidationError(f"signal: unknown type {spec.get('type')!r}")


def _phase_field(cfg: dict, scale: int) -> SampledField:
    window = Window.from_json(cfg["window"])
    phase_grid = _grid_from_json(cfg["phase_grid"], scale)
    sig = cfg["signal"]
    if sig.get("type") == "comb":
        tp = TrigPolynomial.from_json(sig["comb"])
        return stft_trigpoly(tp, window, phase_grid)
    t_grid = _grid_from_json(cfg["t_grid"], scale)
    f = sample(t_grid, _signal_func(sig), "signal")
    return stft(f, window, phase_grid)


def _corpus_entries(cfg: dict):
    spec = cfg.get("corpus", "bundled")
    entries = build_corpus()
    if spec == "bundled":
        return entries
    if isinstance(spec, dict) and "entries" in spec:
        by_id = {e.entry_id: e for e in entries}
        try:
            return [by_id[name] for name in spec["entries"]]
        except KeyError as exc:
            raise ValidationError(f"corpus: unknown entry {exc.args[0]!r}")
    raise ValidationError("corpus: expected 'bundled' or {'entries': [...]}")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path: str, study_id: str, header, rows):
    lines = [f"# study: {study_id}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: str, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- studies


def _study_stft(cfg, out, name, scale, threads):
    F = _phase_field(cfg, scale)
    d = F.dim
    header = [f"x{k + 1}" for k in range(d)] + ["re", "im"]
    pts = F.grid.points.reshape(-1, d)
    vals = F.values.reshape(-1)
    rows = [
        list(pts[i]) + [vals[i].real, vals[i].imag] for i in range(vals.size)
    ]
    _write_csv(os.path.join(out, name + ".csv"), cfg.get("study_id", name), header, rows)


def _study_norm(cfg, out, name, scale, threads):
    F = _phase_field(cfg, scale)
    spec = MixedNormSpec(
        exponents=ExponentVector.from_json(cfg["exponents"]),
        weight=_weight_from_json(cfg.get("weight")),
        permutation=tuple(cfg["permutation"]) if "permutation" in cfg else None,
    )
    value = mixed_norm(F, spec)
    _write_csv(
        os.path.join(out, name + ".csv"),
        cfg.get("study_id", name),
        ["value"],
        [[value]],
    )


def _study_wiener(cfg, out, name, scale, threads):
    F = _phase_field(cfg, scale)
    spec = WienerSpec(
        local=ExponentVector.from_json(cfg["local"]),
        global_exponents=ExponentVector.from_json(cfg["global"]),
        global_weight=_weight_from_json(cfg.get("weight")),
    )
    value = wiener_norm(F, spec)
    _write_csv(
        os.path.join(out, name + ".csv"),
        cfg.get("study_id", name),
        ["value"],
        [[value]],
    )


def _study_modnorm(cfg, out, name, scale, threads):
    F = _phase_field(cfg, scale)
    spec = ModSpec(
        flavor=cfg.get("flavor", "M"),
        p=ExponentVector.from_json(cfg["p"]),
        q=ExponentVector.from_json(cfg["q"]),
        weight=_weight_from_json(cfg.get("weight")),
    )
    value = mod_norm(F, spec)
    _write_csv(
        os.path.join(out, name + ".csv"),
        cfg.get("study_id", name),
        ["value"],
        [[value]],
    )


def _study_coeffs(cfg, out, name, scale, threads):
    tp = TrigPolynomial.from_json(cfg["comb"])
    d = tp.dim
    m = tuple(int(v) * scale for v in cfg["m"])
    grid = GridSpec(tp.basis, m, ((0, 0),) * d)
    f = sample(grid, lambda pts: tp.evaluate(pts), "signal")
    result = fourier_coefficients(
        f, tp.basis, [(int(lo), int(hi)) for lo, hi in cfg["index_ranges"]]
    )
    header = [f"alpha{k + 1}" for k in range(d)] + ["re", "im"]
    rows = [
        list(map(int, row)) + [c.real, c.imag]
        for row, c in zip(result.indices, result.coefficients)
    ]
    _write_csv(os.path.join(out, name + ".csv"), cfg.get("study_id", name), header, rows)
    if "q" in cfg:
        norm = coefficient_norm(
            result,
            ExponentVector.from_json(cfg["q"]),
            _weight_from_json(cfg.get("weight")),
        )
        _write_json(os.path.join(out, name + ".json"), {"norm": norm})


def _study_equiv_wiener_r(cfg, out, name, scale, threads):
    entries = _corpus_entries(cfg)
    window_a = Window.from_json(cfg["window_a"])
    window_b = Window.from_json(cfg["window_b"])
    phase_grid = _grid_from_json(cfg["phase_grid"], scale)
    t_grid = _grid_from_json(cfg["t_grid"], scale)
    fields_a = phase_fields(entries, window_a, phase_grid, t_grid)
    fields_b = (
        fields_a
        if cfg["window_a"] == cfg["window_b"]
        else phase_fields(entries, window_b, phase_grid, t_grid)
    )
    items = [
        (fid, Fa, Fb) for (fid, Fa), (_, Fb) in zip(fields_a, fields_b)
    ]
    p = ExponentVector.from_json(cfg["p"])
    r = parse_exponent(cfg["r"])
    weight = _weight_from_json(cfg.get("weight"))

    def one(item):
        report = equivalence_study([item], p, r, weight)
        return report["rows"][0]

    rows_out = _map_ordered(one, items, threads)
    header = ["field_id", "l_norm", "w_r", "w_inf", "ratio_wr_winf", "ratio_l_winf"]
    rows = [[row[h] for h in header] for row in rows_out]
    _write_csv(os.path.join(out, name + ".csv"), cfg.get("study_id", name), header, rows)
    ratios = [row["ratio_wr_winf"] for row in rows_out]
    ratios_l = [row["ratio_l_winf"] for row in rows_out]
    _write_json(
        os.path.join(out, name + ".json"),
        {
            "spread_wr_winf": max(ratios) / min(ratios),
            "spread_l_winf": max(ratios_l) / min(ratios_l),
        },
    )


def _study_equiv_periodic(cfg, out, name, scale, threads):
    combs_spec = cfg.get("combs", "bundled")
    if combs_spec == "bundled":
        from .corpus import comb_entries

        combs = [e.comb for e in comb_entries()]
    else:
        combs = [TrigPolynomial.from_json(c) for c in combs_spec]
    qs = [parse_exponent(q) for q in cfg["qs"]]
    rs = [parse_exponent(r) for r in cfg["rs"]]
    resolutions = [
        (int(mx) * scale, int(mxi) * scale)
        for mx, mxi in cfg.get("resolutions", [[32, 16]])
    ]
    window = Window.from_json(cfg["window"]) if "window" in cfg else None
    report = periodic_equivalence_study(
        combs,
        qs,
        rs,
        weight=_weight_from_json(cfg.get("weight")),
        resolutions=resolutions,
        window=window,
    )
    header = [
        "comb",
        "resolution",
        "m_x",
        "m_xi",
        "q",
        "r",
        "coeff",
        "func",
        "mixed",
        "ratio_func",
        "ratio_mixed",
    ]
    rows = [[row[h] for h in header] for row in report["rows"]]
    _write_csv(os.path.join(out, name + ".csv"), cfg.get("study_id", name), header, rows)
    _write_json(os.path.join(out, name + ".json"), {"spreads": report["spreads"]})


def _study_embedding(cfg, out, name, scale, threads):
    entries = _corpus_entries(cfg)
    window = Window.from_json(cfg["window"])
    phase_grid = _grid_from_json(cfg["phase_grid"], scale)
    t_grid = _grid_from_json(cfg["t_grid"], scale)
    p = ExponentVector.from_json(cfg["p"])
    q = ExponentVector.from_json(cfg["q"])
    r = ExponentVector.from_json(cfg["r"])
    r1 = parse_exponent(cfg["r1"])
    r2 = parse_exponent(cfg["r2"])
    omega = _weight_from_json(cfg.get("omega"))
    fields = phase_fields(entries, window, phase_grid, t_grid)

    def one(item):
        fid, F = item
        return fid, embedding_check(F, p, q, r, r1, r2, omega)

    results = _map_ordered(one, fields, threads)
    header = [
        "field_id",
        "chain",
        "norm_left",
        "norm_mid",
        "norm_right",
        "ratio_lm",
        "ratio_mr",
    ]
    rows = []
    for fid, chains in results:
        for label in ("chain1", "chain2"):
            left, mid, right = chains[label]
            rows.append(
                [
                    fid,
                    label,
                    left,
                    mid,
                    right,
                    mid / left if left > 0 else np.inf,
                    right / mid if mid > 0 else np.inf,
                ]
            )
    _write_csv(os.path.join(out, name + ".csv"), cfg.get("study_id", name), header, rows)


def _random_young_field(rng, grid, periodic_axes, nonnegative):
    """Sum of a few separable bumps, periodized along the wrap axes."""
    d = grid.dim
    n_bumps = 3
    params = []
    for _ in range(n_bumps):
        amp = abs(rng.standard_normal()) + 0.1 if nonnegative else rng.standard_normal()
        centers = []
        widths = []
        for k in range(d):
            lo, hi = grid.ranges[k]
            if k in periodic_axes:
                centers.append(lo + rng.uniform(0.2, 0.8))
                widths.append(rng.uniform(0.08, 0.15))
            else:
                centers.append(rng.uniform(lo + 0.5, hi + 0.5))
                widths.append(rng.uniform(0.3, 0.8))
        params.append((amp, centers, widths))

    def f(pts):
        out = np.zeros(pts.shape[:-1])
        for amp, centers, widths in params:
            term = np.full(pts.shape[:-1], amp)
            for k in range(d):
                t = pts[..., k] - centers[k]
                if k in periodic_axes:
                    span = grid.ranges[k][1] - grid.ranges[k][0] + 1
                    bump = np.zeros_like(t)
                    for img in range(-4, 5):
                        u = t - img * span
                        bump += np.exp(-(u * u) / (2 * widths[k] ** 2))
                    term = term * bump
                else:
                    term = term * np.exp(-(t * t) / (2 * widths[k] ** 2))
            out = out + term
        return out

    return sample(grid, f, "function")


def _study_young(cfg, out, name, scale, threads):
    d = int(cfg["d"])
    p = ExponentVector.from_json(cfg["p"])
    r = ExponentVector.from_json(cfg["r"])
    periodic_axes = tuple(int(a) for a in cfg.get("periodic_axes", ()))
    batches = int(cfg.get("batches", 50))
    seed = int(cfg.get("seed", 0))
    nonneg = bool(cfg.get("nonnegative", False))
    m = tuple(int(v) * scale for v in cfg["m"])
    ranges = tuple((int(lo), int(hi)) for lo, hi in cfg["cells"])
    taps = [(int(lo), int(hi)) for lo, hi in cfg["taps"]]
    v = _weight_from_json(cfg.get("v"))
    omega = _weight_from_json(cfg.get("omega"))
    basis = standard_basis(d)
    grid = GridSpec(basis, m, ranges)

    def one(batch):
        rng = np.random.default_rng(seed + batch)
        shape = tuple(hi - lo + 1 for lo, hi in taps)
        vals = rng.standard_normal(shape)
        if nonneg:
            vals = np.abs(vals) + 0.05
        seq = LatticeSeq(basis, tuple(lo for lo, _ in taps), vals)
        f = _random_young_field(rng, grid, set(periodic_axes), nonneg)
        res = young_estimate_check(seq, f, p, r, v, omega, periodic_axes)
        return [batch, res["constant"], res["lhs"], res["a_norm"], res["f_norm"]]

    rows = _map_ordered(one, range(batches), threads)
    header = ["batch", "constant", "lhs", "a_norm", "f_norm"]
    _write_csv(os.path.join(out, name + ".csv"), cfg.get("study_id", name), header, rows)
    _write_json(
        os.path.join(out, name + ".json"),
        {"max_constant": max(row[1] for row in rows)},
    )


def _study_gabor_dual(cfg, out, name, scale, threads):
    L = int(cfg["L"])
    a = int(cfg["a"])
    b = int(cfg["b"])
    wspec = cfg.get("window", "gaussian")
    if wspec == "gaussian":
        w = periodized_gaussian(L)
    elif isinstance(wspec, dict) and "samples" in wspec:
        w = np.array(
            [complex(s[0], s[1]) if isinstance(s, list) else complex(s) for s in wspec["samples"]]
        )
    else:
        raise ValidationError("window: expected 'gaussian' or {'samples': [...]}")
    G = GaborSystem(L, a, b, w)
    report = frame_report(G, int(cfg.get("n_cap", 8)))
    psi = canonical_dual(G)
    rng = np.random.default_rng(int(cfg.get("seed", 7)))
    recon_err = 0.0
    for _ in range(5):
        f = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        g = synthesis(analysis(f, G), GaborSystem(L, a, b, psi))
        recon_err = max(recon_err, float(np.linalg.norm(g - f) / np.linalg.norm(f)))
    header = ["A", "B", "condition", "n_min", "recon_error"]
    _write_csv(
        os.path.join(out, name + ".csv"),
        cfg.get("study_id", name),
        header,
        [[report["A"], report["B"], report["condition"], report["n_min"], recon_err]],
    )
    _write_json(os.path.join(out, name + ".json"), report)
    dual_field = GaborSystem(L, a, b, psi).window_field()
    save_binary(dual_field, os.path.join(out, name + "-dual.bin"))


_RUNNERS = {
    "stft": _study_stft,
    "norm": _study_norm,
    "wiener": _study_wiener,
    "modnorm": _study_modnorm,
    "coeffs": _study_coeffs,
    "equiv-wiener-r": _study_equiv_wiener_r,
    "equiv-periodic": _study_equiv_periodic,
    "embedding-rel1": _study_embedding,
    "young": _study_young,
    "gabor-dual": _study_gabor_dual,
}

_REQUIRED_KEYS = {
    "stft": ("signal", "window", "phase_grid"),
    "norm": ("signal", "window", "phase_grid", "exponents"),
    "wiener": ("signal", "window", "phase_grid", "local", "global"),
    "modnorm": ("signal", "window", "phase_grid", "p", "q"),
    "coeffs": ("comb", "m", "index_ranges"),
    "equiv-wiener-r": ("window_a", "window_b", "phase_grid", "t_grid", "p", "r"),
    "equiv-periodic": ("qs", "rs"),
    "embedding-rel1": ("window", "phase_grid", "t_grid", "p", "q", "r", "r1", "r2"),
    "young": ("d", "p", "r", "m", "cells", "taps"),
    "gabor-dual": ("L", "a", "b"),
}


def validate_config(cfg: dict) -> list:
    """Schema and hypothesis diagnostics; empty list means runnable."""
    problems = []
    kind = cfg.get("kind")
    if kind not in KINDS:
        return [f"kind: expected one of {', '.join(KINDS)}, got {kind!r}"]
    for key in _REQUIRED_KEYS[kind]:
        if key not in cfg:
            problems.append(f"{key}: required for kind {kind!r}")
    if problems:
        return problems

    def check(key, fn):
        try:
            fn()
        except TfnormsError as exc:
            problems.append(f"{key}: {exc}")
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{key}: malformed ({exc})")

    for key in ("weight", "omega", "v"):
        if cfg.get(key) is not None:
            check(key, lambda k=key: Weight.from_json(cfg[k]))
    for key in ("window", "window_a", "window_b"):
        if key in cfg and isinstance(cfg[key], dict):
            check(key, lambda k=key: Window.from_json(cfg[k]))
    for key in ("phase_grid", "t_grid"):
        if key in cfg:
            check(key, lambda k=key: _grid_from_json(cfg[k], 1))
    for key in ("exponents", "p", "q", "r", "local", "global", "qs", "rs"):
        if key in cfg:
            check(key, lambda k=key: ExponentVector.from_json(cfg[k]))
    for key in ("r1", "r2"):
        if key in cfg:
            check(key, lambda k=key: parse_exponent(cfg[k]))
    if "signal" in cfg and cfg["signal"].get("type") != "comb":
        check("signal", lambda: _signal_func(cfg["signal"]))
        if kind in ("stft", "norm", "wiener", "modnorm") and "t_grid" not in cfg:
            problems.append("t_grid: required for sampled signals")
    if "comb" in cfg:
        check("comb", lambda: TrigPolynomial.from_json(cfg["comb"]))
    if "corpus" in cfg:
        check("corpus", lambda: _corpus_entries(cfg))

    if kind == "young" and not problems:
        p = ExponentVector.from_json(cfg["p"])
        r = ExponentVector.from_json(cfg["r"])
        for k in range(len(r)):
            if r[k] > 1.0 + 1e-15:
                problems.append(f"r: estimate needs r_{k + 1} <= 1")
            for mm in range(min(k + 1, len(p))):
                if r[k] > p[mm] + 1e-15:
                    problems.append(
                        f"r: estimate needs r_{k + 1} <= p_{mm + 1}"
                    )
    if kind == "embedding-rel1" and not problems:
        p = ExponentVector.from_json(cfg["p"])
        q = ExponentVector.from_json(cfg["q"])
        r = ExponentVector.from_json(cfg["r"])
        r1 = parse_exponent(cfg["r1"])
        r2 = parse_exponent(cfg["r2"])
        bound = min(min(p), min(q), min(r), 1.0)
        if r1 > bound + 1e-15:
            problems.append(f"r1: needs r1 <= min(1, p, q, r) = {bound}")
        if r2 > min(q) + 1e-15:
            problems.append(f"r2: needs r2 <= min(q) = {min(q)}")
    return problems


def run_config(cfg: dict, out_dir: str, threads: int = 1, scale: int = 1) -> None:
    problems = validate_config(cfg)
    if problems:
        raise ValidationError("; ".join(problems))
    os.makedirs(out_dir, exist_ok=True)
    name = cfg.get("name", cfg["kind"])
    _RUNNERS[cfg["kind"]](cfg, out_dir, name, scale, threads)


_EXIT_CODES = (
    (ResolutionError, 3),
    (TruncationError, 3),
    (AliasingError, 3),
    (PreconditionError, 2),
    (RangeError, 2),
    (ValidationError, 2),
    (TfnormsError, 2),
)


def _error_exit(exc: Exception) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)
    for klass, code in _EXIT_CODES:
        if isinstance(exc, klass):
            return code
    return 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tfnorms", description="time-frequency norm studies"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a study config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=".")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--resolution-scale", type=int, default=1)
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _error_exit(ValidationError(f"config: {exc}"))

    if args.command == "validate":
        problems = validate_config(cfg)
        if problems:
            for item in problems:
                print(item)
            return 2
        print("ok")
        return 0

    try:
        run_config(cfg, args.out, args.threads, args.resolution_scale)
    except TfnormsError as exc:
        return _error_exit(exc)
    return 0
