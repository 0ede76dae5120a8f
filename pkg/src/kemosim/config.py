"""Experiment configuration: TOML parsing with exhaustive validation,
round-trippable emission, and initial-data construction.

Schema (sections/keys)::

    [family]    kind = "constant" | "singular" | "algebraic"
                chi | sigma, lambda, alpha | gamma0, phi0
    [model]     d, n_dim, lengths, cells
    [initial]   kind = "constant" | "gaussian-bump" | "file"
                amplitude, width, baseline_u, baseline_v [, center, path]
    [step]      cfl_safety, dt_min, dt_max, u_blowup_threshold, v_floor
    [run]       horizon, sample_every
    [exponents] p, q                (optional section)
    [output]    dir, snapshots_every

Every section except [family] and [model] may be omitted; defaults are
resolved at parse time so that emitting and re-parsing reproduces an
identical configuration.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .field import Grid, ScalarField, State
from .motility import AlgebraicKS, Constant, ModelParams, Singular
from .stepper import StepControl

__all__ = ["InitialSpec", "ExperimentConfig", "parse_config", "parse_config_text",
           "emit_config", "build_initial_state", "FAMILY_PARAM_KEYS"]

#: family parameter keys admissible per kind (also the sweepable axis names)
FAMILY_PARAM_KEYS = {
    "constant": ("gamma0", "phi0"),
    "singular": ("chi",),
    "algebraic": ("sigma", "lambda", "alpha"),
}

_SECTIONS = ("family", "model", "initial", "step", "run", "exponents", "output")

_SECTION_KEYS = {
    "family": {"kind", "chi", "sigma", "lambda", "alpha", "gamma0", "phi0"},
    "model": {"d", "n_dim", "lengths", "cells"},
    "initial": {"kind", "amplitude", "width", "baseline_u", "baseline_v",
                "center", "path"},
    "step": {"cfl_safety", "dt_min", "dt_max", "u_blowup_threshold", "v_floor"},
    "run": {"horizon", "sample_every"},
    "exponents": {"p", "q"},
    "output": {"dir", "snapshots_every"},
}


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    amplitude: float
    width: float
    center: tuple
    baseline_u: float
    baseline_v: float
    path: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    family_kind: str
    family: object
    params: ModelParams
    cells: tuple
    initial: InitialSpec
    step: StepControl
    horizon: float
    sample_every: float
    exponents: tuple | None
    out_dir: str
    snapshots_every: float


def _num(table, section, key, errs, default=None, required=False):
    if key not in table:
        if required:
            errs.append(f"{section}.{key}: required key missing")
        return default
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        errs.append(f"{section}.{key}: expected a number, got {val!r}")
        return default
    return float(val)


def _numlist(table, section, key, errs, required=False):
    if key not in table:
        if required:
            errs.append(f"{section}.{key}: required key missing")
        return None
    val = table[key]
    if not isinstance(val, list) or not val or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in val):
        errs.append(f"{section}.{key}: expected a nonempty list of numbers")
        return None
    return [float(x) for x in val]


def _build_family(tab, errs):
    kind = tab.get("kind")
    if kind not in FAMILY_PARAM_KEYS:
        errs.append(
            f"family.kind: must be one of {sorted(FAMILY_PARAM_KEYS)}, got {kind!r}")
        return None, None
    allowed = {"kind", *FAMILY_PARAM_KEYS[kind]}
    for k in tab:
        if k not in allowed:
            errs.append(f"family.{k}: not a parameter of the {kind!r} family")
    if kind == "singular":
        chi = _num(tab, "family", "chi", errs, required=True)
        if chi is not None and chi <= 0:
            errs.append(f"family.chi: must be > 0, got {chi}")
        elif chi is not None:
            return kind, Singular(chi=chi)
    elif kind == "algebraic":
        sigma = _num(tab, "family", "sigma", errs, required=True)
        lam = _num(tab, "family", "lambda", errs, required=True)
        alpha = _num(tab, "family", "alpha", errs, required=True)
        ok = True
        if sigma is not None and sigma <= 0:
            errs.append(f"family.sigma: must be > 0, got {sigma}")
            ok = False
        if lam is not None and lam <= 0:
            errs.append(f"family.lambda: must be > 0, got {lam}")
            ok = False
        if alpha is not None and not 0.0 < alpha < 1.0:
            errs.append(
                f"family.alpha: must lie in the open interval (0, 1), got {alpha}")
            ok = False
        if ok and None not in (sigma, lam, alpha):
            return kind, AlgebraicKS(sigma=sigma, lam=lam, alpha=alpha)
    elif kind == "constant":
        gamma0 = _num(tab, "family", "gamma0", errs, required=True)
        phi0 = _num(tab, "family", "phi0", errs, default=0.0)
        ok = True
        if gamma0 is not None and gamma0 <= 0:
            errs.append(f"family.gamma0: must be > 0, got {gamma0}")
            ok = False
        if phi0 is not None and phi0 < 0:
            errs.append(f"family.phi0: must be >= 0, got {phi0}")
            ok = False
        if ok and gamma0 is not None:
            return kind, Constant(gamma0=gamma0, phi0=phi0)
    return kind, None


def _validate_initial_file(spec, cells, singular, errs):
    if spec.path is None:
        errs.append("initial.path: required for kind = 'file'")
        return
    if not os.path.exists(spec.path):
        errs.append(f"initial.path: file not found: {spec.path}")
        return
    try:
        data = np.load(spec.path)
        u0, v0 = np.asarray(data["u"], float), np.asarray(data["v"], float)
    except Exception as exc:  # malformed archive
        errs.append(f"initial.path: could not read u/v arrays ({exc})")
        return
    if u0.shape != tuple(cells) or v0.shape != tuple(cells):
        errs.append(
            f"initial.path: array shapes {u0.shape}/{v0.shape} do not match "
            f"model.cells {tuple(cells)}")
        return
    if np.any(u0 < 0) or np.any(v0 < 0):
        errs.append("initial.path: u0 and v0 must be nonnegative")
    if not np.any(u0 > 0) or not np.any(v0 > 0):
        errs.append("initial.path: u0 and v0 must not vanish identically")
    if singular and np.any(v0 <= 0):
        errs.append("initial.path: v0 must be strictly positive everywhere "
                    "for a family singular at v = 0")


def parse_config_text(text):
    """Parse and validate a TOML configuration string.

    Raises ConfigError carrying every violation found.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"TOML syntax: {exc}"]) from exc

    errs = []
    for sec in raw:
        if sec not in _SECTIONS:
            errs.append(f"{sec}: unknown section")
        elif not isinstance(raw[sec], dict):
            errs.append(f"{sec}: expected a table")
    for sec in _SECTIONS:
        tab = raw.get(sec)
        if isinstance(tab, dict):
            for k in tab:
                if k not in _SECTION_KEYS[sec]:
                    errs.append(f"{sec}.{k}: unknown key")
    for sec in ("family", "model"):
        if sec not in raw:
            errs.append(f"{sec}: required section missing")
    if errs and any(v.endswith("required section missing") for v in errs):
        raise ConfigError(errs)

    family_kind, family = _build_family(raw.get("family", {}), errs)

    mtab = raw.get("model", {})
    d = _num(mtab, "model", "d", errs, required=True)
    n_dim = mtab.get("n_dim")
    if not isinstance(n_dim, int) or isinstance(n_dim, bool) or n_dim not in (1, 2, 3, 4):
        errs.append(f"model.n_dim: must be an integer in 1..4, got {n_dim!r}")
        n_dim = 2
    if d is not None and d <= 0:
        errs.append(f"model.d: must be > 0, got {d}")
    lengths = _numlist(mtab, "model", "lengths", errs, required=True) or [1.0]
    cells_raw = mtab.get("cells")
    cells = None
    if (not isinstance(cells_raw, list) or not cells_raw
            or any(isinstance(x, bool) or not isinstance(x, int) for x in cells_raw)):
        errs.append("model.cells: expected a nonempty list of integers")
    else:
        cells = [int(x) for x in cells_raw]
        if any(c < 4 for c in cells):
            errs.append(f"model.cells: need >= 4 cells per axis, got {cells}")
    if any(L <= 0 for L in lengths):
        errs.append(f"model.lengths: must be positive, got {lengths}")
    if cells is not None and len(cells) != len(lengths):
        errs.append(
            f"model.cells: rank {len(cells)} does not match lengths rank {len(lengths)}")
    if len(lengths) not in (1, 2):
        errs.append(f"model.lengths: simulation grids are 1D or 2D, got rank {len(lengths)}")
    if cells is None:
        cells = [8] * len(lengths)

    itab = raw.get("initial", {})
    ikind = itab.get("kind", "gaussian-bump")
    if ikind not in ("constant", "gaussian-bump", "file"):
        errs.append("initial.kind: must be 'constant', 'gaussian-bump' or "
                    f"'file', got {ikind!r}")
        ikind = "gaussian-bump"
    amplitude = _num(itab, "initial", "amplitude", errs, default=1.0)
    width = _num(itab, "initial", "width", errs,
                 default=0.1 * min(lengths))
    baseline_u = _num(itab, "initial", "baseline_u", errs, default=1.0)
    baseline_v = _num(itab, "initial", "baseline_v", errs, default=1.0)
    center = _numlist(itab, "initial", "center", errs)
    if center is None:
        center = [0.5 * L for L in lengths]
    elif len(center) != len(lengths):
        errs.append(f"initial.center: rank {len(center)} does not match the domain")
    path = itab.get("path")
    if path is not None and not isinstance(path, str):
        errs.append(f"initial.path: expected a string, got {path!r}")
        path = None

    singular = family is not None and family.singular_at_zero
    if ikind in ("constant", "gaussian-bump"):
        if amplitude is not None and amplitude < 0:
            errs.append(f"initial.amplitude: must be >= 0, got {amplitude}")
        if width is not None and width <= 0:
            errs.append(f"initial.width: must be > 0, got {width}")
        if baseline_u is not None and baseline_u < 0:
            errs.append(f"initial.baseline_u: must be >= 0, got {baseline_u}")
        if baseline_v is not None and baseline_v < 0:
            errs.append(f"initial.baseline_v: must be >= 0, got {baseline_v}")
        if baseline_v is not None and baseline_v == 0:
            if singular:
                errs.append("initial.baseline_v: v0 would contain zeros, but the "
                            "sensitivity is undefined at v = 0 for this family")
            else:
                errs.append("initial.baseline_v: v0 must not vanish identically")
        u_flat = (baseline_u == 0 and (ikind == "constant" or amplitude == 0))
        if u_flat:
            errs.append("initial.baseline_u: u0 must not vanish identically")

    spec = InitialSpec(kind=ikind, amplitude=amplitude, width=width,
                       center=tuple(center), baseline_u=baseline_u,
                       baseline_v=baseline_v, path=path)
    if ikind == "file":
        _validate_initial_file(spec, cells, singular, errs)

    stab = raw.get("step", {})
    step_kwargs = {}
    for key in ("cfl_safety", "dt_min", "dt_max", "u_blowup_threshold", "v_floor"):
        val = _num(stab, "step", key, errs)
        if val is not None:
            step_kwargs[key] = val
    step = None
    try:
        step = StepControl(**step_kwargs)
    except Exception as exc:
        errs.append(f"step: {exc}")

    rtab = raw.get("run", {})
    horizon = _num(rtab, "run", "horizon", errs, default=10.0)
    if horizon is not None and horizon <= 0:
        errs.append(f"run.horizon: must be > 0, got {horizon}")
        horizon = 10.0
    sample_every = _num(rtab, "run", "sample_every", errs,
                        default=max(horizon / 100.0, 1e-6))
    if sample_every is not None and sample_every <= 0:
        errs.append(f"run.sample_every: must be > 0, got {sample_every}")

    exponents = None
    if "exponents" in raw:
        etab = raw["exponents"]
        p = _num(etab, "exponents", "p", errs, required=True)
        q = _num(etab, "exponents", "q", errs, required=True)
        if p is not None and p <= 1:
            errs.append(f"exponents.p: must be > 1, got {p}")
        if q is not None and q <= 0:
            errs.append(f"exponents.q: must be > 0, got {q}")
        if p is not None and q is not None:
            exponents = (p, q)

    otab = raw.get("output", {})
    out_dir = otab.get("dir", "out")
    if not isinstance(out_dir, str):
        errs.append(f"output.dir: expected a string, got {out_dir!r}")
        out_dir = "out"
    snapshots_every = _num(otab, "output", "snapshots_every", errs,
                           default=horizon / 5.0)
    if snapshots_every is not None and snapshots_every <= 0:
        errs.append(f"output.snapshots_every: must be > 0, got {snapshots_every}")

    params = None
    if not errs:
        try:
            params = ModelParams(d=d, n_dim=n_dim, lengths=tuple(lengths))
        except Exception as exc:
            errs.append(f"model: {exc}")
    if errs:
        raise ConfigError(errs)

    return ExperimentConfig(
        family_kind=family_kind,
        family=family,
        params=params,
        cells=tuple(cells),
        initial=spec,
        step=step,
        horizon=horizon,
        sample_every=sample_every,
        exponents=exponents,
        out_dir=out_dir,
        snapshots_every=snapshots_every,
    )


def parse_config(path):
    """Parse and validate a TOML configuration file."""
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode("utf-8")
    except OSError as exc:
        raise ConfigError([f"config file: {exc}"]) from exc
    return parse_config_text(text)


def _toml_scalar(val):
    if isinstance(val, str):
        return '"' + val.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, int):
        return str(val)
    if isinstance(val, float):
        return repr(val)
    if isinstance(val, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(x) for x in val) + "]"
    raise TypeError(f"cannot emit {val!r}")


def emit_config(cfg):
    """Render an ExperimentConfig back to TOML text.

    Parsing the emitted text reproduces an identical configuration.
    """
    fam = cfg.family
    fam_items = {"kind": cfg.family_kind}
    if cfg.family_kind == "singular":
        fam_items["chi"] = fam.chi
    elif cfg.family_kind == "algebraic":
        fam_items.update(sigma=fam.sigma, alpha=fam.alpha)
        fam_items["lambda"] = fam.lam
    elif cfg.family_kind == "constant":
        fam_items.update(gamma0=fam.gamma0, phi0=fam.phi0)

    init_items = {
        "kind": cfg.initial.kind,
        "amplitude": cfg.initial.amplitude,
        "width": cfg.initial.width,
        "center": list(cfg.initial.center),
        "baseline_u": cfg.initial.baseline_u,
        "baseline_v": cfg.initial.baseline_v,
    }
    if cfg.initial.path is not None:
        init_items["path"] = cfg.initial.path

    sections = [
        ("family", fam_items),
        ("model", {"d": cfg.params.d, "n_dim": cfg.params.n_dim,
                   "lengths": list(cfg.params.lengths),
                   "cells": list(cfg.cells)}),
        ("initial", init_items),
        ("step", {"cfl_safety": cfg.step.cfl_safety,
                  "dt_min": cfg.step.dt_min, "dt_max": cfg.step.dt_max,
                  "u_blowup_threshold": cfg.step.u_blowup_threshold,
                  "v_floor": cfg.step.v_floor}),
        ("run", {"horizon": cfg.horizon, "sample_every": cfg.sample_every}),
    ]
    if cfg.exponents is not None:
        sections.append(("exponents", {"p": cfg.exponents[0],
                                       "q": cfg.exponents[1]}))
    sections.append(("output", {"dir": cfg.out_dir,
                                "snapshots_every": cfg.snapshots_every}))

    lines = []
    for name, items in sections:
        lines.append(f"[{name}]")
        for key, val in items.items():
            lines.append(f"{key} = {_toml_scalar(val)}")
        lines.append("")
    return "\n".join(lines)


def build_initial_state(cfg):
    """Construct the initial State described by a validated configuration."""
    grid = Grid(cells=cfg.cells, lengths=cfg.params.lengths)
    spec = cfg.initial
    if spec.kind == "file":
        data = np.load(spec.path)
        u0 = np.asarray(data["u"], dtype=float)
        v0 = np.asarray(data["v"], dtype=float)
        return State(ScalarField(grid, u0), ScalarField(grid, v0), t=0.0)
    if spec.kind == "constant":
        return State(ScalarField.full(grid, spec.baseline_u),
                     ScalarField.full(grid, spec.baseline_v), t=0.0)
    meshes = grid.meshes()
    r2 = sum((x - c) ** 2 for x, c in zip(meshes, spec.center))
    u0 = spec.baseline_u + spec.amplitude * np.exp(-r2 / (2.0 * spec.width**2))
    return State(ScalarField(grid, u0),
                 ScalarField.full(grid, spec.baseline_v), t=0.0)
