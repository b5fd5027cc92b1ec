"""Command-line entry point: configured runs and offline artifact verification.

    fastdiff run CONFIG [key=value ...]     execute a mode, write an artifact dir
    fastdiff verify RUN_DIR                 re-check an artifact dir offline

CONFIG is a path to a key=value file ('#' comments) or the name of a bundled
config (paper_fig1, smoke, exact_table).  Overrides are applied after the
file.  Unknown keys, keys that do not belong to the selected mode, and
malformed values are configuration errors.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical abort (NaN positions / mass leak), 4 I/O error.

The only environment variable honored is FASTDIFF_THREADS, which bounds the
compiled kernels' thread count; it can change speed, never results.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__, io
from .analysis import check_hypothesis_b2, fit_density_bound
from .engine import NumericsError, run_oracle_sde
from .exact import SpaceTimeGrid, derive_params, shifted_density
from .kde import BandwidthRule, estimate_density
from .mckean import MassLeakError, McKeanConfig, compare_to_exact, solve_mckean

__all__ = ["main", "run", "verify", "ConfigError"]

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

MODES = ("mckean", "oracle", "density-bound", "hypothesis-check", "exact-table")

# offline verification threshold on every recorded L² error (generous cap:
# a healthy n=50000 run sits near 1e-3, a 500-particle smoke run near 7e-3)
VERIFY_L2_THRESHOLD = 2e-2
VERIFY_MASS_RANGE = (0.9, 1.05)

ERRORS_HEADER = ["time", "l2", "linf", "mass"]
DENSITY_HEADER = ["time", "x", "u_estimated", "u_exact"]
PARTICLES_HEADER = ["step", "time", "particle_index", "position"]
HYPOTHESIS_HEADER = ["m", "kappa", "t0", "t_end", "family", "value", "finite"]
BOUND_HEADER = ["x0", "s", "sup_density", "seed"]


class ConfigError(Exception):
    """Bad configuration file, override, or value."""


# ---------------------------------------------------------------------------
# Configuration schema
# ---------------------------------------------------------------------------


def _float_(raw: str) -> float:
    try:
        v = float(raw)
    except ValueError as exc:
        raise ConfigError(f"not a number: {raw!r}") from exc
    if not math.isfinite(v):
        raise ConfigError(f"value must be finite: {raw!r}")
    return v


def _int_(raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError as exc:
        raise ConfigError(f"not an integer: {raw!r}") from exc


def _float_list(raw: str) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"empty list: {raw!r}")
    return tuple(_float_(p) for p in parts)


def _int_list(raw: str) -> tuple[int, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"empty list: {raw!r}")
    return tuple(_int_(p) for p in parts)


def _choice(*options: str) -> Callable[[str], str]:
    def cast(raw: str) -> str:
        if raw not in options:
            raise ConfigError(f"expected one of {options}, got {raw!r}")
        return raw

    return cast


def _floor_(raw: str) -> float | None:
    if raw == "auto":
        return None
    v = _float_(raw)
    if v <= 0.0:
        raise ConfigError(f"density_floor must be positive or 'auto', got {raw!r}")
    return v


_REQUIRED = object()


@dataclasses.dataclass(frozen=True)
class _Key:
    cast: Callable[[str], object]
    modes: tuple[str, ...]
    default: object = _REQUIRED


_ALL = MODES
_REGISTRY: dict[str, _Key] = {
    "mode": _Key(_choice(*MODES), _ALL),
    "output_dir": _Key(str, _ALL),
    "m": _Key(_float_, ("mckean", "oracle", "density-bound", "exact-table")),
    "seed": _Key(_int_, ("mckean", "oracle"), default=0),
    "kappa": _Key(_float_, _ALL, default=1.0),
    "n": _Key(_int_, ("mckean", "oracle", "density-bound")),
    "dt": _Key(_float_, ("mckean", "oracle", "density-bound")),
    "t_end": _Key(_float_, ("mckean", "hypothesis-check")),
    "x_min": _Key(_float_, ("mckean", "oracle", "exact-table")),
    "x_max": _Key(_float_, ("mckean", "oracle", "exact-table")),
    "nx": _Key(_int_, ("mckean", "oracle", "exact-table")),
    "snapshot_times": _Key(_float_list, ("mckean", "oracle", "exact-table")),
    "bandwidth_multiplier": _Key(_float_, ("mckean", "oracle"), default=1.06),
    "bandwidth_scale": _Key(_choice("auto", "std", "iqr"), ("mckean", "oracle"), default="auto"),
    "density_floor": _Key(_floor_, ("mckean",), default=None),
    "cap_margin": _Key(_float_, ("mckean",), default=1.2),
    "refresh_every": _Key(_int_, ("mckean",), default=1),
    "error_every": _Key(_int_, ("mckean",), default=50),
    "mass_abort": _Key(_float_, ("mckean",), default=0.9),
    "m_list": _Key(_float_list, ("hypothesis-check",)),
    "t0_list": _Key(_float_list, ("hypothesis-check",), default=()),
    "x0_list": _Key(_float_list, ("density-bound",)),
    "s_list": _Key(_float_list, ("density-bound",)),
    "seeds": _Key(_int_list, ("density-bound",), default=(0, 1, 2)),
}


def parse_config_text(text: str, source: str) -> dict[str, str]:
    """key = value lines; '#' starts a comment; later keys override earlier."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, value = stripped.partition("=")
        raw[key.strip()] = value.strip()
    return raw


def resolve_config(raw: dict[str, str]) -> dict[str, object]:
    """Type-check keys against the registry and fill mode defaults."""
    if "mode" not in raw:
        raise ConfigError("config must set 'mode'")
    mode = _REGISTRY["mode"].cast(raw["mode"])
    cfg: dict[str, object] = {"mode": mode}
    for key, value in raw.items():
        if key == "mode":
            continue
        spec = _REGISTRY.get(key)
        if spec is None:
            raise ConfigError(f"unknown configuration key {key!r}")
        if mode not in spec.modes:
            raise ConfigError(f"key {key!r} is not valid for mode {mode!r}")
        try:
            cfg[key] = spec.cast(value)
        except ConfigError as exc:
            raise ConfigError(f"key {key!r}: {exc}") from None
    for key, spec in _REGISTRY.items():
        if mode in spec.modes and key not in cfg:
            if spec.default is _REQUIRED:
                raise ConfigError(f"mode {mode!r} requires key {key!r}")
            cfg[key] = spec.default
    return cfg


def _bundled_config(name: str) -> str | None:
    base = name if name.endswith(".cfg") else name + ".cfg"
    ref = resources.files("fastdiff") / "configs" / base
    if ref.is_file():
        return ref.read_text(encoding="utf-8")
    return None


def load_config(arg: str, overrides: Sequence[str]) -> dict[str, object]:
    path = Path(arg)
    if path.is_file():
        text, source = path.read_text(encoding="utf-8"), str(path)
    else:
        bundled = _bundled_config(arg)
        if bundled is None:
            raise ConfigError(f"config {arg!r} is neither a file nor a bundled config name")
        text, source = bundled, f"bundled:{arg}"
    raw = parse_config_text(text, source)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, value = item.partition("=")
        raw[key.strip()] = value.strip()
    return resolve_config(raw)


# ---------------------------------------------------------------------------
# Mode execution
# ---------------------------------------------------------------------------


def _bandwidth_rule(cfg: dict[str, object]) -> BandwidthRule:
    mult = float(cfg["bandwidth_multiplier"])
    scale = str(cfg["bandwidth_scale"])
    if scale == "auto":
        return BandwidthRule.for_tail_exponent(float(cfg["m"]), multiplier=mult)
    return BandwidthRule(multiplier=mult, scale=scale)


def _density_rows(time: float, x: np.ndarray, u_est: np.ndarray, u_exact: np.ndarray):
    for xi, ui, vi in zip(x, u_est, u_exact):
        yield (time, xi, ui, vi)


def _density_name(t: float) -> str:
    return f"density_t{t:g}.csv"


def _run_mckean(cfg: dict[str, object], out: Path) -> dict[str, object]:
    params = derive_params(float(cfg["m"]))
    grid = SpaceTimeGrid(
        float(cfg["x_min"]), float(cfg["x_max"]), int(cfg["nx"]),
        tuple(cfg["snapshot_times"]),
    )
    mc = McKeanConfig(
        params=params,
        n=int(cfg["n"]),
        dt=float(cfg["dt"]),
        t_end=float(cfg["t_end"]),
        grid=grid,
        bandwidth=_bandwidth_rule(cfg),
        kappa=float(cfg["kappa"]),
        density_floor=cfg["density_floor"],
        cap_margin=float(cfg["cap_margin"]),
        refresh_every=int(cfg["refresh_every"]),
        error_every=int(cfg["error_every"]),
        seed=int(cfg["seed"]),
        mass_abort=float(cfg["mass_abort"]),
    )
    run_result = solve_mckean(mc)
    io.write_csv(
        out / "errors.csv",
        ERRORS_HEADER,
        ((e.time, e.l2, e.linf, e.mass) for e in run_result.errors),
    )
    for snap in run_result.snapshots:
        t = snap.field.time
        io.write_csv(
            out / _density_name(t),
            DENSITY_HEADER,
            _density_rows(t, grid.x, snap.field.values, snap.exact),
        )
    return {
        "density_floor_resolved": run_result.floor,
        "cap_fraction_max": run_result.cap_fraction_max,
        "sigma_ratio_max": run_result.sigma_ratio_max,
        "bandwidths": [s.field.bandwidth for s in run_result.snapshots],
    }


def _run_oracle(cfg: dict[str, object], out: Path) -> dict[str, object]:
    params = derive_params(float(cfg["m"]))
    grid = SpaceTimeGrid(
        float(cfg["x_min"]), float(cfg["x_max"]), int(cfg["nx"]),
        tuple(cfg["snapshot_times"]),
    )
    rule = _bandwidth_rule(cfg)
    kappa = float(cfg["kappa"])
    sde = run_oracle_sde(
        params, kappa, int(cfg["n"]), float(cfg["dt"]), grid.t_grid, int(cfg["seed"])
    )
    error_rows = []
    particle_rows = []
    for cloud in sde.clouds:
        field = estimate_density(cloud, grid, rule)
        rec = compare_to_exact(field, params, kappa)
        error_rows.append((rec.time, rec.l2, rec.linf, rec.mass))
        exact = shifted_density(params, cloud.time, grid.x, kappa)
        io.write_csv(
            out / _density_name(cloud.time),
            DENSITY_HEADER,
            _density_rows(cloud.time, grid.x, field.values, exact),
        )
        for idx, pos in enumerate(cloud.positions):
            particle_rows.append((cloud.step_index, cloud.time, idx, pos))
    io.write_csv(out / "errors.csv", ERRORS_HEADER, error_rows)
    io.write_csv(out / "particles.csv", PARTICLES_HEADER, particle_rows)
    return {}


def _run_exact_table(cfg: dict[str, object], out: Path) -> dict[str, object]:
    params = derive_params(float(cfg["m"]))
    grid = SpaceTimeGrid(
        float(cfg["x_min"]), float(cfg["x_max"]), int(cfg["nx"]),
        tuple(cfg["snapshot_times"]),
    )
    kappa = float(cfg["kappa"])
    if not grid.t_grid:
        raise ConfigError("exact-table needs at least one snapshot time")
    if min(grid.t_grid) + kappa <= 0.0:
        raise ConfigError(
            f"exact-table needs t + kappa > 0 for every snapshot time; "
            f"got min t={min(grid.t_grid)} with kappa={kappa}"
        )
    for t in grid.t_grid:
        u = shifted_density(params, t, grid.x, kappa)
        io.write_csv(out / _density_name(t), DENSITY_HEADER, _density_rows(t, grid.x, u, u))
    io.write_csv(out / "errors.csv", ERRORS_HEADER, [])  # header-only: nothing estimated
    return {}


def _run_hypothesis(cfg: dict[str, object], out: Path) -> dict[str, object]:
    t_end = float(cfg["t_end"])
    t0_list = tuple(cfg["t0_list"]) or tuple(f * t_end for f in (0.01, 0.05, 0.1))
    rows = []
    for m in cfg["m_list"]:
        params = derive_params(float(m))
        for t0 in t0_list:
            report = check_hypothesis_b2(params, float(cfg["kappa"]), float(t0), t_end)
            for family in sorted(report.values):
                rows.append(
                    (
                        report.m,
                        report.kappa,
                        report.t0,
                        report.t_end,
                        family,
                        report.values[family],
                        report.finite[family],
                    )
                )
    io.write_csv(out / "hypothesis_report.csv", HYPOTHESIS_HEADER, rows)
    return {"t0_list_resolved": list(t0_list)}


def _run_density_bound(cfg: dict[str, object], out: Path) -> dict[str, object]:
    params = derive_params(float(cfg["m"]))
    fit = fit_density_bound(
        params,
        x0_list=tuple(cfg["x0_list"]),
        s_list=tuple(cfg["s_list"]),
        n=int(cfg["n"]),
        dt=float(cfg["dt"]),
        seeds=tuple(cfg["seeds"]),
        kappa=float(cfg["kappa"]),
    )
    rows = []
    for i, x0 in enumerate(fit.x0_list):
        for j, s in enumerate(fit.s_list):
            for r, seed in enumerate(fit.seeds):
                rows.append((x0, s, fit.sup_density[i, j, r], seed))
    io.write_csv(out / "density_bound.csv", BOUND_HEADER, rows)
    summary = {
        "x0_list": list(fit.x0_list),
        "s_list": list(fit.s_list),
        "seeds": list(fit.seeds),
        "slopes": [float(v) for v in fit.slopes],
        "khat": fit.khat,
        "flat_ratio": fit.flat_ratio,
        "weighted_ratio": fit.weighted_ratio,
        "flat_constant": [[float(v) for v in row] for row in fit.flat_constant],
        "weighted_constant": [[float(v) for v in row] for row in fit.weighted_constant],
    }
    with (out / "fit_summary.json").open("w", encoding="utf-8", newline="") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {}


_RUNNERS = {
    "mckean": _run_mckean,
    "oracle": _run_oracle,
    "exact-table": _run_exact_table,
    "hypothesis-check": _run_hypothesis,
    "density-bound": _run_density_bound,
}


def _versions() -> dict[str, str | None]:
    import scipy

    try:
        import numba

        numba_version = numba.__version__
    except Exception:
        numba_version = None
    return {
        "fastdiff": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba_version,
    }


def _config_sha256(cfg: dict[str, object]) -> str:
    canon = json.dumps(cfg, sort_keys=True, default=list)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def run(cfg: dict[str, object]) -> Path:
    """Execute a resolved configuration; returns the artifact directory."""
    out = Path(str(cfg["output_dir"]))
    out.mkdir(parents=True, exist_ok=True)
    extras = _RUNNERS[str(cfg["mode"])](cfg, out)
    files = {
        p.name: io.sha256_file(p)
        for p in sorted(out.iterdir())
        if p.is_file() and p.name != io.MANIFEST_NAME
    }
    manifest = {
        "format": "fastdiff-run/1",
        "mode": cfg["mode"],
        "config": {k: v for k, v in cfg.items()},
        "config_sha256": _config_sha256(cfg),
        "files": files,
        "versions": _versions(),
    }
    if extras:
        manifest["run_info"] = extras
    io.write_manifest(out, json.loads(json.dumps(manifest, default=list)))
    return out


# ---------------------------------------------------------------------------
# Offline verification
# ---------------------------------------------------------------------------


def _verify_errors_csv(path: Path, messages: list[str], require_rows: bool) -> None:
    cols = io.read_csv_columns(path)
    if list(cols) != ERRORS_HEADER:
        messages.append(f"FAIL {path.name}: header {list(cols)} != {ERRORS_HEADER}")
        return
    if not cols["time"]:
        if require_rows:
            messages.append(f"FAIL {path.name}: no data rows")
        else:
            messages.append(f"ok   {path.name}: header-only (exact table)")
        return
    vals = io.float_columns(cols, ERRORS_HEADER)
    times = vals["time"]
    ok = True
    if np.any(np.diff(times) <= 0.0):
        messages.append(f"FAIL {path.name}: time column not strictly increasing")
        ok = False
    bad_l2 = vals["l2"][vals["l2"] > VERIFY_L2_THRESHOLD]
    if bad_l2.size:
        messages.append(
            f"FAIL {path.name}: {bad_l2.size} l2 value(s) exceed threshold "
            f"{VERIFY_L2_THRESHOLD:g} (worst {bad_l2.max():g})"
        )
        ok = False
    if np.any(vals["l2"] < 0.0) or np.any(vals["linf"] < 0.0):
        messages.append(f"FAIL {path.name}: negative error values")
        ok = False
    lo, hi = VERIFY_MASS_RANGE
    bad_mass = vals["mass"][(vals["mass"] < lo) | (vals["mass"] > hi)]
    if bad_mass.size:
        messages.append(
            f"FAIL {path.name}: {bad_mass.size} mass value(s) outside [{lo}, {hi}]"
        )
        ok = False
    if ok:
        messages.append(f"ok   {path.name}: {times.size} rows within thresholds")


def _verify_density_csv(path: Path, messages: list[str]) -> None:
    cols = io.read_csv_columns(path)
    if list(cols) != DENSITY_HEADER:
        messages.append(f"FAIL {path.name}: header {list(cols)} != {DENSITY_HEADER}")
        return
    vals = io.float_columns(cols, DENSITY_HEADER)
    ok = True
    if np.unique(vals["time"]).size != 1:
        messages.append(f"FAIL {path.name}: time column is not constant")
        ok = False
    if np.any(np.diff(vals["x"]) <= 0.0):
        messages.append(f"FAIL {path.name}: x column not strictly increasing")
        ok = False
    for col in ("u_estimated", "u_exact"):
        v = vals[col]
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            messages.append(f"FAIL {path.name}: {col} has negative or non-finite entries")
            ok = False
    if ok:
        messages.append(f"ok   {path.name}: {vals['x'].size} nodes")


def _verify_hypothesis_csv(path: Path, messages: list[str]) -> None:
    cols = io.read_csv_columns(path)
    if list(cols) != HYPOTHESIS_HEADER:
        messages.append(f"FAIL {path.name}: header {list(cols)} != {HYPOTHESIS_HEADER}")
        return
    ok = True
    for value, finite in zip(cols["value"], cols["finite"]):
        if finite not in ("true", "false"):
            messages.append(f"FAIL {path.name}: finite column must be true/false, got {finite!r}")
            ok = False
            break
        is_inf = value == "inf"
        if is_inf != (finite == "false"):
            messages.append(
                f"FAIL {path.name}: value {value!r} inconsistent with finite={finite!r}"
            )
            ok = False
            break
    if ok:
        messages.append(f"ok   {path.name}: {len(cols['value'])} rows consistent")


def _verify_bound_csv(path: Path, messages: list[str]) -> None:
    cols = io.read_csv_columns(path)
    if list(cols) != BOUND_HEADER:
        messages.append(f"FAIL {path.name}: header {list(cols)} != {BOUND_HEADER}")
        return
    vals = io.float_columns(cols, ["sup_density", "s"])
    if np.any(vals["sup_density"] <= 0.0) or not np.all(np.isfinite(vals["sup_density"])):
        messages.append(f"FAIL {path.name}: sup_density must be positive finite")
    else:
        messages.append(f"ok   {path.name}: {vals['s'].size} rows")


def verify(run_dir: Path) -> tuple[bool, list[str]]:
    """Re-check a run directory offline; returns (passed, report lines)."""
    run_dir = Path(run_dir)
    messages: list[str] = []
    manifest_path = run_dir / io.MANIFEST_NAME
    if not manifest_path.is_file():
        return False, [f"FAIL {run_dir}: no manifest"]
    try:
        manifest = io.read_manifest(run_dir)
    except (OSError, json.JSONDecodeError) as exc:
        return False, [f"FAIL {io.MANIFEST_NAME}: unreadable ({exc})"]
    files = manifest.get("files")
    mode = manifest.get("mode")
    if not isinstance(files, dict) or mode not in MODES:
        return False, [f"FAIL {io.MANIFEST_NAME}: missing 'files' map or invalid 'mode'"]
    missing = [name for name in sorted(files) if not (run_dir / name).is_file()]
    if missing:
        return False, [f"FAIL missing artifact(s): {', '.join(missing)}"]
    for name in sorted(files):
        digest = io.sha256_file(run_dir / name)
        if digest != files[name]:
            messages.append(f"FAIL {name}: sha256 mismatch (file was modified after the run)")
    for name in sorted(files):
        path = run_dir / name
        try:
            if name == "errors.csv":
                _verify_errors_csv(path, messages, require_rows=(mode != "exact-table"))
            elif name.startswith("density_t") and name.endswith(".csv"):
                _verify_density_csv(path, messages)
            elif name == "hypothesis_report.csv":
                _verify_hypothesis_csv(path, messages)
            elif name == "density_bound.csv":
                _verify_bound_csv(path, messages)
            elif name == "fit_summary.json":
                with path.open("r", encoding="utf-8") as fh:
                    json.load(fh)
                messages.append(f"ok   {name}: parses")
            elif name == "particles.csv":
                cols = io.read_csv_columns(path)
                if list(cols) != PARTICLES_HEADER:
                    messages.append(f"FAIL {name}: header {list(cols)} != {PARTICLES_HEADER}")
                else:
                    messages.append(f"ok   {name}: {len(cols['step'])} rows")
            else:
                messages.append(f"ok   {name}: present (no schema checks)")
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            messages.append(f"FAIL {name}: ill-formed ({exc})")
    passed = not any(line.startswith("FAIL") for line in messages)
    return passed, messages


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _apply_threads_env() -> None:
    raw = os.environ.get("FASTDIFF_THREADS")
    if not raw:
        return
    try:
        want = max(1, int(raw))
    except ValueError:
        raise ConfigError(f"FASTDIFF_THREADS must be an integer, got {raw!r}") from None
    try:  # clamp to what the machine offers; affects speed only
        import numba

        numba.set_num_threads(min(want, numba.config.NUMBA_NUM_THREADS))
    except Exception:
        pass


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fastdiff",
        description="Particle solver and diagnostics for the 1-D fast diffusion equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a configured run")
    p_run.add_argument("config", help="config file path or bundled name (paper_fig1, smoke, ...)")
    p_run.add_argument("overrides", nargs="*", help="key=value overrides")
    p_ver = sub.add_parser("verify", help="re-check a run directory offline")
    p_ver.add_argument("run_dir", help="artifact directory produced by 'fastdiff run'")

    args = parser.parse_args(argv)
    try:
        _apply_threads_env()
        if args.command == "run":
            try:
                cfg = load_config(args.config, args.overrides)
            except OSError as exc:
                print(f"fastdiff: config error: cannot read config: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            out = run(cfg)
            print(f"run complete: {out}")
            return EXIT_OK
        passed, messages = verify(Path(args.run_dir))
        for line in messages:
            print(line)
        print("PASS" if passed else "FAIL")
        return EXIT_OK if passed else EXIT_VERIFY_FAIL
    except (ConfigError, ValueError) as exc:
        print(f"fastdiff: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericsError, MassLeakError) as exc:
        print(f"fastdiff: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"fastdiff: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
