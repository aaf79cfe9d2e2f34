"""
JSON run configuration: parsing, validation and default materialization.

Top-level keys: ``model {name, params}``, ``grid {x_min, x_max, n}`` (or
``grid_x``/``grid_y`` for 2D models), ``scheme``, ``mode``, ``checks``,
``k_levels``, ``tolerances``, ``output {report, spectra}``.
"""
import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from .errors import ConfigurationError
from .grid import SCHEMES, make_grid
from .model import CATALOG, make_model
from .verify import CHECK_IDS, resolve_tolerances

TOP_KEYS = ("model", "grid", "grid_x", "grid_y", "scheme", "mode", "checks",
            "k_levels", "tolerances", "output")
RUN_MODES = ("continuum", "similarity", "both")
DEFAULT_N = {1: 1000, 2: 48}

CONFIG_DIR = Path(__file__).with_name("configs")


@dataclass
class RunConfig:
    model: Any
    grid: Any
    scheme: str
    mode: str
    checks: Any
    k_levels: int
    tolerances: Dict[str, Dict[str, Any]]
    output: Dict[str, Optional[str]]
    resolved: Dict[str, Any]

    @property
    def modes(self):
        return ("continuum", "similarity") if self.mode == "both" else (self.mode,)


def _expect(cond, key, msg):
    if not cond:
        raise ConfigurationError(f"config key {key!r}: {msg}")


def _grid_block(raw, key, default_domain, default_n):
    block = raw.get(key, {})
    _expect(isinstance(block, dict), key, "must be an object {x_min, x_max, n}")
    unknown = set(block) - {"x_min", "x_max", "n"}
    _expect(not unknown, f"{key}.{sorted(unknown)[0]}" if unknown else key, "unknown key")
    resolved = {"x_min": block.get("x_min", default_domain[0]),
                "x_max": block.get("x_max", default_domain[1]),
                "n": block.get("n", default_n)}
    for name in ("x_min", "x_max"):
        v = resolved[name]
        _expect(isinstance(v, (int, float)) and not isinstance(v, bool), f"{key}.{name}",
                "must be a number")
    try:
        grid = make_grid(resolved["x_min"], resolved["x_max"], resolved["n"])
    except ConfigurationError as exc:
        raise ConfigurationError(f"config key {key!r}: {exc}") from None
    return grid, resolved


def parse_config(raw):
    """Validate a decoded JSON object and return a :class:`RunConfig`."""
    _expect(isinstance(raw, dict), "<root>", "config must be a JSON object")
    unknown = set(raw) - set(TOP_KEYS)
    if unknown:
        raise ConfigurationError(f"config key {sorted(unknown)[0]!r}: unknown top-level key")
    _expect("model" in raw, "model", "is required")
    mblock = raw["model"]
    _expect(isinstance(mblock, dict) and isinstance(mblock.get("name"), str), "model",
            "must be an object with a string 'name'")
    bad = set(mblock) - {"name", "params"}
    _expect(not bad, f"model.{sorted(bad)[0]}" if bad else "model", "unknown key")
    params = mblock.get("params", {})
    _expect(isinstance(params, dict), "model.params", "must be an object")
    _expect(mblock["name"] in CATALOG, "model.name", f"unknown model {mblock['name']!r}")
    try:
        model = make_model(mblock["name"], params)
    except ConfigurationError as exc:
        raise ConfigurationError(f"config key 'model.params': {exc}") from None
    entry = CATALOG[mblock["name"]]
    resolved_params = {**entry.defaults, **params} if mblock["name"] != "custom" else params

    if model.dimension == 2:
        _expect("grid" not in raw, "grid", "2D models take grid_x and grid_y")
        gx, rx = _grid_block(raw, "grid_x", entry.domain, DEFAULT_N[2])
        default_y = (-5.0, 5.0) if mblock["name"] == "morse_harmonic_2d" else entry.domain
        gy, ry = _grid_block(raw, "grid_y", default_y, DEFAULT_N[2])
        grid, grid_resolved = (gx, gy), {"grid_x": rx, "grid_y": ry}
    else:
        for k in ("grid_x", "grid_y"):
            _expect(k not in raw, k, "only 2D models take per-axis grids")
        grid, r = _grid_block(raw, "grid", entry.domain, DEFAULT_N[1])
        grid_resolved = {"grid": r}

    scheme = raw.get("scheme", "central2")
    _expect(scheme in SCHEMES, "scheme", f"must be one of {SCHEMES}")
    mode = raw.get("mode", "both")
    _expect(mode in RUN_MODES, "mode", f"must be one of {RUN_MODES}")
    checks = raw.get("checks", "all")
    if checks != "all":
        _expect(isinstance(checks, list) and all(isinstance(c, str) for c in checks), "checks",
                "must be \"all\" or a list of check ids")
        bad = [c for c in checks if c not in CHECK_IDS]
        _expect(not bad, f"checks[{checks.index(bad[0])}]" if bad else "checks",
                f"unknown check id {bad[0]!r}" if bad else "")
    k = raw.get("k_levels", 8)
    _expect(isinstance(k, int) and not isinstance(k, bool) and k >= 1, "k_levels",
            "must be a positive integer")

    tol_raw = raw.get("tolerances", {})
    _expect(isinstance(tol_raw, dict), "tolerances", "must be an object")
    for cid, block in tol_raw.items():
        _expect(cid in CHECK_IDS, f"tolerances.{cid}", "unknown check id")
        _expect(isinstance(block, dict), f"tolerances.{cid}", "must be an object")
        for name, val in block.items():
            if name.startswith("tol") or name in ("rtol", "atol"):
                _expect(isinstance(val, (int, float)) and not isinstance(val, bool) and val >= 0,
                        f"tolerances.{cid}.{name}", "must be a non-negative number")
    tolerances = resolve_tolerances(tol_raw)

    out_raw = raw.get("output", {})
    _expect(isinstance(out_raw, dict), "output", "must be an object")
    bad = set(out_raw) - {"report", "spectra"}
    _expect(not bad, f"output.{sorted(bad)[0]}" if bad else "output", "unknown key")
    output = {"report": out_raw.get("report"), "spectra": out_raw.get("spectra")}
    for name, val in output.items():
        _expect(val is None or isinstance(val, str), f"output.{name}", "must be a path string or null")

    resolved = {
        "model": {"name": mblock["name"], "params": copy.deepcopy(resolved_params)},
        **grid_resolved,
        "scheme": scheme,
        "mode": mode,
        "checks": checks,
        "k_levels": k,
        "tolerances": tolerances,
        "output": output,
    }
    return RunConfig(model, grid, scheme, mode, checks, k, tolerances, output, resolved)


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(raw)


def default_config_path(name):
    """Path of the shipped config for a catalog model."""
    path = CONFIG_DIR / f"{name}.json"
    if not path.exists():
        raise ConfigurationError(f"no default config for {name!r}")
    return path
