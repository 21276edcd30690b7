"""Scenario configuration: JSON parsing and validation with field-path diagnostics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable

SCENARIOS = ("twoslit", "ip", "bell", "measure", "action-check")
MONTE_CARLO_SCENARIOS = ("twoslit", "ip")


class ConfigError(ValueError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


@dataclass
class ScenarioConfig:
    scenario: str
    parameters: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    output_dir: str = "out"

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "parameters": self.parameters,
        }


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


class _Checker:
    def __init__(self):
        self.diagnostics: list[str] = []

    def fail(self, path: str, message: str) -> None:
        self.diagnostics.append(f"{path}: {message}")

    def number(self, obj: dict, key: str, path: str, *, positive=False, required=False) -> float | None:
        if key not in obj:
            if required:
                self.fail(f"{path}.{key}", "missing required number")
            return None
        v = obj[key]
        if not _is_number(v):
            self.fail(f"{path}.{key}", f"expected a finite number, got {v!r}")
            return None
        if positive and not v > 0:
            self.fail(f"{path}.{key}", f"must be > 0, got {v}")
            return None
        return float(v)

    def integer(self, obj: dict, key: str, path: str, *, minimum=None, power_of_two=False) -> int | None:
        if key not in obj:
            return None
        v = obj[key]
        if not _is_int(v):
            self.fail(f"{path}.{key}", f"expected an integer, got {v!r}")
            return None
        if minimum is not None and v < minimum:
            self.fail(f"{path}.{key}", f"must be >= {minimum}, got {v}")
            return None
        if power_of_two and v & (v - 1):
            self.fail(f"{path}.{key}", f"must be a power of two, got {v}")
            return None
        return v

    def mapping(self, obj: dict, key: str, path: str, allowed: tuple[str, ...]) -> dict:
        if key not in obj:
            return {}
        v = obj[key]
        if not isinstance(v, dict):
            self.fail(f"{path}.{key}", f"expected an object, got {type(v).__name__}")
            return {}
        self.unknown(v, f"{path}.{key}", allowed)
        return v

    def unknown(self, obj: dict, path: str, allowed: tuple[str, ...]) -> None:
        for k in obj:
            if k not in allowed:
                self.fail(f"{path}.{k}", f"unknown key; allowed: {', '.join(allowed)}")

    def pair(self, obj: dict, key: str, path: str) -> tuple[float, float] | None:
        if key not in obj:
            return None
        v = obj[key]
        if not (isinstance(v, list) and len(v) == 2 and all(_is_number(x) for x in v)):
            self.fail(f"{path}.{key}", f"expected [lo, hi] numbers, got {v!r}")
            return None
        if not v[0] < v[1]:
            self.fail(f"{path}.{key}", f"need lo < hi, got {v}")
            return None
        return float(v[0]), float(v[1])

    def intervals(self, v, path: str) -> None:
        if v == "full":
            return
        if not isinstance(v, list) or not v:
            self.fail(path, "expected \"full\" or a non-empty list of [lo, hi] intervals")
            return
        prev_hi = -math.inf
        for i, iv in enumerate(sorted(v, key=lambda t: t[0] if isinstance(t, list) and t and _is_number(t[0]) else 0)):
            if not (isinstance(iv, list) and len(iv) == 2 and all(_is_number(x) for x in iv)):
                self.fail(f"{path}[{i}]", f"expected [lo, hi], got {iv!r}")
                return
            if not iv[0] < iv[1]:
                self.fail(f"{path}[{i}]", f"need lo < hi, got {iv}")
            if iv[0] < prev_hi:
                self.fail(f"{path}[{i}]", "intervals overlap")
            prev_hi = iv[1]


GRID_KEYS = ("x_min", "x_max", "n")
SOURCE_KEYS = ("center", "sigma0")
POTENTIAL_KEYS = ("kind", "omega")


def _check_grid(c: _Checker, p: dict, path: str, sigma0: float | None) -> None:
    grid = c.mapping(p, "grid", path, GRID_KEYS)
    lo = c.number(grid, "x_min", f"{path}.grid")
    hi = c.number(grid, "x_max", f"{path}.grid")
    n = c.integer(grid, "n", f"{path}.grid", minimum=64, power_of_two=True)
    if lo is not None and hi is not None and not hi > lo:
        c.fail(f"{path}.grid.x_max", f"must exceed x_min ({hi} <= {lo})")
    if lo is not None and hi is not None and n and hi > lo and sigma0 is not None:
        dx = (hi - lo) / n
        if sigma0 < 2 * dx * (1 - 1e-12):
            c.fail(f"{path}.source.sigma0", f"must be >= 2*dx = {2 * dx:.6g} for this grid")


def _check_source(c: _Checker, p: dict, path: str) -> float | None:
    src = c.mapping(p, "source", path, SOURCE_KEYS)
    c.number(src, "center", f"{path}.source")
    return c.number(src, "sigma0", f"{path}.source", positive=True)


def _check_potential(c: _Checker, p: dict, path: str) -> None:
    pot = c.mapping(p, "potential", path, POTENTIAL_KEYS)
    kind = pot.get("kind", "free")
    if kind not in ("free", "harmonic"):
        c.fail(f"{path}.potential.kind", f"must be 'free' or 'harmonic', got {kind!r}")
    if kind == "harmonic":
        c.number(pot, "omega", f"{path}.potential", positive=True, required=True)


TWOSLIT_KEYS = (
    "source", "slits", "t_mask", "T", "grid", "steps", "screen_bins",
    "momentum_window", "momentum_bins", "samples", "slit", "refinement_check",
)


def _check_twoslit(c: _Checker, p: dict, path: str) -> None:
    from .twoslit import SlitConfig

    defaults = SlitConfig()
    c.unknown(p, path, TWOSLIT_KEYS)
    sigma0 = _check_source(c, p, path)
    if sigma0 is None and "sigma0" not in p.get("source", {}):
        sigma0 = defaults.source.sigma0
    slits = c.mapping(p, "slits", path, ("separation", "width"))
    d = c.number(slits, "separation", f"{path}.slits", positive=True)
    w = c.number(slits, "width", f"{path}.slits", positive=True)
    d = 2.0 if d is None and "separation" not in slits else d
    w = 0.25 if w is None and "width" not in slits else w
    if d is not None and w is not None and not w < d:
        c.fail(f"{path}.slits.width", f"must be smaller than separation ({w} >= {d})")
    t_mask = c.number(p, "t_mask", path, positive=True)
    T = c.number(p, "T", path, positive=True)
    t_mask = defaults.t_mask if t_mask is None and "t_mask" not in p else t_mask
    T = defaults.T if T is None and "T" not in p else T
    if t_mask is not None and T is not None and not t_mask < T:
        c.fail(f"{path}.t_mask", f"must be < {path}.T ({t_mask} >= {T})")
    _check_grid(c, p, path, sigma0)
    c.integer(p, "steps", path, minimum=2)
    c.integer(p, "screen_bins", path, minimum=16)
    c.pair(p, "momentum_window", path)
    c.integer(p, "momentum_bins", path, minimum=1)
    c.integer(p, "samples", path, minimum=10_000)
    if "slit" in p and p["slit"] not in (0, 1):
        c.fail(f"{path}.slit", f"must be 0 (first) or 1 (second), got {p['slit']!r}")
    if "refinement_check" in p and not isinstance(p["refinement_check"], bool):
        c.fail(f"{path}.refinement_check", "expected true or false")


def _check_bell(c: _Checker, p: dict, path: str) -> None:
    c.unknown(p, path, ("size", "random_models", "random_max_size", "angles"))
    c.integer(p, "size", path, minimum=1)
    if _is_int(p.get("size")) and p["size"] > 16:
        c.fail(f"{path}.size", f"exhaustive enumeration is limited to 16, got {p['size']}")
    c.integer(p, "random_models", path, minimum=0)
    c.integer(p, "random_max_size", path, minimum=1)
    angles = c.mapping(p, "angles", path, ("a1", "a2", "b1", "b2"))
    for k in ("a1", "a2", "b1", "b2"):
        c.number(angles, k, f"{path}.angles")


def _check_measure(c: _Checker, p: dict, path: str) -> None:
    c.unknown(p, path, ("potential", "T", "source", "grid", "steps", "regions", "momentum_regions", "partition_bins"))
    _check_potential(c, p, path)
    c.number(p, "T", path, positive=True)
    sigma0 = _check_source(c, p, path)
    _check_grid(c, p, path, 0.05 if sigma0 is None else sigma0)
    c.integer(p, "steps", path, minimum=1)
    c.integer(p, "partition_bins", path, minimum=1)
    for key in ("regions", "momentum_regions"):
        regions = p.get(key, [])
        if not isinstance(regions, list):
            c.fail(f"{path}.{key}", "expected a list of {name, intervals} objects")
            continue
        for i, r in enumerate(regions):
            rp = f"{path}.{key}[{i}]"
            if not isinstance(r, dict):
                c.fail(rp, "expected an object with 'name' and 'intervals'")
                continue
            c.unknown(r, rp, ("name", "intervals"))
            if not isinstance(r.get("name"), str):
                c.fail(f"{rp}.name", "expected a string")
            c.intervals(r.get("intervals"), f"{rp}.intervals")


def _check_action(c: _Checker, p: dict, path: str) -> None:
    c.unknown(p, path, ("potential", "x_start", "x_final", "T", "steps"))
    _check_potential(c, p, path)
    c.number(p, "x_start", path)
    c.number(p, "x_final", path)
    c.number(p, "T", path, positive=True)
    c.integer(p, "steps", path, minimum=2)


_SCENARIO_CHECKS: dict[str, Callable[[_Checker, dict, str], None]] = {
    "twoslit": _check_twoslit,
    "ip": _check_twoslit,
    "bell": _check_bell,
    "measure": _check_measure,
    "action-check": _check_action,
}


def validate_dict(raw: Any) -> list[str]:
    c = _Checker()
    if not isinstance(raw, dict):
        return ["$: config must be a JSON object"]
    c.unknown(raw, "$", ("scenario", "parameters", "seed", "output_dir"))
    scenario = raw.get("scenario")
    if scenario not in SCENARIOS:
        c.fail("$.scenario", f"unknown scenario {scenario!r}; valid scenarios: {', '.join(SCENARIOS)}")
        return c.diagnostics
    seed = raw.get("seed")
    params = raw.get("parameters", {})
    samples = scenario in MONTE_CARLO_SCENARIOS or (
        scenario == "bell" and isinstance(params, dict) and params.get("random_models", 10_000) != 0
    )
    if seed is None:
        if samples:
            c.fail("$.seed", f"scenario {scenario!r} samples randomly and needs a seed")
    elif not _is_int(seed) or seed < 0 or seed >= 2**64:
        c.fail("$.seed", f"expected an unsigned 64-bit integer, got {seed!r}")
    if "output_dir" in raw and not isinstance(raw["output_dir"], str):
        c.fail("$.output_dir", "expected a string path")
    if not isinstance(params, dict):
        c.fail("$.parameters", "expected an object")
        return c.diagnostics
    _SCENARIO_CHECKS[scenario](c, params, "$.parameters")
    return c.diagnostics


def validate(data: bytes | str) -> list[str]:
    """Diagnostics for a config file's contents; an empty list means runnable."""
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        return [f"$: not valid JSON ({exc})"]
    return validate_dict(raw)


def load(data: bytes | str) -> ScenarioConfig:
    diagnostics = validate(data)
    if diagnostics:
        raise ConfigError(diagnostics)
    raw = json.loads(data)
    return ScenarioConfig(
        scenario=raw["scenario"],
        parameters=raw.get("parameters", {}),
        seed=raw.get("seed"),
        output_dir=raw.get("output_dir", "out"),
    )
