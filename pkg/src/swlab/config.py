"""Scenario configuration: INI-style key-value sections with strict validation.

One flat schema covers every scenario kind; unknown sections or keys are
rejected by name, values are type- and range-checked, and defaults are filled
so a minimal config runs.  The same parsed object drives the scenario runner
and is echoed verbatim into the report for reproducibility.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

KINDS = ("distance", "wave-cone", "fractional", "kernels", "masuda")
PRESET_NAMES = ("euclidean", "heisenberg", "grushin")


class ConfigError(ValueError):
    """Raised for schema violations; the message names the offending key."""


def _floats(text: str) -> list:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _ints(text: str) -> list:
    return [int(tok) for tok in text.replace(",", " ").split()]


def _intervals(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        parts = tok.split(":")
        if len(parts) != 2:
            raise ConfigError(f"interval '{tok}' must look like lo:hi")
        out.append((float(parts[0]), float(parts[1])))
    return out


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"boolean value expected, got '{text}'")


# section -> key -> (parser, default); None default means "optional, absent"
_SCHEMA = {
    "scenario": {
        "kind": (str.strip, None),
        "preset": (str.strip, "heisenberg"),
        "seed": (int, 0),
    },
    "grid": {
        "box": (_intervals, None),
        "resolution": (_ints, None),
    },
    "distance": {
        "source": (_floats, None),
        "eps0": (float, 1.0),
        "eps_levels": (int, 12),
        "stencil_radius": (int, 2),
        "ball_axis": (int, None),
        "target_point": (_floats, None),
        "target_distance": (float, None),
    },
    "wave": {
        "source": (_floats, None),
        "t0": (float, 0.5),
        "delta": (str.strip, "auto"),
        "dt_factor": (float, 0.5),
        "bump_center": (_floats, None),
        "bump_radius": (float, 0.25),
        "eps0": (float, 1.0),
        "eps_levels": (int, 8),
        "stencil_radius": (int, 2),
        "snapshots": (int, 24),
    },
    "fractional": {
        "s": (float, 0.5),
        "modes": (int, 64),
        "t_levels": (int, 6),
        "t0": (str.strip, "auto"),
        "bump_center": (_floats, None),
        "bump_radius": (float, 0.2),
        "route_modes": (int, 5),
    },
    "kernels": {
        "s_values": (_floats, [0.1, 0.25, 0.5, 0.75, 0.9]),
        "lambda_values": (_floats, [0.5, 1.0, 4.0]),
        "t_values": (_floats, [0.1, 0.5, 1.0, 2.0, 3.0]),
        "monotone_samples": (int, 1000),
    },
    "masuda": {
        "modes": (int, 20),
        "eta0": (float, 0.5),
        "xi_extent": (float, 0.1),
        "step": (float, 0.01),
        "refine_check": (_bool, True),
        "smoothing_tau": (float, 0.1),
    },
    "thresholds": {
        "c_half_tol": (float, 1e-8),
        "d_closed_form_tol": (float, 1e-9),
        "theta_half_tol": (float, 1e-8),
        "theta_zero_tol": (float, 1e-10),
        "euclid_l2_tol": (float, 0.02),
        "violation_fraction_tol": (float, 1e-3),
        "target_tol": (float, 0.02),
        "delta_low": (float, 0.4),
        "delta_high": (float, 0.6),
        "leakage_tol": (float, 1e-2),
        "energy_drift_tol": (float, 1e-6),
        "trace_rel_tol": (float, 1e-3),
        "two_route_tol": (float, 1e-8),
        "masuda_residual_tol": (float, 1e-3),
        "order_min": (float, 1.6),
        "order_max": (float, 2.6),
    },
    "output": {
        "dir": (str.strip, "out"),
        "dump_fields": (_bool, True),
    },
}

_KIND_SECTION = {"distance": "distance", "wave-cone": "wave",
                 "fractional": "fractional", "kernels": "kernels",
                 "masuda": "masuda"}

_NEEDS_GRID = ("distance", "wave-cone", "fractional", "masuda")


@dataclass
class ScenarioConfig:
    kind: str
    preset: str
    seed: int
    box: list | None
    resolution: list | None
    params: dict
    thresholds: dict
    output_dir: str
    dump_fields: bool
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return dict(self.raw)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a config; raises ConfigError naming bad keys."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    parsed: dict = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section '{section}'")
        parsed[section] = {}
        for key, value in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section '{section}'")
            conv, _default = _SCHEMA[section][key]
            try:
                parsed[section][key] = conv(value)
            except ConfigError:
                raise
            except Exception as exc:
                raise ConfigError(
                    f"bad value for '{section}.{key}': {value!r} ({exc})"
                ) from exc

    def get(section: str, key: str):
        if key in parsed.get(section, {}):
            return parsed[section][key]
        return _SCHEMA[section][key][1]

    kind = get("scenario", "kind")
    if kind is None:
        raise ConfigError("missing required key 'scenario.kind'")
    if kind not in KINDS:
        raise ConfigError(f"unknown scenario kind '{kind}'; known: {KINDS}")
    preset = get("scenario", "preset")
    if preset not in PRESET_NAMES:
        raise ConfigError(f"unknown preset '{preset}'; known: {PRESET_NAMES}")

    box = get("grid", "box")
    resolution = get("grid", "resolution")
    if kind in _NEEDS_GRID:
        if box is None or resolution is None:
            raise ConfigError(f"scenario '{kind}' requires grid.box and "
                              "grid.resolution")
        if len(box) != len(resolution):
            raise ConfigError("grid.box and grid.resolution disagree on the "
                              "dimension")
        for lo, hi in box:
            if not hi > lo:
                raise ConfigError(f"degenerate box interval {lo}:{hi}")
        if any(r < 3 for r in resolution):
            raise ConfigError("grid.resolution must be >= 3 per axis")

    sec = _KIND_SECTION[kind]
    params = {key: get(sec, key) for key in _SCHEMA[sec]}
    for other in _KIND_SECTION.values():
        if other != sec and other in parsed and parsed[other]:
            raise ConfigError(f"section '{other}' does not apply to scenario "
                              f"kind '{kind}'")

    if kind == "fractional":
        s = params["s"]
        if not 0.0 < s < 1.0:
            raise ConfigError(f"fractional.s must lie in (0, 1), got {s}")
        if params["t0"] != "auto":
            try:
                params["t0"] = float(params["t0"])
            except ValueError as exc:
                raise ConfigError("fractional.t0 must be 'auto' or a number") \
                    from exc
    if kind == "kernels":
        for s in params["s_values"]:
            if not 0.0 < s < 1.0:
                raise ConfigError(f"kernels.s_values must lie in (0, 1), got {s}")
    if kind == "wave-cone":
        if params["t0"] <= 0:
            raise ConfigError("wave.t0 must be positive")
        if params["delta"] != "auto":
            try:
                params["delta"] = float(params["delta"])
            except ValueError as exc:
                raise ConfigError("wave.delta must be 'auto' or a number") \
                    from exc
        if not 0 < params["dt_factor"] <= 1.0:
            raise ConfigError("wave.dt_factor must lie in (0, 1]")
    if kind == "masuda":
        if params["eta0"] <= 0:
            raise ConfigError("masuda.eta0 must be positive")
        if params["step"] <= 0:
            raise ConfigError("masuda.step must be positive")

    thresholds = {key: get("thresholds", key) for key in _SCHEMA["thresholds"]}

    return ScenarioConfig(
        kind=kind, preset=preset, seed=get("scenario", "seed"),
        box=box, resolution=resolution, params=params, thresholds=thresholds,
        output_dir=get("output", "dir"), dump_fields=get("output", "dump_fields"),
        raw={s: dict(parsed[s]) for s in parsed},
    )


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
