"""Flat ``key = value`` scenario configuration and presets.

File format: UTF-8 text, one ``key = value`` per line, ``#`` starts a comment.
Unknown keys are rejected.  A file may name a ``scenario`` only and rely on
the preset for everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

SCENARIOS = ("group_velocity_table", "fig4", "fig5", "fig6", "fig7", "oracle_validate",
             "conditions")


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s):
    return tuple(float(x) for x in str(s).replace(",", " ").split())


def _opt_float(s):
    return None if str(s).strip().lower() in ("", "none", "auto") else float(s)


# key -> (parser, documentation)
SCHEMA = {
    "scenario": (str, "one of " + ", ".join(SCENARIOS)),
    "output_dir": (str, "directory for CSV/JSON output"),
    "seed": (int, "reserved; all scenarios are deterministic"),
    "threads": (int, "FFT worker threads (CIT_FILTER_THREADS overrides)"),
    "units": (str, "natural (c = L = 1) or mhz (rates in MHz = omega/2pi, times in us, L in m)"),
    "G": (float, "cavity coupling"),
    "gn_sqrt": (_opt_float, "collective probe coupling g sqrt(n); or give od"),
    "od": (_opt_float, "optical depth, fixes g sqrt(n)"),
    "gamma": (float, "excited-state amplitude decay"),
    "kappa": (float, "cavity energy decay"),
    "L": (float, "medium length"),
    "c": (float, "speed of light (mhz units: m/s)"),
    "t_p": (float, "1/e half-width of the pulse amplitude in time"),
    "mean_photons": (float, "|alpha|^2 of the weak coherent pulse"),
    "pulse_center": (float, "initial pulse centre (natural units)"),
    "z_min": (float, "grid start"),
    "z_max": (float, "grid end"),
    "n_points": (int, "1D grid points"),
    "n_points_2d": (int, "points per axis of the two-photon grid"),
    "z_in": (float, "medium entry"),
    "z_out": (float, "medium exit"),
    "w_ramp": (_opt_float, "edge ramp width (default 4 dz)"),
    "scheme": (str, "spectral or upwind"),
    "dt": (_opt_float, "time step (default: stability bound times safety)"),
    "safety": (float, "fraction of the RK4 stability bound"),
    "t_end": (_opt_float, "end time (default: scenario specific)"),
    "snapshots": (_floats, "snapshot times"),
    "snapshot_stride": (int, "keep every k-th grid point in 2D heatmaps"),
    "record_every": (int, "detector sampling stride in steps"),
    "ratio": (float, "G / (g sqrt(n)) for group-velocity tables"),
    "ratios": (_floats, "list of ratios for group_velocity_table"),
    "n_max": (int, "largest photon number in tables"),
    "light_speed_ratio": (float, "target (G/g sqrt(n))^2 after lowering c (fig7)"),
    "points_per_width": (float, "fig7 grid points per compressed 1/e half-width"),
    "kappa_in_dynamics": (_bool, "include kappa in the fig7 propagation"),
    "quick": (_bool, "reduced sizes for oracle_validate"),
}


@dataclass
class ScenarioConfig:
    scenario: str
    values: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def output_dir(self) -> Path:
        return Path(self.values.get("output_dir", f"out/{self.scenario}"))


def parse_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value", None)
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}", key)
        try:
            values[key] = SCHEMA[key][0](val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}", key) from None
    return values


def load(path_or_preset: str, overrides: dict | None = None) -> ScenarioConfig:
    """Read a config file, or use a preset when the argument names one."""
    p = Path(path_or_preset)
    if p.is_file():
        values = parse_text(p.read_text(encoding="utf-8"), str(p))
    elif path_or_preset in SCENARIOS:
        values = {"scenario": path_or_preset}
    else:
        raise ConfigError(f"no config file or preset named {path_or_preset!r}", None)
    for key, val in (overrides or {}).items():
        values.update(parse_text(f"{key} = {val}", "--set"))
    return build(values)


def build(values: dict) -> ScenarioConfig:
    scenario = values.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}, got {scenario!r}",
                          "scenario")
    merged = dict(PRESETS[scenario])
    merged.update(values)
    if merged.get("units", "natural") not in ("natural", "mhz"):
        raise ConfigError("units must be natural or mhz", "units")
    if merged.get("scheme", "spectral") not in ("spectral", "upwind"):
        raise ConfigError("scheme must be spectral or upwind", "scheme")
    if merged.get("gn_sqrt") is not None and merged.get("od") is not None:
        raise ConfigError("give either gn_sqrt or od", "od")
    return ScenarioConfig(scenario, merged)


def system_params(cfg: ScenarioConfig):
    """SystemParams in the config's own units (physical for ``mhz``)."""
    from .params import SPEED_OF_LIGHT, SystemParams, physical_from_mhz

    v = cfg.values
    if v.get("units", "natural") == "mhz":
        return physical_from_mhz(v["G"], v["gamma"], od=v.get("od"), gn_MHz=v.get("gn_sqrt"),
                                 kappa_MHz=v.get("kappa", 0.0), L=v.get("L", 1e-4),
                                 c=v.get("c", SPEED_OF_LIGHT))
    if v.get("od") is not None:
        return SystemParams.from_optical_depth(v["G"], v["od"], v.get("gamma", 0.0),
                                               v.get("kappa", 0.0), v.get("c", 1.0), v.get("L", 1.0))
    return SystemParams(G=v["G"], gn_sqrt=v.get("gn_sqrt") or 0.0, gamma=v.get("gamma", 0.0),
                        kappa=v.get("kappa", 0.0), c=v.get("c", 1.0), L=v.get("L", 1.0))


def pulse_spec(cfg: ScenarioConfig):
    from .params import PulseSpec

    v = cfg.values
    t_p = v["t_p"] * (1e-6 if v.get("units", "natural") == "mhz" else 1.0)
    return PulseSpec(t_p=t_p, center=v.get("pulse_center", 0.0),
                     mean_photons=v.get("mean_photons", 0.0))


PRESETS = {
    "group_velocity_table": {"ratios": (0.1, 1.0, 10.0), "n_max": 100},
    "fig4": {"ratio": 1.0, "n_max": 30},
    "fig5": {"ratio": 0.01, "n_max": 100},
    "fig6": {
        "G": 500.0, "gn_sqrt": 500.0, "gamma": 10.0, "kappa": 0.0,
        "t_p": 1.0 / math.sqrt(2.0), "pulse_center": 2.0,
        "z_min": 0.0, "z_max": 8.0, "z_in": 4.5, "z_out": 5.5,
        "n_points": 1024, "n_points_2d": 192, "t_end": 6.5,
        "snapshots": (0.0, 2.0, 3.5, 5.0, 6.5), "snapshot_stride": 1, "record_every": 2,
        "safety": 0.8,
    },
    "fig7": {
        "units": "mhz", "G": 3.0, "gamma": 6.0, "kappa": 0.1, "od": 50.0, "L": 1e-4,
        "t_p": 1.0, "mean_photons": 0.25,
        "light_speed_ratio": 0.1, "kappa_in_dynamics": False,
        "points_per_width": 3.0, "record_every": 4, "safety": 0.8,
    },
    "oracle_validate": {"quick": False},
    "conditions": {
        "units": "mhz", "G": 3.0, "gamma": 6.0, "kappa": 0.1, "od": 50.0, "L": 1e-4,
        "t_p": 1.0,
    },
}


def describe_schema() -> str:
    return "\n".join(f"{k:18s} {doc}" for k, (_, doc) in SCHEMA.items())
