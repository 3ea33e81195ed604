"""Run configuration: INI-style key/value files with unit-suffixed quantities.

Example::

    [rig]
    baseline = 100m
    focal_length = 15mm
    pixel_size = 20um
    pixel_count = 2048

    [target]
    position = 0m, 0m, 100m

    [grid]
    density = 3/cm          # or: spacing = 3.333mm
    margin = 1.1
    max_points = 200000000

    [sweep]
    parameter = baseline    # baseline | focal | pixel | distance | spacing
    values = 5m, 10m, 20m

    [plane]
    plane = XY
    center = 0m, 0m, 100m
    extent = 100m
    step = 5m

    [converge]
    baselines = 10m, 50m, 100m
    densities = 0.5/cm, 1/cm, 2/cm, 3/cm

    [output]
    dir = out
    threads = 1
    seed = 0
    jitter = false        # random sub-spacing lattice offsets

Bare numbers are SI (meters).  Every section and key is optional.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .scene_grid import DEFAULT_POINT_CAP, density_to_spacing

LENGTH_UNITS = {
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "μm": 1e-6,
    "nm": 1e-9,
    "km": 1e3,
}

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*)?$")
_DENSITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(?:pts?)?\s*/\s*(cm|m|mm)\s*$")

SWEEP_PARAMETERS = ("baseline", "focal", "pixel", "distance", "spacing")
PLANES = ("XY", "XZ", "YZ")

DEFAULT_SWEEP_VALUES = {
    "baseline": [5.0] + [10.0 * i for i in range(1, 11)],
    "focal": [x * 1e-3 for x in (6, 8, 10, 12, 15, 20, 25, 30)],
    "pixel": [x * 1e-6 for x in (10, 15, 20, 25, 30, 40, 50)],
    "distance": [100.0 + 25.0 * i for i in range(9)],
    "spacing": [0.01 / d for d in (0.5, 1.0, 2.0, 3.0)],
}


def parse_length(text) -> float:
    """'15mm' -> 0.015.  Bare numbers are meters."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _QTY.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse length {text!r}")
    value, unit = float(m.group(1)), (m.group(2) or "m").strip()
    if unit not in LENGTH_UNITS:
        raise ConfigError(f"unknown length unit {unit!r} in {text!r}")
    return value * LENGTH_UNITS[unit]


def parse_density(text) -> float:
    """'3/cm' -> grid spacing in meters (0.00333...)."""
    if isinstance(text, (int, float)):
        return density_to_spacing(float(text))
    m = _DENSITY.match(str(text))
    if m:
        per = {"cm": 1.0, "m": 0.01, "mm": 10.0}[m.group(2)]
        value = float(m.group(1)) * per
    else:
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"cannot parse density {text!r}") from None
    if not value > 0:
        raise ConfigError(f"density must be positive, got {text!r}")
    return density_to_spacing(value)


def _split(text) -> list[str]:
    return [t for t in (s.strip() for s in str(text).split(",")) if t]


def parse_point(text) -> tuple[float, float, float]:
    parts = _split(text)
    if len(parts) != 3:
        raise ConfigError(f"expected three coordinates, got {text!r}")
    return tuple(parse_length(p) for p in parts)


def parse_sweep_value(parameter: str, text) -> float:
    if parameter == "spacing":
        s = str(text)
        return parse_density(s) if "/" in s else parse_length(s)
    return parse_length(text)


@dataclass
class RigSpec:
    baseline: float = 100.0
    focal_length: float = 15e-3
    pixel_size: float = 20e-6
    pixel_count: int = 2048


@dataclass
class SweepSpec:
    parameter: str = "baseline"
    values: list[float] = field(default_factory=lambda: list(DEFAULT_SWEEP_VALUES["baseline"]))


@dataclass
class PlaneSpec:
    plane: str = "XY"
    center: tuple[float, float, float] = (0.0, 0.0, 100.0)
    extent: float = 100.0
    step: float = 5.0


@dataclass
class ConvergeSpec:
    baselines: list[float] = field(default_factory=lambda: [10.0, 25.0, 50.0, 75.0, 100.0])
    densities: list[float] = field(default_factory=lambda: [0.1, 0.25, 0.5, 1.0, 2.0, 3.0])


@dataclass
class RunConfig:
    rig: RigSpec = field(default_factory=RigSpec)
    target: tuple[float, float, float] = (0.0, 0.0, 100.0)
    spacing: float = 0.01 / 3
    margin: float = 1.1
    max_points: int = DEFAULT_POINT_CAP
    sweep: SweepSpec = field(default_factory=SweepSpec)
    plane: PlaneSpec = field(default_factory=PlaneSpec)
    converge: ConvergeSpec = field(default_factory=ConvergeSpec)
    out_dir: Path = Path("out")
    threads: int = 1
    seed: int = 0
    jitter: bool = False

    def validate(self) -> "RunConfig":
        r = self.rig
        for name, v in (("baseline", r.baseline), ("focal_length", r.focal_length),
                        ("pixel_size", r.pixel_size), ("spacing", self.spacing),
                        ("margin", self.margin), ("plane step", self.plane.step),
                        ("plane extent", self.plane.extent)):
            if not v > 0:
                raise ConfigError(f"{name} must be positive")
        if r.pixel_count < 2 or r.pixel_count % 2:
            raise ConfigError("pixel_count must be an even integer >= 2")
        if self.sweep.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
        if any(not v > 0 for v in self.sweep.values):
            raise ConfigError("sweep values must be positive")
        if self.plane.plane not in PLANES:
            raise ConfigError(f"plane must be one of {PLANES}")
        if any(not v > 0 for v in self.converge.baselines + self.converge.densities):
            raise ConfigError("convergence baselines and densities must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        return self

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None}).validate()


def load_config(path=None, text: str | None = None) -> RunConfig:
    """Read a config file (or string); missing keys keep their defaults."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        if text is not None:
            cp.read_string(text)
        elif path is not None:
            with open(path) as fh:
                cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc

    cfg = RunConfig()
    try:
        if cp.has_section("rig"):
            s = cp["rig"]
            cfg.rig = RigSpec(
                baseline=parse_length(s.get("baseline", cfg.rig.baseline)),
                focal_length=parse_length(s.get("focal_length", cfg.rig.focal_length)),
                pixel_size=parse_length(s.get("pixel_size", cfg.rig.pixel_size)),
                pixel_count=int(s.get("pixel_count", cfg.rig.pixel_count)),
            )
        if cp.has_section("target"):
            cfg.target = parse_point(cp["target"].get("position", "0, 0, 100"))
        if cp.has_section("grid"):
            s = cp["grid"]
            if "spacing" in s and "density" in s:
                raise ConfigError("give either grid spacing or density, not both")
            if "spacing" in s:
                cfg.spacing = parse_length(s["spacing"])
            elif "density" in s:
                cfg.spacing = parse_density(s["density"])
            cfg.margin = float(s.get("margin", cfg.margin))
            cfg.max_points = int(float(s.get("max_points", cfg.max_points)))
        if cp.has_section("sweep"):
            s = cp["sweep"]
            param = s.get("parameter", cfg.sweep.parameter).strip()
            if param not in SWEEP_PARAMETERS:
                raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
            values = list(DEFAULT_SWEEP_VALUES[param])
            if "values" in s:
                values = [parse_sweep_value(param, v) for v in _split(s["values"])]
            cfg.sweep = SweepSpec(param, values)
        if cp.has_section("plane"):
            s = cp["plane"]
            cfg.plane = PlaneSpec(
                plane=s.get("plane", cfg.plane.plane).strip().upper(),
                center=parse_point(s["center"]) if "center" in s else cfg.plane.center,
                extent=parse_length(s.get("extent", cfg.plane.extent)),
                step=parse_length(s.get("step", cfg.plane.step)),
            )
        if cp.has_section("converge"):
            s = cp["converge"]
            base = cfg.converge
            cfg.converge = ConvergeSpec(
                baselines=[parse_length(v) for v in _split(s["baselines"])] if "baselines" in s else base.baselines,
                densities=[0.01 / parse_density(v) for v in _split(s["densities"])] if "densities" in s else base.densities,
            )
        if cp.has_section("output"):
            s = cp["output"]
            cfg.out_dir = Path(s.get("dir", str(cfg.out_dir)))
            cfg.threads = int(s.get("threads", cfg.threads))
            cfg.seed = int(s.get("seed", cfg.seed))
            cfg.jitter = s.getboolean("jitter", cfg.jitter)
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
