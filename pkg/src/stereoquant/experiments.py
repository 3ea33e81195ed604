"""Parameter sweeps, plane maps and grid-density studies.

Every experiment reduces to :func:`measure_target`: size a local region
around a scene point, grid it, build the correspondence table and read off
the uncertainty region of the pixel tuple that contains the point.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .camera_model import CameraRig, PixelId, coplanar_rig, pixel_tuple
from .config import RigSpec, RunConfig
from .error_metrics import median_symmetric_accuracy, rms_error
from .errors import (
    GeometryError,
    NonPositiveData,
    StereoQuantError,
    TargetNotVisible,
    TooFewPoints,
    TooManyPoints,
)
from .scene_grid import auto_region, generate_grid
from .uncertainty_volumes import UncertaintyRegion
from .view_tables import build_correspondence_table, query_by_pixels

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ["param", "value", "poly_vol_m3", "cuboid_vol_m3",
                 "dx_m", "dy_m", "dz_m", "points"]
PLANE_COLUMNS = ["x_m", "y_m", "z_m", "poly_vol_m3", "cuboid_vol_m3"]
CONVERGE_COLUMNS = ["baseline_m", "density_per_cm", "poly_vol_m3",
                    "cuboid_vol_m3", "points"]
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Measurement:
    target: tuple[float, float, float]
    pixels: tuple[PixelId, ...]
    region: UncertaintyRegion
    grid_points: int

    @property
    def polyhedron_volume(self) -> float:
        return self.region.polyhedron_volume

    @property
    def cuboid_volume(self) -> float:
        return self.region.cuboid_volume

    @property
    def point_count(self) -> int:
        return self.region.point_count

    @property
    def ratio(self) -> float:
        return self.cuboid_volume / self.polyhedron_volume


def build_rig(spec: RigSpec) -> CameraRig:
    return coplanar_rig(spec.baseline, spec.focal_length, spec.pixel_size, spec.pixel_count)


def measure_target(rig: CameraRig, target, spacing: float, margin: float = 1.1,
                   jitter=None, max_points: int | None = None,
                   threads: int = 1) -> Measurement:
    """Uncertainty region of the pixel correspondence containing ``target``.

    ``jitter`` shifts the lattice by a sub-spacing offset; without it the
    target is itself a grid point.  The region is grown until the
    correspondence no longer touches the edge of the grid.
    """
    target = tuple(float(t) for t in target)
    try:
        pixels = pixel_tuple(target, rig.cameras)
    except GeometryError as exc:
        raise TargetNotVisible(str(exc)) from exc
    kw = {} if max_points is None else {"max_points": max_points}
    for _ in range(4):
        region = auto_region(rig, target, margin, spacing=spacing)
        if jitter is not None:
            region = region.translated(np.asarray(jitter, dtype=float) - spacing)
            region = type(region)(region.min_corner, region.max_corner + spacing)
        grid = generate_grid(region, spacing, **kw)
        table, _ = build_correspondence_table(rig.cameras, grid, threads=threads)
        result = query_by_pixels(table, pixels)
        if not result.touches_grid_boundary():
            return Measurement(target, pixels, result, grid.size)
        margin *= 2
    raise GeometryError(f"correspondence at {target} keeps touching the grid boundary")


# ---------------------------------------------------------------- sweeps

@dataclass(frozen=True)
class PowerLawFit:
    coefficient: float
    exponent: float
    r_squared: float

    def __call__(self, x):
        return self.coefficient * np.asarray(x, dtype=float) ** self.exponent


def fit_power_law(xs, ys) -> PowerLawFit:
    """Least-squares fit of ln y = ln a + c ln x."""
    x = np.asarray(xs, dtype=float).ravel()
    y = np.asarray(ys, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError("xs and ys differ in length")
    if x.size < 3:
        raise TooFewPoints("need at least three points for a power-law fit")
    if np.any(x <= 0) or np.any(y <= 0):
        raise NonPositiveData("power-law fits need strictly positive data")
    lx, ly = np.log(x), np.log(y)
    c, ln_a = np.polyfit(lx, ly, 1)
    resid = ly - (ln_a + c * lx)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - np.sum(resid**2) / ss_tot)
    return PowerLawFit(float(np.exp(ln_a)), float(c), float(r2))


@dataclass
class SweepRow:
    param: str
    value: float
    measurement: Measurement | None = None
    error: str | None = None


@dataclass
class SweepResult:
    parameter: str
    rows: list[SweepRow]
    fit: PowerLawFit | None = None

    def ok_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.measurement is not None]

    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.ok_rows()])

    def polyhedron_volumes(self) -> np.ndarray:
        return np.array([r.measurement.polyhedron_volume for r in self.ok_rows()])

    def cuboid_volumes(self) -> np.ndarray:
        return np.array([r.measurement.cuboid_volume for r in self.ok_rows()])


def _sweep_setting(cfg: RunConfig, value: float):
    rig = cfg.rig
    target, spacing = cfg.target, cfg.spacing
    p = cfg.sweep.parameter
    if p == "baseline":
        rig = RigSpec(value, rig.focal_length, rig.pixel_size, rig.pixel_count)
    elif p == "focal":
        rig = RigSpec(rig.baseline, value, rig.pixel_size, rig.pixel_count)
    elif p == "pixel":
        rig = RigSpec(rig.baseline, rig.focal_length, value, rig.pixel_count)
    elif p == "distance":
        target = (target[0], target[1], value)
    elif p == "spacing":
        spacing = value
    return build_rig(rig), target, spacing


def _jitters(cfg: RunConfig, n: int, spacing: float | None = None):
    """Per-job lattice offsets, fixed by the seed and the job index."""
    if not cfg.jitter:
        return [None] * n
    s = cfg.spacing if spacing is None else spacing
    return [np.random.default_rng([cfg.seed, i]).uniform(0, s, 3) for i in range(n)]


def _ordered_map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def run_sweep(cfg: RunConfig) -> SweepResult:
    """Measure the target's uncertainty region at every sweep value.

    Settings where the target is not visible (or the grid is too large)
    are recorded with an error message and skipped in the fit.
    """
    p = cfg.sweep.parameter

    values = list(cfg.sweep.values)
    offsets = dict(zip(values, _jitters(cfg, len(values))))

    def one(value):
        rig, target, spacing = _sweep_setting(cfg, value)
        jit = None if offsets[value] is None else offsets[value] * spacing / cfg.spacing
        try:
            m = measure_target(rig, target, spacing, cfg.margin, jitter=jit,
                               max_points=cfg.max_points)
        except (GeometryError, TooManyPoints) as exc:
            log.warning("sweep %s=%g failed: %s", p, value, exc)
            return SweepRow(p, value, error=f"{type(exc).__name__}: {exc}")
        return SweepRow(p, value, m)

    rows = _ordered_map(one, values, cfg.threads)
    result = SweepResult(p, rows)
    good = result.ok_rows()
    if len(good) >= 3 and p != "spacing":
        result.fit = fit_power_law(result.values(), result.polyhedron_volumes())
    return result


def _g(x) -> str:
    return f"{x:.9g}"


def sweep_csv(result: SweepResult, n_cameras: int = 2) -> str:
    names = [chr(ord("A") + i) for i in range(n_cameras)]
    header = SWEEP_COLUMNS + [f"{a}{n}" for n in names for a in ("u", "v")]
    buf = io.StringIO()
    buf.write(f"# stereoquant sweep v{SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in result.rows:
        if r.measurement is None:
            w.writerow([r.param, _g(r.value)] + ["nan"] * 5 + [0] + [-1] * (2 * n_cameras))
            continue
        m = r.measurement
        dims = m.region.cuboid_dims
        pix = [c for pid in m.pixels for c in pid]
        w.writerow([r.param, _g(r.value), _g(m.polyhedron_volume), _g(m.cuboid_volume),
                    *(_g(d) for d in dims), m.point_count, *pix])
    return buf.getvalue()


# ---------------------------------------------------------------- planes

_PLANE_AXES = {"XY": (0, 1), "XZ": (0, 2), "YZ": (1, 2)}


def plane_samples(plane: str, center, extent: float, step: float) -> np.ndarray:
    """Sample positions on a square lattice of the given plane."""
    a, b = _PLANE_AXES[plane]
    n = int(np.floor(extent / step + 1e-9))
    offs = step * np.arange(-n, n + 1)
    pts = np.tile(np.asarray(center, dtype=float), (offs.size**2, 1))
    ga, gb = np.meshgrid(offs, offs, indexing="ij")
    pts[:, a] += ga.ravel()
    pts[:, b] += gb.ravel()
    return pts


@dataclass
class PlaneMap:
    plane: str
    points: np.ndarray
    polyhedron: np.ndarray
    cuboid: np.ndarray
    counts: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.polyhedron)

    def grid_shape(self) -> tuple[int, int]:
        n = int(round(np.sqrt(len(self.points))))
        return n, n

    def raster(self, which: str = "polyhedron") -> np.ndarray:
        return getattr(self, which).reshape(self.grid_shape())


def run_plane_map(cfg: RunConfig, samples: np.ndarray | None = None) -> PlaneMap:
    """Polyhedron and cuboid volume at each sample position of a plane.

    Samples not seen by every camera are reported as NaN.
    """
    pc = cfg.plane
    pts = plane_samples(pc.plane, pc.center, pc.extent, pc.step) if samples is None else np.asarray(samples, float)
    rig = build_rig(cfg.rig)
    offsets = _jitters(cfg, len(pts))

    def one(i):
        try:
            m = measure_target(rig, pts[i], cfg.spacing, cfg.margin, jitter=offsets[i],
                               max_points=cfg.max_points)
        except (GeometryError, TooManyPoints):
            return np.nan, np.nan, 0
        return m.polyhedron_volume, m.cuboid_volume, m.point_count

    out = _ordered_map(one, range(len(pts)), cfg.threads)
    poly, cub, cnt = (np.array(c) for c in zip(*out)) if out else (np.empty(0),) * 3
    return PlaneMap(pc.plane, pts, poly.astype(float), cub.astype(float), cnt.astype(int))


def plane_csv(pm: PlaneMap) -> str:
    buf = io.StringIO()
    buf.write(f"# stereoquant plane v{SCHEMA_VERSION} {pm.plane}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLANE_COLUMNS)
    for (x, y, z), pv, cv in zip(pm.points, pm.polyhedron, pm.cuboid):
        w.writerow([_g(x), _g(y), _g(z), _g(pv), _g(cv)])
    return buf.getvalue()


# ---------------------------------------------------------------- convergence

@dataclass
class ConvergenceResult:
    baselines: list[float]
    densities: list[float]
    polyhedron: np.ndarray = field(repr=False)
    cuboid: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    errors: dict = field(default_factory=dict)


def run_spacing_convergence(cfg: RunConfig) -> ConvergenceResult:
    """Volumes for every (baseline, density) pair; densities in points/cm.

    All lattices contain the target, so doubling the density refines the
    previous lattice rather than shifting it.
    """
    bs, ds = list(cfg.converge.baselines), list(cfg.converge.densities)
    jobs = [(b, d) for b in bs for d in ds]

    def one(job):
        b, d = job
        rig = build_rig(RigSpec(b, cfg.rig.focal_length, cfg.rig.pixel_size, cfg.rig.pixel_count))
        try:
            m = measure_target(rig, cfg.target, 0.01 / d, cfg.margin, max_points=cfg.max_points)
        except (GeometryError, TooManyPoints) as exc:
            return job, None, f"{type(exc).__name__}: {exc}"
        return job, m, None

    res = ConvergenceResult(bs, ds, np.full((len(bs), len(ds)), np.nan),
                            np.full((len(bs), len(ds)), np.nan),
                            np.zeros((len(bs), len(ds)), dtype=int))
    for (b, d), m, err in _ordered_map(one, jobs, cfg.threads):
        i, j = bs.index(b), ds.index(d)
        if m is None:
            res.errors[(b, d)] = err
            continue
        res.polyhedron[i, j] = m.polyhedron_volume
        res.cuboid[i, j] = m.cuboid_volume
        res.counts[i, j] = m.point_count
    return res


def converge_csv(res: ConvergenceResult) -> str:
    buf = io.StringIO()
    buf.write(f"# stereoquant converge v{SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONVERGE_COLUMNS)
    for i, b in enumerate(res.baselines):
        for j, d in enumerate(res.densities):
            w.writerow([_g(b), _g(d), _g(res.polyhedron[i, j]), _g(res.cuboid[i, j]),
                        int(res.counts[i, j])])
    return buf.getvalue()


# ---------------------------------------------------------------- comparison

def _read_series(path, column: str | None):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise StereoQuantError(f"{path} holds no data")
    header, data = rows[0], rows[1:]
    try:
        [float(x) for x in header]
        header, data = None, rows
    except ValueError:
        pass
    if header is None:
        vals = np.array([[float(x) for x in r[:2]] for r in data])
        return vals[:, 0], vals[:, 1]
    col = column
    if col is None:
        col = "cuboid_vol_m3" if "cuboid_vol_m3" in header else header[-1]
    if col not in header:
        raise StereoQuantError(f"column {col!r} not found in {path}")
    xi = header.index("value") if "value" in header else 0
    yi = header.index(col)
    x = np.array([float(r[xi]) for r in data])
    y = np.array([float(r[yi]) for r in data])
    return x, y


def compare_series(predicted_csv, observed_csv, column: str | None = None,
                   align: bool = True) -> dict:
    """RMSE and MSA between two volume series stored as CSV.

    Files may be sweep outputs (``column`` defaults to ``cuboid_vol_m3``) or
    plain two-column ``value,volume`` tables.  With ``align`` the rows are
    matched on their ``value`` column; otherwise by position.
    """
    xp, p = _read_series(predicted_csv, column)
    xo, o = _read_series(observed_csv, column)
    if align:
        keep_p, keep_o = [], []
        for i, x in enumerate(xp):
            j = np.flatnonzero(np.isclose(xo, x, rtol=1e-9, atol=0))
            if j.size:
                keep_p.append(i)
                keep_o.append(j[0])
        p, o = p[keep_p], o[keep_o]
    ok = np.isfinite(p) & np.isfinite(o)
    p, o = p[ok], o[ok]
    return {"n": int(p.size), "rmse_m3": rms_error(p, o),
            "msa_percent": median_symmetric_accuracy(p, o)}


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path
