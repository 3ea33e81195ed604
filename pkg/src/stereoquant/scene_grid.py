"""Regular 3-D lattices of scene points and target-centred regions of interest."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .camera_model import CameraRig, locate_pixel
from .errors import (
    DegenerateRegion,
    GeometryError,
    OutsideRegion,
    TargetNotVisible,
    TooManyPoints,
)

DEFAULT_POINT_CAP = 200_000_000
# Rough working-set cost per grid point while building a two-camera table.
BYTES_PER_POINT = 48

# Absorbs rounding in extent/spacing so that e.g. 1.0/0.5 still yields 3 points.
_COUNT_EPS = 1e-9


def density_to_spacing(points_per_cm: float) -> float:
    """Grid spacing in meters for a density given in points per centimetre."""
    if not points_per_cm > 0:
        raise ValueError("density must be positive")
    return 0.01 / points_per_cm


@dataclass(frozen=True, eq=False)
class Region:
    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.min_corner, dtype=float).reshape(3)
        hi = np.asarray(self.max_corner, dtype=float).reshape(3)
        if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise DegenerateRegion("region corners must be finite")
        if np.any(hi <= lo):
            raise DegenerateRegion(f"max corner {hi} must exceed min corner {lo} on every axis")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def extent(self) -> np.ndarray:
        return self.max_corner - self.min_corner

    @property
    def center(self) -> np.ndarray:
        return (self.min_corner + self.max_corner) / 2

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.min_corner) and np.all(p <= self.max_corner))

    def translated(self, offset) -> "Region":
        d = np.asarray(offset, dtype=float)
        return Region(self.min_corner + d, self.max_corner + d)

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return np.array_equal(self.min_corner, other.min_corner) and np.array_equal(
            self.max_corner, other.max_corner
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SceneGrid:
    """Lattice ``min_corner + spacing * (i, j, k)`` filling a region.

    Flat indices run in C order over ``(i, j, k)``: z varies fastest.
    Coordinates are computed on demand and never stored.
    """

    region: Region
    spacing: float
    counts: tuple[int, int, int]

    @property
    def origin(self) -> np.ndarray:
        return self.region.min_corner

    @property
    def size(self) -> int:
        nx, ny, nz = self.counts
        return nx * ny * nz

    def __len__(self):
        return self.size

    def unravel(self, flat) -> np.ndarray:
        """Flat indices -> (..., 3) lattice indices."""
        return np.stack(np.unravel_index(np.asarray(flat, dtype=np.int64), self.counts), axis=-1)

    def ravel(self, ijk) -> np.ndarray:
        ijk = np.asarray(ijk, dtype=np.int64)
        return np.ravel_multi_index(tuple(np.moveaxis(ijk, -1, 0)), self.counts)

    def coordinates(self, flat) -> np.ndarray:
        """World coordinates (..., 3) of the given flat indices."""
        return self.origin + self.spacing * self.unravel(flat)

    def point(self, i: int, j: int, k: int) -> np.ndarray:
        return self.origin + self.spacing * np.array([i, j, k], dtype=float)

    def chunk_coordinates(self, start: int, stop: int) -> np.ndarray:
        return self.coordinates(np.arange(start, stop, dtype=np.int64))

    def nearest_index(self, point) -> int:
        """Flat index of the lattice point closest to ``point``.

        Half-way cases go to the lower lattice index on each axis, which is
        also the lower flat index.
        """
        p = np.asarray(point, dtype=float)
        if not self.region.contains(p):
            raise OutsideRegion(f"point {tuple(p)} lies outside the gridded region")
        t = (p - self.origin) / self.spacing
        ijk = np.ceil(t - 0.5).astype(np.int64)
        ijk = np.clip(ijk, 0, np.array(self.counts) - 1)
        return int(self.ravel(ijk))

    def lattice_index(self, point, tol: float = 1e-6):
        """Lattice index of ``point`` if it coincides with a grid point, else None."""
        p = np.asarray(point, dtype=float)
        t = (p - self.origin) / self.spacing
        r = np.rint(t)
        if np.any(np.abs(t - r) > tol) or np.any(r < 0) or np.any(r >= self.counts):
            return None
        return tuple(int(x) for x in r)

    def boundary_mask(self, flat) -> np.ndarray:
        """True for indices on the outer faces of the lattice."""
        ijk = self.unravel(flat)
        top = np.array(self.counts) - 1
        return np.any((ijk == 0) | (ijk == top), axis=-1)

    def same_as(self, other: "SceneGrid") -> bool:
        return (
            self.region == other.region
            and self.spacing == other.spacing
            and self.counts == other.counts
        )


def generate_grid(region: Region, spacing: float, max_points: int = DEFAULT_POINT_CAP) -> SceneGrid:
    """Lattice over ``region`` anchored at its min corner."""
    if not spacing > 0 or not np.isfinite(spacing):
        raise DegenerateRegion("spacing must be positive")
    counts = np.floor(region.extent / spacing + _COUNT_EPS).astype(np.int64) + 1
    total = int(np.prod(counts))
    if total > max_points:
        raise TooManyPoints(total, max_points, total * BYTES_PER_POINT)
    return SceneGrid(region, float(spacing), tuple(int(c) for c in counts))


def frustum_halfspaces(rig: CameraRig, pixels):
    """Linear inequalities ``A @ X <= b`` bounding the joint view of ``pixels``.

    Each pixel of each camera contributes four planes through that camera's
    perspective center; together they describe the (closed) polyhedron of
    scene points viewed by every pixel of the tuple.
    """
    rows, rhs = [], []
    for cam, (u, v) in zip(rig, pixels):
        R, C = cam.pose.rotation, cam.pose.center
        ex, ey, ez = R[:, 0], R[:, 1], R[:, 2]
        for axis, table, idx in ((ex, cam.alpha, u), (ey, cam.gamma, v)):
            lo, hi = np.tan(table.edges[idx]), np.tan(table.edges[idx + 1])
            # lo * z_c <= axis_c <= hi * z_c in camera coordinates
            for n in (lo * ez - axis, axis - hi * ez):
                rows.append(n)
                rhs.append(n @ C)
    return np.array(rows), np.array(rhs)


def intersection_bounds(rig: CameraRig, pixels) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned bounding box of the joint pixel view, by linear programming."""
    A, b = frustum_halfspaces(rig, pixels)
    lo, hi = np.empty(3), np.empty(3)
    for axis in range(3):
        for sign, out in ((1.0, lo), (-1.0, hi)):
            c = np.zeros(3)
            c[axis] = sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * 3, method="highs")
            if res.status == 3:
                raise GeometryError("pixel views do not bound a finite region")
            if res.status != 0:
                raise GeometryError(f"pixel views have no common region: {res.message}")
            out[axis] = res.x[axis]
    return lo, hi


def auto_region(rig: CameraRig, target, margin_factor: float = 1.1,
                spacing: float | None = None) -> Region:
    """Region of interest around ``target`` for its pixel correspondence.

    The box is the exact bounding box of the polyhedron seen jointly by the
    pixels that view ``target``, scaled about its centre by
    ``margin_factor`` and widened by one spacing on each side.  When
    ``spacing`` is given the min corner is placed so that ``target`` is a
    lattice point; the lattice (and so every count) then does not depend on
    the margin.
    """
    if not margin_factor > 0:
        raise ValueError("margin_factor must be positive")
    target = np.asarray(target, dtype=float).reshape(3)
    try:
        pixels = [locate_pixel(target, cam) for cam in rig]
    except GeometryError as exc:
        raise TargetNotVisible(str(exc)) from exc
    lo, hi = intersection_bounds(rig, pixels)
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    pad = spacing if spacing is not None else 0.0
    lo = np.minimum(mid - margin_factor * half, target) - pad
    hi = np.maximum(mid + margin_factor * half, target) + pad
    if spacing is not None:
        lo = target - spacing * np.ceil((target - lo) / spacing)
    return Region(lo, hi)


def analytic_footprint(rig: CameraRig, target) -> np.ndarray:
    """Approximate (dx, dy, dz) extent of one pixel correspondence at ``target``.

    Uses the two outermost cameras as the baseline; dx = dy = z k / f and
    dz = z^2 k / (f b).
    """
    target = np.asarray(target, dtype=float)
    cam = rig[0]
    z = cam.pose.to_camera(target)[2]
    kf = cam.intrinsics.pixel_size / cam.intrinsics.focal_length
    centers = np.array([c.pose.center for c in rig])
    b = float(np.max(np.linalg.norm(centers[:, None] - centers[None], axis=-1)))
    if b == 0:
        return np.array([z * kf, z * kf, np.inf])
    return np.array([z * kf, z * kf, z * z * kf / b])
