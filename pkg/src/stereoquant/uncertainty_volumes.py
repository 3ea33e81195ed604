"""Volumes and shapes of uncertainty regions (sets of grid points)."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyRegion
from .scene_grid import SceneGrid


def polyhedron_volume(count: int, spacing: float) -> float:
    """Volume g^3 * p of ``count`` voxels of side ``spacing``."""
    if count < 1:
        raise EmptyRegion("an uncertainty region needs at least one point")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    return float(spacing) ** 3 * int(count)


def cuboid_volume(points, padding: float = 0.0) -> tuple[np.ndarray, float]:
    """Axis-aligned bounding box dimensions and volume of a point set.

    Dimensions are measured between extreme coordinates; ``padding`` is
    added to each dimension (pass the spacing to get the voxel-padded box).
    A single point therefore has zero extent and zero volume unless padded.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise EmptyRegion("an uncertainty region needs at least one point")
    dims = pts.max(axis=0) - pts.min(axis=0) + padding
    return dims, float(np.prod(dims))


@dataclass(frozen=True, eq=False)
class UncertaintyRegion:
    """Grid points shared by one pixel correspondence, with derived volumes."""

    point_indices: np.ndarray
    grid: SceneGrid
    pixels: tuple = ()
    padded: bool = False
    cuboid_min: np.ndarray = field(init=False)
    cuboid_max: np.ndarray = field(init=False)
    index_span: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        idx = np.unique(np.asarray(self.point_indices, dtype=np.int64))
        if idx.size == 0:
            raise EmptyRegion("an uncertainty region needs at least one point")
        idx.setflags(write=False)
        object.__setattr__(self, "point_indices", idx)
        ijk = self.grid.unravel(idx)
        lo = self.grid.origin + self.grid.spacing * ijk.min(axis=0)
        hi = self.grid.origin + self.grid.spacing * ijk.max(axis=0)
        object.__setattr__(self, "cuboid_min", lo)
        object.__setattr__(self, "cuboid_max", hi)
        # lattice steps per axis; keeps dims independent of the grid origin
        object.__setattr__(self, "index_span", ijk.max(axis=0) - ijk.min(axis=0))

    @property
    def point_count(self) -> int:
        return int(self.point_indices.size)

    @property
    def spacing(self) -> float:
        return self.grid.spacing

    @property
    def polyhedron_volume(self) -> float:
        return polyhedron_volume(self.point_count, self.spacing)

    @property
    def cuboid_dims(self) -> np.ndarray:
        pad = self.spacing if self.padded else 0.0
        return self.spacing * self.index_span + pad

    @property
    def cuboid_volume(self) -> float:
        return float(np.prod(self.cuboid_dims))

    @property
    def degenerate(self) -> bool:
        """True when the unpadded box has no extent along some axis."""
        return bool(np.any(self.index_span == 0))

    @property
    def centroid(self) -> np.ndarray:
        return self.points().mean(axis=0)

    def points(self) -> np.ndarray:
        return self.grid.coordinates(self.point_indices)

    def touches_grid_boundary(self) -> bool:
        """Whether the region may be clipped by the edge of the grid."""
        return bool(np.any(self.grid.boundary_mask(self.point_indices)))


def export_voxels(region: UncertaintyRegion, path, format: str = "csv") -> Path:
    """Write voxel centroids (``csv``) or a cube mesh (``ply``)."""
    path = Path(path)
    pts = region.points()
    if format == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x_m", "y_m", "z_m"])
            for x, y, z in pts:
                w.writerow([f"{x:.9g}", f"{y:.9g}", f"{z:.9g}"])
    elif format == "ply":
        _write_ply(pts, region.spacing, path)
    else:
        raise ValueError(f"unknown voxel format {format!r}")
    return path


_CUBE_CORNERS = np.array(
    [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
     [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=float) - 0.5
_CUBE_FACES = np.array(
    [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4],
     [2, 3, 7, 6], [1, 2, 6, 5], [0, 4, 7, 3]])


def _write_ply(pts, g, path):
    verts = (pts[:, None, :] + g * _CUBE_CORNERS[None]).reshape(-1, 3)
    faces = (_CUBE_FACES[None] + 8 * np.arange(len(pts))[:, None, None]).reshape(-1, 4)
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(verts)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write(f"element face {len(faces)}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        for x, y, z in verts:
            fh.write(f"{x:.9g} {y:.9g} {z:.9g}\n")
        for f in faces:
            fh.write("4 %d %d %d %d\n" % tuple(f))


def read_voxel_csv(path) -> np.ndarray:
    """Centroids from a file written by :func:`export_voxels`."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data.reshape(-1, 3)
