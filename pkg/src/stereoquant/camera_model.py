"""Pinhole cameras, pixel-edge angle tables and point-to-pixel lookup.

Coordinates follow the coplanar stereo convention: x along the baseline,
y perpendicular to it, z along the optic axis (depth).  A camera's pose
stores its perspective center and the rotation taking camera-frame vectors
to the world frame, so a world point ``P`` has camera coordinates
``R.T @ (P - C)``.

Pixel ``u`` spans the continuous image interval ``[u, u + 1)``; the
principal point sits at ``(n/2, n/2)`` by default, i.e. on the border
between the two central pixels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BehindCamera, OutOfView

# Angles closer than this to a pixel edge count as lying on it.  Lattice
# points often sit exactly on pixel borders and floating-point noise in
# arctan would otherwise split them arbitrarily between neighbours.
EDGE_TOL = 1e-12


@dataclass(frozen=True)
class CameraIntrinsics:
    """Square-pixel, square-sensor pinhole intrinsics (SI units)."""

    focal_length: float
    pixel_size: float
    pixel_count: int
    principal_point: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.focal_length > 0:
            raise ValueError("focal_length must be positive")
        if not self.pixel_size > 0:
            raise ValueError("pixel_size must be positive")
        n = self.pixel_count
        if int(n) != n or n < 2 or n % 2:
            raise ValueError("pixel_count must be an even integer >= 2")
        object.__setattr__(self, "pixel_count", int(n))
        if self.principal_point is None:
            object.__setattr__(self, "principal_point", (n / 2, n / 2))
        else:
            u0, v0 = self.principal_point
            object.__setattr__(self, "principal_point", (float(u0), float(v0)))

    @property
    def scale(self) -> float:
        """Image scaling factor f/k, in pixels per unit tangent."""
        return self.focal_length / self.pixel_size

    @property
    def half_fov(self) -> float:
        """Half field of view (rad) for a centered principal point."""
        return float(np.arctan(self.pixel_count * self.pixel_size / (2 * self.focal_length)))


@dataclass(frozen=True, eq=False)
class CameraPose:
    center: np.ndarray
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(3)
        r = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-9, rtol=0):
            raise ValueError("rotation must be orthonormal")
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "rotation", r)

    def to_camera(self, points) -> np.ndarray:
        """World points (..., 3) -> camera-frame coordinates (..., 3)."""
        p = np.asarray(points, dtype=float)
        return (p - self.center) @ self.rotation

    def __eq__(self, other):
        if not isinstance(other, CameraPose):
            return NotImplemented
        return np.array_equal(self.center, other.center) and np.array_equal(
            self.rotation, other.rotation
        )

    __hash__ = None


class PixelId(NamedTuple):
    u: int
    v: int


@dataclass(frozen=True, eq=False)
class AngleTable:
    """Ordered pixel-border angles (n + 1 values, radians)."""

    edges: np.ndarray

    def __post_init__(self):
        e = np.array(self.edges, dtype=float)
        if e.ndim != 1 or e.size < 3:
            raise ValueError("an angle table needs at least 3 edges")
        if np.any(np.diff(e) <= 0):
            raise ValueError("edge angles must be strictly increasing")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def pixel_count(self) -> int:
        return self.edges.size - 1

    def widths(self) -> np.ndarray:
        """Angle subtended by each pixel."""
        return np.diff(self.edges)

    def lookup(self, angles) -> np.ndarray:
        """Pixel index for each angle; -1 where outside the table.

        Intervals are left-closed, so an angle on an edge belongs to the
        pixel on its positive side.
        """
        a = np.asarray(angles, dtype=float)
        idx = np.searchsorted(self.edges, a + EDGE_TOL, side="right") - 1
        idx[(idx < 0) | (idx >= self.pixel_count) | ~np.isfinite(a)] = -1
        return idx


def pixel_edge_angles(intrinsics: CameraIntrinsics, axis: str = "u") -> AngleTable:
    """Border angles arctan(k*i/f) of every pixel along one sensor axis.

    ``axis`` selects which principal-point coordinate offsets the edges
    ("u" gives the azimuth table, "v" the elevation table).  For the
    default centered principal point both tables are identical and
    ``i`` runs over -n/2 .. n/2.
    """
    u0, v0 = intrinsics.principal_point
    c = {"u": u0, "v": v0}[axis]
    i = np.arange(intrinsics.pixel_count + 1) - c
    return AngleTable(np.arctan(intrinsics.pixel_size * i / intrinsics.focal_length))


@dataclass(frozen=True, eq=False)
class Camera:
    intrinsics: CameraIntrinsics
    pose: CameraPose
    name: str = ""

    @cached_property
    def alpha(self) -> AngleTable:
        return pixel_edge_angles(self.intrinsics, "u")

    @cached_property
    def gamma(self) -> AngleTable:
        if self.intrinsics.principal_point[0] == self.intrinsics.principal_point[1]:
            return self.alpha
        return pixel_edge_angles(self.intrinsics, "v")

    @property
    def pixel_count(self) -> int:
        return self.intrinsics.pixel_count

    def projection_matrix(self) -> np.ndarray:
        """3x4 matrix C.P.R mapping homogeneous world points to (su, sv, s)."""
        f = self.intrinsics.focal_length
        k = self.intrinsics.pixel_size
        u0, v0 = self.intrinsics.principal_point
        C = np.array([[1 / k, 0, u0], [0, 1 / k, v0], [0, 0, 1.0]])
        P = np.array([[f, 0, 0, 0], [0, f, 0, 0], [0, 0, 1, 0.0]])
        Rt = np.eye(4)
        Rt[:3, :3] = self.pose.rotation.T
        Rt[:3, 3] = -self.pose.rotation.T @ self.pose.center
        return C @ P @ Rt

    def __eq__(self, other):
        if not isinstance(other, Camera):
            return NotImplemented
        return self.intrinsics == other.intrinsics and self.pose == other.pose

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CameraRig:
    cameras: tuple[Camera, ...]

    def __post_init__(self):
        object.__setattr__(self, "cameras", tuple(self.cameras))
        if not self.cameras:
            raise ValueError("a rig needs at least one camera")

    def __len__(self):
        return len(self.cameras)

    def __iter__(self):
        return iter(self.cameras)

    def __getitem__(self, i):
        return self.cameras[i]

    def __eq__(self, other):
        if not isinstance(other, CameraRig):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))

    __hash__ = None


def coplanar_rig(
    baseline: float,
    focal_length: float = 15e-3,
    pixel_size: float = 20e-6,
    pixel_count: int = 2048,
) -> CameraRig:
    """Two parallel cameras A at (-b/2, 0, 0) and B at (+b/2, 0, 0)."""
    if not baseline > 0:
        raise ValueError("baseline must be positive")
    intr = CameraIntrinsics(focal_length, pixel_size, pixel_count)
    a = Camera(intr, CameraPose([-baseline / 2, 0, 0]), "A")
    b = Camera(intr, CameraPose([baseline / 2, 0, 0]), "B")
    return CameraRig((a, b))


def _as_pose(camera) -> CameraPose:
    return camera.pose if isinstance(camera, Camera) else camera


def spherical_coordinates(points, camera):
    """Vectorised form of :func:`to_spherical`.

    Returns ``(rho, theta, phi, in_front)``; angles are NaN where the
    point is not in front of the camera.
    """
    xyz = _as_pose(camera).to_camera(points)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    rho = np.sqrt(x * x + y * y + z * z)
    in_front = z > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(in_front, np.arctan(x / z), np.nan)
        phi = np.where(in_front, np.arctan(y / z), np.nan)
    return rho, theta, phi, in_front


def to_spherical(point, camera) -> tuple[float, float, float]:
    """(rho, theta, phi) of a world point relative to a camera's optic center.

    theta = arctan(x/z) is the azimuth and phi = arctan(y/z) the elevation,
    both measured from the optic axis in the camera frame.
    """
    rho, theta, phi, ok = spherical_coordinates(np.asarray(point, dtype=float), camera)
    if not ok:
        raise BehindCamera(f"point {tuple(np.ravel(point))} is behind the camera")
    return float(rho), float(theta), float(phi)


def locate_pixels(points, camera: Camera) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pixel indices of many world points.

    Returns ``(u, v, visible)``; u and v are -1 where ``visible`` is False.
    """
    _, theta, phi, _ = spherical_coordinates(points, camera)
    u = camera.alpha.lookup(theta)
    v = camera.gamma.lookup(phi)
    visible = (u >= 0) & (v >= 0)
    u[~visible] = -1
    v[~visible] = -1
    return u, v, visible


def locate_pixel(point, camera, alpha: AngleTable | None = None,
                 gamma: AngleTable | None = None) -> PixelId:
    """The pixel viewing a world point, found by binary search of edge angles.

    ``camera`` is a :class:`Camera`, or a bare :class:`CameraPose` together
    with explicit ``alpha`` (and optionally ``gamma``) tables.
    """
    if alpha is None:
        alpha, gamma = camera.alpha, camera.gamma
    gamma = alpha if gamma is None else gamma
    _, theta, phi = to_spherical(point, camera)
    u = int(alpha.lookup(np.array([theta]))[0])
    v = int(gamma.lookup(np.array([phi]))[0])
    if u < 0 or v < 0:
        raise OutOfView(f"point {tuple(np.ravel(point))} is outside the field of view")
    return PixelId(u, v)


def project_points(points, camera: Camera) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Continuous image coordinates through the homogeneous w = C.P.R.X chain.

    Returns ``(u, v, in_front)``.
    """
    X = np.asarray(points, dtype=float)
    h = np.concatenate([X, np.ones(X.shape[:-1] + (1,))], axis=-1)
    w = h @ camera.projection_matrix().T
    s = w[..., 2]
    in_front = s > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(in_front, w[..., 0] / s, np.nan)
        v = np.where(in_front, w[..., 1] / s, np.nan)
    return u, v, in_front


def project_perspective(point, camera: Camera) -> tuple[float, float]:
    """Un-quantised pixel coordinates (u, v) of a world point."""
    u, v, ok = project_points(np.asarray(point, dtype=float), camera)
    if not ok:
        raise BehindCamera(f"point {tuple(np.ravel(point))} is behind the camera")
    return float(u), float(v)


def rotation_matrix(yaw: float = 0.0, pitch: float = 0.0, roll: float = 0.0) -> np.ndarray:
    """Camera-to-world rotation from yaw (about y), pitch (about x), roll (about z)."""
    cy, sy = np.cos(yaw), np.sin(yaw)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cr, sr = np.cos(roll), np.sin(roll)
    Ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    Rx = np.array([[1, 0, 0], [0, cp, -sp], [0, sp, cp]])
    Rz = np.array([[cr, -sr, 0], [sr, cr, 0], [0, 0, 1]])
    return Ry @ Rx @ Rz


def pixel_tuple(point, cameras: Sequence[Camera]) -> tuple[PixelId, ...]:
    """Pixel of ``point`` in every camera; raises if any camera misses it."""
    return tuple(locate_pixel(point, cam) for cam in cameras)
