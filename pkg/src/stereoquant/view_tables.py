"""Per-camera pixel view tables and their multi-camera intersection.

A :class:`PixelViewTable` records, for one camera, which grid points each
pixel sees.  :func:`intersect_tables` combines several of them into a
:class:`CorrespondenceTable` keyed by the pixel of every camera.

Both tables keep one integer label per grid point (-1 where the point is
not seen) and expose a compressed mapping ``key -> sorted point indices``
built from those labels.  Grouping per point gives the same result as
intersecting every pair of pixel sets, since each point belongs to at most
one pixel per camera.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .camera_model import Camera, PixelId, locate_pixels
from .errors import FewerThanTwoTables, GridMismatch, NotCovered, NotFound
from .scene_grid import SceneGrid
from .uncertainty_volumes import UncertaintyRegion

DEFAULT_CHUNK = 1 << 20


@dataclass(frozen=True)
class BuildDiagnostics:
    in_view: int
    behind: int
    outside_fov: int

    @property
    def discarded(self) -> int:
        return self.behind + self.outside_fov


def _label_dtype(n_codes: int):
    return np.int32 if n_codes < 2**31 else np.int64


def _chunks(total: int, chunk: int):
    return [(s, min(s + chunk, total)) for s in range(0, total, chunk)]


def pixel_labels(camera: Camera, grid: SceneGrid, chunk: int = DEFAULT_CHUNK,
                 threads: int = 1) -> tuple[np.ndarray, BuildDiagnostics]:
    """Pixel code ``u * n + v`` of every grid point (-1 when unseen)."""
    n = camera.pixel_count
    labels = np.empty(grid.size, dtype=_label_dtype(n * n))
    behind = np.zeros(1, dtype=np.int64)

    def work(span):
        s, e = span
        pts = grid.chunk_coordinates(s, e)
        u, v, vis = locate_pixels(pts, camera)
        z = camera.pose.to_camera(pts)[:, 2]
        labels[s:e] = np.where(vis, u * n + v, -1)
        return int(np.count_nonzero(z <= 0))

    spans = _chunks(grid.size, chunk)
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(threads) as pool:
            behind_counts = list(pool.map(work, spans))
    else:
        behind_counts = [work(s) for s in spans]
    behind = sum(behind_counts)
    in_view = int(np.count_nonzero(labels >= 0))
    return labels, BuildDiagnostics(in_view, behind, grid.size - in_view - behind)


def _csr(codes: np.ndarray, n_keys: int):
    """Group point indices by key id; indices stay ascending within a key."""
    idx = np.flatnonzero(codes >= 0)
    keyed = codes[idx]
    order = np.argsort(keyed, kind="stable")
    indices = idx[order].astype(np.int64)
    counts = np.bincount(keyed, minlength=n_keys)
    offsets = np.zeros(n_keys + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, indices


def _normalise_key(key, n_cameras: int) -> tuple[int, ...]:
    flat = np.asarray(key, dtype=np.int64).ravel()
    if flat.size != 2 * n_cameras:
        raise NotFound(f"expected {n_cameras} pixel ids, got {key!r}")
    return tuple(int(x) for x in flat)


class _KeyedPoints:
    """Shared mapping machinery over (keys, offsets, indices)."""

    keys: np.ndarray
    offsets: np.ndarray
    indices: np.ndarray
    n_cameras: int

    @cached_property
    def _key_lookup(self) -> dict:
        return {tuple(int(x) for x in row): i for i, row in enumerate(self.keys)}

    def __len__(self):
        return self.keys.shape[0]

    def __contains__(self, key):
        try:
            return _normalise_key(key, self.n_cameras) in self._key_lookup
        except NotFound:
            return False

    def _row(self, key) -> int:
        k = _normalise_key(key, self.n_cameras)
        try:
            return self._key_lookup[k]
        except KeyError:
            raise NotFound(f"no grid points for pixel key {k}") from None

    def points_of(self, row: int) -> np.ndarray:
        return self.indices[self.offsets[row]:self.offsets[row + 1]]

    def __getitem__(self, key) -> np.ndarray:
        return self.points_of(self._row(key))

    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    def key_tuple(self, row: int) -> tuple[PixelId, ...]:
        r = self.keys[row]
        return tuple(PixelId(int(r[2 * c]), int(r[2 * c + 1])) for c in range(self.n_cameras))

    def items(self) -> Iterator[tuple[tuple[PixelId, ...], np.ndarray]]:
        for row in range(len(self)):
            yield self.key_tuple(row), self.points_of(row)

    def as_dict(self) -> dict:
        return {k: set(v.tolist()) for k, v in self.items()}


class PixelViewTable(_KeyedPoints):
    """Grid points seen by each pixel of one camera."""

    n_cameras = 1

    def __init__(self, camera: Camera, grid: SceneGrid, labels: np.ndarray,
                 diagnostics: BuildDiagnostics | None = None, camera_id=None):
        self.camera = camera
        self.grid = grid
        self.labels = labels
        self.labels.setflags(write=False)
        self.camera_id = camera.name if camera_id is None else camera_id
        self.diagnostics = diagnostics

    @cached_property
    def _grouped(self):
        n = self.camera.pixel_count
        codes = self.labels
        present = np.unique(codes[codes >= 0])
        row_of = np.searchsorted(present, codes)
        row_of[codes < 0] = -1
        offsets, indices = _csr(row_of, present.size)
        keys = np.stack([present // n, present % n], axis=1).astype(np.int64)
        return keys, offsets, indices

    @property
    def keys(self):
        return self._grouped[0]

    @property
    def offsets(self):
        return self._grouped[1]

    @property
    def indices(self):
        return self._grouped[2]

    def key_tuple(self, row: int) -> PixelId:
        u, v = self.keys[row]
        return PixelId(int(u), int(v))

    @property
    def visible_count(self) -> int:
        return int(np.count_nonzero(self.labels >= 0))


def build_pixel_view_table(camera: Camera, grid: SceneGrid, chunk: int = DEFAULT_CHUNK,
                           threads: int = 1) -> PixelViewTable:
    """Assign every grid point to the pixel that sees it in ``camera``.

    Points behind the camera or outside its field of view are left out of
    the table and tallied in ``table.diagnostics``.
    """
    labels, diag = pixel_labels(camera, grid, chunk, threads)
    return PixelViewTable(camera, grid, labels, diag)


class CorrespondenceTable(_KeyedPoints):
    """Grid points seen jointly by one pixel in each of several cameras.

    ``keys`` has one row per non-empty correspondence, holding
    ``(u_0, v_0, u_1, v_1, ...)``; rows are in lexicographic order.
    """

    def __init__(self, cameras: Sequence[Camera], grid: SceneGrid, keys: np.ndarray,
                 offsets: np.ndarray, indices: np.ndarray):
        self.cameras = tuple(cameras)
        self.grid = grid
        self.keys = np.asarray(keys, dtype=np.int64).reshape(-1, 2 * len(self.cameras))
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        for a in (self.keys, self.offsets, self.indices):
            a.setflags(write=False)

    @property
    def n_cameras(self) -> int:
        return len(self.cameras)

    @property
    def point_total(self) -> int:
        return int(self.indices.size)

    @cached_property
    def point_rows(self) -> np.ndarray:
        """Row of the owning key for every grid point (-1 if none)."""
        rows = np.full(self.grid.size, -1, dtype=_label_dtype(len(self) + 1))
        rows[self.indices] = np.repeat(np.arange(len(self)), self.counts())
        return rows

    def region(self, row: int) -> UncertaintyRegion:
        return UncertaintyRegion(self.points_of(row), self.grid, self.key_tuple(row))


def _fold(codes: np.ndarray, keys: np.ndarray, labels: np.ndarray, n: int):
    """Intersect keyed point groups with one more camera's pixel labels."""
    idx = np.flatnonzero((codes >= 0) & (labels >= 0))
    nn = np.int64(n) * n
    combo = codes[idx].astype(np.int64) * nn + labels[idx]
    uniq, inverse = np.unique(combo, return_inverse=True)
    pix = uniq % nn
    new_keys = np.concatenate(
        [keys[uniq // nn], np.stack([pix // n, pix % n], axis=1)], axis=1
    )
    out = np.full(codes.shape, -1, dtype=_label_dtype(uniq.size + 1))
    out[idx] = inverse.ravel()
    return out, new_keys


def intersect_tables(tables: Sequence[PixelViewTable]) -> CorrespondenceTable:
    """Combine per-camera tables into a correspondence table.

    Tables are folded left to right; empty intersections never appear.
    """
    tables = list(tables)
    if len(tables) < 2:
        raise FewerThanTwoTables("need at least two pixel view tables")
    grid = tables[0].grid
    for t in tables[1:]:
        if not t.grid.same_as(grid):
            raise GridMismatch("all tables must be built over the same scene grid")
    codes = np.zeros(grid.size, dtype=np.int32)
    keys = np.zeros((1, 0), dtype=np.int64)
    for t in tables:
        codes, keys = _fold(codes, keys, t.labels, t.camera.pixel_count)
    offsets, indices = _csr(codes, keys.shape[0])
    return CorrespondenceTable([t.camera for t in tables], grid, keys, offsets, indices)


def build_correspondence_table(cameras: Sequence[Camera], grid: SceneGrid,
                               chunk: int = DEFAULT_CHUNK, threads: int = 1):
    """Build every camera's view table and intersect them.

    Returns ``(correspondence_table, [pixel_view_tables])``.
    """
    views = [build_pixel_view_table(c, grid, chunk, threads) for c in cameras]
    return intersect_tables(views), views


def query_by_pixels(table: CorrespondenceTable, pixel_tuple) -> UncertaintyRegion:
    """Uncertainty region of one pixel correspondence.

    Raises :class:`NotFound` when the pixels have no common scene point in
    the grid, i.e. the match is geometrically impossible.
    """
    row = table._row(pixel_tuple)
    return table.region(row)


def query_by_point(table: CorrespondenceTable, point) -> tuple[PixelId, ...]:
    """Pixel tuple owning the grid point nearest to ``point``."""
    flat = table.grid.nearest_index(point)
    row = int(table.point_rows[flat])
    if row < 0:
        raise NotCovered(f"grid point {flat} is not seen by every camera")
    return table.key_tuple(row)
