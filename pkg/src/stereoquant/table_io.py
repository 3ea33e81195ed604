"""Binary persistence for correspondence tables.

Layout (all little-endian)::

    header   magic b"SQLT", u16 version, u16 camera count
    cameras  per camera: f64 focal, f64 pixel size, u32 n, f64 u0, f64 v0,
             3 x f64 center, 9 x f64 rotation (row major)
    grid     3 x f64 min corner, 3 x f64 max corner, f64 spacing,
             3 x u64 counts, u64 key count
    records  per key: 2m x u32 pixel ids, u64 point count,
             u64 first index, (count - 1) x u32 index deltas
    trailer  u32 CRC-32 of everything above
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .camera_model import Camera, CameraIntrinsics, CameraPose
from .errors import CorruptFile, VersionMismatch
from .scene_grid import Region, SceneGrid
from .view_tables import CorrespondenceTable

MAGIC = b"SQLT"
VERSION = 1

_HEAD = struct.Struct("<4sHH")
_CAM = struct.Struct("<ddIdd3d9d")
_GRID = struct.Struct("<3d3dd3QQ")
_REC_TAIL = struct.Struct("<QQ")


def dumps_table(table: CorrespondenceTable) -> bytes:
    m = table.n_cameras
    parts = [_HEAD.pack(MAGIC, VERSION, m)]
    for cam in table.cameras:
        i = cam.intrinsics
        parts.append(_CAM.pack(i.focal_length, i.pixel_size, i.pixel_count,
                               *i.principal_point, *cam.pose.center,
                               *cam.pose.rotation.ravel()))
    g = table.grid
    parts.append(_GRID.pack(*g.region.min_corner, *g.region.max_corner,
                            g.spacing, *g.counts, len(table)))
    if g.size > 2**32:
        raise ValueError("grids beyond 2**32 points cannot be delta-encoded as u32")
    keys = table.keys.astype("<u4")
    counts = table.counts()
    for row in range(len(table)):
        pts = table.points_of(row)
        parts.append(keys[row].tobytes())
        parts.append(_REC_TAIL.pack(int(counts[row]), int(pts[0])))
        parts.append(np.diff(pts).astype("<u4").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def save_table(table: CorrespondenceTable, path) -> Path:
    path = Path(path)
    path.write_bytes(dumps_table(table))
    return path


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptFile("table file is truncated")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, st: struct.Struct):
        return st.unpack(self.take(st.size))


def loads_table(data: bytes) -> CorrespondenceTable:
    if len(data) < _HEAD.size + 4:
        raise CorruptFile("table file is truncated")
    magic, version, m = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise CorruptFile("not a correspondence table file")
    if version != VERSION:
        raise VersionMismatch(f"file version {version}, reader supports {VERSION}")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise CorruptFile("checksum mismatch")

    r = _Reader(body)
    r.take(_HEAD.size)
    cameras = []
    for c in range(m):
        vals = r.unpack(_CAM)
        f, k, n, u0, v0 = vals[:5]
        center, rot = vals[5:8], np.array(vals[8:17]).reshape(3, 3)
        intr = CameraIntrinsics(f, k, n, (u0, v0))
        cameras.append(Camera(intr, CameraPose(center, rot), chr(ord("A") + c) if c < 26 else str(c)))
    g = r.unpack(_GRID)
    region = Region(g[0:3], g[3:6])
    grid = SceneGrid(region, g[6], tuple(int(x) for x in g[7:10]))
    n_keys = g[10]

    keys = np.empty((n_keys, 2 * m), dtype=np.int64)
    chunks, counts = [], np.empty(n_keys, dtype=np.int64)
    key_bytes = 8 * m
    for row in range(n_keys):
        keys[row] = np.frombuffer(r.take(key_bytes), dtype="<u4")
        count, first = r.unpack(_REC_TAIL)
        if count < 1:
            raise CorruptFile("empty record")
        deltas = np.frombuffer(r.take(4 * (count - 1)), dtype="<u4").astype(np.int64)
        pts = np.empty(count, dtype=np.int64)
        pts[0] = first
        np.cumsum(deltas, out=pts[1:])
        pts[1:] += first
        counts[row] = count
        chunks.append(pts)
    if r.pos != len(body):
        raise CorruptFile("trailing bytes after last record")
    indices = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    if indices.size and (indices.max() >= grid.size or indices.min() < 0):
        raise CorruptFile("point index outside the grid")
    offsets = np.zeros(n_keys + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return CorrespondenceTable(cameras, grid, keys, offsets, indices)


def load_table(path) -> CorrespondenceTable:
    return loads_table(Path(path).read_bytes())


def tables_equal(a: CorrespondenceTable, b: CorrespondenceTable) -> bool:
    return (
        a.grid.same_as(b.grid)
        and len(a.cameras) == len(b.cameras)
        and all(x == y for x, y in zip(a.cameras, b.cameras))
        and np.array_equal(a.keys, b.keys)
        and np.array_equal(a.offsets, b.offsets)
        and np.array_equal(a.indices, b.indices)
    )
