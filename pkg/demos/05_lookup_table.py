"""
A stored correspondence table
=============================

For a fixed rig the whole table can be built once, saved, and queried
later: given a stereo match, look up the scene points it could have come
from; given a scene point, find the pixels that see it.
"""

from pathlib import Path

from stereoquant import (
    Region,
    build_correspondence_table,
    coplanar_rig,
    generate_grid,
    load_table,
    query_by_pixels,
    query_by_point,
    save_table,
)
from stereoquant.errors import NotFound

rig = coplanar_rig(100.0)
grid = generate_grid(Region([-0.5, -0.5, 99.5], [0.5, 0.5, 100.5]), 0.01)
table, views = build_correspondence_table(rig.cameras, grid)
print(f"{grid.size} grid points, {len(table)} pixel pairs")
print("discarded per camera:", [v.diagnostics.discarded for v in views])

path = save_table(table, Path("demo_out") / "rig100.sqlt")
table = load_table(path)

pixels = query_by_point(table, (0.1, -0.2, 100.0))
region = query_by_pixels(table, pixels)
print(f"point (0.1, -0.2, 100) seen by {pixels}")
print(f"  its region holds {region.point_count} points, centroid {region.centroid.round(3)}")

# a match the geometry cannot produce
try:
    query_by_pixels(table, [(0, 0), (2047, 2047)])
except NotFound as exc:
    print("rejected match:", exc)
