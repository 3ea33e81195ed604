"""
Adding a third camera
=====================

Intersections fold left to right, so a third view simply refines every
pixel pair.  A camera above the baseline, tilted down towards the target,
trims the uncertainty region.
"""

import math

from stereoquant import Camera, CameraPose, CameraRig, coplanar_rig, rotation_matrix
from stereoquant.experiments import measure_target

pair = coplanar_rig(100.0)
intr = pair[0].intrinsics
top = Camera(intr, CameraPose([0.0, 50.0, 0.0], rotation_matrix(pitch=math.atan2(50.0, 100.0))), "C")
trio = CameraRig(pair.cameras + (top,))

for name, rig in (("two cameras", pair), ("three cameras", trio)):
    m = measure_target(rig, (0.0, 0.0, 100.0), spacing=0.01)
    print(f"{name}: {m.point_count} points, polyhedron {m.polyhedron_volume:.6f} m3, "
          f"cuboid {m.cuboid_volume:.6f} m3")
