"""
Pixel edge angles
=================

Perspective projection makes the outer pixels of a sensor subtend smaller
angles than the central ones.  This script prints the angular width of a few
pixels of a 2048-pixel sensor behind a 15 mm lens.
"""

import numpy as np

from stereoquant import CameraIntrinsics, pixel_edge_angles

intr = CameraIntrinsics(focal_length=15e-3, pixel_size=20e-6, pixel_count=2048)
table = pixel_edge_angles(intr)

print(f"half field of view: {np.degrees(intr.half_fov):.3f} deg")

# widths in microradians for the centre pixel and some towards the edge
widths = table.widths() * 1e6
for u in (1024, 1280, 1536, 1792, 2047):
    print(f"pixel {u:4d}: {widths[u]:.4f} urad")

# the centre pixel is widest
print("outer/centre width ratio:", round(widths[-1] / widths[1024], 4))
