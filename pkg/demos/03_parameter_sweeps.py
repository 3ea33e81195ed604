"""
Volume against baseline, focal length, pixel size and distance
==============================================================

Each sweep rebuilds the rig, grids a small region around the target at
3 points per cm and fits V = a x^c to the polyhedron volumes.  The distance
sweep grids up to ~5 million points and takes the longest.
"""

from stereoquant.config import DEFAULT_SWEEP_VALUES, RunConfig, SweepSpec
from stereoquant.experiments import run_sweep

for parameter in ("baseline", "focal", "pixel", "distance"):
    cfg = RunConfig(sweep=SweepSpec(parameter, DEFAULT_SWEEP_VALUES[parameter])).validate()
    res = run_sweep(cfg)
    f = res.fit
    print(f"{parameter:9s} V = {f.coefficient:.4g} x^{f.exponent:+.3f}  R^2 = {f.r_squared:.5f}")
    for row in res.ok_rows():
        m = row.measurement
        print(f"    {row.value:<10.4g} poly {m.polyhedron_volume:.4e}  cuboid {m.cuboid_volume:.4e}")
