import math

import numpy as np
import pytest

from stereoquant import Camera, CameraIntrinsics, CameraPose, CameraRig, coplanar_rig
from stereoquant.camera_model import project_points, rotation_matrix

# Filled by tests/test_acceptance.py, printed once at the end of the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def brute_force_pixels(points, camera, tie=1e-9):
    """Pixel of each point via continuous projection and floor.

    Coordinates within ``tie`` of an integer are snapped first, mirroring the
    left-closed pixel convention.  Returns (u, v, visible, is_tie).
    """
    u, v, front = project_points(points, camera)
    n = camera.pixel_count
    ru, rv = np.rint(u), np.rint(v)
    tie_u = np.abs(u - ru) < tie
    tie_v = np.abs(v - rv) < tie
    u = np.where(tie_u, ru, u)
    v = np.where(tie_v, rv, v)
    with np.errstate(invalid="ignore"):
        fu, fv = np.floor(u), np.floor(v)
        vis = front & (fu >= 0) & (fu < n) & (fv >= 0) & (fv < n)
    fu = np.where(vis, fu, -1).astype(int)
    fv = np.where(vis, fv, -1).astype(int)
    return fu, fv, vis, (tie_u | tie_v) & front


@pytest.fixture
def toy_camera():
    """n=8, f=1 m, k=0.1 m, at the origin looking along +z."""
    return Camera(CameraIntrinsics(1.0, 0.1, 8), CameraPose([0, 0, 0]), "T")


@pytest.fixture
def toy_rig():
    """Two toy cameras 1 m apart."""
    intr = CameraIntrinsics(1.0, 0.1, 8)
    return CameraRig((Camera(intr, CameraPose([-0.5, 0, 0]), "A"),
                      Camera(intr, CameraPose([0.5, 0, 0]), "B")))


@pytest.fixture
def default_rig():
    return coplanar_rig(100.0, 15e-3, 20e-6, 2048)


def random_toy_rig(rng, n_cameras=2, rotate=True):
    """Small cameras looking roughly at the box [-1, 1]^2 x [2, 4]."""
    cams = []
    for i in range(n_cameras):
        n = int(rng.choice([4, 6, 8, 10, 12, 14, 16]))
        f = float(rng.uniform(0.5, 2.0))
        k = float(rng.uniform(0.05, 0.3))
        center = np.array([rng.uniform(-1.5, 1.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)])
        if rotate:
            look = np.array([0.0, 0.0, 3.0]) - center
            yaw = math.atan2(look[0], look[2]) + rng.uniform(-0.1, 0.1)
            pitch = -math.atan2(look[1], math.hypot(look[0], look[2])) + rng.uniform(-0.1, 0.1)
            R = rotation_matrix(yaw, pitch, rng.uniform(-0.3, 0.3))
        else:
            R = np.eye(3)
        pp = None if rng.random() < 0.5 else (n / 2 + rng.uniform(-1, 1), n / 2 + rng.uniform(-1, 1))
        cams.append(Camera(CameraIntrinsics(f, k, n, pp), CameraPose(center, R), chr(65 + i)))
    return CameraRig(tuple(cams))
