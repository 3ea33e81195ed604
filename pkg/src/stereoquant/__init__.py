"""Quantization-error uncertainty volumes for multi-camera vision systems."""

from .camera_model import (
    AngleTable,
    Camera,
    CameraIntrinsics,
    CameraPose,
    CameraRig,
    PixelId,
    coplanar_rig,
    locate_pixel,
    locate_pixels,
    pixel_edge_angles,
    project_perspective,
    project_points,
    rotation_matrix,
    to_spherical,
)
from .error_metrics import median_symmetric_accuracy, rms_error
from .scene_grid import Region, SceneGrid, auto_region, density_to_spacing, generate_grid
from .table_io import load_table, save_table
from .uncertainty_volumes import (
    UncertaintyRegion,
    cuboid_volume,
    export_voxels,
    polyhedron_volume,
)
from .view_tables import (
    CorrespondenceTable,
    PixelViewTable,
    build_correspondence_table,
    build_pixel_view_table,
    intersect_tables,
    query_by_pixels,
    query_by_point,
)

__version__ = "0.1.0"


__all__ = [
    "AngleTable",
    "Camera",
    "CameraIntrinsics",
    "CameraPose",
    "CameraRig",
    "PixelId",
    "coplanar_rig",
    "locate_pixel",
    "locate_pixels",
    "pixel_edge_angles",
    "project_perspective",
    "project_points",
    "rotation_matrix",
    "to_spherical",
    "median_symmetric_accuracy",
    "rms_error",
    "Region",
    "SceneGrid",
    "auto_region",
    "density_to_spacing",
    "generate_grid",
    "load_table",
    "save_table",
    "UncertaintyRegion",
    "cuboid_volume",
    "export_voxels",
    "polyhedron_volume",
    "CorrespondenceTable",
    "PixelViewTable",
    "build_correspondence_table",
    "build_pixel_view_table",
    "intersect_tables",
    "query_by_pixels",
    "query_by_point",
]
