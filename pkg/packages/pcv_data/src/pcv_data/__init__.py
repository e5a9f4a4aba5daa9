"""Point-cloud video data: depth conversion, resampling, file formats, background subtraction."""

from pcv_data.background import (
    BackgroundWindow,
    BgsubConfig,
    bgsub_baseline_score,
    build_density_grid,
    classify_foreground,
)
from pcv_data.camera import CameraIntrinsics, depth_to_pointcloud, load_depth_png, load_intrinsics
from pcv_data.formats import (
    PCV1_VERSION,
    Manifest,
    ManifestEntry,
    Split,
    read_labels,
    read_manifest,
    read_pcv,
    write_labels,
    write_manifest,
    write_pcv,
    write_ply,
)
from pcv_data.models import Clip, PointFrame
from pcv_data.resample import resample_frame, segment_video

__all__ = [
    "PCV1_VERSION",
    "BackgroundWindow",
    "BgsubConfig",
    "CameraIntrinsics",
    "Clip",
    "Manifest",
    "ManifestEntry",
    "PointFrame",
    "Split",
    "bgsub_baseline_score",
    "build_density_grid",
    "classify_foreground",
    "depth_to_pointcloud",
    "load_depth_png",
    "load_intrinsics",
    "read_labels",
    "read_manifest",
    "read_pcv",
    "resample_frame",
    "segment_video",
    "write_labels",
    "write_manifest",
    "write_pcv",
    "write_ply",
]
