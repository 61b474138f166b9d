"""Vehicle perception on a surround-view fisheye rig.

Detection records from the four cameras (vehicle, wheel and bumper boxes,
type labels, regressed headings) are lifted to ground contact points,
re-identified across branches, channels and frames, and turned into
bird's-eye-view vehicle boxes from geometry alone.
"""

__version__ = "0.1.0"

from .camera import (
    CHANNEL_ORDER,
    CameraRig,
    Channel,
    FisheyeCamera,
    GroundPoint,
    PixelPoint,
    RadialDistortion,
    default_rig,
    distort,
    load_calibration,
    load_calibration_file,
    pixel_to_ground,
    project_ground_to_pixel,
    undistort,
)
from .model import (
    BevBox,
    ContactPoint,
    ContactPointKind,
    MultidimensionalVector,
    TypeCatalog,
    VehicleTypeSpec,
    default_catalog,
    load_catalog,
    load_catalog_file,
    lookup_type_attrs,
)
from .adapters import AdapterConfig, BoxClass, DetectedBox, DetectionRecord, HeadingEstimate, TypeLabel
from .reid import FusionConfig, assign_channel_ids, fuse_branches, merge_bev_targets
from .bev import PoseCase, PoseEstimate, VisibleSide, estimate_pose, generate_bev_vector
from .pipeline import FrameResult, Pipeline, PipelineConfig, process_frame
from .synth import EvalThresholds, GroundTruthVehicle, NoiseSpec, evaluate, render_detections, sample_scene
