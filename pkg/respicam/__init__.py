"""respicam public API."""

from .cohorts import COHORTS, Cohort, get_cohort
from .config import (
    DEFAULT_SETTINGS,
    Settings,
    apply_overrides,
    load_config,
    resolve_settings,
)
from .errors import (
    BadCutoffError,
    BadSpecError,
    BadWindowError,
    ConfigError,
    ConstantSignalError,
    DecodeError,
    DimensionMismatchError,
    ImageTooSmallError,
    LengthMismatchError,
    ManifestError,
    NoCornersError,
    NoDataError,
    NoFramesError,
    NoTracksError,
    OutOfBoundsError,
    RespicamError,
    RoiTooSmallError,
    SignalTooShortError,
    TrackingCollapseError,
    WriteError,
)
from .features import (
    DetectorKind,
    FeatureParams,
    FeaturePoint,
    StructureTensorField,
    corner_response,
    detect_corners,
    select_corners,
    structure_tensor,
)
from .frame_io import (
    FrameSequence,
    GrayFrame,
    RgbFrame,
    crop_roi,
    load_sequence,
    save_frame,
    to_grayscale,
    write_sequence,
)
from .imgproc import (
    LAPLACIAN_KERNEL,
    SOBEL_X_KERNEL,
    SOBEL_Y_KERNEL,
    FilterKind,
    apply_filter,
    convolve2d,
    laplacian_filter,
    sobel_magnitude,
)
from .manifest import Condition, SubjectRecord, load_manifest, save_manifest
from .matrix import ReportTable, SubjectResult, evaluate, run_matrix, write_report
from .metrics import MetricsRow, best_row, compute_metrics, format_report_table, summarize_factors
from .pipeline import (
    ALL_CONFIGS,
    PipelineConfig,
    PipelineTrace,
    analyze_configs,
    analyze_sequence,
    run_config,
)
from .respsignal import (
    BandpassSpec,
    MotionSignal,
    PeakParams,
    RateEstimate,
    SignalParams,
    aggregate_motion,
    bandpass,
    detect_peaks,
    estimate_rate,
    respiration_rate,
    variance_trim,
    z_normalize,
)
from .roi import BoundingBox, RoiGeometry, SizeClass, chest_roi_from_face, clamp_box
from .schemas import MANIFEST_SCHEMA, validate_manifest
from .synthgen import SynthClip, SynthSpec, synth_clip, synth_manifest
from .tracking import (
    FlowParams,
    TrackSeries,
    build_pyramid,
    forward_backward_error,
    lk_flow_step,
    track_point_sets,
    track_points,
)

__version__ = "0.1.0"
__description__ = "Respiratory rate from chest motion tracked in video frames"

__all__ = [
    # frames
    "RgbFrame",
    "GrayFrame",
    "FrameSequence",
    "to_grayscale",
    "crop_roi",
    "load_sequence",
    "save_frame",
    "write_sequence",
    # roi
    "BoundingBox",
    "SizeClass",
    "RoiGeometry",
    "clamp_box",
    "chest_roi_from_face",
    # image filters
    "FilterKind",
    "LAPLACIAN_KERNEL",
    "SOBEL_X_KERNEL",
    "SOBEL_Y_KERNEL",
    "convolve2d",
    "laplacian_filter",
    "sobel_magnitude",
    "apply_filter",
    # features
    "DetectorKind",
    "StructureTensorField",
    "FeaturePoint",
    "FeatureParams",
    "structure_tensor",
    "corner_response",
    "select_corners",
    "detect_corners",
    # tracking
    "FlowParams",
    "TrackSeries",
    "build_pyramid",
    "lk_flow_step",
    "track_points",
    "track_point_sets",
    "forward_backward_error",
    # signal
    "MotionSignal",
    "BandpassSpec",
    "PeakParams",
    "SignalParams",
    "RateEstimate",
    "variance_trim",
    "aggregate_motion",
    "bandpass",
    "z_normalize",
    "detect_peaks",
    "respiration_rate",
    "estimate_rate",
    # synthetic data
    "SynthSpec",
    "SynthClip",
    "synth_clip",
    "synth_manifest",
    "Cohort",
    "COHORTS",
    "get_cohort",
    # bench
    "PipelineConfig",
    "PipelineTrace",
    "ALL_CONFIGS",
    "analyze_configs",
    "analyze_sequence",
    "run_config",
    "MetricsRow",
    "compute_metrics",
    "best_row",
    "summarize_factors",
    "format_report_table",
    "Condition",
    "SubjectRecord",
    "load_manifest",
    "save_manifest",
    "MANIFEST_SCHEMA",
    "validate_manifest",
    "SubjectResult",
    "ReportTable",
    "evaluate",
    "run_matrix",
    "write_report",
    # config
    "Settings",
    "DEFAULT_SETTINGS",
    "load_config",
    "apply_overrides",
    "resolve_settings",
    # errors
    "RespicamError",
    "NoFramesError",
    "DimensionMismatchError",
    "DecodeError",
    "OutOfBoundsError",
    "RoiTooSmallError",
    "ImageTooSmallError",
    "BadWindowError",
    "NoCornersError",
    "TrackingCollapseError",
    "NoTracksError",
    "LengthMismatchError",
    "BadCutoffError",
    "ConstantSignalError",
    "SignalTooShortError",
    "BadSpecError",
    "WriteError",
    "NoDataError",
    "ManifestError",
    "ConfigError",
]
