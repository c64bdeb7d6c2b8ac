"""Shape sensing and distributed environmental sensing for sensor-band robots."""

from .bus import BandNode, Frame, FrameKind, TelemetryLog, TelemetryRecord, decode_frame, poll_cycle
from .errors import (
    AddressCollision,
    AntiparallelHeadings,
    BandSenseError,
    DegenerateSegment,
    EmptyCloud,
    EmptyInput,
    FrameError,
    InfeasibleBend,
    LengthMismatch,
    MisalignedSeries,
    MissingBands,
    ParseError,
    SchemaVersionMismatch,
    TimeOutOfRange,
    TooFewPoints,
    WindowTooLong,
)
from .estimators import ShapeReconstructor, ShapeUncertaintyEstimator
from .geometry import (
    Pose,
    RobotGeometry,
    SegmentBend,
    ShapeEstimate,
    arc_length,
    bend_between,
    heading_from_orientation,
    reconstruct_shape,
    relative_roll,
    segment_forward,
)
from .orientation import UnitOrientation
from .registration import (
    ErrorReport,
    GroundTruthShape,
    position_errors,
    project_to_plane,
    register_first_segment,
    register_first_segment_3d,
)
from .sensing import (
    HeatEvent,
    ScalarSeries,
    ThermistorLayout,
    baseline_subtract,
    detect_heat_events,
    detect_humidity_rise,
)
from .sim import FailureEvent, FieldSource, Scenario, run_scenario, synthesize_sensor_state
from .uncertainty import (
    BandStats,
    McConfig,
    ShapeCloud,
    cloud_stats,
    envelope_contains,
    sample_shapes,
)

__version__ = "0.1.0"

__all__ = [
    "AddressCollision",
    "AntiparallelHeadings",
    "BandNode",
    "BandSenseError",
    "BandStats",
    "DegenerateSegment",
    "EmptyCloud",
    "EmptyInput",
    "ErrorReport",
    "FailureEvent",
    "FieldSource",
    "Frame",
    "FrameError",
    "FrameKind",
    "GroundTruthShape",
    "HeatEvent",
    "InfeasibleBend",
    "LengthMismatch",
    "McConfig",
    "MisalignedSeries",
    "MissingBands",
    "ParseError",
    "Pose",
    "RobotGeometry",
    "ScalarSeries",
    "Scenario",
    "SchemaVersionMismatch",
    "SegmentBend",
    "ShapeCloud",
    "ShapeEstimate",
    "ShapeReconstructor",
    "ShapeUncertaintyEstimator",
    "TelemetryLog",
    "TelemetryRecord",
    "ThermistorLayout",
    "TimeOutOfRange",
    "TooFewPoints",
    "UnitOrientation",
    "WindowTooLong",
    "arc_length",
    "baseline_subtract",
    "bend_between",
    "cloud_stats",
    "decode_frame",
    "detect_heat_events",
    "detect_humidity_rise",
    "envelope_contains",
    "heading_from_orientation",
    "poll_cycle",
    "position_errors",
    "project_to_plane",
    "reconstruct_shape",
    "register_first_segment",
    "register_first_segment_3d",
    "relative_roll",
    "run_scenario",
    "sample_shapes",
    "segment_forward",
    "synthesize_sensor_state",
]
