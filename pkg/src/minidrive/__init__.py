"""minidrive: headless deterministic simulator for a 1:14-scale vehicle."""

from .core import BodyFrame, Pose2D, VehicleGeometry, body_to_world, world_to_body, wrap_angle
from .dynamics import (
    ActuatorCommand,
    ActuatorLimits,
    Gear,
    VehicleState,
    apply_limits,
    step,
    turning_radius,
)
from .environment import (
    DynamicBox,
    MapError,
    TileType,
    WorldMap,
    load_map,
    raycast,
    resolve_collisions,
    validate,
)
from .sensors import EncoderState, ImuReading, LidarScan, Telemetry
from .signals import HeadlightMode, IndicatorMode, LightRequest, SignalState, update_signals
from .simcore import Mode, SimClock, SimConfig, Simulator, bundled_map_text

__version__ = "0.1.0"
