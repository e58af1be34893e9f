"""Emotion-driven gesture engine for an 8-DoF robot torso.

Subpackages: kinematics (closed-form forward kinematics and joint limits),
ik (bacterial memetic inverse-kinematics solver), gesture (fuzzy mood-scaled
gesture model), runtime (servo simulation and blocking monitor), harness
(scenario runner), cli (command-line front end).
"""

from .config import RunConfig, default_movement_library, load_config, save_config
from .gesture import (
    EmotionalState,
    Feeling,
    GestureCommand,
    GestureEngine,
    MovementFunction,
    apply_block_event,
    gesture_target,
    recover_mood,
    select_feeling,
)
from .harness import ScenarioEvent, TimelineRecord, load_scenario, parse_scenario, run_scenario
from .ik import BmaParams, SolveReport, solve_ik
from .kinematics import (
    DEFAULT_LIMITS,
    JointAngles,
    JointLimitTable,
    LinkLengths,
    Pose9,
    clamp_joints,
    fk_array,
    forward_kinematics,
    pose_error,
    validate_joints,
)
from .runtime import (
    ArrivedEvent,
    BlockedEvent,
    MonitorConfig,
    MoveMsg,
    MotorCommand,
    MotorRuntime,
    Obstruction,
    check_blocking,
    decode_message,
    encode_message,
    estimate_speeds,
    run_motion,
    simulate_step,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
