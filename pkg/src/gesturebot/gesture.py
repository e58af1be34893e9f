"""Emotion-driven gesture expression.

The robot keeps eight feeling intensities (short-time state) and a scalar
mood in [0, 1] (long-time state).  The strongest feeling selects a movement
function; the mood acts as the fuzzy membership degree that scales both how
much space the gesture uses and how fast it is executed.  Blocking contact
multiplies the mood by 0.8; between events the mood relaxes exponentially
back to its baseline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .kinematics import Pose9


class Feeling(enum.Enum):
    HAPPINESS = "happiness"
    SADNESS = "sadness"
    FRIGHT = "fright"
    FEAR = "fear"
    THRILL = "thrill"
    DISGUST = "disgust"
    ANGRINESS = "angriness"
    SURPRISE = "surprise"

    @classmethod
    def canonical_order(cls):
        return list(cls)

    @classmethod
    def from_name(cls, name: str) -> "Feeling":
        try:
            return cls(name.lower())
        except ValueError:
            raise UnknownFeelingError(name) from None


class UnknownFeelingError(KeyError):
    """Raised when a feeling has no movement function (or is not a feeling)."""


DEFAULT_MOOD_TIME_CONSTANT = 60.0  # seconds
BLOCK_MOOD_FACTOR = 0.8


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, float(x)))


@dataclass(frozen=True)
class EmotionalState:
    """Feeling intensities plus mood, all kept in [0, 1]."""

    intensity: dict = field(default_factory=dict)
    mood: float = 0.0
    mood_baseline: float = 0.0
    last_update: float = 0.0

    def __post_init__(self):
        clean = {f: 0.0 for f in Feeling}
        clean.update({f: _clamp01(v) for f, v in self.intensity.items()})
        object.__setattr__(self, "intensity", clean)
        object.__setattr__(self, "mood", _clamp01(self.mood))
        object.__setattr__(self, "mood_baseline", _clamp01(self.mood_baseline))

    def with_intensity(self, feeling: Feeling, value: float) -> "EmotionalState":
        updated = dict(self.intensity)
        updated[feeling] = _clamp01(value)
        return replace(self, intensity=updated)

    def with_mood(self, mood: float, baseline: float | None = None) -> "EmotionalState":
        return replace(self, mood=_clamp01(mood),
                       mood_baseline=_clamp01(self.mood_baseline if baseline is None else baseline))


@dataclass(frozen=True)
class MovementFunction:
    """One feeling's gesture: a neutral-to-peak pose pair and a speed range."""

    feeling: Feeling
    neutral_pose: Pose9
    peak_pose: Pose9
    speed_min: float
    speed_max: float

    def __post_init__(self):
        if not (0.0 < self.speed_min <= self.speed_max):
            raise ValueError("need 0 < speed_min <= speed_max")


@dataclass(frozen=True)
class GestureCommand:
    target: Pose9
    commanded_speed: float
    feeling: Feeling
    mu_used: float


def select_feeling(state: EmotionalState) -> Feeling:
    """The feeling with the strongest intensity; earliest in canonical order wins ties."""
    best = Feeling.HAPPINESS
    best_val = state.intensity[best]
    for f in Feeling.canonical_order():
        if state.intensity[f] > best_val:
            best, best_val = f, state.intensity[f]
    return best


def gesture_target(feeling: Feeling, mu: float, library: dict) -> GestureCommand:
    """Interpolate the feeling's movement function at membership degree mu.

    Higher mu means the gesture uses more space (pose closer to the peak)
    and runs faster, per the space/time movement axes.
    """
    if feeling not in library:
        raise UnknownFeelingError(feeling)
    if not (0.0 <= mu <= 1.0):
        raise ValueError(f"mu must be in [0, 1], got {mu}")
    mf = library[feeling]
    neutral = mf.neutral_pose.to_array()
    peak = mf.peak_pose.to_array()
    target = Pose9.from_array(neutral + mu * (peak - neutral))
    speed = mf.speed_min + mu * (mf.speed_max - mf.speed_min)
    return GestureCommand(target=target, commanded_speed=speed, feeling=feeling, mu_used=mu)


def apply_block_event(state: EmotionalState) -> EmotionalState:
    """Blocking contact costs 20% of the current mood."""
    return replace(state, mood=BLOCK_MOOD_FACTOR * state.mood)


def recover_mood(state: EmotionalState, dt: float,
                 tau_mood: float = DEFAULT_MOOD_TIME_CONSTANT) -> EmotionalState:
    """Relax the mood toward its baseline: exponential with time constant tau_mood."""
    if dt < 0:
        raise ValueError("dt must be >= 0")
    gap = state.mood_baseline - state.mood
    mood = state.mood_baseline - gap * float(np.exp(-dt / tau_mood))
    return replace(state, mood=_clamp01(mood))


@dataclass(frozen=True)
class TickReport:
    """Immutable snapshot of the decisions taken in one gesture tick."""

    time: float
    feeling: Feeling
    mu: float
    blocked_handled: bool
    command: GestureCommand
    angles: object  # JointAngles, or None when IK failed and the previous target was kept
    ik_residual: float
    ik_failed: bool


class GestureEngine:
    """Owns the emotional state and runs the periodic gesture loop.

    Single-threaded by contract: one owner calls tick(); the returned
    TickReports are immutable and safe to share.
    """

    def __init__(self, state: EmotionalState, library: dict, solve,
                 ik_residual_threshold: float = 1e-6,
                 tau_mood: float = DEFAULT_MOOD_TIME_CONSTANT):
        self.state = state
        self.library = library
        self.solve = solve  # Pose9 -> (JointAngles, residual)
        self.ik_residual_threshold = ik_residual_threshold
        self.tau_mood = tau_mood
        self._last_angles = None
        self._last_command = None

    def set_intensity(self, feeling: Feeling, value: float):
        self.state = self.state.with_intensity(feeling, value)

    def set_mood(self, mood: float):
        self.state = self.state.with_mood(mood, baseline=mood)

    def tick(self, now: float, blocked: bool) -> TickReport:
        """One gesture period: recover mood, pick the feeling, command a pose.

        On a block reported since the previous tick the mood drops by 20%
        and the robot is sent back to the neutral pose (at the speed the
        reduced mood implies) instead of a new gesture.
        """
        dt = max(0.0, now - self.state.last_update)
        state = recover_mood(self.state, dt, self.tau_mood)
        if blocked:
            state = apply_block_event(state)
        state = replace(state, last_update=now)

        feeling = select_feeling(state)
        if blocked:
            mf = self.library.get(feeling)
            if mf is None:
                raise UnknownFeelingError(feeling)
            speed = mf.speed_min + state.mood * (mf.speed_max - mf.speed_min)
            command = GestureCommand(target=mf.neutral_pose, commanded_speed=speed,
                                     feeling=feeling, mu_used=state.mood)
        else:
            command = gesture_target(feeling, state.mood, self.library)

        angles, residual = self.solve(command.target)
        ik_failed = residual > self.ik_residual_threshold
        if ik_failed and self._last_command is not None:
            # keep the previous target for one tick
            command = self._last_command
            angles = self._last_angles
        else:
            self._last_command = command
            self._last_angles = angles

        self.state = state
        return TickReport(
            time=now,
            feeling=feeling,
            mu=state.mood,
            blocked_handled=blocked,
            command=command,
            angles=angles,
            ik_residual=residual,
            ik_failed=ik_failed,
        )
