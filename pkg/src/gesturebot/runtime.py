"""Discrete-time servo simulation and the speed-based blocking monitor.

Eight simulated motors advance linearly toward commanded targets.  Every
monitor period their speeds are estimated from position differences and
compared against a fixed fraction of the commanded speed; one motor below
the limit means an obstacle, and all motion stops.  The boundary to the
rest of the system is a line-oriented ASCII protocol (MOVE / STOP / POS /
BLOCKED / ARRIVED) mirroring the phone-to-controller link of the real
robot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

N_MOTORS = 8


@dataclass(frozen=True)
class MonitorConfig:
    period: float = 0.1          # seconds between speed checks
    limit_factor: float = 0.9372  # blocked when estimated < limit_factor * v_sent
    arrival_tolerance: float = 0.005  # rad; motors this close to target are exempt
    max_speed: float = 6.0       # rad/s cap on commanded speeds

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be > 0")
        if not (0.0 < self.limit_factor < 1.0):
            raise ValueError("limit_factor must be in (0, 1)")
        if self.arrival_tolerance < 0:
            raise ValueError("arrival_tolerance must be >= 0")


@dataclass
class MotorCommand:
    """Targets and per-motor commanded speeds (v_sent), both length 8."""

    targets: np.ndarray
    speeds: np.ndarray

    def __post_init__(self):
        self.targets = np.asarray(self.targets, dtype=float)
        self.speeds = np.asarray(self.speeds, dtype=float)
        if self.targets.shape != (N_MOTORS,) or self.speeds.shape != (N_MOTORS,):
            raise ValueError("MotorCommand needs 8 targets and 8 speeds")

    def validate(self, cfg: MonitorConfig, limits=None):
        if np.any(self.speeds <= 0) or np.any(self.speeds > cfg.max_speed):
            raise ValueError("speeds must be positive and within the motor cap")
        if limits is not None and (np.any(self.targets < limits.lower)
                                   or np.any(self.targets > limits.upper)):
            raise ValueError("targets outside joint limits")


@dataclass(frozen=True)
class Obstruction:
    """Scheduled drag on one motor: fraction 1 is free, 0 fully held."""

    motor: int
    start: float
    duration: float
    fraction: float

    def active(self, t: float) -> bool:
        return self.start <= t < self.start + self.duration


@dataclass(frozen=True)
class BlockedEvent:
    time: float
    motor: int
    estimated_speed: float
    threshold: float


@dataclass(frozen=True)
class ArrivedEvent:
    time: float


@dataclass(frozen=True)
class TelemetryEvent:
    time: float
    positions: tuple


class MotorBank:
    """State of the eight simulated servos plus monitor bookkeeping."""

    def __init__(self, positions=None):
        self.positions = np.zeros(N_MOTORS) if positions is None else np.asarray(positions, dtype=float).copy()
        self.targets = self.positions.copy()
        self.speeds = np.ones(N_MOTORS)
        self.moving = np.zeros(N_MOTORS, dtype=bool)
        self.obstructed_fraction = np.ones(N_MOTORS)
        self.prev_sample_positions = self.positions.copy()

    def command(self, command: MotorCommand, arrival_tolerance: float):
        self.targets = command.targets.copy()
        self.speeds = command.speeds.copy()
        self.moving = np.abs(self.targets - self.positions) > arrival_tolerance

    def stop_all(self):
        self.moving[:] = False

    def all_arrived(self) -> bool:
        return not self.moving.any()


def simulate_step(bank: MotorBank, dt: float, arrival_tolerance: float = 0.005) -> MotorBank:
    """Advance each moving motor toward its target; clamp and settle on arrival."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    delta = bank.targets - bank.positions
    step = bank.speeds * bank.obstructed_fraction * dt * np.sign(delta)
    step = np.where(np.abs(step) > np.abs(delta), delta, step)
    bank.positions = np.where(bank.moving, bank.positions + step, bank.positions)
    arrived = np.abs(bank.targets - bank.positions) <= arrival_tolerance
    bank.moving &= ~arrived
    return bank


def estimate_speeds(prev_positions, positions, p: float) -> np.ndarray:
    """Per-motor |position change| / p over one monitor period."""
    if p <= 0:
        raise ValueError("p must be > 0")
    return np.abs(np.asarray(positions, dtype=float) - np.asarray(prev_positions, dtype=float)) / p


def check_blocking(estimated, bank: MotorBank, cfg: MonitorConfig, now: float = 0.0):
    """Blocking check at one sampling instant.

    A moving motor that is not within arrival tolerance of its target and
    whose estimated speed fell below limit_factor * v_sent means an
    obstacle: the lowest-index such motor is reported and all motors stop.
    Returns the BlockedEvent or None.
    """
    estimated = np.asarray(estimated, dtype=float)
    near_target = np.abs(bank.targets - bank.positions) <= cfg.arrival_tolerance
    thresholds = cfg.limit_factor * bank.speeds
    below = bank.moving & ~near_target & (estimated < thresholds)
    if not below.any():
        return None
    idx = int(np.argmax(below))
    bank.stop_all()
    return BlockedEvent(time=now, motor=idx,
                        estimated_speed=float(estimated[idx]),
                        threshold=float(thresholds[idx]))


class MotorRuntime:
    """Owns the simulation clock: advances the servos and the monitor in lockstep.

    The simulation step is period/10 so sampling instants land exactly on
    multiples of the monitor period.
    """

    def __init__(self, cfg: MonitorConfig = MonitorConfig(), positions=None):
        self.cfg = cfg
        self.bank = MotorBank(positions)
        self.time = 0.0
        self.blocked_since_last_take = False

    def command(self, command: MotorCommand):
        command.validate(self.cfg)
        self.bank.command(command, self.cfg.arrival_tolerance)
        self.bank.prev_sample_positions = self.bank.positions.copy()

    def take_blocked_flag(self) -> bool:
        flag = self.blocked_since_last_take
        self.blocked_since_last_take = False
        return flag

    def _apply_obstructions(self, obstructions, t: float):
        frac = np.ones(N_MOTORS)
        for ob in obstructions:
            if ob.active(t):
                frac[ob.motor] = min(frac[ob.motor], ob.fraction)
        self.bank.obstructed_fraction = frac

    def advance(self, t_end: float, obstructions=()) -> list:
        """Run the clock to t_end, emitting telemetry/blocked/arrived events."""
        events = []
        step = self.cfg.period / 10.0
        n_steps = int(round((t_end - self.time) / step))
        was_moving = self.bank.moving.any()
        for _ in range(n_steps):
            self._apply_obstructions(obstructions, self.time)
            simulate_step(self.bank, step, self.cfg.arrival_tolerance)
            self.time = round(self.time + step, 9)
            on_sample = abs(self.time / self.cfg.period
                            - round(self.time / self.cfg.period)) < 1e-6
            if on_sample:
                est = estimate_speeds(self.bank.prev_sample_positions,
                                      self.bank.positions, self.cfg.period)
                events.append(TelemetryEvent(self.time, tuple(self.bank.positions)))
                blocked = check_blocking(est, self.bank, self.cfg, self.time)
                if blocked is not None:
                    events.append(blocked)
                    self.blocked_since_last_take = True
                    was_moving = False  # a stop is not an arrival
                self.bank.prev_sample_positions = self.bank.positions.copy()
            if was_moving and self.bank.all_arrived():
                events.append(ArrivedEvent(self.time))
                was_moving = False
        return events


def run_motion(command: MotorCommand, obstacles=(), cfg: MonitorConfig = MonitorConfig(),
               initial_positions=None, max_time: float = None) -> list:
    """Run one command to completion (arrival, block, or timeout); full event trace."""
    rt = MotorRuntime(cfg, initial_positions)
    rt.command(command)
    if max_time is None:
        travel = np.abs(command.targets - rt.bank.positions)
        max_time = float(np.max(travel / command.speeds)) + 10 * cfg.period
        max_time = np.ceil(max_time / cfg.period) * cfg.period
    events = []
    t = 0.0
    while t < max_time:
        t = round(t + cfg.period, 9)
        events.extend(rt.advance(t, obstacles))
        terminal = [i for i, e in enumerate(events)
                    if isinstance(e, (BlockedEvent, ArrivedEvent))]
        if terminal:
            # drop trailing telemetry after the terminal event
            return events[:terminal[0] + 1]
    return events


# --- wire protocol ---------------------------------------------------------

@dataclass(frozen=True)
class MoveMsg:
    targets: tuple
    speeds: tuple


@dataclass(frozen=True)
class StopMsg:
    pass


@dataclass(frozen=True)
class PosMsg:
    time: float
    positions: tuple


@dataclass(frozen=True)
class BlockedMsg:
    motor: int


@dataclass(frozen=True)
class ArrivedMsg:
    pass


class MalformedMessageError(ValueError):
    def __init__(self, reason: str, offset: int):
        super().__init__(f"{reason} (byte offset {offset})")
        self.reason = reason
        self.offset = offset


def _fmt(x: float) -> str:
    """Decimal text with at least 6 fractional digits that round-trips exactly."""
    s = np.format_float_positional(float(x), unique=True, trim="-")
    if "." not in s:
        s += "."
    intpart, frac = s.split(".")
    if len(frac) < 6:
        frac = frac.ljust(6, "0")
    return f"{intpart}.{frac}"


def encode_message(msg) -> str:
    """Render a message as one newline-terminated ASCII line."""
    if isinstance(msg, MoveMsg):
        fields = [_fmt(v) for v in msg.targets] + [_fmt(v) for v in msg.speeds]
        if len(fields) != 16:
            raise ValueError("MOVE needs 8 targets and 8 speeds")
        return "MOVE " + " ".join(fields) + "\n"
    if isinstance(msg, StopMsg):
        return "STOP\n"
    if isinstance(msg, PosMsg):
        if len(msg.positions) != N_MOTORS:
            raise ValueError("POS needs 8 positions")
        return "POS " + _fmt(msg.time) + " " + " ".join(_fmt(v) for v in msg.positions) + "\n"
    if isinstance(msg, BlockedMsg):
        return f"BLOCKED {msg.motor}\n"
    if isinstance(msg, ArrivedMsg):
        return "ARRIVED\n"
    raise ValueError(f"unknown message type {type(msg).__name__}")


_NUMBER_RE = re.compile(r"-?\d+\.\d+$")


def decode_message(line: str):
    """Parse one protocol line; malformed input reports the byte offset."""
    raw = line.rstrip("\n")
    tokens = [(m.group(0), m.start()) for m in re.finditer(r"\S+", raw)]
    if not tokens:
        raise MalformedMessageError("empty message", 0)
    kind, _ = tokens[0]
    args = tokens[1:]

    def number(tok, off):
        if not _NUMBER_RE.match(tok):
            raise MalformedMessageError(f"expected decimal number, got {tok!r}", off)
        return float(tok)

    if kind == "MOVE":
        if len(args) != 16:
            off = args[-1][1] if args else len(raw)
            raise MalformedMessageError(f"MOVE needs 16 fields, got {len(args)}", off)
        vals = [number(t, o) for t, o in args]
        return MoveMsg(tuple(vals[:8]), tuple(vals[8:]))
    if kind == "STOP":
        if args:
            raise MalformedMessageError("STOP takes no fields", args[0][1])
        return StopMsg()
    if kind == "POS":
        if len(args) != 9:
            off = args[-1][1] if args else len(raw)
            raise MalformedMessageError(f"POS needs 9 fields, got {len(args)}", off)
        vals = [number(t, o) for t, o in args]
        return PosMsg(vals[0], tuple(vals[1:]))
    if kind == "BLOCKED":
        if len(args) != 1:
            off = args[-1][1] if len(args) > 1 else len(raw)
            raise MalformedMessageError("BLOCKED needs exactly one motor index", off)
        tok, off = args[0]
        if not tok.isdigit() or not (0 <= int(tok) < N_MOTORS):
            raise MalformedMessageError(f"bad motor index {tok!r}", off)
        return BlockedMsg(int(tok))
    if kind == "ARRIVED":
        if args:
            raise MalformedMessageError("ARRIVED takes no fields", args[0][1])
        return ArrivedMsg()
    raise MalformedMessageError(f"unknown message kind {kind!r}", tokens[0][1])
