"""Scenario runner: gesture engine, solver and motor runtime on one timeline.

A scenario is a line-oriented event file (emotion changes, mood changes,
scheduled obstructions, end marker).  The runner executes gesture ticks at
the configured period, simulates the motors in between, feeds blocking
events back into the emotional state, and emits one timeline record per
tick.  Identical config + scenario + seed gives byte-identical logs.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig
from .gesture import EmotionalState, Feeling, GestureEngine
from .ik import solve_ik
from .runtime import (
    ArrivedEvent,
    BlockedEvent,
    MotorCommand,
    MotorRuntime,
    Obstruction,
)


class ScenarioError(ValueError):
    """Raised for malformed or unsorted scenario files."""


@dataclass(frozen=True)
class ScenarioEvent:
    time: float
    kind: str       # set_emotion | set_mood | obstacle | end
    feeling: Feeling | None = None
    value: float | None = None
    obstruction: Obstruction | None = None


def parse_scenario(text: str) -> list:
    """Parse scenario lines of the form ``time kind args...``.

    Blank lines and ``#`` comments are skipped.  Events must be sorted by
    time; errors name the offending line number.
    """
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()

        def bad(reason):
            raise ScenarioError(f"line {lineno}: {reason}: {raw.strip()!r}")

        try:
            t = float(fields[0])
        except ValueError:
            bad("bad timestamp")
        if t < 0:
            bad("negative timestamp")
        if len(fields) < 2:
            bad("missing event kind")
        kind = fields[1]
        args = fields[2:]
        try:
            if kind == "set_emotion":
                if len(args) != 2:
                    bad("set_emotion needs: feeling intensity")
                events.append(ScenarioEvent(t, kind, feeling=Feeling.from_name(args[0]),
                                            value=float(args[1])))
            elif kind == "set_mood":
                if len(args) != 1:
                    bad("set_mood needs: value")
                events.append(ScenarioEvent(t, kind, value=float(args[0])))
            elif kind == "obstacle":
                if len(args) != 4:
                    bad("obstacle needs: motor start_offset duration fraction")
                motor = int(args[0])
                offset, duration, fraction = (float(v) for v in args[1:])
                if not (0 <= motor < 8):
                    bad("motor index out of range")
                if not (0.0 <= fraction <= 1.0):
                    bad("fraction must be in [0, 1]")
                events.append(ScenarioEvent(t, kind, obstruction=Obstruction(
                    motor=motor, start=t + offset, duration=duration, fraction=fraction)))
            elif kind == "end":
                if args:
                    bad("end takes no arguments")
                events.append(ScenarioEvent(t, kind))
            else:
                bad(f"unknown event kind {kind!r}")
        except ScenarioError:
            raise
        except (ValueError, KeyError):
            bad("bad arguments")
    times = [e.time for e in events]
    if times != sorted(times):
        raise ScenarioError("scenario events are not sorted by time")
    return events


def load_scenario(path) -> list:
    try:
        with open(path) as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc


@dataclass(frozen=True)
class TimelineRecord:
    """One gesture tick in the run log."""

    time: float
    feeling: str
    mu: float
    target: tuple        # 9 coordinates commanded this tick
    ik_residual: float
    ik_failed: bool
    commanded_speed: float
    positions: tuple     # 8 motor positions at tick time
    events: tuple        # e.g. ("BLOCKED 2", "ARRIVED")

    def to_dict(self):
        return dataclasses.asdict(self)


def _event_tags(events) -> tuple:
    tags = []
    for e in events:
        if isinstance(e, BlockedEvent):
            tags.append(f"BLOCKED {e.motor}")
        elif isinstance(e, ArrivedEvent):
            tags.append("ARRIVED")
    return tuple(tags)


def _splitmix64(seed: int, index: int) -> int:
    """Derive a per-tick solver seed from the master seed."""
    z = (seed + 0x9E3779B97F4A7C15 * (index + 1)) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def run_scenario(config: RunConfig, events: list) -> list:
    """Execute the scenario and return the full timeline."""
    times = [e.time for e in events]
    if times != sorted(times):
        raise ScenarioError("scenario events are not sorted by time")
    end_events = [e for e in events if e.kind == "end"]
    end_time = end_events[0].time if end_events else (max(times, default=0.0) + 2 * config.gesture_period)

    obstructions = [e.obstruction for e in events if e.kind == "obstacle"]
    state_events = [e for e in events if e.kind in ("set_emotion", "set_mood")]

    runtime = MotorRuntime(config.monitor)
    tick_index = [0]

    def solve(pose):
        params = replace(config.bma, rng_seed=_splitmix64(config.seed, tick_index[0]))
        report = solve_ik(pose, params, config.links, config.limits)
        return report.best_angles, report.best_cost

    engine = GestureEngine(
        state=EmotionalState(last_update=0.0),
        library=config.library,
        solve=solve,
        ik_residual_threshold=config.ik_residual_threshold,
        tau_mood=config.tau_mood,
    )

    timeline = []
    applied = 0
    t = 0.0
    while t <= end_time + 1e-9:
        run_events = runtime.advance(t, obstructions) if t > 0 else []
        blocked = runtime.take_blocked_flag()
        while applied < len(state_events) and state_events[applied].time <= t + 1e-9:
            ev = state_events[applied]
            if ev.kind == "set_emotion":
                engine.set_intensity(ev.feeling, ev.value)
            else:
                engine.set_mood(ev.value)
            applied += 1
        report = engine.tick(t, blocked)
        tick_index[0] += 1
        if report.angles is not None:
            runtime.command(MotorCommand(
                targets=report.angles.to_array(),
                speeds=np.full(8, report.command.commanded_speed)))
        timeline.append(TimelineRecord(
            time=t,
            feeling=report.feeling.value,
            mu=report.mu,
            target=tuple(float(v) for v in report.command.target.to_array()),
            ik_residual=report.ik_residual,
            ik_failed=report.ik_failed,
            commanded_speed=report.command.commanded_speed,
            positions=tuple(float(v) for v in runtime.bank.positions),
            events=_event_tags(run_events),
        ))
        t = round(t + config.gesture_period, 9)
    return timeline


def timeline_to_jsonl(timeline: list) -> str:
    return "\n".join(json.dumps(rec.to_dict()) for rec in timeline) + "\n"


def timeline_to_csv(timeline: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = (["time", "feeling", "mu", "ik_residual", "ik_failed", "commanded_speed"]
              + [f"target_{i}" for i in range(9)]
              + [f"pos_{i}" for i in range(8)]
              + ["events"])
    writer.writerow(header)
    for rec in timeline:
        writer.writerow([rec.time, rec.feeling, repr(rec.mu), repr(rec.ik_residual),
                         rec.ik_failed, repr(rec.commanded_speed)]
                        + [repr(v) for v in rec.target]
                        + [repr(v) for v in rec.positions]
                        + ["|".join(rec.events)])
    return buf.getvalue()
