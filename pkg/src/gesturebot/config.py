"""Run configuration: one YAML document holding every tunable constant.

All kinematic, solver, monitor and gesture settings live in a single file
so an experiment is self-describing.  Loading an empty or partial document
falls back to the built-in defaults field by field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .gesture import DEFAULT_MOOD_TIME_CONSTANT, Feeling, MovementFunction
from .ik import BmaParams
from .kinematics import (
    DEFAULT_JOINT_RANGES,
    JOINT_NAMES,
    JointLimitTable,
    LinkLengths,
    Pose9,
    fk_array,
)
from .runtime import MonitorConfig


class ConfigError(ValueError):
    """Raised for unreadable or invalid configuration documents."""


# Joint-space definitions of the illustrative gesture library: a shared
# neutral stance and one peak stance per feeling, all within motor limits.
NEUTRAL_STANCE = {
    "theta_w": 0.0, "theta_rs": 0.5, "theta_re": 0.3, "theta_rf": 0.3,
    "theta_ls": 0.5, "theta_le": -0.3, "theta_lf": -0.3, "theta_h": 0.7,
}

PEAK_STANCES = {
    Feeling.HAPPINESS: {"theta_w": 0.0, "theta_rs": 2.5, "theta_re": 1.2, "theta_rf": 0.8,
                        "theta_ls": 2.5, "theta_le": -1.2, "theta_lf": -0.8, "theta_h": 0.3},
    Feeling.SADNESS: {"theta_w": 0.3, "theta_rs": 0.1, "theta_re": 0.05, "theta_rf": 0.05,
                      "theta_ls": 0.1, "theta_le": -0.05, "theta_lf": -0.05, "theta_h": 1.1},
    Feeling.FRIGHT: {"theta_w": -0.4, "theta_rs": 1.2, "theta_re": 1.6, "theta_rf": 1.6,
                     "theta_ls": 1.2, "theta_le": -1.6, "theta_lf": -1.6, "theta_h": 0.25},
    Feeling.FEAR: {"theta_w": 0.5, "theta_rs": 0.8, "theta_re": 1.4, "theta_rf": 1.0,
                   "theta_ls": 0.8, "theta_le": -1.4, "theta_lf": -1.0, "theta_h": 1.0},
    Feeling.THRILL: {"theta_w": -0.8, "theta_rs": 2.0, "theta_re": 0.9, "theta_rf": 1.2,
                     "theta_ls": 1.5, "theta_le": -0.5, "theta_lf": -0.9, "theta_h": 0.4},
    Feeling.DISGUST: {"theta_w": 1.0, "theta_rs": 0.3, "theta_re": 1.0, "theta_rf": 1.2,
                      "theta_ls": 1.8, "theta_le": -0.2, "theta_lf": -0.3, "theta_h": 0.9},
    Feeling.ANGRINESS: {"theta_w": 0.0, "theta_rs": 1.6, "theta_re": 1.5, "theta_rf": 0.2,
                        "theta_ls": 1.6, "theta_le": -1.5, "theta_lf": -0.2, "theta_h": 0.2},
    Feeling.SURPRISE: {"theta_w": 0.0, "theta_rs": 2.8, "theta_re": 0.2, "theta_rf": 1.0,
                       "theta_ls": 2.8, "theta_le": -0.2, "theta_lf": -1.0, "theta_h": 0.35},
}

SPEED_RANGES = {
    Feeling.HAPPINESS: (0.6, 2.5),
    Feeling.SADNESS: (0.2, 0.8),
    Feeling.FRIGHT: (0.8, 3.0),
    Feeling.FEAR: (0.5, 2.0),
    Feeling.THRILL: (0.7, 2.8),
    Feeling.DISGUST: (0.3, 1.2),
    Feeling.ANGRINESS: (0.8, 3.0),
    Feeling.SURPRISE: (0.9, 3.2),
}


def _stance_array(stance: dict) -> np.ndarray:
    return np.array([stance[n] for n in JOINT_NAMES], dtype=float)


def default_movement_library(links: LinkLengths) -> dict:
    """Build the illustrative 8-feeling library from the stance tables."""
    neutral_pose = Pose9.from_array(fk_array(_stance_array(NEUTRAL_STANCE), links))
    library = {}
    for feeling in Feeling:
        peak_pose = Pose9.from_array(fk_array(_stance_array(PEAK_STANCES[feeling]), links))
        lo, hi = SPEED_RANGES[feeling]
        library[feeling] = MovementFunction(
            feeling=feeling, neutral_pose=neutral_pose, peak_pose=peak_pose,
            speed_min=lo, speed_max=hi)
    return library


@dataclass
class RunConfig:
    """Everything a scenario run needs, wired together."""

    links: LinkLengths = field(default_factory=LinkLengths)
    limits: JointLimitTable = field(default_factory=JointLimitTable)
    bma: BmaParams = field(default_factory=BmaParams)
    monitor: MonitorConfig = field(default_factory=MonitorConfig)
    library: dict = None
    tau_mood: float = DEFAULT_MOOD_TIME_CONSTANT
    gesture_period: float = 2.0
    ik_residual_threshold: float = 1e-6
    seed: int = 12345

    def __post_init__(self):
        if self.library is None:
            self.library = default_movement_library(self.links)
        if self.gesture_period <= 0:
            raise ConfigError("gesture period must be > 0")


def _movement_to_dict(mf: MovementFunction) -> dict:
    return {
        "neutral": [float(v) for v in mf.neutral_pose.to_array()],
        "peak": [float(v) for v in mf.peak_pose.to_array()],
        "speed_min": mf.speed_min,
        "speed_max": mf.speed_max,
    }


def config_to_dict(cfg: RunConfig) -> dict:
    return {
        "seed": cfg.seed,
        "links": {k: getattr(cfg.links, k) for k in ("l01", "l12", "l23", "l34", "lh1", "lh2")},
        "joint_limits": {n: list(cfg.limits.ranges[n]) for n in JOINT_NAMES},
        "bma": {k: getattr(cfg.bma, k) for k in (
            "n_gen", "n_ind", "n_clones", "l_bm", "n_inf", "l_gt",
            "lm_prob", "lm_iter", "gamma_init", "tau", "target_cost", "fd_step")},
        "monitor": {k: getattr(cfg.monitor, k) for k in (
            "period", "limit_factor", "arrival_tolerance", "max_speed")},
        "gesture": {
            "period": cfg.gesture_period,
            "tau_mood": cfg.tau_mood,
            "ik_residual_threshold": cfg.ik_residual_threshold,
            "movements": {f.value: _movement_to_dict(cfg.library[f]) for f in Feeling},
        },
    }


def save_config(cfg: RunConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)


def config_from_dict(doc: dict) -> RunConfig:
    doc = doc or {}
    try:
        links = LinkLengths(**doc.get("links", {}))
        ranges = dict(DEFAULT_JOINT_RANGES)
        for name, pair in doc.get("joint_limits", {}).items():
            if name not in ranges:
                raise ConfigError(f"unknown joint {name!r}")
            ranges[name] = tuple(float(v) for v in pair)
        limits = JointLimitTable(ranges)
        bma = BmaParams(**doc.get("bma", {}))
        monitor = MonitorConfig(**doc.get("monitor", {}))
        g = doc.get("gesture", {})
        library = None
        if "movements" in g:
            library = {}
            for name, m in g["movements"].items():
                feeling = Feeling.from_name(name)
                library[feeling] = MovementFunction(
                    feeling=feeling,
                    neutral_pose=Pose9.from_array(m["neutral"]),
                    peak_pose=Pose9.from_array(m["peak"]),
                    speed_min=float(m["speed_min"]),
                    speed_max=float(m["speed_max"]),
                )
            missing = [f.value for f in Feeling if f not in library]
            if missing:
                raise ConfigError(f"movements missing feelings: {missing}")
        return RunConfig(
            links=links,
            limits=limits,
            bma=bma,
            monitor=monitor,
            library=library,
            tau_mood=float(g.get("tau_mood", DEFAULT_MOOD_TIME_CONSTANT)),
            gesture_period=float(g.get("period", 2.0)),
            ik_residual_threshold=float(g.get("ik_residual_threshold", 1e-6)),
            seed=int(doc.get("seed", 12345)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if doc is not None and not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return config_from_dict(doc)
