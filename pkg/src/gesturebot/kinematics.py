"""Forward kinematics of the 8-DoF torso (waist, two 3-joint arms, head).

The chain is hard-coded in closed form: inputs are the eight motor angles
(radians), outputs are the nine Cartesian coordinates of the right
fingertip, left fingertip and head center in the base frame.  Everything
here is pure and vectorizes over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

JOINT_NAMES = (
    "theta_w", "theta_rs", "theta_re", "theta_rf",
    "theta_ls", "theta_le", "theta_lf", "theta_h",
)

# Motor ranges in radians: waist, right shoulder/elbow/fingertip,
# left shoulder/elbow/fingertip, head.
DEFAULT_JOINT_RANGES = {
    "theta_w": (-1.744, 1.744),
    "theta_rs": (-0.523, 3.1415),
    "theta_re": (-0.174, 1.744),
    "theta_rf": (-0.174, 1.744),
    "theta_ls": (-0.523, 3.1415),
    "theta_le": (-1.744, 0.174),
    "theta_lf": (-1.744, 0.174),
    "theta_h": (0.174, 1.22),
}


@dataclass(frozen=True)
class LinkLengths:
    """Static link lengths in meters, all strictly positive."""

    l01: float = 0.05
    l12: float = 0.04
    l23: float = 0.06
    l34: float = 0.06
    lh1: float = 0.03
    lh2: float = 0.04

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not np.isfinite(value) or value <= 0.0:
                raise ValueError(f"link length {name} must be finite and > 0, got {value}")

    @property
    def arm_reach(self) -> float:
        return self.l01 + self.l12 + self.l23 + self.l34

    @property
    def head_reach(self) -> float:
        # The head equations carry the lh2 offset in both the vertical and
        # horizontal terms, so the naive l01+lh1+lh2 sphere is slightly
        # exceeded; bound each term separately.
        return self.l01 + self.lh1 + 2.0 * self.lh2


@dataclass(frozen=True)
class JointAngles:
    """The eight motor angles in radians."""

    theta_w: float
    theta_rs: float
    theta_re: float
    theta_rf: float
    theta_ls: float
    theta_le: float
    theta_lf: float
    theta_h: float

    @classmethod
    def from_array(cls, arr) -> "JointAngles":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (8,):
            raise ValueError(f"expected 8 angles, got shape {arr.shape}")
        return cls(*(float(v) for v in arr))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in JOINT_NAMES], dtype=float)


@dataclass(frozen=True)
class Pose9:
    """Positions of right hand, left hand and head center in the base frame."""

    right_hand: tuple
    left_hand: tuple
    head_center: tuple

    @classmethod
    def from_array(cls, arr) -> "Pose9":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (9,):
            raise ValueError(f"expected 9 coordinates, got shape {arr.shape}")
        return cls(tuple(arr[0:3]), tuple(arr[3:6]), tuple(arr[6:9]))

    def to_array(self) -> np.ndarray:
        return np.array(self.right_hand + self.left_hand + self.head_center, dtype=float)


class JointLimitTable:
    """Per-joint inclusive (min, max) ranges in radians."""

    def __init__(self, ranges=None):
        ranges = dict(DEFAULT_JOINT_RANGES if ranges is None else ranges)
        if set(ranges) != set(JOINT_NAMES):
            raise ValueError(f"limit table must cover exactly {JOINT_NAMES}")
        for name, (lo, hi) in ranges.items():
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bad range for {name}: ({lo}, {hi})")
        self.ranges = ranges
        self.lower = np.array([ranges[n][0] for n in JOINT_NAMES])
        self.upper = np.array([ranges[n][1] for n in JOINT_NAMES])

    def __eq__(self, other):
        return isinstance(other, JointLimitTable) and self.ranges == other.ranges

    def __repr__(self):
        return f"JointLimitTable({self.ranges!r})"


DEFAULT_LIMITS = JointLimitTable()


def fk_array(thetas, links: LinkLengths = LinkLengths()) -> np.ndarray:
    """Forward kinematics on an array of angle vectors.

    ``thetas`` has shape (..., 8); the result has shape (..., 9) ordered as
    right hand xyz, left hand xyz, head center xyz.  A floating input dtype
    is preserved, so the chain can be evaluated in extended precision.
    """
    th = np.asarray(thetas)
    if th.dtype.kind != "f":
        th = th.astype(float)
    if th.shape[-1] != 8:
        raise ValueError(f"last axis must have length 8, got {th.shape}")
    w, rs, re, rf, ls, le, lf, h = (th[..., i] for i in range(8))
    cw, sw = np.cos(w), np.sin(w)
    crs, srs = np.cos(rs), np.sin(rs)
    cre, sre = np.cos(re), np.sin(re)
    crf, srf = np.cos(rf), np.sin(rf)
    cls_, sls = np.cos(ls), np.sin(ls)
    cle, sle = np.cos(le), np.sin(le)
    clf, slf = np.cos(lf), np.sin(lf)
    ch = np.cos(h)
    l01, l12, l23, l34 = links.l01, links.l12, links.l23, links.l34
    lh1, lh2 = links.lh1, links.lh2

    x_rh = (l12 * sw
            + l23 * (cre * sw + cw * srs * sre)
            + l34 * (-crf * (-cre * sw + cw * srs * sre)
                     + (cw * cre * srs - sw * sre) * srf))
    y_rh = (-l12 * cw
            + l23 * (-cre * cw + sw * srs * sre)
            + l34 * (-crf * (cre * cw + sw * srs * sre)
                     + (sw * cre * cw + cw * sre) * srf))
    z_rh = (l01
            - l23 * crs * sre
            + l34 * (-crs * crf * sre - crs * cre * srf))
    x_lh = (-l12 * sw
            + l23 * (-cle * sw - cw * sls * sle)
            + l34 * (clf * (-cle * sw + cw * sls * sle)
                     - (cw * cle * sls - sw * sle) * slf))
    y_lh = (l12 * cw
            + l23 * (cle * cw - sw * sls * sle)
            + l34 * (clf * (cle * cw + sw * sls * sle)
                     - (sw * cle * cw + cw * sle) * slf))
    z_lh = (-l01
            + l23 * cls_ * sle
            + l34 * (cls_ * clf * sle + cls_ * cle * slf))
    x_hc = lh2 * cw * ch
    y_hc = lh2 * sw * ch
    z_hc = l01 + lh1 + lh2 * ch

    return np.stack([x_rh, y_rh, z_rh, x_lh, y_lh, z_lh, x_hc, y_hc, z_hc], axis=-1)


def forward_kinematics(angles: JointAngles, links: LinkLengths = LinkLengths()) -> Pose9:
    """Map the eight motor angles to the nine extremity coordinates."""
    return Pose9.from_array(fk_array(angles.to_array(), links))


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of a joint-limit check.

    ``violations`` maps joint name to its signed excess: negative means the
    angle is below the minimum, positive above the maximum.
    """

    violations: dict

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_joints(angles: JointAngles, limits: JointLimitTable = DEFAULT_LIMITS) -> ValidationResult:
    """Check every joint against its inclusive range."""
    arr = angles.to_array()
    violations = {}
    for i, name in enumerate(JOINT_NAMES):
        lo, hi = limits.ranges[name]
        if arr[i] < lo:
            violations[name] = arr[i] - lo
        elif arr[i] > hi:
            violations[name] = arr[i] - hi
    return ValidationResult(violations)


def clamp_joints(angles: JointAngles, limits: JointLimitTable = DEFAULT_LIMITS) -> JointAngles:
    """Clamp each joint to its inclusive range; idempotent."""
    return JointAngles.from_array(np.clip(angles.to_array(), limits.lower, limits.upper))


def pose_error(desired: Pose9, actual: Pose9) -> float:
    """Sum of squared differences over all nine coordinates (m^2)."""
    d = desired.to_array() - actual.to_array()
    return float(np.dot(d, d))


def pose_error_array(target9, poses) -> np.ndarray:
    """Vectorized squared-distance cost of poses (..., 9) against one target."""
    d = np.asarray(poses, dtype=float) - np.asarray(target9, dtype=float)
    return np.einsum("...i,...i->...", d, d)
