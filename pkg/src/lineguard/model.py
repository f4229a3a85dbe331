"""Game parameters, state containers and frame transforms.

Everything here is an immutable value. The defender's speed relative to the
target is normalised to 1, so ``omega_D`` lives in ``[-1, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

Vec2 = Tuple[float, float]

EPS_EVENT = 1e-9
TOL = 1e-12


class ParamsError(ValueError):
    """Base class for rejected game parameters."""

    assumption = "params"


class NonPositiveError(ParamsError):
    assumption = "positivity"


class AttackerTooSlowError(ParamsError):
    """v_A <= v_T: the attacker cannot even catch the bare target."""

    assumption = "A1"


class DefenderTooSlowError(ParamsError):
    """v_A >= 1 - |v_T cos phi_T|: the defender cannot hold alignment."""

    assumption = "A2"


@dataclass(frozen=True)
class GameParams:
    v_A: float
    v_T: float
    phi_T: float
    L: float = 1.0
    eps_event: float = EPS_EVENT
    tol: float = TOL
    # cached unit heading of the target, filled in __post_init__
    u_T: Vec2 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "u_T", (math.cos(self.phi_T), math.sin(self.phi_T)))

    @property
    def target_velocity(self) -> Vec2:
        return (self.v_T * self.u_T[0], self.v_T * self.u_T[1])


@dataclass(frozen=True)
class TargetFrameState:
    """Stacked state in the translating target frame."""

    xD_hat: float
    xA_hat: float
    yA_hat: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.xD_hat, self.xA_hat, self.yA_hat)


@dataclass(frozen=True)
class RelativeState:
    """Attacker position relative to the defender."""

    X: float
    Y: float

    @property
    def lam(self) -> int:
        return sign(self.X)


@dataclass(frozen=True)
class InertialPose:
    """Where the target's leftmost point sits at elapsed time ``t``."""

    t: float
    target_origin: Vec2 = (0.0, 0.0)

    @classmethod
    def at(cls, t: float, p: GameParams, origin0: Vec2 = (0.0, 0.0)) -> "InertialPose":
        vx, vy = p.target_velocity
        return cls(t, (origin0[0] + t * vx, origin0[1] + t * vy))


@dataclass(frozen=True)
class Controls:
    omega_D: float
    heading_A: Vec2

    def __post_init__(self):
        if abs(self.omega_D) > 1.0 + TOL:
            raise ValueError(f"omega_D={self.omega_D} outside [-1, 1]")
        if abs(math.hypot(*self.heading_A) - 1.0) > 1e-12:
            raise ValueError(f"heading {self.heading_A} is not a unit vector")


def sign(x: float) -> int:
    return int(x > 0) - int(x < 0)


def unit(dx: float, dy: float) -> Vec2:
    n = math.hypot(dx, dy)
    if n == 0.0:
        raise ZeroDivisionError("cannot normalise a zero vector")
    return (dx / n, dy / n)


def heading_vector(phi: float) -> Vec2:
    return (math.cos(phi), math.sin(phi))


def validate_params(p: GameParams) -> GameParams:
    """Return ``p`` unchanged if it satisfies the speed assumptions strictly.

    Raises a :class:`ParamsError` subclass naming the violated assumption.
    """
    if not all(map(math.isfinite, (p.v_A, p.v_T, p.phi_T, p.L))):
        raise NonPositiveError(f"non-finite parameters {p}")
    if not (p.v_A > 0 and p.L > 0 and p.v_T >= 0):
        raise NonPositiveError(
            f"need v_A > 0, L > 0, v_T >= 0 (got v_A={p.v_A}, L={p.L}, v_T={p.v_T})")
    if not (p.eps_event > 0 and p.tol > 0):
        raise NonPositiveError("eps_event and tol must be positive")
    if not p.v_A > p.v_T:
        raise AttackerTooSlowError(
            f"A1 violated: attacker speed v_A={p.v_A} must exceed target speed v_T={p.v_T}")
    bound = 1.0 - abs(p.v_T * math.cos(p.phi_T))
    if not p.v_A < bound:
        raise DefenderTooSlowError(
            f"A2 violated: v_A={p.v_A} must be below 1 - |v_T cos phi_T| = {bound:.12g}")
    return p


def check_state(s: TargetFrameState, p: GameParams) -> TargetFrameState:
    """Reject states whose defender is not on the target segment."""
    if not (0.0 <= s.xD_hat <= p.L):
        raise ValueError(f"defender coordinate {s.xD_hat} outside [0, {p.L}]")
    if not all(map(math.isfinite, s.as_tuple())):
        raise ValueError(f"non-finite state {s}")
    return s


def to_relative(s: TargetFrameState) -> RelativeState:
    return RelativeState(s.xA_hat - s.xD_hat, s.yA_hat)


def frame_transform(pos: Vec2, pose: InertialPose, direction: str = "to-target") -> Vec2:
    ox, oy = pose.target_origin
    if direction == "to-target":
        return (pos[0] - ox, pos[1] - oy)
    if direction == "to-inertial":
        return (pos[0] + ox, pos[1] + oy)
    raise ValueError(f"unknown direction {direction!r}")


def dynamics(s: TargetFrameState, c: Controls, p: GameParams) -> Tuple[float, float, float]:
    """Time derivative of the target-frame state for fixed controls."""
    vx, vy = p.target_velocity
    return (
        c.omega_D,
        p.v_A * c.heading_A[0] - vx,
        p.v_A * c.heading_A[1] - vy,
    )


def inertial_positions(s: TargetFrameState, pose: InertialPose) -> Tuple[Vec2, Vec2]:
    """Inertial (attacker, defender) positions for a target-frame state."""
    a = frame_transform((s.xA_hat, s.yA_hat), pose, "to-inertial")
    d = frame_transform((s.xD_hat, 0.0), pose, "to-inertial")
    return a, d


def from_inertial(attacker: Vec2, defender_x: float, pose: InertialPose) -> TargetFrameState:
    """Build a target-frame state from inertial attacker position and defender abscissa."""
    xa, ya = frame_transform(attacker, pose, "to-target")
    xd, _ = frame_transform((defender_x, pose.target_origin[1]), pose, "to-target")
    return TargetFrameState(xd, xa, ya)
