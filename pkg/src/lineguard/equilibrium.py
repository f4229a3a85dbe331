"""Closed-form equilibrium strategies and strategic-region classification.

All geometry is evaluated in a frame that coincides with the target frame at
the query instant, so "inertial" points returned here are relative to the
target's current leftmost point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import (
    GameParams,
    RelativeState,
    TargetFrameState,
    Vec2,
    sign,
    unit,
)


class Side(str, Enum):
    BELOW = "below"
    ABOVE = "above"


class Region(str, Enum):
    S1A = "S1a"
    S0 = "S0"
    S1D = "S1d"
    S2 = "S2"
    S3 = "S3"

    @property
    def attacker_wins(self) -> bool:
        return self in (Region.S1A, Region.S0)


class SideAmbiguousError(ValueError):
    """Attacker sits on the target line outside the segment with no side hint."""


class GeometryError(ValueError):
    """A geometric construction is undefined for the given state."""


# Fault-injection hook: added to every closed-form eta. Only the check suite's
# self-tests touch it.
_eta_offset = 0.0


@dataclass(frozen=True)
class EtaSolution:
    lam: int
    side: Side
    a: float
    b: float
    eta: float

    @property
    def heading(self) -> Vec2:
        n = math.sqrt(1.0 + self.eta * self.eta)
        return (self.lam / n, self.eta / n)


@dataclass(frozen=True)
class EndpointAiming:
    xE_hat: float
    heading_hat: Vec2
    v_hat: float
    heading_inertial: Vec2


@dataclass(frozen=True)
class AlignmentGeometry:
    t_f2: float
    endpoint_at_tf2: Vec2
    r_A: float
    y1: Optional[float]
    y2: Optional[float]
    align_point: Optional[Vec2]


def resolve_side(s: TargetFrameState, p: GameParams, hint: Optional[Side] = None) -> Side:
    """Approach side of the attacker.

    On the target line the side only matters off the segment; there the caller
    must supply ``hint`` (typically the side the attacker came from).
    """
    if s.yA_hat > 0:
        return Side.ABOVE
    if s.yA_hat < 0:
        return Side.BELOW
    if hint is not None:
        return Side(hint)
    if 0.0 <= s.xA_hat <= p.L:
        return Side.ABOVE
    raise SideAmbiguousError(
        f"attacker on the target line at x={s.xA_hat} off the segment; side is ambiguous")


def solve_eta(p: GameParams, lam: int, side: Optional[Side]) -> EtaSolution:
    """Root of the terminal-Hamiltonian condition with the sign fixed by ``side``.

    Squaring gives ``(v_A^2 - a^2) eta^2 - 2 a b eta + (v_A^2 - b^2) = 0`` whose
    roots have opposite signs; the positive one belongs to an attacker below
    the target line.
    """
    if lam not in (-1, 1):
        raise ValueError(f"lambda must be +1 or -1, got {lam}")
    if side is None:
        raise SideAmbiguousError("side is required to pick the eta branch")
    side = Side(side)
    a = p.v_T * p.u_T[1]
    b = 1.0 + lam * p.v_T * p.u_T[0]
    den = p.v_A * p.v_A - a * a
    root = p.v_A * math.sqrt(a * a + b * b - p.v_A * p.v_A)
    # larger-magnitude root first, then Vieta for the other one
    q = a * b + math.copysign(root, a * b)
    r1 = q / den
    r2 = (p.v_A * p.v_A - b * b) / q
    pos, neg = (r1, r2) if r1 > 0 else (r2, r1)
    eta = pos if side is Side.BELOW else neg
    return EtaSolution(lam, side, a, b, eta + _eta_offset)


def attacker_heading_inf(p: GameParams, lam: int, side: Optional[Side]) -> Vec2:
    return solve_eta(p, lam, side).heading


def defender_control(rel: RelativeState, s: TargetFrameState, p: GameParams) -> float:
    """Defender feedback: run toward the attacker, idle inside the alignment dead-band."""
    w = 0.0 if abs(rel.X) <= p.eps_event else float(sign(rel.X))
    if w < 0 and s.xD_hat <= 0.0:
        return 0.0
    if w > 0 and s.xD_hat >= p.L:
        return 0.0
    return w


def slope(heading: Vec2, omega: float, p: GameParams) -> float:
    """dY/dX of the relative trajectory under fixed controls."""
    vx, vy = p.target_velocity
    den = p.v_A * heading[0] - vx - omega
    if abs(den) <= p.tol:
        raise GeometryError("relative trajectory is vertical (dX/dt = 0)")
    return (p.v_A * heading[1] - vy) / den


def target_frame_velocity(heading: Vec2, p: GameParams) -> Vec2:
    vx, vy = p.target_velocity
    return (p.v_A * heading[0] - vx, p.v_A * heading[1] - vy)


def _aim_from(s: TargetFrameState, vel: Vec2) -> float:
    # x-intercept of the target-frame ray; written without m_B so that a vertical
    # ray (dx/dt = 0) stays finite
    if s.yA_hat == 0.0:
        return s.xA_hat
    if vel[1] == 0.0:
        return math.copysign(math.inf, -s.yA_hat * vel[0]) if vel[0] else math.inf
    return s.xA_hat - s.yA_hat * vel[0] / vel[1]


def aim_x(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> float:
    """Where the infinite-target equilibrium heading meets the target line."""
    lam = sign(s.xA_hat - s.xD_hat) or 1
    h = attacker_heading_inf(p, lam, resolve_side(s, p, side))
    return _aim_from(s, target_frame_velocity(h, p))


def endpoint_x(X: float, p: GameParams) -> float:
    if X == 0:
        raise GeometryError("relevant endpoint undefined when X = 0")
    return p.L if X > 0 else 0.0


def endpoint_aiming(s: TargetFrameState, p: GameParams) -> EndpointAiming:
    """Heading that carries the attacker onto the relevant endpoint."""
    xE = endpoint_x(s.xA_hat - s.xD_hat, p)
    dx, dy = xE - s.xA_hat, -s.yA_hat
    n = math.hypot(dx, dy)
    if n == 0.0:
        raise GeometryError("attacker coincides with the endpoint")
    c, sn = dx / n, dy / n
    cT, sT = p.u_T
    along = c * cT + sn * sT
    across = sn * cT - c * sT
    v_hat = -p.v_T * along + math.sqrt(p.v_A ** 2 - (p.v_T * across) ** 2)
    hi = unit(v_hat * c + p.v_T * cT, v_hat * sn + p.v_T * sT)
    return EndpointAiming(xE, (c, sn), v_hat, hi)


def intercept_time(s: TargetFrameState, p: GameParams) -> float:
    """Earliest time the attacker can sit on the moving relevant endpoint.

    Positive root of (v_A^2 - v_T^2) t^2 - 2 (d . v_T u_T) t - |d|^2 = 0,
    d = endpoint - attacker.
    """
    xE = endpoint_x(s.xA_hat - s.xD_hat, p)
    dx, dy = xE - s.xA_hat, -s.yA_hat
    vx, vy = p.target_velocity
    bh = dx * vx + dy * vy
    A = p.v_A ** 2 - p.v_T ** 2
    d2 = dx * dx + dy * dy
    root = math.sqrt(bh * bh + A * d2)
    if bh >= 0:
        return (bh + root) / A
    return d2 / (root - bh)


def alignment_geometry(s: TargetFrameState, p: GameParams, strict: bool = True) -> AlignmentGeometry:
    """Defender-to-endpoint race and the attacker's alignment point.

    With ``strict=False`` an unreachable vertical line yields ``align_point=None``
    instead of raising; endpoint-race states never need the alignment point.
    """
    X = s.xA_hat - s.xD_hat
    xE = endpoint_x(X, p)
    tf2 = abs(xE - s.xD_hat)
    vx, vy = p.target_velocity
    ex, ey = xE + vx * tf2, vy * tf2
    rA = p.v_A * tf2
    if tf2 == 0.0:
        return AlignmentGeometry(0.0, (ex, ey), 0.0, ey, ey, (ex, ey))
    disc = rA * rA - (s.xA_hat - ex) ** 2
    if disc < 0.0:
        if strict:
            raise GeometryError("attacker cannot reach the endpoint's vertical by t_f2")
        return AlignmentGeometry(tf2, (ex, ey), rA, None, None, None)
    h = math.sqrt(disc)
    y1, y2 = s.yA_hat + h, s.yA_hat - h
    ys = min(y1, y2) if s.yA_hat > 0 else max(y1, y2)
    return AlignmentGeometry(tf2, (ex, ey), rA, y1, y2, (ex, ys))


@dataclass(frozen=True)
class Analysis:
    """Everything the region test computed along the way."""

    region: Region
    lam: int
    side: Side
    eta: EtaSolution
    heading_inf: Vec2
    aim_x: float
    value_inf: float
    endpoint: Optional[EndpointAiming] = None
    t_a: Optional[float] = None
    alignment: Optional[AlignmentGeometry] = None
    interval: Optional[Vec2] = None


def analyse(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> Analysis:
    X, Y = s.xA_hat - s.xD_hat, s.yA_hat
    # sgn(0) tie-break: any lambda works for diagnostics since X = 0 is terminal
    lam = sign(X) or 1
    side = resolve_side(s, p, side)
    sol = solve_eta(p, lam, side)
    h = sol.heading
    vel = target_frame_velocity(h, p)
    xB = _aim_from(s, vel)
    # lam*(X - Y/m*) with m* = vy / (vx - lam), kept division-safe
    v_inf = lam * (X - Y * (vel[0] - lam) / vel[1])
    base = dict(lam=lam, side=side, eta=sol, heading_inf=h, aim_x=xB, value_inf=v_inf)

    if X == 0:
        return Analysis(Region.S1D, **base)

    in_segment = 0.0 <= xB <= p.L
    ep = ta = None
    if in_segment:
        if v_inf > 0:
            return Analysis(Region.S1A, **base)
    else:
        ep = endpoint_aiming(s, p)
        ta = intercept_time(s, p)
        if ta < abs(ep.xE_hat - s.xD_hat):
            return Analysis(Region.S0, endpoint=ep, t_a=ta, **base)

    geo = alignment_geometry(s, p, strict=False)
    lo, hi = sorted((s.xD_hat, geo.endpoint_at_tf2[0]))
    extra = dict(endpoint=ep, t_a=ta, alignment=geo, interval=(lo, hi))
    if not lo < s.xA_hat < hi:
        return Analysis(Region.S3, **extra, **base)
    x_star = s.xA_hat + p.v_A * h[0] * geo.t_f2
    if lo < x_star < hi:
        return Analysis(Region.S1D, **extra, **base)
    if geo.align_point is None:
        # only reachable through round-off at the S1d/S2 seam
        return Analysis(Region.S1D, **extra, **base)
    return Analysis(Region.S2, **extra, **base)


def classify(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> Region:
    return analyse(s, p, side).region


def strategy_from(a: Analysis, s: TargetFrameState) -> Vec2:
    if a.region in (Region.S1A, Region.S1D):
        return a.heading_inf
    if a.region is Region.S0:
        return a.endpoint.heading_inertial
    goal = a.alignment.align_point if a.region is Region.S2 else a.alignment.endpoint_at_tf2
    try:
        return unit(goal[0] - s.xA_hat, goal[1] - s.yA_hat)
    except ZeroDivisionError:
        return a.heading_inf


def attacker_strategy(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> Vec2:
    """Equilibrium attacker heading (inertial unit vector) at state ``s``."""
    return strategy_from(analyse(s, p, side), s)
