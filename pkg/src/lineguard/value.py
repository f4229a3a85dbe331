"""Game Values, the combined signed Value, barrier curves and the HJI check.

Sign convention: one scalar for the whole state space, positive where the
attacker wins (terminal miss-distance) and non-positive where the defender
wins (minus the terminal separation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import equilibrium as eq
from .equilibrium import Analysis, Region, Side
from .model import (
    Controls,
    GameParams,
    RelativeState,
    TargetFrameState,
    sign,
    to_relative,
)


class RegionError(ValueError):
    """A region-specific Value was requested for a state outside that region."""


@dataclass(frozen=True)
class Evaluation:
    region: Region
    value: float
    controls: Controls
    diagnostics: Dict[str, object] = field(default_factory=dict)


def _side_for(rel: RelativeState, side: Optional[Side]) -> Side:
    if side is not None:
        return Side(side)
    return Side.BELOW if rel.Y < 0 else Side.ABOVE


def value_attacker_inf(rel: RelativeState, p: GameParams, side: Optional[Side] = None) -> float:
    if rel.X == 0:
        raise ValueError("infinite-target attacker Value needs X != 0")
    lam = sign(rel.X)
    vel = eq.target_frame_velocity(eq.attacker_heading_inf(p, lam, _side_for(rel, side)), p)
    # lam*(X - Y/m*) with m* = vy / (vx - lam), kept division-safe
    return lam * (rel.X - rel.Y * (vel[0] - lam) / vel[1])


def value_defender_inf(rel: RelativeState, p: GameParams, side: Optional[Side] = None) -> float:
    lam = sign(rel.X) or 1
    m = eq.slope(eq.attacker_heading_inf(p, lam, _side_for(rel, side)), lam, p)
    return sign(rel.Y) * (m * rel.X - rel.Y)


def _attacker_finite(a: Analysis, s: TargetFrameState, p: GameParams) -> float:
    if a.region is Region.S1A:
        return a.value_inf
    # lam*(X - Y/m) along the endpoint-aiming ray collapses to the race margin
    # t_f2 - t_a, which stays finite as the attacker nears the target line
    return abs(a.endpoint.xE_hat - s.xD_hat) - a.t_a


def _defender_finite(a: Analysis, s: TargetFrameState, p: GameParams) -> float:
    rel = to_relative(s)
    if a.region is Region.S1D:
        if rel.X == 0:
            return -abs(rel.Y)
        return sign(rel.Y) * (eq.slope(a.heading_inf, a.lam, p) * rel.X - rel.Y)
    h = eq.strategy_from(a, s)
    vx, vy = p.target_velocity
    tf2 = a.alignment.t_f2
    Xf = rel.X + (p.v_A * h[0] - vx - a.lam) * tf2
    Yf = rel.Y + (p.v_A * h[1] - vy) * tf2
    return -math.hypot(Xf, Yf)


def value_attacker_finite(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> float:
    a = eq.analyse(s, p, side)
    if not a.region.attacker_wins:
        raise RegionError(f"state {s} is in {a.region.value}, not attacker-win")
    return _attacker_finite(a, s, p)


def value_defender_finite(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> float:
    a = eq.analyse(s, p, side)
    if a.region.attacker_wins:
        raise RegionError(f"state {s} is in {a.region.value}, not defender-win")
    return _defender_finite(a, s, p)


def value_of(a: Analysis, s: TargetFrameState, p: GameParams) -> float:
    if a.region.attacker_wins:
        return _attacker_finite(a, s, p)
    return _defender_finite(a, s, p)


def signed_value(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> float:
    """Just the combined Value, skipping the diagnostics."""
    return value_of(eq.analyse(s, p, side), s, p)


def game_value(s: TargetFrameState, p: GameParams, side: Optional[Side] = None) -> Evaluation:
    a = eq.analyse(s, p, side)
    rel = to_relative(s)
    v = value_of(a, s, p)
    controls = Controls(eq.defender_control(rel, s, p), eq.strategy_from(a, s))
    diag: Dict[str, object] = {
        "lambda": a.lam,
        "side": a.side.value,
        "eta": a.eta.eta,
        "heading_inf": a.heading_inf,
        "aim_x": a.aim_x,
        "value_inf": a.value_inf,
    }
    try:
        diag["m_star"] = eq.slope(a.heading_inf, a.lam, p)
    except eq.GeometryError:
        pass
    if a.endpoint is not None:
        diag["endpoint"] = {
            "xE_hat": a.endpoint.xE_hat,
            "heading_hat": a.endpoint.heading_hat,
            "v_hat": a.endpoint.v_hat,
            "heading_inertial": a.endpoint.heading_inertial,
            "m_endpoint": eq.slope(a.endpoint.heading_inertial, a.lam, p),
            "t_a": a.t_a,
        }
    if a.alignment is not None:
        g = a.alignment
        diag["alignment"] = {
            "t_f2": g.t_f2,
            "endpoint_at_tf2": g.endpoint_at_tf2,
            "r_A": g.r_A,
            "y1": g.y1,
            "y2": g.y2,
            "align_point": g.align_point,
            "interval": a.interval,
        }
    return Evaluation(a.region, v, controls, diag)


# ---------------------------------------------------------------- barrier


@dataclass(frozen=True)
class BarrierSection:
    kind: str  # "linear" or "circular"
    lam: int
    side: Optional[Side]
    points: np.ndarray  # (k, 2) in the (xA_hat, yA_hat) plane


@dataclass(frozen=True)
class BarrierCurve:
    xD_hat: float
    sections: List[BarrierSection]
    centers: Dict[int, Tuple[float, float]]
    radii: Dict[int, float]
    junctions: List[Tuple[int, Side, Tuple[float, float]]]

    def polyline(self) -> List[Tuple[float, float, str, int]]:
        """Ordered (x, y, tag, lambda) rows; section end points are tagged junction."""
        rows = []
        for sec in self.sections:
            for i, (x, y) in enumerate(sec.points):
                tag = sec.kind
                far_end = len(sec.points) - 1 if sec.side is Side.ABOVE else 0
                if sec.kind == "linear" and i == far_end:
                    tag = "junction"
                if sec.kind == "circular" and i in (0, len(sec.points) - 1):
                    tag = "junction"
                rows.append((float(x) + 0.0, float(y) + 0.0, tag, sec.lam))
        return rows


def _ray(xD: float, lam: int, side: Side, p: GameParams):
    h = eq.attacker_heading_inf(p, lam, side)
    vel = eq.target_frame_velocity(h, p)
    tf2 = abs(eq.endpoint_x(lam, p) - xD)
    # the ray point whose aim lands on the endpoint: relative motion run backwards for t_f2
    Xj = tf2 * (lam - vel[0])
    Yj = -vel[1] * tf2
    return Xj, Yj


def barrier_curve(xD_hat: float, p: GameParams, n_samples: int = 200) -> BarrierCurve:
    """Analytic zero-level set of the Value in the attacker plane for fixed xD_hat.

    For each endpoint direction: an upper ray, the far arc of the endpoint-race
    circle, then the lower ray back to the defender.
    """
    if not 0.0 <= xD_hat <= p.L:
        raise ValueError(f"xD_hat={xD_hat} outside [0, {p.L}]")
    vx, vy = p.target_velocity
    sections: List[BarrierSection] = []
    centers, radii, junctions = {}, {}, []
    for lam in (1, -1):
        xE = eq.endpoint_x(lam, p)
        tf2 = abs(xE - xD_hat)
        if tf2 == 0.0:
            continue
        cx, cy = xE + vx * tf2, vy * tf2
        r = p.v_A * tf2
        centers[lam], radii[lam] = (cx, cy), r
        ends = {}
        for side in (Side.ABOVE, Side.BELOW):
            Xj, Yj = _ray(xD_hat, lam, side, p)
            ends[side] = (xD_hat + Xj, Yj)
            junctions.append((lam, side, ends[side]))
        s = np.linspace(0.0, 1.0, n_samples)
        up = np.column_stack([xD_hat + s * (ends[Side.ABOVE][0] - xD_hat), s * ends[Side.ABOVE][1]])
        lo = np.column_stack([xD_hat + s * (ends[Side.BELOW][0] - xD_hat), s * ends[Side.BELOW][1]])

        ta = math.atan2(ends[Side.ABOVE][1] - cy, ends[Side.ABOVE][0] - cx)
        tb = math.atan2(ends[Side.BELOW][1] - cy, ends[Side.BELOW][0] - cx)
        far = 0.0 if lam > 0 else math.pi
        ccw = (tb - ta) % (2 * math.pi)
        span = ccw if (far - ta) % (2 * math.pi) < ccw else ccw - 2 * math.pi
        th = ta + np.linspace(0.0, 1.0, n_samples) * span
        arc = np.column_stack([cx + r * np.cos(th), cy + r * np.sin(th)])
        # pin the arc ends to the analytic junctions
        arc[0], arc[-1] = ends[Side.ABOVE], ends[Side.BELOW]

        sections.append(BarrierSection("linear", lam, Side.ABOVE, up))
        sections.append(BarrierSection("circular", lam, None, arc))
        sections.append(BarrierSection("linear", lam, Side.BELOW, lo[::-1]))
    return BarrierCurve(xD_hat, sections, centers, radii, junctions)


def refine_on_ray(s_in: TargetFrameState, s_out: TargetFrameState, p: GameParams,
                  iters: int = 200) -> TargetFrameState:
    """Bisect the segment between an attacker-win and a defender-win state for V = 0."""
    a, b = s_in, s_out
    fa = signed_value(a, p) > 0
    if fa == (signed_value(b, p) > 0):
        raise ValueError("both ends on the same side of the barrier")
    for _ in range(iters):
        m = TargetFrameState(*(0.5 * (u + v) for u, v in zip(a.as_tuple(), b.as_tuple())))
        if m.as_tuple() in (a.as_tuple(), b.as_tuple()):
            break
        if (signed_value(m, p) > 0) == fa:
            a = m
        else:
            b = m
    return a


# ---------------------------------------------------------------- HJI


def value_defender_inf_gradient(rel: RelativeState, p: GameParams,
                                side: Optional[Side] = None) -> Tuple[float, float, float]:
    """d V_d / d (xD_hat, xA_hat, yA_hat) for the infinite-target defender Value."""
    lam = sign(rel.X) or 1
    m = eq.slope(eq.attacker_heading_inf(p, lam, _side_for(rel, side)), lam, p)
    sy = sign(rel.Y)
    return (-sy * m, sy * m, -float(sy))


def hamiltonian(grad, omega: float, heading, p: GameParams) -> float:
    vx, vy = p.target_velocity
    return (grad[0] * omega
            + grad[1] * (p.v_A * heading[0] - vx)
            + grad[2] * (p.v_A * heading[1] - vy))


def hji_residual(s: TargetFrameState, p: GameParams, side: Optional[Side] = None,
                 grad=None) -> float:
    """min over omega, max over heading, of grad . f.

    Both optimisations are closed-form: the Hamiltonian is linear in omega and
    a sinusoid in the heading. ``grad`` defaults to the analytic gradient of
    the infinite-target defender Value.
    """
    if grad is None:
        grad = value_defender_inf_gradient(to_relative(s), p, side)
    vx, vy = p.target_velocity
    return (-abs(grad[0])
            + p.v_A * math.hypot(grad[1], grad[2])
            - grad[1] * vx - grad[2] * vy)


def hji_saddle_controls(grad) -> Tuple[float, Tuple[float, float]]:
    """(argmin omega, argmax heading) of the Hamiltonian for a given gradient."""
    w = -float(sign(grad[0]))
    n = math.hypot(grad[1], grad[2])
    return w, (grad[1] / n, grad[2] / n)
