"""Forward simulation with event-terminated Euler steps.

Controls are held constant over each step, so the state moves on straight
lines between samples. Events (attacker on target, alignment, defender at the
endpoint) are located exactly within the step, including the kink where the
defender gets clamped at a target end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from . import equilibrium as eq
from .equilibrium import Region, Side
from .model import (
    Controls,
    GameParams,
    RelativeState,
    TargetFrameState,
    Vec2,
    heading_vector,
    sign,
    unit,
)


class Event(str, Enum):
    TARGET_REACHED = "target_reached"
    ALIGNED = "aligned"
    ENDPOINT_REACHED = "endpoint_reached"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class StrategySpec:
    attacker: str = "equilibrium"  # equilibrium | constant | naive
    defender: str = "equilibrium"  # equilibrium | constant | idle
    attacker_phi: Optional[float] = None
    defender_omega: Optional[float] = None

    def __post_init__(self):
        if self.attacker not in ("equilibrium", "constant", "naive"):
            raise ValueError(f"unknown attacker strategy {self.attacker!r}")
        if self.defender not in ("equilibrium", "constant", "idle"):
            raise ValueError(f"unknown defender strategy {self.defender!r}")
        if self.attacker == "constant" and self.attacker_phi is None:
            raise ValueError("constant attacker needs attacker_phi")
        if self.defender == "constant":
            if self.defender_omega is None or abs(self.defender_omega) > 1.0:
                raise ValueError("constant defender needs |defender_omega| <= 1")

    @classmethod
    def parse(cls, attacker: str, defender: str) -> "StrategySpec":
        """Build from CLI-style strings such as ``constant:-1.2`` or ``idle``."""
        a, _, a_arg = attacker.partition(":")
        d, _, d_arg = defender.partition(":")
        return cls(a, d,
                   float(a_arg) if a_arg else None,
                   float(d_arg) if d_arg else None)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-4
    max_time: float = 100.0
    eps_event: float = 1e-9
    record: bool = True

    def __post_init__(self):
        if not (self.dt > 0 and self.max_time > 0):
            raise ValueError("dt and max_time must be positive")


class Sample(NamedTuple):
    t: float
    state: TargetFrameState
    attacker: Vec2
    defender: Vec2
    target_ends: Tuple[Vec2, Vec2]


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 3): xD_hat, xA_hat, yA_hat
    event: Event
    payoff: Optional[float]
    region_at_start: Optional[Region]
    params: GameParams
    origin0: Vec2 = (0.0, 0.0)
    sides: List[Side] = field(default_factory=list)

    @property
    def t_f(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> TargetFrameState:
        return TargetFrameState(*map(float, self.states[-1]))

    def target_origins(self) -> np.ndarray:
        vx, vy = self.params.target_velocity
        return np.column_stack([self.origin0[0] + vx * self.times,
                                self.origin0[1] + vy * self.times])

    def samples(self) -> Iterator[Sample]:
        o = self.target_origins()
        L = self.params.L
        for t, (xd, xa, ya), (ox, oy) in zip(self.times, self.states, o):
            yield Sample(float(t), TargetFrameState(float(xd), float(xa), float(ya)),
                         (xa + ox, ya + oy), (xd + ox, oy), ((ox, oy), (ox + L, oy)))


# ---------------------------------------------------------------- strategies


def naive_attacker_heading(s: TargetFrameState, p: GameParams) -> Vec2:
    """Head for the nearest target point as seen now, ignoring the target's drift."""
    px = min(max(s.xA_hat, 0.0), p.L)
    return unit(px - s.xA_hat, -s.yA_hat)


AttackerFn = Callable[[TargetFrameState, Side], Vec2]
DefenderFn = Callable[[TargetFrameState], float]


def attacker_policy(spec: StrategySpec, p: GameParams) -> AttackerFn:
    if spec.attacker == "equilibrium":
        return lambda s, side: eq.attacker_strategy(s, p, side)
    if spec.attacker == "naive":
        return lambda s, side: naive_attacker_heading(s, p)
    h = heading_vector(spec.attacker_phi)
    return lambda s, side: h


def defender_policy(spec: StrategySpec, p: GameParams) -> DefenderFn:
    if spec.defender == "equilibrium":
        return lambda s: eq.defender_control(RelativeState(s.xA_hat - s.xD_hat, s.yA_hat), s, p)
    w = 0.0 if spec.defender == "idle" else float(spec.defender_omega)
    return lambda s: w


# ---------------------------------------------------------------- stepping


def step(s: TargetFrameState, c: Controls, dt: float, p: GameParams) -> TargetFrameState:
    """One explicit Euler step with the defender clamped onto the segment."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    vx, vy = p.target_velocity
    xd = min(max(s.xD_hat + c.omega_D * dt, 0.0), p.L)
    return TargetFrameState(xd,
                            s.xA_hat + (p.v_A * c.heading_A[0] - vx) * dt,
                            s.yA_hat + (p.v_A * c.heading_A[1] - vy) * dt)


def _first_event(xd, xa, ya, dxd, dxa, dya, L, eps):
    """Earliest event inside one step as (fraction, Event, payoff), or None.

    The defender moves linearly until it hits a segment end at fraction fc,
    then stays put; the attacker moves linearly throughout.
    """
    fc = 1.0
    bound = None
    if dxd > 0 and xd + dxd >= L:
        fc, bound = (L - xd) / dxd, L
    elif dxd < 0 and xd + dxd <= 0.0:
        fc, bound = -xd / dxd, 0.0

    def xd_at(f):
        return xd + dxd * min(f, fc)

    X0 = xa - xd
    best = None
    ya1 = ya + dya
    if ya != 0.0 and (ya1 == 0.0 or (ya1 > 0) != (ya > 0)):
        f = ya / (ya - ya1)
        xc = xa + f * dxa
        if -eps <= xc <= L + eps:
            best = (f, Event.TARGET_REACHED, abs(xc - xd_at(f)))

    rate = dxa - dxd
    f2 = None
    if rate != 0.0 and 0.0 <= -X0 / rate <= fc:
        f2 = -X0 / rate
    elif fc < 1.0 and dxa != 0.0:
        Xc = X0 + rate * fc
        g = fc - Xc / dxa
        if fc <= g <= 1.0:
            f2 = g
    if f2 is None and abs(xa + dxa - xd_at(1.0)) <= eps:
        f2 = 1.0
    if f2 is not None and (best is None or f2 < best[0]):
        best = (f2, Event.ALIGNED, -abs(ya + f2 * dya))

    if bound is not None and X0 != 0.0 and bound == (L if X0 > 0 else 0.0):
        if best is None or fc < best[0]:
            Xf = X0 + rate * fc
            best = (fc, Event.ENDPOINT_REACHED, -math.hypot(Xf, ya + fc * dya))
    return best


def _initial_event(s: TargetFrameState, p: GameParams):
    X = s.xA_hat - s.xD_hat
    if s.yA_hat == 0.0 and 0.0 <= s.xA_hat <= p.L and X != 0.0:
        return Event.TARGET_REACHED, abs(X)
    if X == 0.0:
        return Event.ALIGNED, -abs(s.yA_hat)
    if s.xD_hat == (p.L if X > 0 else 0.0):
        return Event.ENDPOINT_REACHED, -math.hypot(X, s.yA_hat)
    return None


def simulate(s0: TargetFrameState, spec: StrategySpec, cfg: SimConfig, p: GameParams,
             origin0: Vec2 = (0.0, 0.0), side: Optional[Side] = None) -> Trajectory:
    """Integrate until the first terminal event or ``cfg.max_time``."""
    attack = attacker_policy(spec, p)
    defend = defender_policy(spec, p)
    side = eq.resolve_side(s0, p, side)
    try:
        region0 = eq.classify(s0, p, side)
    except (eq.GeometryError, eq.SideAmbiguousError, ZeroDivisionError):
        region0 = None

    vA, L, dt, eps = p.v_A, p.L, cfg.dt, cfg.eps_event
    vx, vy = p.target_velocity
    xd, xa, ya = s0.as_tuple()
    t = 0.0
    times, states, sides = [0.0], [(xd, xa, ya)], [side]

    def done(event, payoff):
        if not cfg.record:
            times[:] = [t]
            states[:] = [(xd, xa, ya)]
        return Trajectory(np.array(times), np.array(states), event, payoff, region0, p,
                          origin0, sides)

    init = _initial_event(s0, p)
    if init is not None:
        return done(*init)

    n = 0
    while True:
        if t >= cfg.max_time:
            return done(Event.TIMEOUT, None)
        s = TargetFrameState(xd, xa, ya)
        h = attack(s, side)
        w = defend(s)
        if w < 0 and xd <= 0.0 or w > 0 and xd >= L:
            w = 0.0
        dxd = w * dt
        dxa = (vA * h[0] - vx) * dt
        dya = (vA * h[1] - vy) * dt
        ev = _first_event(xd, xa, ya, dxd, dxa, dya, L, eps)
        if ev is not None:
            f, event, payoff = ev
            xd = min(max(xd + dxd * f, 0.0), L)
            xa += dxa * f
            ya += dya * f
            t += f * dt
            if cfg.record and f > 0:
                times.append(t)
                states.append((xd, xa, ya))
                sides.append(side)
            return done(event, payoff)
        n += 1
        xd = min(max(xd + dxd, 0.0), L)
        xa += dxa
        ya += dya
        t = n * dt
        if ya > 0:
            side = Side.ABOVE
        elif ya < 0:
            side = Side.BELOW
        if cfg.record:
            times.append(t)
            states.append((xd, xa, ya))
            sides.append(side)


# ---------------------------------------------------------------- batch


def batch_constant_heading(s0: TargetFrameState, headings: np.ndarray, p: GameParams,
                           cfg: SimConfig) -> np.ndarray:
    """Payoffs of many constant-heading attackers against the equilibrium defender.

    Vectorised twin of :func:`simulate` for the brute-force saddle search; runs
    that time out get ``nan``.
    """
    headings = np.asarray(headings, dtype=float).reshape(-1, 2)
    n = len(headings)
    payoff = np.full(n, np.nan)
    init = _initial_event(s0, p)
    if init is not None:
        payoff[:] = init[1]
        return payoff

    L, dt, eps = p.L, cfg.dt, cfg.eps_event
    vx, vy = p.target_velocity
    dxa_all = (p.v_A * headings[:, 0] - vx) * dt
    dya_all = (p.v_A * headings[:, 1] - vy) * dt
    idx = np.arange(n)
    xd = np.full(n, s0.xD_hat)
    xa = np.full(n, s0.xA_hat)
    ya = np.full(n, s0.yA_hat)
    k = 0
    while idx.size and k * dt < cfg.max_time:
        dxa, dya = dxa_all[idx], dya_all[idx]
        X0 = xa - xd
        w = np.where(np.abs(X0) <= p.eps_event, 0.0, np.sign(X0))
        w = np.where(((w < 0) & (xd <= 0.0)) | ((w > 0) & (xd >= L)), 0.0, w)
        dxd = w * dt

        hit_hi = (dxd > 0) & (xd + dxd >= L)
        hit_lo = (dxd < 0) & (xd + dxd <= 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            fc = np.where(hit_hi, (L - xd) / dxd, np.where(hit_lo, -xd / dxd, 1.0))
        bound = np.where(hit_hi, L, np.where(hit_lo, 0.0, np.nan))

        f_best = np.full(idx.size, np.inf)
        pay = np.full(idx.size, np.nan)

        ya1 = ya + dya
        with np.errstate(divide="ignore", invalid="ignore"):
            cross = (ya != 0.0) & ((ya1 == 0.0) | ((ya1 > 0) != (ya > 0)))
            f1 = np.where(cross, ya / (ya - ya1), np.inf)
            xc = xa + f1 * dxa
            ok1 = cross & (xc >= -eps) & (xc <= L + eps)
            p1 = np.abs(xc - (xd + dxd * np.minimum(f1, fc)))
        f_best = np.where(ok1, f1, f_best)
        pay = np.where(ok1, p1, pay)

        rate = dxa - dxd
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(rate != 0.0, -X0 / rate, np.inf)
            in1 = (rate != 0.0) & (r1 >= 0.0) & (r1 <= fc)
            Xc = X0 + rate * fc
            r2 = np.where(dxa != 0.0, fc - Xc / dxa, np.inf)
            in2 = ~in1 & (fc < 1.0) & (dxa != 0.0) & (r2 >= fc) & (r2 <= 1.0)
        f2 = np.where(in1, r1, np.where(in2, r2, np.inf))
        end_X = xa + dxa - (xd + dxd * fc)
        f2 = np.where(np.isinf(f2) & (np.abs(end_X) <= eps), 1.0, f2)
        take2 = f2 < f_best
        f_best = np.where(take2, f2, f_best)
        pay = np.where(take2, -np.abs(ya + f2 * dya), pay)

        relevant = np.where(X0 > 0, L, 0.0)
        e3 = ~np.isnan(bound) & (X0 != 0.0) & (bound == relevant) & (fc < f_best)
        Xf = X0 + rate * fc
        f_best = np.where(e3, fc, f_best)
        pay = np.where(e3, -np.hypot(Xf, ya + fc * dya), pay)

        finished = np.isfinite(f_best)
        payoff[idx[finished]] = pay[finished]
        keep = ~finished
        idx = idx[keep]
        xd = np.clip(xd[keep] + dxd[keep], 0.0, L)
        xa = xa[keep] + dxa[keep]
        ya = ya1[keep]
        k += 1
    return payoff
