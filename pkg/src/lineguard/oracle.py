"""Brute-force verifiers, independent of the closed forms they check."""

from __future__ import annotations

import math
from typing import Iterator, List, Optional, Tuple

import numpy as np

from . import equilibrium as eq
from . import sim
from .equilibrium import Region, Side
from .model import GameParams, TargetFrameState, validate_params
from .value import signed_value


class NoRootError(ValueError):
    pass


def terminal_hamiltonian(p: GameParams, lam: int, eta: float) -> float:
    cT, sT = p.u_T
    return p.v_A * math.sqrt(1.0 + eta * eta) - p.v_T * (eta * sT + lam * cT) - 1.0


def eta_by_bisection(p: GameParams, lam: int, side: Side, tol: float = 1e-13) -> float:
    below = Side(side) is Side.BELOW
    span = 100.0
    # widen the bracket for slow attackers, whose eta grows like 1/v_A
    while True:
        lo, hi = (0.0, span) if below else (-span, 0.0)
        flo = terminal_hamiltonian(p, lam, lo)
        fhi = terminal_hamiltonian(p, lam, hi)
        if flo * fhi <= 0:
            break
        if span > 1e12:
            raise NoRootError(f"no sign change on [{lo}, {hi}]; check A1/A2")
        span *= 10.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = terminal_hamiltonian(p, lam, mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def best_response_attacker(s0: TargetFrameState, p: GameParams, n_headings: int = 3600,
                           cfg: Optional[sim.SimConfig] = None) -> Tuple[float, float]:
    """Best constant inertial heading against the equilibrium defender: (payoff, phi)."""
    cfg = cfg or sim.SimConfig(dt=1e-3, record=False)
    phis = np.linspace(-math.pi, math.pi, n_headings, endpoint=False)
    pay = sim.batch_constant_heading(s0, np.column_stack([np.cos(phis), np.sin(phis)]), p, cfg)
    if np.all(np.isnan(pay)):
        return math.nan, math.nan
    k = int(np.nanargmax(pay))
    return float(pay[k]), float(phis[k])


def best_response_defender(s0: TargetFrameState, p: GameParams, n_omegas: int = 21,
                           cfg: Optional[sim.SimConfig] = None) -> Tuple[float, float]:
    """Best constant omega against the equilibrium attacker feedback: (payoff, omega)."""
    cfg = cfg or sim.SimConfig(dt=1e-3, record=False)
    best = (math.inf, math.nan)
    for w in np.linspace(-1.0, 1.0, n_omegas):
        spec = sim.StrategySpec("equilibrium", "constant", defender_omega=float(w))
        tr = sim.simulate(s0, spec, cfg, p)
        if tr.payoff is not None and tr.payoff < best[0]:
            best = (tr.payoff, float(w))
    return best


# ---------------------------------------------------------------- sampling


def random_params(rng: np.random.Generator, L: float = 1.0, margin: float = 1e-3) -> GameParams:
    """Uniform draw from the admissible parameter set (v_T < 0.5 keeps it non-empty)."""
    while True:
        v_T = rng.uniform(0.0, 0.45)
        phi_T = rng.uniform(-math.pi, math.pi)
        hi = 1.0 - abs(v_T * math.cos(phi_T))
        if hi - v_T <= 2 * margin:
            continue
        v_A = rng.uniform(v_T + margin, hi - margin)
        return validate_params(GameParams(v_A, v_T, phi_T, L))


def random_state(rng: np.random.Generator, p: GameParams) -> TargetFrameState:
    L = p.L
    return TargetFrameState(rng.uniform(0.0, L), rng.uniform(-0.5 * L, 1.5 * L),
                            rng.uniform(-L, L))


def states_in_region(p: GameParams, region: Region, n: int, rng: np.random.Generator,
                     margin: float = 1e-3, max_draws: int = 1_000_000) -> List[TargetFrameState]:
    """Rejection-sample ``n`` states of ``region`` with |Value| above ``margin``."""
    out: List[TargetFrameState] = []
    for _ in range(max_draws):
        if len(out) == n:
            return out
        s = random_state(rng, p)
        if s.yA_hat == 0.0 or eq.classify(s, p) is not region:
            continue
        if abs(signed_value(s, p)) > margin:
            out.append(s)
    raise RuntimeError(f"could not find {n} states in {region.value}")


def s1d_interior(p: GameParams, n: int, rng: np.random.Generator,
                 margin: float = 1e-3) -> Iterator[TargetFrameState]:
    """States of S1d away from X = 0, Y = 0 and the region seams."""
    found = 0
    while found < n:
        s = random_state(rng, p)
        X, Y = s.xA_hat - s.xD_hat, s.yA_hat
        if abs(X) < margin or abs(Y) < margin:
            continue
        if all(eq.classify(TargetFrameState(s.xD_hat + dx, s.xA_hat + da, s.yA_hat + dy), p)
               is Region.S1D
               for dx, da, dy in ((0, 0, 0), (margin, 0, 0), (-margin, 0, 0), (0, margin, 0),
                                  (0, -margin, 0), (0, 0, margin), (0, 0, -margin))
               if 0.0 <= s.xD_hat + dx <= p.L):
            found += 1
            yield s
