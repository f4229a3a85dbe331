"""Verification suites: closed forms against oracles, HJI, saddle, consistency."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Dict, List, Optional

import numpy as np

from . import equilibrium as eq
from . import oracle, sim
from ._parallel import pmap
from .equilibrium import Region, Side
from .model import GameParams, TargetFrameState, to_relative
from .value import (
    barrier_curve,
    hji_residual,
    signed_value,
    value_defender_inf,
    value_defender_inf_gradient,
)

DEFAULT_BOUNDS = {
    "eta_oracle": 1e-9,
    "eta_residual": 1e-10,
    "hji_residual": 1e-9,
    "hji_gradient": 1e-6,
    "saddle_attacker": 3e-3,
    "saddle_defender": 3e-3,
    "payoff_consistency": 1e-3,
    "barrier": 1e-6,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    bound: float
    samples: int

    @property
    def passed(self) -> bool:
        return math.isfinite(self.measured) and self.measured <= self.bound


@dataclass(frozen=True)
class Budget:
    eta_params: int = 100
    hji_states: int = 200
    saddle_states: int = 2
    headings: int = 3600
    omegas: int = 21
    consistency_states: int = 20
    dt: float = 1e-3
    barrier_samples: int = 200


def check_eta(rng: np.random.Generator, n: int):
    worst_gap = worst_res = 0.0
    for _ in range(n):
        p = oracle.random_params(rng)
        for lam in (1, -1):
            for side in Side:
                e = eq.solve_eta(p, lam, side).eta
                worst_gap = max(worst_gap, abs(e - oracle.eta_by_bisection(p, lam, side)))
                worst_res = max(worst_res, abs(oracle.terminal_hamiltonian(p, lam, e)))
    return worst_gap, worst_res, 4 * n


def fd_gradient(f, s: TargetFrameState, h: float = 1e-6):
    base = s.as_tuple()
    out = []
    for i in range(3):
        up = list(base)
        dn = list(base)
        up[i] += h
        dn[i] -= h
        out.append((f(TargetFrameState(*up)) - f(TargetFrameState(*dn))) / (2 * h))
    return out


def check_hji(p: GameParams, rng: np.random.Generator, n: int):
    worst_res = worst_grad = 0.0
    for s in oracle.s1d_interior(p, n, rng):
        worst_res = max(worst_res, abs(hji_residual(s, p)))
        g = value_defender_inf_gradient(to_relative(s), p)
        fd = fd_gradient(lambda z: value_defender_inf(to_relative(z), p), s)
        worst_grad = max(worst_grad, max(abs(a - b) for a, b in zip(g, fd)))
    return worst_res, worst_grad, n


def _saddle_one(s: TargetFrameState, p: GameParams, headings: int, omegas: int, dt: float):
    cfg = sim.SimConfig(dt=dt, record=False)
    v = signed_value(s, p)
    best_a, _ = oracle.best_response_attacker(s, p, headings, cfg)
    best_d, _ = oracle.best_response_defender(s, p, omegas, cfg)
    return best_a - v, v - best_d


def check_saddle(p: GameParams, rng: np.random.Generator, per_region: int, headings: int,
                 omegas: int, dt: float):
    states = [s for r in Region for s in oracle.states_in_region(p, r, per_region, rng)]
    rows = pmap(partial(_saddle_one, p=p, headings=headings, omegas=omegas, dt=dt), states)
    return max(r[0] for r in rows), max(r[1] for r in rows), len(states)


def check_consistency(p: GameParams, rng: np.random.Generator, n: int, dt: float):
    worst = 0.0
    cfg = sim.SimConfig(dt=dt, record=False)
    for r in Region:
        for s in oracle.states_in_region(p, r, n, rng):
            tr = sim.simulate(s, sim.StrategySpec(), cfg, p)
            worst = max(worst, abs(tr.payoff - signed_value(s, p)) if tr.payoff is not None
                        else math.inf)
    return worst, n * len(Region)


def check_barrier(p: GameParams, n_samples: int):
    worst, count = 0.0, 0
    for xd in np.linspace(0.0, p.L, 6):
        for x, y, _, lam in barrier_curve(float(xd), p, n_samples).polyline():
            s = TargetFrameState(float(xd), x, y)
            hint = None if y != 0.0 else (Side.ABOVE if lam > 0 else Side.BELOW)
            worst = max(worst, abs(signed_value(s, p, hint)))
            count += 1
    return worst, count


def run_checks(p: GameParams, seed: int = 0, budget: Optional[Budget] = None,
               bounds: Optional[Dict[str, float]] = None) -> List[CheckResult]:
    budget = budget or Budget()
    b = dict(DEFAULT_BOUNDS)
    b.update(bounds or {})
    rng = np.random.default_rng(seed)
    out = []
    gap, res, n = check_eta(rng, budget.eta_params)
    out += [CheckResult("eta_oracle", gap, b["eta_oracle"], n),
            CheckResult("eta_residual", res, b["eta_residual"], n)]
    hres, hgrad, n = check_hji(p, rng, budget.hji_states)
    out += [CheckResult("hji_residual", hres, b["hji_residual"], n),
            CheckResult("hji_gradient", hgrad, b["hji_gradient"], n)]
    att, dfn, n = check_saddle(p, rng, budget.saddle_states, budget.headings,
                               budget.omegas, budget.dt)
    out += [CheckResult("saddle_attacker", max(att, 0.0), b["saddle_attacker"], n),
            CheckResult("saddle_defender", max(dfn, 0.0), b["saddle_defender"], n)]
    worst, n = check_consistency(p, rng, budget.consistency_states // len(Region) or 1, budget.dt)
    out.append(CheckResult("payoff_consistency", worst, b["payoff_consistency"], n))
    worst, n = check_barrier(p, budget.barrier_samples)
    out.append(CheckResult("barrier", worst, b["barrier"], n))
    return out
