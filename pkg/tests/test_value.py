import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lineguard import equilibrium as eq
from lineguard.equilibrium import Region, Side
from lineguard.model import GameParams, RelativeState, TargetFrameState, to_relative
from lineguard.oracle import s1d_interior, states_in_region
from lineguard.value import (
    RegionError,
    barrier_curve,
    game_value,
    hamiltonian,
    hji_residual,
    hji_saddle_controls,
    refine_on_ray,
    signed_value,
    value_attacker_finite,
    value_attacker_inf,
    value_defender_finite,
    value_defender_inf,
    value_defender_inf_gradient,
)
from strategies import P_STAR, valid_params

S5 = TargetFrameState(0.4, 0.75, 0.25)
S6 = TargetFrameState(0.4, 0.05, 0.50)
S7 = TargetFrameState(0.4, 0.85, 0.48)
S3 = TargetFrameState(0.4, -0.3, 0.35)


def test_infinite_target_values():
    assert value_attacker_inf(RelativeState(0.35, 0.25), P_STAR) == pytest.approx(0.209652, abs=1e-6)
    assert value_defender_inf(RelativeState(-0.35, 0.5), P_STAR) == pytest.approx(-0.112693, abs=2e-6)
    for c in (-0.7, 0.3):
        assert value_attacker_inf(RelativeState(c, 0.0), P_STAR, Side.ABOVE) == pytest.approx(abs(c))
    assert value_defender_inf(RelativeState(0.0, 0.4), P_STAR) == pytest.approx(-0.4)
    assert value_defender_inf(RelativeState(0.0, -0.4), P_STAR) == pytest.approx(-0.4)


@pytest.mark.parametrize("lam,side", [(1, Side.ABOVE), (1, Side.BELOW), (-1, Side.ABOVE),
                                      (-1, Side.BELOW)])
def test_infinite_values_vanish_on_barrier_line(lam, side):
    m = eq.slope(eq.attacker_heading_inf(P_STAR, lam, side), lam, P_STAR)
    X = 0.3 * lam
    rel = RelativeState(X, m * X)
    assert (rel.Y < 0) == (side is Side.BELOW)
    assert value_attacker_inf(rel, P_STAR, side) == pytest.approx(0.0, abs=1e-14)
    assert value_defender_inf(rel, P_STAR, side) == pytest.approx(0.0, abs=1e-14)


def test_finite_values():
    assert value_attacker_finite(S5, P_STAR) == pytest.approx(0.203314, abs=1e-6)
    assert value_attacker_finite(S7, P_STAR) == pytest.approx(0.037342, abs=2e-6)
    assert value_defender_finite(S6, P_STAR) == pytest.approx(-0.165577, abs=1e-6)
    assert value_defender_finite(S3, P_STAR) == pytest.approx(-0.102626, abs=1e-6)
    with pytest.raises(RegionError):
        value_defender_finite(S5, P_STAR)
    with pytest.raises(RegionError):
        value_attacker_finite(S6, P_STAR)


def test_s1a_finite_equals_infinite():
    for s in states_in_region(P_STAR, Region.S1A, 20, np.random.default_rng(1)):
        assert value_attacker_finite(s, P_STAR) == value_attacker_inf(to_relative(s), P_STAR)


def test_s2_terminal_is_x_aligned():
    for s in states_in_region(P_STAR, Region.S2, 20, np.random.default_rng(2)):
        a = eq.analyse(s, P_STAR)
        h = eq.strategy_from(a, s)
        vx, vy = P_STAR.target_velocity
        Xf = s.xA_hat - s.xD_hat + (P_STAR.v_A * h[0] - vx - a.lam) * a.alignment.t_f2
        assert abs(Xf) < 1e-10


def test_game_value_record():
    e = game_value(S5, P_STAR)
    assert e.region is Region.S0 and e.value == pytest.approx(0.2033, abs=1e-4)
    assert e.controls.omega_D == 1.0
    assert e.diagnostics["endpoint"]["t_a"] == pytest.approx(0.396686, abs=1e-6)
    e = game_value(S6, P_STAR)
    assert e.region is Region.S2 and e.value == pytest.approx(-0.1656, abs=1e-4)


# ---------------------------------------------------------------- barrier


def test_barrier_geometry_examples():
    b = barrier_curve(0.4, P_STAR, 50)
    assert b.centers[-1] == pytest.approx((-0.04, 0.069282), abs=1e-6)
    assert b.radii[-1] == pytest.approx(0.28)
    assert b.centers[1] == pytest.approx((0.94, 0.103923), abs=1e-6)
    assert b.radii[1] == pytest.approx(0.42)
    assert [s.kind for s in b.sections] == ["linear", "circular", "linear"] * 2


def test_barrier_degenerate_ends():
    assert len(barrier_curve(0.0, P_STAR, 10).sections) == 3
    assert len(barrier_curve(1.0, P_STAR, 10).sections) == 3
    with pytest.raises(ValueError):
        barrier_curve(1.1, P_STAR)


def test_barrier_polyline_tags():
    rows = barrier_curve(0.4, P_STAR, 5).polyline()
    tags = [r[2] for r in rows]
    assert tags.count("junction") == 8
    assert set(tags) == {"linear", "circular", "junction"}


@given(valid_params(), st.floats(0.0, 1.0))
@settings(max_examples=40, deadline=None)
def test_barrier_points_have_zero_value(p, xd):
    for x, y, _, lam in barrier_curve(xd, p, 40).polyline():
        hint = None if y != 0.0 else (Side.ABOVE if lam > 0 else Side.BELOW)
        assert abs(signed_value(TargetFrameState(xd, x, y), p, hint)) < 1e-9


@given(valid_params(), st.floats(0.05, 0.95), st.floats(0.0, 2 * math.pi))
@settings(max_examples=30, deadline=None)
def test_barrier_sign_invariance(p, xd, theta):
    """Along a ray from the defender, the winner flips exactly once at the barrier."""
    d = (math.cos(theta), math.sin(theta))
    assume(abs(d[1]) > 1e-3)
    signs = []
    for r in np.linspace(1e-3, 3.0, 150):
        s = TargetFrameState(xd, xd + r * d[0], r * d[1])
        signs.append(bool(signed_value(s, p) > 0))
    flips = sum(a != b for a, b in zip(signs, signs[1:]))
    assert flips <= 1


def test_refine_on_ray_lands_on_barrier():
    s = refine_on_ray(TargetFrameState(0.4, 0.9, 0.05), TargetFrameState(0.4, 0.9, 1.0), P_STAR)
    assert abs(signed_value(s, P_STAR)) < 1e-12


# ---------------------------------------------------------------- HJI


def test_hji_residual_vanishes():
    for s in s1d_interior(P_STAR, 100, np.random.default_rng(0)):
        assert abs(hji_residual(s, P_STAR)) < 1e-9


def test_hji_stationary_target():
    p = GameParams(0.6, 0.0, 1.0)
    for s in s1d_interior(p, 50, np.random.default_rng(1)):
        assert abs(hji_residual(s, p)) < 1e-9


def test_hji_detects_wrong_gradient():
    s = next(s1d_interior(P_STAR, 1, np.random.default_rng(0)))
    g = value_defender_inf_gradient(to_relative(s), P_STAR)
    assert abs(hji_residual(s, P_STAR, grad=(g[0] * 1.01, g[1], g[2]))) > 1e-4


def test_saddle_controls_attain_residual():
    s = next(s1d_interior(P_STAR, 1, np.random.default_rng(5)))
    g = value_defender_inf_gradient(to_relative(s), P_STAR)
    w, h = hji_saddle_controls(g)
    assert hamiltonian(g, w, h, P_STAR) == pytest.approx(hji_residual(s, P_STAR, grad=g), abs=1e-15)
    assert h == pytest.approx(eq.attacker_heading_inf(P_STAR, to_relative(s).lam,
                                                      eq.resolve_side(s, P_STAR)), abs=1e-12)
