import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lineguard.model import (
    AttackerTooSlowError,
    Controls,
    DefenderTooSlowError,
    GameParams,
    InertialPose,
    NonPositiveError,
    ParamsError,
    TargetFrameState,
    check_state,
    dynamics,
    frame_transform,
    from_inertial,
    heading_vector,
    inertial_positions,
    to_relative,
    validate_params,
)
from strategies import P_STAR


def test_reference_params_valid():
    assert validate_params(P_STAR) is P_STAR


def test_slow_attacker_names_A1():
    with pytest.raises(AttackerTooSlowError) as e:
        validate_params(GameParams(0.1, 0.2, 0.0))
    assert e.value.assumption == "A1"


def test_fast_attacker_names_A2():
    with pytest.raises(DefenderTooSlowError) as e:
        validate_params(GameParams(0.95, 0.2, 0.0))
    assert e.value.assumption == "A2"


@pytest.mark.parametrize("p", [GameParams(0.2, 0.2, 0.0), GameParams(0.8, 0.2, 0.0)])
def test_boundaries_are_rejected(p):
    with pytest.raises(ParamsError):
        validate_params(p)


@pytest.mark.parametrize("p", [GameParams(0.5, -0.1, 0.0), GameParams(0.5, 0.1, 0.0, L=0.0),
                               GameParams(0.5, 0.1, 0.0, eps_event=-1.0)])
def test_nonpositive_rejected(p):
    with pytest.raises(NonPositiveError):
        validate_params(p)


@given(st.floats(0.0, 1.5), st.floats(0.0, 1.0), st.floats(-4.0, 4.0))
@settings(max_examples=300, deadline=None)
def test_validation_matches_raw_inequalities(v_A, v_T, phi_T):
    ok = v_A > v_T and v_A < 1.0 - abs(v_T * math.cos(phi_T)) and v_A > 0
    p = GameParams(v_A, v_T, phi_T)
    if ok:
        validate_params(p)
    else:
        with pytest.raises(ParamsError):
            validate_params(p)


def test_relative_coordinates():
    r = to_relative(TargetFrameState(0.4, 0.75, 0.25))
    assert (r.X, r.Y) == pytest.approx((0.35, 0.25))
    assert r.lam == 1
    r = to_relative(TargetFrameState(0.4, 0.05, 0.5))
    assert (r.X, r.Y) == pytest.approx((-0.35, 0.5))
    r = to_relative(TargetFrameState(0.0, 0.0, 0.0))
    assert (r.X, r.Y) == (0.0, 0.0)


def test_frame_transform_examples():
    pose0 = InertialPose(0.0, (0.0, 0.0))
    assert frame_transform((0.5, 0.5), pose0) == (0.5, 0.5)
    pose = InertialPose(0.4, (-0.08, 0.1386))
    assert frame_transform((0.0, 0.0), pose) == pytest.approx((0.08, -0.1386))


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_frame_round_trip(x, y, ox, oy):
    pose = InertialPose(0.0, (ox, oy))
    back = frame_transform(frame_transform((x, y), pose, "to-target"), pose, "to-inertial")
    assert back == pytest.approx((x, y), abs=1e-12)


def test_pose_follows_target():
    pose = InertialPose.at(0.4, P_STAR)
    assert pose.target_origin == pytest.approx((-0.04, 0.069282032), abs=1e-9)


def test_inertial_state_round_trip():
    pose = InertialPose(0.0, (1.0, 2.0))
    s = TargetFrameState(0.4, 0.75, 0.25)
    a, d = inertial_positions(s, pose)
    assert from_inertial(a, d[0], pose).as_tuple() == pytest.approx(s.as_tuple())


def test_dynamics_example():
    c = Controls(1.0, heading_vector(math.atan2(-0.652881, 0.757460)))
    f = dynamics(TargetFrameState(0.4, 0.75, 0.25), c, P_STAR)
    assert f == pytest.approx((1.0, 0.630222, -0.630222), abs=1e-5)


def test_controls_validated():
    with pytest.raises(ValueError):
        Controls(1.5, (1.0, 0.0))
    with pytest.raises(ValueError):
        Controls(0.0, (1.0, 0.1))


def test_check_state_rejects_off_segment_defender():
    with pytest.raises(ValueError):
        check_state(TargetFrameState(1.2, 0.0, 0.5), P_STAR)
    with pytest.raises(ValueError):
        check_state(TargetFrameState(0.5, math.nan, 0.5), P_STAR)
