"""Shared hypothesis strategies and fixtures."""

import math

from hypothesis import strategies as st

from lineguard.model import GameParams, TargetFrameState

P_STAR = GameParams(0.7, 0.2, 2 * math.pi / 3, 1.0)


@st.composite
def valid_params(draw, margin=1e-3):
    v_T = draw(st.floats(0.0, 0.45))
    phi_T = draw(st.floats(-math.pi, math.pi))
    hi = 1.0 - abs(v_T * math.cos(phi_T))
    v_A = draw(st.floats(v_T + margin, hi - margin))
    return GameParams(v_A, v_T, phi_T, 1.0)


@st.composite
def states(draw, L=1.0):
    return TargetFrameState(draw(st.floats(0.0, L)),
                            draw(st.floats(-0.5 * L, 1.5 * L)),
                            draw(st.floats(-L, L)).__add__(0.0))
