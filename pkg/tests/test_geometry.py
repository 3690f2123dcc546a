import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaycap import ChannelParams, NodeLayout, SnrVector, channel_gain, distance, snr, snr_vector
from relaycap.errors import InvalidInputError, SingularityError


@pytest.mark.parametrize(
    "a, b, expected",
    [((0,), (1,), 1.0), ((0, 0), (3, 4), 5.0), ((1, 1, 1), (1, 1, 1), 0.0)],
)
def test_distance(a, b, expected):
    assert distance(a, b) == expected


def test_distance_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        distance((0, 0), (1,))


@pytest.mark.parametrize(
    "xi, d, alpha, expected",
    [(1.0, 1.0, 2.0, 1.0), (4.0, 2.0, 2.0, 1.0), (1.0, 0.5, 2.0, 2.0)],
)
def test_channel_gain(xi, d, alpha, expected):
    layout = NodeLayout((0.0,), ((5.0,),), relay=(d,))
    params = ChannelParams(alpha=alpha, xi={("s", "r"): xi})
    assert channel_gain("s", "r", layout, params) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "p, xi, d, alpha, expected",
    [(1.0, 1.0, 0.5, 2.0, 4.0), (1.0, 1.0, 1.0, 2.0, 1.0), (2.0, 3.0, 1.0, 4.0, 6.0)],
)
def test_snr(p, xi, d, alpha, expected):
    layout = NodeLayout((0.0,), ((5.0,),), relay=(d,))
    params = ChannelParams(alpha=alpha, p_s=p, xi={("s", "r"): xi})
    assert snr("s", "r", layout, params) == pytest.approx(expected, rel=1e-15)


def test_snr_equals_gain_squared_times_power():
    layout = NodeLayout((0.0, 0.0), ((3.0, 1.0),), relay=(1.0, 2.0))
    params = ChannelParams(alpha=3.0, p_s=2.5, p_r=0.7, xi={("r", 0): 1.9})
    for u, v, p in (("s", "r", 2.5), ("s", 0, 2.5), ("r", 0, 0.7)):
        assert snr(u, v, layout, params) == pytest.approx(channel_gain(u, v, layout, params) ** 2 * p)


def test_zero_distance_is_a_singularity():
    layout = NodeLayout((0.0,), ((1.0,),), relay=(0.0,))
    with pytest.raises(SingularityError) as info:
        snr("s", "r", layout, ChannelParams())
    assert info.value.pair == ("s", "r")
    with pytest.raises(SingularityError):
        channel_gain("s", "r", layout, ChannelParams())


def test_layout_rejects_coincident_destination():
    with pytest.raises(SingularityError):
        NodeLayout((0.0,), ((0.0,),))
    with pytest.raises(SingularityError):
        NodeLayout((0.0,), ((1.0,),), relay=(1.0,))


def test_layout_rejects_mixed_dimensions():
    with pytest.raises(InvalidInputError):
        NodeLayout((0.0,), ((1.0, 2.0),))


def test_params_validation():
    with pytest.raises(InvalidInputError):
        ChannelParams(alpha=0.5)
    with pytest.raises(InvalidInputError):
        ChannelParams(p_s=-1.0)
    with pytest.raises(InvalidInputError):
        ChannelParams(xi={("s", "r"): 0.0})


def test_snr_vector_midpoint(line_layout, unit_params):
    S = snr_vector(line_layout.with_relay((0.5,)), unit_params)
    assert (S.snr_sr, S.snr_s, S.snr_r) == (4.0, (1.0,), (4.0,))


def test_snr_vector_quarter(line_layout, unit_params):
    S = snr_vector(line_layout.with_relay((0.25,)), unit_params)
    assert S.snr_sr == pytest.approx(16.0)
    assert S.snr_s == (1.0,)
    assert S.snr_r[0] == pytest.approx(16.0 / 9.0)


def test_snr_vector_mirror_symmetry(unit_params):
    layout = NodeLayout((0.0, 0.0), ((1.0, 1.0), (-1.0, 1.0)), relay=(0.0, 0.5))
    S = snr_vector(layout, unit_params)
    assert S.snr_r[0] == S.snr_r[1]
    assert S.snr_s[0] == S.snr_s[1]


def test_snr_vector_array_roundtrip():
    S = SnrVector(3.0, [1.0, 2.0], [4.0, 5.0])
    assert S.as_array().tolist() == [3.0, 1.0, 2.0, 4.0, 5.0]
    assert SnrVector.from_array(S.as_array()) == S


def test_snr_vector_rejects_negative():
    with pytest.raises(InvalidInputError):
        SnrVector(-1.0, [1.0], [1.0])


pos = st.floats(0.05, 20.0)


@given(d1=pos, d2=pos, alpha=st.floats(1.0, 6.0), p=st.floats(0.1, 10.0))
def test_snr_decreasing_in_distance(d1, d2, alpha, p):
    params = ChannelParams(alpha=alpha, p_s=p)
    s1 = snr("s", 0, NodeLayout((0.0,), ((d1,),)), params)
    s2 = snr("s", 0, NodeLayout((0.0,), ((d2,),)), params)
    if d1 < d2:
        assert s1 > s2
    elif d1 > d2:
        assert s1 < s2


@given(d=pos, alpha=st.floats(1.0, 6.0), p=st.floats(0.1, 10.0))
def test_snr_linear_in_power(d, alpha, p):
    layout = NodeLayout((0.0,), ((d,),))
    one = snr("s", 0, layout, ChannelParams(alpha=alpha, p_s=p))
    two = snr("s", 0, layout, ChannelParams(alpha=alpha, p_s=2 * p))
    assert two == 2 * one


@settings(max_examples=300)
@given(
    r1=st.tuples(st.floats(-5, 5), st.floats(-5, 5)),
    r2=st.tuples(st.floats(-5, 5), st.floats(-5, 5)),
    lam=st.floats(0, 1),
    alpha=st.floats(1.0, 4.0),
)
def test_distance_power_convex_in_relay(r1, r2, lam, alpha):
    node = (1.0, -2.0)
    mix = tuple(lam * a + (1 - lam) * b for a, b in zip(r1, r2))
    lhs = distance(mix, node) ** alpha
    rhs = lam * distance(r1, node) ** alpha + (1 - lam) * distance(r2, node) ** alpha
    assert lhs <= rhs + 1e-9 * max(1.0, rhs)
