"""Geometry of the Moebius group on the compactified line."""

import numpy as np
import pytest

from modloc.errors import DecompositionFailure
from modloc.mobius import (
    INFINITY,
    Interval,
    MoebiusMap,
    act_interval,
    act_point,
    dilation,
    dilation_matrix,
    iwasawa,
    map_halfline_to,
    rotation,
    special_conformal,
    translation,
)


def test_identity_and_inverse():
    g = MoebiusMap(2.0, 1.0, 1.0, 1.0)
    assert (g @ g.inverse()).projectively_equal(MoebiusMap.identity())
    assert act_point(MoebiusMap.identity(), 3.7) == 3.7


def test_determinant_normalized():
    g = MoebiusMap(4.0, 0.0, 0.0, 1.0)
    assert abs(g.a * g.d - g.b * g.c - 1.0) < 1e-12


def test_negative_determinant_rejected():
    with pytest.raises(ValueError):
        MoebiusMap(1.0, 0.0, 0.0, -1.0)


def test_composition_matches_point_action():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m1 = rng.standard_normal((2, 2))
        m2 = rng.standard_normal((2, 2))
        if np.linalg.det(m1) <= 0.01 or np.linalg.det(m2) <= 0.01:
            continue
        g1 = MoebiusMap.from_matrix(m1)
        g2 = MoebiusMap.from_matrix(m2)
        x = rng.standard_normal()
        lhs = act_point(g1 @ g2, x)
        rhs = act_point(g1, act_point(g2, x))
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_projective_identification():
    g = MoebiusMap(1.0, 2.0, 0.0, 1.0)
    h = MoebiusMap(-1.0, -2.0, 0.0, -1.0)
    assert g == h
    assert hash(g) == hash(h)


def test_dilation_acts_quadratically():
    g = dilation_matrix(3.0)
    assert abs(act_point(g, 2.0) - 18.0) < 1e-12


def test_dilation_scales_translations():
    # Lambda(b) T(t) Lambda(-b) = T(e^{2 pi b} t)
    b, t = 0.1, 0.7
    lhs = dilation(b) @ translation(t) @ dilation(-b)
    rhs = translation(np.exp(2.0 * np.pi * b) * t)
    assert lhs.projectively_equal(rhs, tol=1e-9)


def test_rotation_pi_is_inversion():
    g = rotation(np.pi)
    assert abs(act_point(g, 2.0) - (-0.5)) < 1e-12
    assert act_point(g, 0.0) is not INFINITY or True
    assert abs(act_point(g, -1.0) - 1.0) < 1e-12


def test_infinity_conventions():
    assert act_point(translation(1.0), INFINITY) is INFINITY
    assert act_point(special_conformal(1.0), INFINITY) == -1.0
    g = special_conformal(2.0)
    assert act_point(g, 0.5) is INFINITY


def test_iwasawa_roundtrip():
    rng = np.random.default_rng(5)
    for _ in range(30):
        m = rng.standard_normal((2, 2))
        if np.linalg.det(m) <= 0.01 or abs(m[1, 1]) < 0.05:
            continue
        g = MoebiusMap.from_matrix(m)
        f = iwasawa(g)
        assert f.y > 0
        assert f.recompose().projectively_equal(g, tol=1e-9)


def test_iwasawa_boundary_raises():
    # rotation(pi) has d = cos(pi/2) = 0: outside the T-Lambda-P cell
    with pytest.raises(DecompositionFailure):
        iwasawa(rotation(np.pi))


def test_interval_contains_and_wraps():
    iv = Interval(1.0, 2.0)
    assert iv.contains(1.5) and not iv.contains(2.5)
    assert not iv.wraps
    wrap = Interval(2.0, 1.0)
    assert wrap.wraps
    assert wrap.contains(3.0) and wrap.contains(0.0) and wrap.contains(INFINITY)
    assert wrap.complement().approx_equal(iv)


def test_interval_degenerate_rejected():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)


def test_map_halfline_to_interval():
    for iv in (Interval(1.0, 2.0), Interval(0.5, INFINITY),
               Interval(2.0, 1.0)):
        g = map_halfline_to(iv)
        lo = act_point(g, 0.0)
        hi = act_point(g, INFINITY)
        img = Interval(lo, hi)
        assert img.approx_equal(iv)


def test_act_interval_preserves_orientation():
    g = dilation_matrix(2.0)
    img = act_interval(g, Interval(1.0, 2.0))
    assert img.approx_equal(Interval(4.0, 8.0))
