import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transiso.isometries import DisplacementField, twist_mode
from transiso.profiles import CreaseAmbiguityError, ProfileCurve
from transiso.surface import (AssumptionError, TranslationSurface, infinitesimal_strain, metric,
                              position, preset, tangent_coefficients)

from conftest import cached_preset

ZIG = ProfileCurve.zigzag(1.0, 1.0)


def test_flat_plane_position():
    s = preset("flat")
    assert np.allclose(position(s, 2.0, 3.0), (2.0, 3.0, 0.0))


def test_miura_position_by_substitution():
    s = TranslationSurface(ZIG, ZIG, math.pi / 2)
    assert np.allclose(position(s, 0.5, 0.5), (0.5, 0.0, 0.5), atol=1e-15)


def test_eggbox_position_by_substitution():
    assert np.allclose(position(cached_preset("eggbox"), 0.5, 0.5), (0.5, 0.5, 1.0))


def test_tangent_coefficients_flat():
    assert tangent_coefficients(preset("flat"), 0.3, 0.4) == (1.0, 0.0, 1.0, 0.0)


def test_tangent_coefficients_vertical_path_plane():
    s = TranslationSurface(ZIG, ZIG, math.pi / 2)
    a1, a2, b1, b2 = tangent_coefficients(s, 0.5, 0.5)
    assert (b1, b2) == (1.0, -1.0)


def test_tangent_coefficients_eggbox():
    assert tangent_coefficients(cached_preset("eggbox"), 0.5, 0.5) == (1.0, 1.0, 1.0, 1.0)


def test_tangent_coefficients_need_side_at_creases():
    s = cached_preset("eggbox")
    with pytest.raises(CreaseAmbiguityError, match="ambiguous crease derivative"):
        tangent_coefficients(s, 1.0, 0.5)
    assert tangent_coefficients(s, 1.0, 0.5, side_x="left")[1] == 1.0
    assert tangent_coefficients(s, 1.0, 0.5, side_x="right")[1] == -1.0


def test_metric_examples():
    assert np.allclose(metric(preset("flat"), 0.3, 0.7), np.eye(2))
    assert np.allclose(metric(cached_preset("eggbox"), 0.5, 0.5), [[2.0, 1.0], [1.0, 2.0]])


def test_metric_positive_definite(any_preset):
    X, Y = any_preset.interior_grid(15)
    G = metric(any_preset, X, Y, "right", "right")
    assert np.all(np.linalg.det(G) > 0)
    assert np.allclose(G, np.swapaxes(G, -1, -2))


def _const_field(u=(), v=(), w=()):
    return DisplacementField(tuple(u), tuple(v), tuple(w), "test")


def test_strain_of_translation_is_zero(any_preset):
    fld = _const_field([(1.0, None, None)], [(-2.0, None, None)], [(0.5, None, None)])
    X, Y = any_preset.interior_grid(9)
    assert np.all(infinitesimal_strain(any_preset, fld, X, Y, "right", "right") == 0.0)


def test_strain_of_twist_vanishes(any_preset):
    X, Y = any_preset.interior_grid(11)
    S = infinitesimal_strain(any_preset, twist_mode(any_preset), X, Y, "right", "right")
    assert np.abs(S).max() < 1e-12


def test_strain_of_tilt_on_plane_vanishes():
    s = preset("flat")
    A1 = s.a1.antiderivative()
    fld = _const_field(w=[(1.0, A1, None)])  # w = x
    assert np.allclose(infinitesimal_strain(s, fld, 0.3, 0.6), 0.0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["eggbox", "smooth-eggbox", "miura", "curved-crease-miura", "morph"]),
       st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(0, 3), st.integers(0, 3))
def test_finite_differences_reproduce_tangents(name, fx, fy, i, j):
    s = cached_preset(name)
    # keep the stencil inside one panel
    bx, by = s.a1.breaks, s.b1.breaks
    k = np.searchsorted(bx, 0.0) + i
    m = np.searchsorted(by, 0.0) + j
    x = bx[k] + fx * (bx[k + 1] - bx[k])
    y = by[m] + fy * (by[m + 1] - by[m])
    h = 1e-7 * s.panel_width(0)
    rx, ry = s.tangents(x, y)
    fdx = (s.position(x + h, y) - s.position(x - h, y)) / (2 * h)
    fdy = (s.position(x, y + h) - s.position(x, y - h)) / (2 * h)
    assert np.linalg.norm(fdx - rx) <= 1e-6 * np.linalg.norm(rx)
    assert np.linalg.norm(fdy - ry) <= 1e-6 * np.linalg.norm(ry)


def test_critical_inclination_rejected():
    with pytest.raises(AssumptionError, match="critical inclination"):
        TranslationSurface(ZIG, ZIG, math.pi / 4)
    with pytest.raises(AssumptionError):
        preset("morph", theta=math.pi / 4)


def test_graph_identity_b1_b2(any_preset):
    s = any_preset
    av = s.averages
    y = s.interior_grid(41)[1][0]
    lhs = s.b1(y) * av["b1"] + s.b2(y) * av["b2"]
    assert np.allclose(lhs, 1.0, atol=1e-12, rtol=0)


def test_graph_coefficients_follow_inclination():
    th = 0.37
    s = preset("morph", theta=th)
    c, sn = math.cos(th), math.sin(th)
    y = np.array([0.3, 1.4])
    gp = np.array([1.0, -1.0])
    assert np.allclose(s.b1(y), c + sn * gp)
    assert np.allclose(s.b2(y), -sn + c * gp)


def test_adapted_basis_is_right_handed_orthonormal(any_preset):
    B = any_preset.adapted_basis
    assert np.allclose(B.T @ B, np.eye(3))
    assert np.linalg.det(B) == pytest.approx(1.0)


def test_out_of_domain_rejected():
    with pytest.raises(ValueError):
        preset("eggbox").position(1e6, 0.0)


def test_morph_only_takes_theta():
    with pytest.raises(ValueError):
        preset("miura", theta=0.3)
    with pytest.raises(ValueError):
        preset("nope")
