import math

import numpy as np
import pytest

from transiso.fitting import secular_free_weights
from transiso.isometries import (CriticalInclinationError, SecularEliminationError, bend_p, bend_pbar,
                                 bend_s, combine, mode_field, out_of_plane_bend, out_of_plane_weights,
                                 stretch_mode, to_canonical, twist_mode)
from transiso.profiles import ProfileCurve
from transiso.surface import TranslationSurface, preset
from transiso.verify import crease_continuity, isometry_residual, twist_periodic_defect

from conftest import PRESET_NAMES, cached_preset

MODES = ("twist", "stretch", "bend-s", "bend-p", "bend-pbar", "bend-oop")


def tri(t):
    """Unit zigzag (slope 1, half-period 1) and its antiderivative from 0, by hand."""
    tau = np.mod(t, 2.0)
    f = 1.0 - np.abs(tau - 1.0)
    inner = np.where(tau <= 1.0, 0.5 * tau ** 2, 0.5 + (tau - 1.0) - 0.5 * (tau - 1.0) ** 2)
    return f, np.floor(t / 2.0) + inner


def canonical_twist_oracle(theta, x, y):
    c, s = math.cos(theta), math.sin(theta)
    f, F = tri(x)
    g, G = tri(y)
    return np.stack([-y * (g + c * f) - s * g * f + 2 * G,
                     -x * (g + c * f) + 2 * c * F,
                     x * (y - s * f) + 2 * s * F], -1)


@pytest.mark.parametrize("name", ["eggbox", "morph", "miura"])
def test_twist_matches_canonical_closed_form(name):
    s = cached_preset(name)
    X, Y = s.interior_grid(13)
    d = twist_mode(s).canonical(s, X, Y)
    assert np.abs(d - canonical_twist_oracle(s.theta, X, Y)).max() < 1e-12


def test_twist_on_plane_is_pure_torsion():
    s = preset("flat")
    X, Y = s.interior_grid(9)
    d = twist_mode(s).canonical(s, X, Y)
    assert np.abs(d[..., :2]).max() == 0.0
    assert np.allclose(d[..., 2], X * Y, rtol=0, atol=1e-15)


@pytest.mark.parametrize("name", ["eggbox", "smooth-eggbox", "flat"])
def test_twist_vertical_component_is_xy_at_zero_inclination(name):
    s = preset(name)
    X, Y = s.interior_grid(21)
    assert np.abs(twist_mode(s).canonical(s, X, Y)[..., 2] - X * Y).max() <= 1e-12


@pytest.mark.parametrize("mode", ["stretch", "bend-s", "bend-p", "bend-pbar"])
def test_modes_vanish_on_the_plane(mode):
    s = preset("flat")
    X, Y = s.interior_grid(7)
    assert np.abs(mode_field(s, mode).adapted(X, Y)).max() == 0.0


def test_miura_stretch_v_follows_zigzag():
    s = cached_preset("miura")
    y = np.linspace(0.05, 3.95, 17)
    v = stretch_mode(s).adapted(np.zeros_like(y), y)[..., 1]
    assert np.allclose(v, tri(y)[0], atol=1e-14)


def test_eggbox_stretch_mean_slope():
    s = cached_preset("eggbox")
    x = np.linspace(0.1, 1.9, 5)
    u = stretch_mode(s).adapted
    assert np.allclose(u(x + 2.0, 0.3)[..., 0] - u(x, 0.3)[..., 0], -2.0)


def test_stretch_singular_at_critical_inclination():
    z = ProfileCurve.zigzag()
    s = TranslationSurface(z, z, math.pi / 4, validate=False)
    with pytest.raises(CriticalInclinationError, match="critical inclination: stretch solution singular"):
        stretch_mode(s)


def test_pbar_is_p_with_roles_swapped():
    s = cached_preset("eggbox")
    X, Y = s.interior_grid(9)
    p = bend_p(s).adapted(Y, X)
    q = bend_pbar(s).adapted(X, Y)
    assert np.allclose(q[..., 0], p[..., 1], atol=1e-13)
    assert np.allclose(q[..., 1], p[..., 0], atol=1e-13)
    assert np.allclose(q[..., 2], p[..., 2], atol=1e-13)


def test_combine_identity_and_linearity():
    s = cached_preset("morph")
    X, Y = s.interior_grid(7)
    t, st = twist_mode(s), stretch_mode(s)
    assert np.array_equal(combine([t, st], [1.0, 0.0]).adapted(X, Y), t.adapted(X, Y))
    both = combine([t, st], [2.0, -0.5])
    assert np.allclose(both.adapted(X, Y), 2 * t.adapted(X, Y) - 0.5 * st.adapted(X, Y), atol=1e-13)
    assert isometry_residual(s, both).normalized < 1e-9


def test_combine_rejects_mismatch():
    s = cached_preset("eggbox")
    with pytest.raises(ValueError):
        combine([twist_mode(s)], [1.0, 2.0])


@pytest.mark.parametrize("name,expected", [("eggbox", (-1.0, 0.0, 0.0)), ("miura", (0.0, -1.0, 0.0)),
                                           ("morph", (-math.sqrt(3) / 2, -0.5, 0.0))])
def test_out_of_plane_weights(name, expected):
    assert out_of_plane_weights(cached_preset(name)) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("name", ["eggbox", "miura", "morph", "curved-crease-miura"])
def test_least_squares_elimination_recovers_weights(name):
    s = cached_preset(name)
    w = np.array(secular_free_weights(s, [bend_s(s), bend_p(s), bend_pbar(s)]))
    ref = np.array(out_of_plane_weights(s))
    ref = ref / ref[np.argmax(np.abs(ref))]
    w = w / w[np.argmax(np.abs(ref))]
    assert np.allclose(w, ref, atol=1e-8)


def test_secular_elimination_needs_periodicity():
    prof = ProfileCurve.sampled([0.0, 1.0, 2.5, 4.0], [0.0, 0.4, -0.3, 0.1])
    s = TranslationSurface(prof, prof)
    with pytest.raises(SecularEliminationError, match="secular elimination requires periodicity"):
        out_of_plane_bend(s)


@pytest.mark.parametrize("name", PRESET_NAMES)
@pytest.mark.parametrize("mode", MODES)
def test_residual_every_mode_every_preset(name, mode):
    s = cached_preset(name)
    assert isometry_residual(s, mode_field(s, mode)).normalized < 1e-9


def test_sampled_profiles_residual():
    f = ProfileCurve.sampled([0.0, 0.4, 1.3, 2.0], [0.0, 0.5, -0.25, 0.0], period=2.0)
    g = ProfileCurve.sampled([0.0, 0.9, 1.5, 3.0], [0.0, 0.3, 0.6, 0.0], period=3.0)
    s = TranslationSurface(f, g, 0.3)
    for mode in MODES:
        assert isometry_residual(s, mode_field(s, mode)).normalized < 1e-6


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_fields_continuous_across_creases(name):
    s = cached_preset(name)
    for mode in MODES:
        assert crease_continuity(s, mode_field(s, mode)) < 1e-12


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_twist_periodic_up_to_rigid_motion(name):
    s = cached_preset(name)
    assert twist_periodic_defect(s, twist_mode(s)) < 1e-8


def test_twist_decomposition_detects_a_broken_field():
    s = cached_preset("eggbox")
    assert twist_periodic_defect(s, twist_mode(s).with_w_scaled(1.1)) > 1e-3


def test_canonical_mapping_preserves_norm(any_preset):
    s = any_preset
    X, Y = s.interior_grid(9)
    fld = mode_field(s, "bend-oop")
    d = to_canonical(fld, s)(X, Y)
    assert np.allclose(np.linalg.norm(d, axis=-1), np.linalg.norm(fld.adapted(X, Y), axis=-1),
                       rtol=1e-12, atol=1e-12)


def test_zero_inclination_basis_is_identity():
    assert np.array_equal(cached_preset("eggbox").adapted_basis, np.eye(3))


def test_mode_names():
    s = cached_preset("eggbox")
    assert mode_field(s, "combine:1,0,0").weights == (1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        mode_field(s, "combine:1,2")
    with pytest.raises(ValueError):
        mode_field(s, "wobble")


def test_oop_normalisation_and_flat_case():
    from transiso.fitting import quadratic_fit

    s = cached_preset("miura")
    fld = out_of_plane_bend(s)
    fit = quadratic_fit(s, lambda x, y: fld.normal_component(s, x, y))
    assert abs(fit.coeffs["yy"]) == pytest.approx(1.0, rel=1e-12)
    flat = preset("flat")
    assert np.abs(out_of_plane_bend(flat).adapted(*flat.interior_grid(5))).max() == 0.0
