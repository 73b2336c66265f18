import numpy as np
import pytest

from transiso.isometries import DisplacementField, combine, stretch_mode, twist_mode
from transiso.meshexport import deflect, sample_mesh
from transiso.surface import centered_domain, preset
from transiso.verify import (chord_gradient, crease_residual, edge_length_check, format_report,
                             isometry_residual, perturbation_order)

from conftest import cached_preset


def zero_field():
    return DisplacementField((), (), (), "zero")


def test_zero_field_residual_is_exactly_zero(any_preset):
    rep = isometry_residual(any_preset, zero_field())
    assert max(rep.max_abs) == 0.0 and rep.normalized == 0.0


def test_broken_twist_is_caught(any_preset):
    rep = isometry_residual(any_preset, twist_mode(any_preset).with_w_scaled(1.1))
    assert rep.normalized > 1e-2


def test_crease_one_sided_residuals(any_preset):
    assert crease_residual(any_preset, twist_mode(any_preset)) < 1e-9


@pytest.mark.parametrize("name", ["eggbox", "miura"])
def test_twist_second_order(name):
    s = cached_preset(name)
    rep = perturbation_order(s, twist_mode(s))
    assert rep.within(3.8, 4.2), rep.ratios


def test_translation_leaves_metric_unchanged():
    s = cached_preset("miura")
    fld = DisplacementField(((1.0, None, None),), ((2.0, None, None),), ((-1.0, None, None),), "shift")
    rep = perturbation_order(s, fld)
    assert rep.metric_change == (0.0, 0.0, 0.0)


def test_stretch_on_miura_reports_quadratic_change():
    s = cached_preset("miura")
    rep = perturbation_order(s, stretch_mode(s), eps_list=(1e-2,))
    X, Y = s.interior_grid(21, offset_rtol=1e-3)
    dx, dy = stretch_mode(s).canonical_partials(s, X, Y)
    bound = 1e-4 * max(np.sum(dx * dx, -1).max(), np.sum(dy * dy, -1).max(), np.abs(np.sum(dx * dy, -1)).max())
    assert 0 < rep.metric_change[0] <= 1.0001 * bound


def test_non_isometric_field_is_first_order():
    s = cached_preset("eggbox")
    rep = perturbation_order(s, twist_mode(s).with_w_scaled(1.1))
    assert not rep.within()


def test_residual_is_linear_safe():
    s = cached_preset("morph")
    f, g = twist_mode(s).with_w_scaled(1.05), stretch_mode(s)
    rf, rg = isometry_residual(s, f), isometry_residual(s, g)
    rc = isometry_residual(s, combine([f, g], [2.0, -3.0]))
    for k in range(3):
        assert rc.max_abs[k] <= 2 * rf.max_abs[k] + 3 * rg.max_abs[k] + 1e-12


def test_reports_are_deterministic():
    s = cached_preset("eggbox")
    a = isometry_residual(s, twist_mode(s))
    b = isometry_residual(s, twist_mode(s))
    assert a == b


def test_edge_check_zero_eps():
    s = cached_preset("eggbox")
    m = sample_mesh(s, 4)
    assert edge_length_check(m, deflect(m, s, twist_mode(s), 0.0)) == 0.0


@pytest.mark.parametrize("name", ["eggbox", "miura"])
def test_twist_edge_lengths(name):
    base = cached_preset(name)
    s = preset(name, domain=centered_domain(*base.periods_xy))
    m = sample_mesh(s, 8)
    assert edge_length_check(m, deflect(m, s, twist_mode(s), 1e-3)) < 5e-6


def test_planar_facet_chords_obey_second_order_bound():
    s = preset("morph", domain=centered_domain(2.0, 2.0, (3, 3)))
    m = sample_mesh(s, 6)
    fld = twist_mode(s)
    G = chord_gradient(m, s, fld)
    for eps in (1e-2, 1e-3):
        assert edge_length_check(m, deflect(m, s, fld, eps)) <= 0.5 * (eps * G) ** 2 * (1 + 1e-3)


def test_edge_check_rejects_topology_mismatch():
    s = cached_preset("eggbox")
    with pytest.raises(ValueError):
        edge_length_check(sample_mesh(s, 4), sample_mesh(s, 8))


def test_format_report():
    text = format_report({"a": 0.1, "b": (1.0, 2.5), "c": "pass"})
    assert text == "a = 0.1\nb = 1.0,2.5\nc = pass\n"
