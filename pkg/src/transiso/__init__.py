"""Infinitesimal isometries of surfaces of translation and origami tessellations."""
from .effective import EffectiveProps, critical_theta, effective_strain, fit_quadratic_out_of_plane, poisson
from .isometries import (DisplacementField, bend_p, bend_pbar, bend_s, combine, mode_field,
                         out_of_plane_bend, stretch_mode, to_canonical, twist_mode)
from .meshexport import deflect, read_obj, sample_mesh, write_mesh
from .profiles import ProfileCurve, derivative
from .surface import TranslationSurface, preset
from .tubular import make_tube, seam_jump, tube_preset
from .verify import edge_length_check, isometry_residual, perturbation_order

__version__ = "0.1.0"

__all__ = [
    "ProfileCurve", "derivative", "TranslationSurface", "preset",
    "DisplacementField", "twist_mode", "stretch_mode", "bend_s", "bend_p", "bend_pbar",
    "combine", "out_of_plane_bend", "to_canonical", "mode_field",
    "EffectiveProps", "effective_strain", "poisson", "critical_theta", "fit_quadratic_out_of_plane",
    "isometry_residual", "perturbation_order", "edge_length_check",
    "make_tube", "seam_jump", "tube_preset",
    "sample_mesh", "deflect", "write_mesh", "read_obj",
]
