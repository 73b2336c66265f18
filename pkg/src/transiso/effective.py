"""Homogenized properties: effective strain, Poisson coefficient, curvatures.

The effective strain of a periodic surface is read off the average growth of
the stretch mode.  With ``<.>`` the mean over one period,

    E11 = <alpha'> . <d_x> / |<alpha'>|^2,   E22 = <beta'> . <d_y> / |<beta'>|^2

which for graph profiles reduces to ``E11 = -<f'^2>`` and
``E22 = c <b2^2/b1> + s <b2>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .fitting import FitResult, linear_fit, quadratic_fit
from .isometries import CriticalInclinationError, out_of_plane_bend
from .profiles import ProfileCurve
from .surface import ASSUMPTION_TOL, TranslationSurface

__all__ = [
    "EffectiveProps",
    "PoissonUndefinedError",
    "NoTransitionError",
    "effective_strain",
    "poisson",
    "critical_theta",
    "fit_quadratic_out_of_plane",
    "stretch_fit_strain",
    "bending_curvatures",
]


class PoissonUndefinedError(ArithmeticError):
    pass


class NoTransitionError(ValueError):
    pass


@dataclass(frozen=True)
class EffectiveProps:
    """Effective strain ``E`` (2x2), Poisson coefficient and the averages used."""

    E: np.ndarray
    nu: float
    theta: float
    averages: dict = field(default_factory=dict)
    normal: np.ndarray | None = None

    @property
    def E11(self) -> float:
        return float(self.E[0, 0])

    @property
    def E22(self) -> float:
        return float(self.E[1, 1])


def _require_periodic(surf: TranslationSurface):
    if not surf.is_periodic:
        raise ValueError("effective properties need profiles periodic in both directions")


def _require_regular(surf: TranslationSurface):
    for key in ("a1", "b1"):
        if surf.coefficient_fns[key].abs_min() < ASSUMPTION_TOL:
            raise CriticalInclinationError(
                f"critical inclination: {key} vanishes, stretch solution singular (theta={surf.theta:.12g})")


def effective_strain(surf: TranslationSurface) -> EffectiveProps:
    """Effective strain tensor of the stretch mode and the Poisson coefficient."""
    _require_periodic(surf)
    _require_regular(surf)
    av = surf.averages
    # period-mean tangents and displacement gradients, adapted basis (n_beta, n_alpha, m)
    ra = np.array([av["a1"], 0.0, av["a2"]])
    rb = np.array([0.0, av["b1"], av["b2"]])
    dx = np.array([-av["a2^2/a1"], 0.0, av["a2"]])
    dy = np.array([0.0, av["b2^2/b1"], -av["b2"]])
    la, lb = ra @ ra, rb @ rb
    E11 = ra @ dx / la
    E22 = rb @ dy / lb
    E12 = 0.5 * (ra @ dy + rb @ dx) / math.sqrt(la * lb)
    E = np.array([[E11, E12], [E12, E22]])
    nu = -E11 / E22 if E22 != 0.0 else math.nan
    keep = {k: av[k] for k in ("a2^2", "a2^2/a1", "b1", "b2", "b2^2/b1")}
    return EffectiveProps(E, float(nu), float(surf.theta), keep, surf.normal_direction)


def poisson(surf: TranslationSurface) -> float:
    """``nu = -E11 / E22``."""
    try:
        props = effective_strain(surf)
    except CriticalInclinationError as exc:
        raise PoissonUndefinedError(f"Poisson undefined at transition: {exc}") from None
    if props.E22 == 0.0 or not math.isfinite(props.nu):
        raise PoissonUndefinedError("Poisson undefined at transition: E22 = 0")
    return props.nu


def _b1_floor(path: ProfileCurve):
    P = path.period
    lo, hi = (0.0, P) if P else path.support
    dp, dq = path.tangent_fns(lo, hi, lo)

    def h(theta):
        c, s = math.cos(theta), math.sin(theta)
        return (c * dp + s * dq).extrema(samples=257)[0]

    return h


def critical_theta(path: ProfileCurve | TranslationSurface, xtol: float = 1e-14) -> float:
    """Smallest inclination in (0, pi/2) where ``min b1`` over a period reaches 0.

    ``path`` is the profile swept along y (a surface's ``beta`` is used when a
    surface is given).  Raises :class:`NoTransitionError` when ``b1`` stays
    positive on the whole range.
    """
    if isinstance(path, TranslationSurface):
        path = path.beta
    h = _b1_floor(path)
    grid = np.linspace(0.0, 0.5 * math.pi, 257)
    vals = [h(t) for t in grid]
    if vals[0] <= 0.0:
        raise NoTransitionError("no transition: b1 already vanishes at theta = 0")
    for (t0, v0), (t1, v1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if v1 == 0.0:
            return float(t1)
        if v0 > 0.0 > v1:
            return float(brentq(h, t0, t1, xtol=xtol, rtol=4 * np.finfo(float).eps))
    raise NoTransitionError("no transition: b1 never vanishes on (0, pi/2)")


def fit_quadratic_out_of_plane(field, surf: TranslationSurface, cells=(4, 4), start=(0.0, 0.0)) -> FitResult:
    """Quadratic cell-average fit of ``d . N``; see :func:`fitting.quadratic_fit`."""
    return quadratic_fit(surf, lambda x, y: field.normal_component(surf, x, y), cells, start)


def stretch_fit_strain(surf: TranslationSurface, field=None, cells=(3, 3), start=(0.0, 0.0)):
    """``(E11, E22)`` from linear fits of the stretch displacement along t1 and t2."""
    from .isometries import stretch_mode

    field = stretch_mode(surf) if field is None else field
    t1, t2, _ = surf.effective_frame
    fx = linear_fit(surf, lambda x, y: field.canonical(surf, x, y) @ t1, cells, start)
    fy = linear_fit(surf, lambda x, y: field.canonical(surf, x, y) @ t2, cells, start)
    return fx.coeffs["x"], fy.coeffs["y"]


def bending_curvatures(surf: TranslationSurface, cells=(4, 4)) -> FitResult:
    """Fit of the normalized out-of-plane bending mode (``|coeff ybar^2| = 1``)."""
    return fit_quadratic_out_of_plane(out_of_plane_bend(surf), surf, cells)
