"""Surfaces of translation r(x, y) = alpha(x) + beta(y).

The path ``beta`` lies in the plane (e2, e3); the profile ``alpha`` lies in
the plane spanned by e1 and ``m = (0, -sin theta, cos theta)``, i.e. the
(e1, e3) plane rotated by ``theta`` about e1.  The adapted basis is
``[n_beta, n_alpha, m] = [e1, (0, cos, sin), (0, -sin, cos)]`` and the four
tangent coefficients are

    alpha' = a1 n_beta + a2 m,        beta' = b1 n_alpha + b2 m.

For graph profiles ``a1 = 1, a2 = f', b1 = c + s g', b2 = -s + c g'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .piecewise import PiecewiseFn, average_over_period
from .profiles import CreaseAmbiguityError, ProfileCurve

__all__ = [
    "TranslationSurface",
    "AssumptionError",
    "validate_assumptions",
    "preset",
    "PRESETS",
    "centered_domain",
    "position",
    "tangent_coefficients",
    "metric",
    "infinitesimal_strain",
]

PRESETS = ("eggbox", "smooth-eggbox", "miura", "curved-crease-miura", "morph", "flat")

# |b1| or |a1| below this violates the "tangent never in the planes intersection" assumption
ASSUMPTION_TOL = 1e-9


class AssumptionError(ValueError):
    """A profile tangent lies in the intersection of the two profile planes."""


def _trig(theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    # snap so that theta = pi/2 gives an exact zero cosine
    return (0.0 if abs(c) < 1e-15 else c), (0.0 if abs(s) < 1e-15 else s)


@dataclass(frozen=True, eq=False)
class TranslationSurface:
    """Surface of translation swept by ``alpha`` (along x) and ``beta`` (along y).

    Parameters
    ----------
    alpha, beta : ProfileCurve
    theta : float
        Inclination of the plane of ``alpha`` about e1, in radians.
    domain : ((x0, x1), (y0, y1))
        Parameter rectangle.  Defaults to ``periods`` periods of each profile
        starting at 0.
    name : str
    """

    alpha: ProfileCurve
    beta: ProfileCurve
    theta: float = 0.0
    domain: tuple[tuple[float, float], tuple[float, float]] | None = None
    name: str = "custom"
    validate: bool = True
    periods: tuple[int, int] = (4, 4)

    def __post_init__(self):
        if self.domain is None:
            dom = []
            for prof, n in zip((self.alpha, self.beta), self.periods):
                if prof.period is not None:
                    dom.append((0.0, n * prof.period))
                else:
                    dom.append(prof.support)
            object.__setattr__(self, "domain", tuple(dom))
        (x0, x1), (y0, y1) = self.domain
        if not (x0 < x1 and y0 < y1):
            raise ValueError("empty domain")
        if self.validate:
            validate_assumptions(self)

    # -- trigonometry and frames -------------------------------------------
    @property
    def c(self) -> float:
        return _trig(self.theta)[0]

    @property
    def s(self) -> float:
        return _trig(self.theta)[1]

    @cached_property
    def adapted_basis(self) -> np.ndarray:
        """Columns ``n_beta, n_alpha, n_beta ^ n_alpha`` in canonical coordinates."""
        c, s = self.c, self.s
        return np.array([[1.0, 0.0, 0.0],
                         [0.0, c, -s],
                         [0.0, s, c]])

    @property
    def is_periodic(self) -> bool:
        return self.alpha.is_periodic and self.beta.is_periodic

    @property
    def graph_family(self) -> bool:
        """True for the example family: both profiles are graphs."""
        return self.alpha.is_graph and self.beta.is_graph

    @property
    def periods_xy(self) -> tuple[float | None, float | None]:
        return self.alpha.period, self.beta.period

    def _interval(self, prof: ProfileCurve, lo: float, hi: float) -> tuple[float, float]:
        lo, hi = min(lo, 0.0), max(hi, 0.0)
        if prof.period is not None:
            # margins for period-shifted samples and the default 4x4-cell fits from 0
            P = prof.period
            lo, hi = min(lo - P, -P), max(hi + P, 6 * P)
        else:
            plo, phi = prof.support
            if math.isfinite(plo):
                lo, hi = max(lo, plo), min(hi, phi)
        return lo, hi

    @cached_property
    def x_support(self) -> tuple[float, float]:
        return self._interval(self.alpha, *self.domain[0])

    @cached_property
    def y_support(self) -> tuple[float, float]:
        return self._interval(self.beta, *self.domain[1])

    def _base(self, prof, support):
        lo, hi = support
        return 0.0 if lo <= 0.0 <= hi else lo

    # -- coefficient functions ---------------------------------------------
    @cached_property
    def coefficient_fns(self) -> dict[str, PiecewiseFn]:
        """Tangent coefficients a1, a2 (functions of x) and b1, b2 (of y)."""
        a1, a2 = self.alpha.tangent_fns(*self.x_support, self._base(self.alpha, self.x_support))
        p1, q1 = self.beta.tangent_fns(*self.y_support, self._base(self.beta, self.y_support))
        c, s = self.c, self.s
        b1 = c * p1 + s * q1 if s else c * p1
        b2 = (-s) * p1 + c * q1 if c else (-s) * p1
        a1.label, a2.label, b1.label, b2.label = "a1", "a2", "b1", "b2"
        return {"a1": a1, "a2": a2, "b1": b1, "b2": b2}

    @property
    def a1(self) -> PiecewiseFn:
        return self.coefficient_fns["a1"]

    @property
    def a2(self) -> PiecewiseFn:
        return self.coefficient_fns["a2"]

    @property
    def b1(self) -> PiecewiseFn:
        return self.coefficient_fns["b1"]

    @property
    def b2(self) -> PiecewiseFn:
        return self.coefficient_fns["b2"]

    @cached_property
    def averages(self) -> dict[str, float]:
        """Period averages of the coefficients and of a2^2/a1, b2^2/b1."""
        out = {}
        fx = self.coefficient_fns
        if self.alpha.is_periodic:
            P = self.alpha.period
            out["a1"] = average_over_period(fx["a1"], P)
            out["a2"] = average_over_period(fx["a2"], P)
            out["a2^2"] = average_over_period(fx["a2"] * fx["a2"], P)
            out["a2^2/a1"] = average_over_period(fx["a2"] * fx["a2"] / fx["a1"], P)
        if self.beta.is_periodic:
            P = self.beta.period
            out["b1"] = average_over_period(fx["b1"], P)
            out["b2"] = average_over_period(fx["b2"], P)
            out["b2^2/b1"] = average_over_period(fx["b2"] * fx["b2"] / fx["b1"], P)
        return out

    @cached_property
    def normal_direction(self) -> np.ndarray:
        """Unit effective normal N = <alpha'> ^ <beta'> in canonical coordinates."""
        av = self.averages
        adapted = np.array([-av["a2"] * av["b1"], -av["a1"] * av["b2"], av["a1"] * av["b1"]])
        n = self.adapted_basis @ adapted
        return n / np.linalg.norm(n)

    @cached_property
    def effective_frame(self) -> np.ndarray:
        """Rows t1, t2, N: in-plane effective axes and normal (canonical)."""
        av = self.averages
        t1 = self.adapted_basis @ np.array([av["a1"], 0.0, av["a2"]])
        t1 /= np.linalg.norm(t1)
        N = self.normal_direction
        return np.array([t1, np.cross(N, t1), N])

    # -- geometry ----------------------------------------------------------
    def check_domain(self, x, y):
        (x0, x1), (y0, y1) = self.x_support, self.y_support
        x, y = np.asarray(x), np.asarray(y)
        tol = 1e-12 * max(x1 - x0, y1 - y0)
        if np.any(x < x0 - tol) or np.any(x > x1 + tol) or np.any(y < y0 - tol) or np.any(y > y1 + tol):
            raise ValueError("point outside the surface domain")

    def position(self, x, y) -> np.ndarray:
        """Canonical position, shape ``(..., 3)``."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        self.check_domain(x, y)
        pa, qa = self.alpha.point(x)
        pb, qb = self.beta.point(y)
        c, s = self.c, self.s
        return np.stack([pa, pb - s * qa, qb + c * qa], axis=-1)

    def position_bar(self, x, y) -> np.ndarray:
        """Effective cartesian coordinates ``(xbar, ybar, zbar)``."""
        return self.position(x, y) @ self.effective_frame.T

    def tangent_coefficients(self, x, y, side_x: str = "auto", side_y: str = "auto"):
        """``(a1, a2, b1, b2)`` at (x, y); creases need an explicit side."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        self.check_domain(x, y)
        for prof, t, side in ((self.alpha, x, side_x), (self.beta, y, side_y)):
            if side == "auto" and np.any(prof.is_crease(t)):
                bad = t[prof.is_crease(t)].ravel()[0]
                raise CreaseAmbiguityError(float(bad))
        sx = "right" if side_x == "auto" else side_x
        sy = "right" if side_y == "auto" else side_y
        f = self.coefficient_fns
        out = (f["a1"](x, sx), f["a2"](x, sx), f["b1"](y, sy), f["b2"](y, sy))
        return tuple(float(v) for v in out) if x.ndim == 0 else out

    def tangents(self, x, y, side_x="right", side_y="right"):
        """Canonical ``r_x`` and ``r_y`` from the tangent coefficients."""
        a1, a2, b1, b2 = self.tangent_coefficients(x, y, side_x, side_y)
        B = self.adapted_basis
        rx = np.stack([a1, np.zeros_like(a1), a2], axis=-1) @ B.T
        ry = np.stack([np.zeros_like(b1), b1, b2], axis=-1) @ B.T
        return rx, ry

    def metric(self, x, y, side_x="auto", side_y="auto") -> np.ndarray:
        """First fundamental form, shape ``(..., 2, 2)``."""
        a1, a2, b1, b2 = (np.asarray(v) for v in self.tangent_coefficients(x, y, side_x, side_y))
        E = a1 * a1 + a2 * a2
        F = a2 * b2  # n_beta and n_alpha are orthogonal
        G = b1 * b1 + b2 * b2
        return np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)

    def infinitesimal_strain(self, field, x, y, side_x="auto", side_y="auto") -> np.ndarray:
        """First-order metric change produced by a displacement field."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        rx, ry = self.tangents(x, y, *(("right" if s == "auto" else s) for s in (side_x, side_y)))
        if side_x == "auto" or side_y == "auto":
            self.tangent_coefficients(x, y, side_x, side_y)  # raises at creases
        dx, dy = field.canonical_partials(self, x, y)
        E = 2 * np.sum(rx * dx, -1)
        F = np.sum(ry * dx, -1) + np.sum(rx * dy, -1)
        G = 2 * np.sum(ry * dy, -1)
        return np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)

    # -- sampling helpers ----------------------------------------------------
    def panel_width(self, axis: int) -> float:
        """Smallest panel width along x (axis 0) or y (axis 1)."""
        fn = self.a1 if axis == 0 else self.b1
        return float(np.min(np.diff(fn.breaks)))

    def interior_grid(self, n: int = 41, periods: tuple[float, float] = (2, 2), start=(0.0, 0.0),
                      offset_rtol: float = 1e-6):
        """``n x n`` sample grid over a block of periods, nudged off every crease."""
        axes = []
        for axis, (prof, k, x0) in enumerate(zip((self.alpha, self.beta), periods, start)):
            if prof.period is not None:
                lo, hi = x0, x0 + k * prof.period
            else:
                lo, hi = self.domain[axis]
            t = np.linspace(lo, hi, n)
            fn = self.a1 if axis == 0 else self.b1
            br = fn.breaks
            pw = self.panel_width(axis)
            near = np.min(np.abs(t[:, None] - br[None, :]), axis=1) < offset_rtol * pw
            t = np.where(near, t + offset_rtol * pw, t)
            # keep the last point inside the support
            t = np.where(t > fn.support[1], t - 2 * offset_rtol * pw, t)
            axes.append(t)
        return np.meshgrid(axes[0], axes[1], indexing="ij")


def validate_assumptions(surf: TranslationSurface, tol: float = ASSUMPTION_TOL) -> None:
    """Reject surfaces whose tangent coefficients a1 or b1 (one-sided) vanish."""
    for key, prof in (("a1", surf.alpha), ("b1", surf.beta)):
        smallest = surf.coefficient_fns[key].abs_min()
        if smallest < tol:
            which = "profile" if key == "a1" else "path"
            raise AssumptionError(
                f"critical inclination: {which} tangent lies in the planes intersection "
                f"(min |{key}| = {smallest:.3g}) for {prof}, theta={surf.theta:.6g}")


def preset(name: str, theta: float | None = None, periods: tuple[int, int] = (4, 4),
           slope: float = 1.0, half_period: float = 1.0, amplitude: float = 0.5,
           validate: bool = True, domain=None) -> TranslationSurface:
    """Named example surfaces: eggbox, smooth-eggbox, miura, curved-crease-miura, morph, flat."""
    zig = ProfileCurve.zigzag(slope, half_period)
    sine = ProfileCurve.sinusoid(amplitude, 2.0 * half_period)
    table = {
        "eggbox": (zig, zig, 0.0),
        "smooth-eggbox": (sine, sine, 0.0),
        "miura": (zig, zig, math.pi / 2),
        "curved-crease-miura": (sine, zig, math.pi / 2),
        "morph": (zig, zig, math.pi / 6),
        "flat": (ProfileCurve.flat(2.0 * half_period), ProfileCurve.flat(2.0 * half_period), 0.0),
    }
    if name not in table:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    f, g, th = table[name]
    if theta is not None:
        if name != "morph":
            raise ValueError("only the morph preset takes an inclination")
        th = float(theta)
    label = f"morph({th:.6g})" if name == "morph" else name
    return TranslationSurface(f, g, th, domain=domain, name=label, periods=periods, validate=validate)


def centered_domain(period_x: float, period_y: float, periods=(2, 2)):
    """Rectangle of ``periods`` periods centred on the origin."""
    return tuple((-0.5 * n * P, 0.5 * n * P) for n, P in zip(periods, (period_x, period_y)))


def position(surf: TranslationSurface, x, y):
    return surf.position(x, y)


def tangent_coefficients(surf: TranslationSurface, x, y, side_x="auto", side_y="auto"):
    return surf.tangent_coefficients(x, y, side_x, side_y)


def metric(surf: TranslationSurface, x, y, side_x="auto", side_y="auto"):
    return surf.metric(x, y, side_x, side_y)


def infinitesimal_strain(surf: TranslationSurface, field, x, y, side_x="auto", side_y="auto"):
    return surf.infinitesimal_strain(field, x, y, side_x, side_y)
