"""Closed-form infinitesimal isometries of surfaces of translation.

A displacement is written in the adapted basis, ``d = u n_beta + v n_alpha +
w (n_beta ^ n_alpha)``, and every component is a finite sum of separated
terms ``k * X(x) * Y(y)``.  ``X`` and ``Y`` are nested antiderivatives of the
tangent coefficients, so partial derivatives are exact: differentiating an
antiderivative returns its integrand.

Notation used below (all antiderivatives start at the base point)::

    A1 = I(a1), A2 = I(a2), B1 = I(b1), B2 = I(b2)
    Qa = a2^2 / a1, Qb = b2^2 / b1, IQa = I(Qa), IQb = I(Qb)
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from .piecewise import PiecewiseFn
from .surface import ASSUMPTION_TOL, AssumptionError, TranslationSurface

__all__ = [
    "DisplacementField",
    "CriticalInclinationError",
    "SecularEliminationError",
    "twist_mode",
    "stretch_mode",
    "bend_s",
    "bend_p",
    "bend_pbar",
    "combine",
    "out_of_plane_weights",
    "out_of_plane_bend",
    "to_canonical",
    "mode_field",
    "MODE_NAMES",
]

MODE_NAMES = ("twist", "stretch", "bend-s", "bend-p", "bend-pbar", "bend-oop")

Term = tuple  # (coefficient, X or None, Y or None); None stands for the constant 1


class CriticalInclinationError(AssumptionError):
    """A division by b1 (or a1) is singular at this inclination."""


class SecularEliminationError(ValueError):
    """No unique secular-free combination of the bending solutions was found."""


def _eval_terms(terms, x, y, dx=False, dy=False, cache=None, sides=("right", "right")):
    cache = {} if cache is None else cache

    def ev(fn, t, deriv, side):
        if fn is None:
            return 0.0 if deriv else 1.0
        key = (id(fn), deriv, id(t))
        if key not in cache:
            cache[key] = (fn.derivative() if deriv else fn)(t, side)
        return cache[key]

    out = np.zeros(np.broadcast(x, y).shape)
    for k, X, Y in terms:
        out = out + k * ev(X, x, dx, sides[0]) * ev(Y, y, dy, sides[1])
    return out


@dataclass(frozen=True, eq=False)
class DisplacementField:
    """Displacement field in the adapted basis as sums of separated terms.

    Attributes
    ----------
    u, v, w : tuple of terms
        Each term is ``(k, X, Y)`` meaning ``k * X(x) * Y(y)``.
    mode : str
        ``twist``, ``stretch``, ``bend-s``, ``bend-p``, ``bend-pbar`` or
        ``combination``.
    weights : tuple of float, optional
        Weights of a combination, in the order of ``parts``.
    amplitude : float
        Overall multiplicative factor.
    """

    u: tuple
    v: tuple
    w: tuple
    mode: str
    weights: tuple | None = None
    parts: tuple = ()
    amplitude: float = 1.0

    def _components(self, x, y, dx=False, dy=False, sides=("right", "right")):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        cache = {}
        comps = [_eval_terms(t, x, y, dx, dy, cache, sides) for t in (self.u, self.v, self.w)]
        return self.amplitude * np.stack(comps, axis=-1)

    def adapted(self, x, y, side_x="right", side_y="right") -> np.ndarray:
        """``(u, v, w)`` stacked on the last axis."""
        return self._components(x, y, sides=(side_x, side_y))

    def adapted_partials(self, x, y, side_x="right", side_y="right"):
        """Exact ``(d_x, d_y)`` in the adapted basis (one-sided at creases)."""
        sides = (side_x, side_y)
        return self._components(x, y, dx=True, sides=sides), self._components(x, y, dy=True, sides=sides)

    def canonical(self, surf: TranslationSurface, x, y, side_x="right", side_y="right") -> np.ndarray:
        return self.adapted(x, y, side_x, side_y) @ surf.adapted_basis.T

    def canonical_partials(self, surf: TranslationSurface, x, y, side_x="right", side_y="right"):
        dx, dy = self.adapted_partials(x, y, side_x, side_y)
        B = surf.adapted_basis.T
        return dx @ B, dy @ B

    def normal_component(self, surf: TranslationSurface, x, y) -> np.ndarray:
        """Out-of-plane component ``d . N`` with the unit effective normal."""
        return self.canonical(surf, x, y) @ surf.normal_direction

    # -- algebra -----------------------------------------------------------
    def scaled(self, factor: float) -> "DisplacementField":
        return replace(self, amplitude=self.amplitude * float(factor))

    def with_w_scaled(self, factor: float) -> "DisplacementField":
        """Copy with the w component rescaled (breaks isometry; negative controls)."""
        w = tuple((k * factor, X, Y) for k, X, Y in self.w)
        return replace(self, w=w, mode=f"{self.mode}[w*{factor:g}]")

    def _folded(self):
        a = self.amplitude
        return tuple(tuple((a * k, X, Y) for k, X, Y in comp) for comp in (self.u, self.v, self.w))

    def __repr__(self) -> str:
        n = sum(len(c) for c in (self.u, self.v, self.w))
        extra = f", weights={self.weights}" if self.weights is not None else ""
        return f"DisplacementField({self.mode}, terms={n}, amplitude={self.amplitude:g}{extra})"


class _Integrals:
    """Nested antiderivatives shared by all modes of one surface."""

    def __init__(self, surf: TranslationSurface):
        self.surf = surf
        f = surf.coefficient_fns
        self.a1, self.a2, self.b1, self.b2 = f["a1"], f["a2"], f["b1"], f["b2"]

    @cached_property
    def A1(self):
        return self.a1.antiderivative()

    @cached_property
    def A2(self):
        return self.a2.antiderivative()

    @cached_property
    def B1(self):
        return self.b1.antiderivative()

    @cached_property
    def B2(self):
        return self.b2.antiderivative()

    def _require_nonsingular(self):
        for name, fn in (("a1", self.a1), ("b1", self.b1)):
            if fn.abs_min() < ASSUMPTION_TOL:
                raise CriticalInclinationError(
                    f"critical inclination: stretch solution singular ({name} vanishes)")

    @cached_property
    def Qa(self):
        self._require_nonsingular()
        return self.a2 * self.a2 / self.a1

    @cached_property
    def Qb(self):
        self._require_nonsingular()
        return self.b2 * self.b2 / self.b1

    @cached_property
    def IQa(self):
        return self.Qa.antiderivative()

    @cached_property
    def IQb(self):
        return self.Qb.antiderivative()


def _integrals(surf: TranslationSurface) -> _Integrals:
    cache = surf.__dict__.setdefault("_integrals_cache", {})
    if "v" not in cache:
        cache["v"] = _Integrals(surf)
    return cache["v"]


def _I(fn: PiecewiseFn) -> PiecewiseFn:
    return fn.antiderivative()


def twist_mode(surf: TranslationSurface) -> DisplacementField:
    """Twisting solution (w = A1 B1), with the in-plane rotation constant set to zero."""
    J = _integrals(surf)
    u = ((-1.0, J.A2, J.B1), (1.0, None, _I(J.b1 * J.B2 - J.b2 * J.B1)))
    v = ((-1.0, J.A1, J.B2), (1.0, _I(J.a1 * J.A2 - J.a2 * J.A1), None))
    w = ((1.0, J.A1, J.B1),)
    return DisplacementField(u, v, w, "twist")


def stretch_mode(surf: TranslationSurface) -> DisplacementField:
    """Effective stretching: u = -I(a2^2/a1), v = I(b2^2/b1), w = A2 - B2."""
    J = _integrals(surf)
    u = ((-1.0, J.IQa, None),)
    v = ((1.0, None, J.IQb),)
    w = ((1.0, J.A2, None), (-1.0, None, J.B2))
    return DisplacementField(u, v, w, "stretch")


def bend_s(surf: TranslationSurface) -> DisplacementField:
    """Bending solution (s), symmetric in the roles of the two profiles."""
    J = _integrals(surf)
    u = ((-1.0, J.IQa, J.B2), (-1.0, _I(J.a2 * J.IQa - J.Qa * J.A2), None))
    v = ((-1.0, J.A2, J.IQb), (-1.0, None, _I(J.b2 * J.IQb - J.Qb * J.B2)))
    w = ((1.0, J.A2, J.B2),
         (1.0, None, _I(J.b1 * J.IQb - J.b2 * J.B2)),
         (1.0, _I(J.a1 * J.IQa - J.a2 * J.A2), None))
    return DisplacementField(u, v, w, "bend-s")


def bend_p(surf: TranslationSurface) -> DisplacementField:
    """Bending solution (p).

    The x-only term of ``v`` enters with a plus sign,
    ``+I(a1 IQa - a2 A2)``; that is the sign for which the shear
    constraint closes.
    """
    J = _integrals(surf)
    u = ((-1.0, J.IQa, J.B1),)
    v = ((-1.0, J.A2, J.B2),
         (-1.0, None, _I(J.b2 * J.B2 - J.Qb * J.B1)),
         (1.0, _I(J.a1 * J.IQa - J.a2 * J.A2), None))
    w = ((1.0, J.A2, J.B1), (1.0, None, _I(J.b1 * J.B2 - J.b2 * J.B1)))
    return DisplacementField(u, v, w, "bend-p")


def bend_pbar(surf: TranslationSurface) -> DisplacementField:
    """Bending solution (p) with (u, x, alpha) and (v, y, beta) exchanged."""
    J = _integrals(surf)
    u = ((-1.0, J.A2, J.B2),
         (-1.0, _I(J.a2 * J.A2 - J.Qa * J.A1), None),
         (1.0, None, _I(J.b1 * J.IQb - J.b2 * J.B2)))
    v = ((-1.0, J.A1, J.IQb),)
    w = ((1.0, J.A1, J.B2), (1.0, _I(J.a1 * J.A2 - J.a2 * J.A1), None))
    return DisplacementField(u, v, w, "bend-pbar")


def combine(fields: Sequence[DisplacementField], weights: Sequence[float]) -> DisplacementField:
    """Weighted sum of displacement fields (still isometric by linearity)."""
    if len(fields) != len(weights) or not fields:
        raise ValueError("need one weight per field")
    comps = [[], [], []]
    for fld, wt in zip(fields, weights):
        for acc, comp in zip(comps, fld._folded()):
            acc.extend((float(wt) * k, X, Y) for k, X, Y in comp if wt != 0.0)
    return DisplacementField(tuple(comps[0]), tuple(comps[1]), tuple(comps[2]), "combination",
                             weights=tuple(float(w) for w in weights),
                             parts=tuple(f.mode for f in fields))


def out_of_plane_weights(surf: TranslationSurface) -> tuple[float, float, float]:
    """Weights on (s, p, pbar) cancelling the secular terms of d . N.

    For graph profiles these are ``(-<b1>, <b2>, 0)``; other periodic
    surfaces go through a least-squares elimination of the secular terms.
    """
    if not surf.is_periodic:
        raise SecularEliminationError("secular elimination requires periodicity")
    av = surf.averages
    if surf.graph_family:
        return (-av["b1"], av["b2"], 0.0)
    from .fitting import secular_free_weights

    return secular_free_weights(surf, [bend_s(surf), bend_p(surf), bend_pbar(surf)])


def out_of_plane_bend(surf: TranslationSurface, normalize: bool = True) -> DisplacementField:
    """Out-of-plane bending: the secular-free combination of (s), (p), (pbar).

    With ``normalize`` the field is scaled so the fitted ybar^2 coefficient of
    ``d . N`` has unit magnitude.
    """
    weights = out_of_plane_weights(surf)
    fld = combine([bend_s(surf), bend_p(surf), bend_pbar(surf)], weights)
    fld = replace(fld, mode="bend-oop")
    if normalize:
        from .fitting import quadratic_fit

        fit = quadratic_fit(surf, lambda x, y: fld.normal_component(surf, x, y))
        if fit.scale == 0.0:
            return fld  # every bending solution vanishes (flat sheet)
        if fit.coeffs["yy"] == 0.0:
            raise SecularEliminationError("out-of-plane combination has no ybar^2 curvature")
        fld = fld.scaled(1.0 / abs(fit.coeffs["yy"]))
    return fld


def to_canonical(field: DisplacementField, surf: TranslationSurface):
    """Evaluator ``(x, y) -> d`` on the canonical basis (e1, e2, e3)."""
    def evaluate(x, y):
        return field.canonical(surf, x, y)

    return evaluate


def mode_field(surf: TranslationSurface, mode: str) -> DisplacementField:
    """Build a field from a mode name, including ``combine:w1,w2,w3``."""
    builders = {"twist": twist_mode, "stretch": stretch_mode, "bend-s": bend_s,
                "bend-p": bend_p, "bend-pbar": bend_pbar, "bend-oop": out_of_plane_bend}
    if mode in builders:
        return builders[mode](surf)
    if mode.startswith("combine:"):
        try:
            weights = [float(t) for t in mode.split(":", 1)[1].split(",")]
        except ValueError:
            raise ValueError(f"bad combination weights in {mode!r}") from None
        if len(weights) != 3:
            raise ValueError("combine takes three weights for (s, p, pbar)")
        return combine([bend_s(surf), bend_p(surf), bend_pbar(surf)], weights)
    raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODE_NAMES)} or combine:w1,w2,w3")
