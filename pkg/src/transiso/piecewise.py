"""Piecewise Chebyshev functions on a fixed partition of a real interval.

Every tangent coefficient of a profile, and every nested antiderivative built
from those coefficients, lives on the partition of its profile: crease
points, a few extra break points for smooth profiles, the base point of
integration and the interval ends.  Products, sums and antiderivatives never
leave that partition, so antiderivatives are exact polynomial integrals
accumulated panel by panel and remain continuous across creases even though
their integrands jump.

Piecewise polynomial data (zigzags, sampled profiles, polygons) is
represented exactly.  Smooth data (sinusoids, ellipses) is interpolated once
per panel to machine precision and treated exactly from then on.
"""
from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.fft import dct

__all__ = [
    "PiecewiseFn",
    "antiderivative",
    "average_over_period",
    "composite_gauss_legendre",
    "gauss_legendre_nodes",
]

# relative size below which trailing Chebyshev coefficients are dropped
_CHOP_RTOL = 1e-17
_INTERP_SIZES = (16, 32, 64, 128)
_INTERP_TOL = 1e-15
# tolerance, relative to the support width, for points on the support ends
_SUPPORT_SLACK = 1e-12


def _chop(c: np.ndarray) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(c) > _CHOP_RTOL * scale)[0]
    return c[: keep[-1] + 1].copy()


def _cheb_coefficients(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from samples at first-kind points (DCT-II)."""
    n = values.size
    c = dct(values[::-1], type=2) / n
    c[0] *= 0.5
    return c


def _interpolate(func: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> np.ndarray:
    """Chebyshev coefficients of ``func`` on [a, b], degree chosen adaptively."""
    half, mid = 0.5 * (b - a), 0.5 * (b + a)
    for n in _INTERP_SIZES:
        t = np.cos(np.pi * (np.arange(n) + 0.5) / n)[::-1]
        coefs = _cheb_coefficients(np.asarray(func(mid + half * t), dtype=float) * np.ones(n))
        scale = np.max(np.abs(coefs))
        if scale == 0.0:
            return np.zeros(1)
        if np.max(np.abs(coefs[-4:])) <= _INTERP_TOL * scale:
            break
    keep = np.nonzero(np.abs(coefs) > _INTERP_TOL * scale)[0]
    return coefs[: keep[-1] + 1]


class PiecewiseFn:
    """Real function of one variable, polynomial on every panel of a partition.

    Parameters
    ----------
    breaks : array_like, shape (n + 1,)
        Strictly increasing panel boundaries.  The support is
        ``[breaks[0], breaks[-1]]``.
    coefs : sequence of array_like
        Chebyshev coefficients of each of the ``n`` panels, in the local
        variable mapping the panel onto [-1, 1].
    base_point : float
        Common lower bound of integration; must be one of the breaks.
    integrand : PiecewiseFn, optional
        Set on antiderivatives so that differentiation returns the integrand
        itself rather than a differentiated polynomial.
    label : str
        Human-readable expression, e.g. ``"I(a2*I(b1))"``.
    exact : bool
        False when some panel came from interpolation of a non-polynomial.
    """

    __slots__ = ("breaks", "coefs", "base_point", "integrand", "label", "exact", "_table")

    def __init__(self, breaks, coefs, base_point: float = 0.0, integrand=None,
                 label: str = "g", exact: bool = True):
        self.breaks = np.asarray(breaks, dtype=float)
        if self.breaks.ndim != 1 or self.breaks.size < 2 or np.any(np.diff(self.breaks) <= 0):
            raise ValueError("breaks must be strictly increasing with at least two entries")
        self.coefs = tuple(_chop(c) for c in coefs)
        if len(self.coefs) != self.breaks.size - 1:
            raise ValueError("need one coefficient array per panel")
        if not np.any(self.breaks == base_point):
            raise ValueError(f"base point {base_point} is not a panel boundary")
        self.base_point = float(base_point)
        self.integrand = integrand
        self.label = label
        self.exact = exact
        width = max(len(c) for c in self.coefs)
        table = np.zeros((len(self.coefs), width))
        for i, c in enumerate(self.coefs):
            table[i, : len(c)] = c
        self._table = table

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, breaks, value: float, base_point: float = 0.0, label: str | None = None):
        n = len(breaks) - 1
        return cls(breaks, [np.array([float(value)])] * n, base_point,
                   label=label if label is not None else repr(float(value)))

    @classmethod
    def from_panels(cls, breaks, panel_funcs, base_point: float = 0.0, label: str = "g"):
        """Interpolate one callable per panel (callables act on global x)."""
        breaks = np.asarray(breaks, dtype=float)
        coefs = [_interpolate(fn, a, b) for fn, a, b in zip(panel_funcs, breaks[:-1], breaks[1:])]
        return cls(breaks, coefs, base_point, label=label, exact=False)

    @classmethod
    def from_polynomials(cls, breaks, power_coefs, base_point: float = 0.0, label: str = "g"):
        """Build from ordinary power-series coefficients in global x, one per panel."""
        breaks = np.asarray(breaks, dtype=float)
        coefs = []
        for pc, a, b in zip(power_coefs, breaks[:-1], breaks[1:]):
            # substitute x = mid + half * t, then convert to Chebyshev
            half, mid = 0.5 * (b - a), 0.5 * (b + a)
            local = np.polynomial.Polynomial(pc)(np.polynomial.Polynomial([mid, half]))
            coefs.append(cheb.poly2cheb(local.coef))
        return cls(breaks, coefs, base_point, label=label)

    # -- basic properties --------------------------------------------------
    @property
    def support(self) -> tuple[float, float]:
        return float(self.breaks[0]), float(self.breaks[-1])

    @property
    def n_panels(self) -> int:
        return len(self.coefs)

    @property
    def piecewise_constant(self) -> bool:
        return all(len(c) == 1 for c in self.coefs)

    def __repr__(self) -> str:
        lo, hi = self.support
        return f"PiecewiseFn({self.label}, support=[{lo:g}, {hi:g}], panels={self.n_panels})"

    def same_partition(self, other: "PiecewiseFn") -> bool:
        return (self.breaks.shape == other.breaks.shape and np.array_equal(self.breaks, other.breaks)
                and self.base_point == other.base_point)

    # -- evaluation --------------------------------------------------------
    def panel_index(self, x, side: str = "right") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        slack = _SUPPORT_SLACK * (hi - lo)
        if np.any(x < lo - slack) or np.any(x > hi + slack):
            raise ValueError(f"evaluation outside support [{lo:g}, {hi:g}]")
        if side == "right":
            idx = np.searchsorted(self.breaks, x, side="right") - 1
        elif side == "left":
            idx = np.searchsorted(self.breaks, x, side="left") - 1
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return np.clip(idx, 0, self.n_panels - 1)

    def __call__(self, x, side: str = "right"):
        """Evaluate; at a panel boundary ``side`` selects the one-sided limit."""
        xa = np.asarray(x, dtype=float)
        idx = self.panel_index(xa, side)
        a = self.breaks[idx]
        b = self.breaks[idx + 1]
        t = (2.0 * xa - (a + b)) / (b - a)
        coefs = self._table[idx]
        # vectorised Clenshaw recurrence, one coefficient row per point
        b1 = np.zeros_like(t)
        b2 = np.zeros_like(t)
        for k in range(coefs.shape[-1] - 1, 0, -1):
            b1, b2 = coefs[..., k] + 2.0 * t * b1 - b2, b1
        out = coefs[..., 0] + t * b1 - b2
        return float(out) if np.ndim(x) == 0 else out

    # -- algebra -----------------------------------------------------------
    def _check(self, other: "PiecewiseFn"):
        if not self.same_partition(other):
            raise ValueError("operands live on different partitions")

    def _combine(self, other, op, label):
        if isinstance(other, PiecewiseFn):
            self._check(other)
            coefs = [op(a, b) for a, b in zip(self.coefs, other.coefs)]
            exact = self.exact and other.exact
        else:
            val = float(other)
            coefs = [op(a, np.array([val])) for a in self.coefs]
            exact = self.exact
        return PiecewiseFn(self.breaks, coefs, self.base_point, label=label, exact=exact)

    def __add__(self, other):
        lab = other.label if isinstance(other, PiecewiseFn) else repr(other)
        return self._combine(other, cheb.chebadd, f"({self.label}+{lab})")

    __radd__ = __add__

    def __sub__(self, other):
        lab = other.label if isinstance(other, PiecewiseFn) else repr(other)
        return self._combine(other, cheb.chebsub, f"({self.label}-{lab})")

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PiecewiseFn(self.breaks, [-c for c in self.coefs], self.base_point,
                           label=f"-{self.label}", exact=self.exact)

    def __mul__(self, other):
        if isinstance(other, PiecewiseFn):
            return self._combine(other, cheb.chebmul, f"{self.label}*{other.label}")
        val = float(other)
        return PiecewiseFn(self.breaks, [val * c for c in self.coefs], self.base_point,
                           label=f"{val:g}*{self.label}", exact=self.exact)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, PiecewiseFn):
            return self * (1.0 / float(other))
        self._check(other)
        label = f"{self.label}/{other.label}"
        if other.piecewise_constant:
            coefs = []
            for a, b in zip(self.coefs, other.coefs):
                if b[0] == 0.0:
                    raise ZeroDivisionError(f"division by a function vanishing on a panel in {label}")
                coefs.append(a / b[0])
            return PiecewiseFn(self.breaks, coefs, self.base_point, label=label, exact=self.exact)
        funcs = [(lambda x, i=i: self._eval_panel(i, x) / other._eval_panel(i, x))
                 for i in range(self.n_panels)]
        out = PiecewiseFn.from_panels(self.breaks, funcs, self.base_point, label=label)
        return out

    def _eval_panel(self, i: int, x):
        a, b = self.breaks[i], self.breaks[i + 1]
        return cheb.chebval((2.0 * np.asarray(x) - (a + b)) / (b - a), self.coefs[i])

    # -- calculus ----------------------------------------------------------
    def antiderivative(self) -> "PiecewiseFn":
        """Antiderivative vanishing at the base point, continuous everywhere."""
        k = int(np.nonzero(self.breaks == self.base_point)[0][0])
        widths = np.diff(self.breaks)
        local = [cheb.chebint(c, lbnd=-1, scl=0.5 * w) for c, w in zip(self.coefs, widths)]
        increments = np.array([cheb.chebval(1.0, c) for c in local])
        left_values = np.zeros(self.n_panels)
        for i in range(k + 1, self.n_panels):
            left_values[i] = left_values[i - 1] + increments[i - 1]
        for i in range(k - 1, -1, -1):
            left_values[i] = left_values[i + 1] - increments[i]
        coefs = [cheb.chebadd(c, [v]) for c, v in zip(local, left_values)]
        return PiecewiseFn(self.breaks, coefs, self.base_point, integrand=self,
                           label=f"I({self.label})", exact=self.exact)

    def derivative(self) -> "PiecewiseFn":
        if self.integrand is not None:
            return self.integrand
        widths = np.diff(self.breaks)
        coefs = [cheb.chebder(c, scl=2.0 / w) if len(c) > 1 else np.zeros(1)
                 for c, w in zip(self.coefs, widths)]
        return PiecewiseFn(self.breaks, coefs, self.base_point, label=f"D({self.label})",
                           exact=self.exact)

    def integral(self, a: float, b: float) -> float:
        """Definite integral over [a, b] (both inside the support)."""
        F = self.antiderivative()
        return float(F(b) - F(a))

    def extrema(self, lo: float | None = None, hi: float | None = None, samples: int = 65):
        """Approximate (min, max) over [lo, hi] including one-sided panel limits."""
        lo = self.support[0] if lo is None else lo
        hi = self.support[1] if hi is None else hi
        vmin, vmax = np.inf, -np.inf
        for i in range(self.n_panels):
            a, b = self.breaks[i], self.breaks[i + 1]
            if b <= lo or a >= hi:
                continue
            a, b = max(a, lo), min(b, hi)
            xs = np.linspace(a, b, samples if len(self.coefs[i]) > 2 else 2)
            vals = self._eval_panel(i, xs)
            vmin, vmax = min(vmin, vals.min()), max(vmax, vals.max())
        return float(vmin), float(vmax)

    def abs_min(self, samples: int = 257) -> float:
        """Smallest |value| over all panels, one-sided limits included.

        A sign change inside a panel counts as a zero.
        """
        best = np.inf
        for i in range(self.n_panels):
            xs = np.linspace(self.breaks[i], self.breaks[i + 1], samples if len(self.coefs[i]) > 2 else 2)
            vals = self._eval_panel(i, xs)
            if vals.min() < 0.0 < vals.max():
                return 0.0
            best = min(best, float(np.min(np.abs(vals))))
        return best


def antiderivative(g: PiecewiseFn) -> PiecewiseFn:
    """Antiderivative of ``g`` vanishing at its base point."""
    return g.antiderivative()


def average_over_period(g: PiecewiseFn, period: float | None, start: float | None = None) -> float:
    """Mean of a periodic function over one period starting at ``start``."""
    if period is None or not np.isfinite(period) or period <= 0:
        raise ValueError("average undefined: function is not periodic")
    start = g.base_point if start is None else float(start)
    F = g.antiderivative()
    return float(F(start + period) - F(start)) / period


def gauss_legendre_nodes(a: float, b: float, breaks=(), n: int = 16):
    """Composite Gauss-Legendre nodes and weights on [a, b], split at ``breaks``."""
    t, w = np.polynomial.legendre.leggauss(n)
    cuts = np.concatenate(([a], [c for c in np.sort(np.asarray(breaks, float)) if a < c < b], [b]))
    xs, ws = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        half = 0.5 * (hi - lo)
        xs.append(lo + half * (t + 1.0))
        ws.append(half * w)
    return np.concatenate(xs), np.concatenate(ws)


def composite_gauss_legendre(func: Callable, a: float, b: float, breaks=(), n: int = 16) -> float:
    """Integrate ``func`` over [a, b] panel by panel (an independent quadrature)."""
    xs, ws = gauss_legendre_nodes(a, b, breaks, n)
    return float(np.dot(ws, func(xs)))
