"""Planar profile curves, smooth or creased.

A profile lives in its own plane with in-plane coordinates ``(p, q)``.  Graph
profiles (zigzag, sinusoid, sampled, flat) use ``p = t`` and ``q = f(t)``;
polygons and closed smooth curves are parametrised by arc length or angle.
The tangent ``(p', q')`` is what feeds the tangent coefficients of a surface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .piecewise import PiecewiseFn

__all__ = ["ProfileCurve", "CreaseAmbiguityError", "derivative", "KINDS"]

KINDS = ("zigzag", "sinusoid", "sampled", "flat", "closed-polygon", "open-polygon", "closed-smooth")

# creases closer than this fraction of a period are the same crease
_CREASE_RTOL = 1e-12


class CreaseAmbiguityError(ValueError):
    """Raised when a one-sided quantity is requested exactly at a crease."""

    def __init__(self, t):
        super().__init__(f"ambiguous crease derivative at t={t!r}: pass side='left' or 'right'")


@dataclass(frozen=True)
class ProfileCurve:
    """Planar profile curve.

    Use the classmethod constructors rather than instantiating directly.

    Attributes
    ----------
    kind : str
        One of ``KINDS``.
    params : dict
        Kind-specific parameters.
    period : float or None
        Period of the parametrisation, None for aperiodic curves.
    crease_points : tuple of float
        Parameters of tangent discontinuities within one period
        (all of them for aperiodic curves).
    """

    kind: str
    params: dict[str, Any]
    period: float | None
    crease_points: tuple[float, ...]
    _extra_breaks: tuple[float, ...] = field(default=(), repr=False)

    # -- constructors ------------------------------------------------------
    @classmethod
    def zigzag(cls, slope: float = 1.0, half_period: float = 1.0, offset: float = 0.0):
        """Triangle wave rising with ``slope`` on [0, half_period), then falling."""
        if slope <= 0 or half_period <= 0:
            raise ValueError("zigzag needs slope > 0 and half_period > 0")
        return cls("zigzag", {"slope": float(slope), "half_period": float(half_period),
                              "offset": float(offset)},
                   2.0 * half_period, (0.0, float(half_period)))

    @classmethod
    def sinusoid(cls, amplitude: float = 0.5, period: float = 2.0, phase: float = 0.0):
        """Graph of ``amplitude * sin(2 pi t / period + phase)``."""
        if period <= 0:
            raise ValueError("sinusoid needs period > 0")
        # breaks where the slope is extremal or zero keep panels short and exact at extremes
        k = 2.0 * math.pi / period
        extra = tuple(sorted(((j * math.pi / 2 - phase) / k) % period for j in range(4)))
        return cls("sinusoid", {"amplitude": float(amplitude), "period": float(period),
                                "phase": float(phase)}, float(period), (), extra)

    @classmethod
    def flat(cls, period: float = 2.0):
        return cls("flat", {"period": float(period)}, float(period), (), (0.0, 0.5 * period))

    @classmethod
    def sampled(cls, abscissae, values, period: float | None = None):
        """Piecewise-linear graph through the samples; every sample is a crease.

        With ``period`` given the samples describe one period and must close
        up (first and last values equal, span equal to the period).
        """
        t = np.asarray(abscissae, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("need matching 1-D abscissae and values with at least two samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("abscissae must be strictly increasing")
        params = {"abscissae": tuple(t.tolist()), "values": tuple(v.tolist())}
        if period is None:
            return cls("sampled", params, None, tuple(t.tolist()))
        if not math.isclose(t[-1] - t[0], period, rel_tol=1e-12) or not math.isclose(v[-1], v[0], abs_tol=1e-12):
            raise ValueError("periodic samples must span exactly one period and close up")
        creases = tuple(sorted(((t[:-1] - t[0]) % period + t[0]) % period))
        return cls("sampled", params, float(period), creases)

    @classmethod
    def polygon(cls, vertices, closed: bool = True):
        """Polygon in the profile plane parametrised by arc length from the first vertex."""
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or len(V) < (3 if closed else 2):
            raise ValueError("polygon needs an (n, 2) vertex array")
        pts = np.vstack([V, V[:1]]) if closed else V
        lengths = np.hypot(*np.diff(pts, axis=0).T)
        if np.any(lengths <= 0):
            raise ValueError("polygon has repeated consecutive vertices")
        arc = np.concatenate(([0.0], np.cumsum(lengths)))
        params = {"vertices": tuple(map(tuple, V.tolist())), "arc": tuple(arc.tolist())}
        if closed:
            return cls("closed-polygon", params, float(arc[-1]), tuple(arc[:-1].tolist()))
        return cls("open-polygon", params, None, tuple(arc.tolist()))

    @classmethod
    def closed_smooth(cls, a: float = 1.0, b: float = 1.0, skew: float = 0.0):
        """Closed curve ``(a cos t, b sin t + skew sin 2t)``; skew breaks centro-symmetry."""
        P = 2.0 * math.pi
        return cls("closed-smooth", {"a": float(a), "b": float(b), "skew": float(skew)},
                   P, (), (0.0, P / 4, P / 2, 3 * P / 4))

    def cut(self) -> "ProfileCurve":
        """Open copy of a closed polygon, cut at its first vertex."""
        if self.kind != "closed-polygon":
            raise ValueError("only closed polygons can be cut")
        V = np.asarray(self.params["vertices"])
        return ProfileCurve.polygon(np.vstack([V, V[:1]]), closed=False)

    # -- descriptive -------------------------------------------------------
    @property
    def is_graph(self) -> bool:
        return self.kind in ("zigzag", "sinusoid", "sampled", "flat")

    @property
    def is_closed(self) -> bool:
        return self.kind in ("closed-polygon", "closed-smooth")

    @property
    def is_periodic(self) -> bool:
        return self.period is not None

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "sampled" and self.period is None:
            t = self.params["abscissae"]
            return t[0], t[-1]
        if self.kind == "open-polygon":
            return 0.0, self.params["arc"][-1]
        return -math.inf, math.inf

    def __str__(self) -> str:
        shown = {k: v for k, v in self.params.items() if k not in ("arc",)}
        return f"{self.kind}({', '.join(f'{k}={v}' for k, v in shown.items())})"

    # -- pointwise evaluation ----------------------------------------------
    def _check_support(self, t):
        lo, hi = self.support
        if math.isfinite(lo):
            slack = 1e-12 * (hi - lo)
            if np.any(t < lo - slack) or np.any(t > hi + slack):
                raise ValueError(f"parameter outside profile support [{lo:g}, {hi:g}]")

    def _phase(self, t):
        return np.mod(t, self.period)

    def is_crease(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if not self.crease_points:
            return np.zeros(t.shape, dtype=bool)
        c = np.asarray(self.crease_points)
        if self.period is None:
            scale = max(abs(c[-1] - c[0]), 1.0)
            return np.min(np.abs(t[..., None] - c), axis=-1) <= _CREASE_RTOL * scale
        tau = self._phase(t)[..., None]
        d = np.abs(tau - c)
        d = np.minimum(d, self.period - d)
        return np.min(d, axis=-1) <= _CREASE_RTOL * self.period

    def point(self, t):
        """In-plane coordinates ``(p, q)`` of the curve at parameter ``t``."""
        t = np.asarray(t, dtype=float)
        self._check_support(t)
        k, P = self.kind, self.period
        if k == "zigzag":
            m, l, o = self.params["slope"], self.params["half_period"], self.params["offset"]
            tau = self._phase(t)
            return t, o + m * (l - np.abs(tau - l))
        if k == "sinusoid":
            A, L, ph = self.params["amplitude"], self.params["period"], self.params["phase"]
            return t, A * np.sin(2 * np.pi * t / L + ph)
        if k == "flat":
            return t, np.zeros_like(t)
        if k == "sampled":
            ts, vs = np.asarray(self.params["abscissae"]), np.asarray(self.params["values"])
            if P is None:
                return t, np.interp(t, ts, vs)
            return t, np.interp(np.mod(t - ts[0], P) + ts[0], ts, vs)
        if k in ("closed-polygon", "open-polygon"):
            V = np.asarray(self.params["vertices"])
            arc = np.asarray(self.params["arc"])
            if k == "closed-polygon":
                V = np.vstack([V, V[:1]])
                s = np.mod(t, P)
            else:
                s = t
            i = np.clip(np.searchsorted(arc, s, side="right") - 1, 0, len(arc) - 2)
            d = (V[i + 1] - V[i]) / (arc[i + 1] - arc[i])[..., None]
            xy = V[i] + (s - arc[i])[..., None] * d
            return xy[..., 0], xy[..., 1]
        if k == "closed-smooth":
            a, b, e = self.params["a"], self.params["b"], self.params["skew"]
            return a * np.cos(t), b * np.sin(t) + e * np.sin(2 * t)
        raise AssertionError(k)

    def tangent(self, t, side: str = "right"):
        """One-sided tangent ``(p', q')``; ``side='auto'`` is rejected at creases."""
        t = np.asarray(t, dtype=float)
        self._check_support(t)
        if side == "auto":
            crease = self.is_crease(t)
            if np.any(crease):
                raise CreaseAmbiguityError(t[crease].ravel()[0] if t.ndim else float(t))
            side = "right"
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left', 'right' or 'auto', got {side!r}")
        # nudge into the requested panel; tangents are constant or smooth there
        if self.crease_points:
            scale = self.period if self.period else max(abs(self.crease_points[-1] - self.crease_points[0]), 1.0)
            nudge = 1e-9 * scale
            at = self.is_crease(t)
            t = np.where(at, t - nudge if side == "left" else t + nudge, t)
        return self._tangent_interior(t)

    def _tangent_interior(self, t):
        k = self.kind
        one = np.ones_like(t)
        if k == "zigzag":
            m, l = self.params["slope"], self.params["half_period"]
            return one, np.where(self._phase(t) < l, m, -m) * one
        if k == "sinusoid":
            A, L, ph = self.params["amplitude"], self.params["period"], self.params["phase"]
            w = 2 * np.pi / L
            return one, A * w * np.cos(w * t + ph)
        if k == "flat":
            return one, np.zeros_like(t)
        if k == "sampled":
            ts, vs = np.asarray(self.params["abscissae"]), np.asarray(self.params["values"])
            s = t if self.period is None else np.mod(t - ts[0], self.period) + ts[0]
            i = np.clip(np.searchsorted(ts, s, side="right") - 1, 0, len(ts) - 2)
            return one, (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i])
        if k in ("closed-polygon", "open-polygon"):
            V = np.asarray(self.params["vertices"])
            arc = np.asarray(self.params["arc"])
            if k == "closed-polygon":
                V = np.vstack([V, V[:1]])
                s = np.mod(t, self.period)
            else:
                s = t
            i = np.clip(np.searchsorted(arc, s, side="right") - 1, 0, len(arc) - 2)
            d = (V[i + 1] - V[i]) / (arc[i + 1] - arc[i])[..., None]
            return d[..., 0], d[..., 1]
        if k == "closed-smooth":
            a, b, e = self.params["a"], self.params["b"], self.params["skew"]
            return -a * np.sin(t), b * np.cos(t) + 2 * e * np.cos(2 * t)
        raise AssertionError(k)

    # -- piecewise representation ------------------------------------------
    def breaks(self, lo: float, hi: float, base_point: float = 0.0) -> np.ndarray:
        """Partition of [lo, hi] containing every crease, the base point and the ends."""
        if not lo < hi:
            raise ValueError("empty interval")
        if not lo <= base_point <= hi:
            raise ValueError("base point must lie inside the interval")
        self._check_support(np.array([lo, hi]))
        marks = tuple(sorted(set(self.crease_points) | set(self._extra_breaks)))
        if self.period is None:
            pts = np.asarray(marks, dtype=float)
            scale = hi - lo
        else:
            P = self.period
            first, last = math.floor(lo / P) - 1, math.ceil(hi / P) + 1
            pts = np.array([j * P + m for j in range(first, last + 1) for m in marks])
            scale = P
        tol = _CREASE_RTOL * scale
        inner = [p for p in pts if lo + tol < p < hi - tol]
        if all(abs(base_point - p) > tol for p in inner) and lo < base_point < hi:
            inner.append(base_point)
        out = np.unique(np.concatenate(([lo], inner, [hi])))
        return out

    def tangent_fns(self, lo: float, hi: float, base_point: float = 0.0):
        """Tangent components ``(p', q')`` as piecewise functions on [lo, hi]."""
        br = self.breaks(lo, hi, base_point)
        mids = 0.5 * (br[:-1] + br[1:])
        smooth = self.kind in ("sinusoid", "closed-smooth")
        name = {"closed-polygon": "poly", "open-polygon": "poly", "closed-smooth": "ell"}.get(self.kind, "f")
        if smooth:
            dp = PiecewiseFn.from_panels(br, [lambda x: self._tangent_interior(x)[0]] * len(mids),
                                         base_point, label=f"{name}.p'")
            dq = PiecewiseFn.from_panels(br, [lambda x: self._tangent_interior(x)[1]] * len(mids),
                                         base_point, label=f"{name}.q'")
            return dp, dq
        p1, q1 = self._tangent_interior(mids)
        dp = PiecewiseFn(br, [[v] for v in np.broadcast_to(p1, mids.shape)], base_point, label=f"{name}.p'")
        dq = PiecewiseFn(br, [[v] for v in np.broadcast_to(q1, mids.shape)], base_point, label=f"{name}.q'")
        return dp, dq

    def slope_bounds(self):
        """Range of the tangent components over one period (or the support)."""
        lo, hi = (0.0, self.period) if self.period else self.support
        dp, dq = self.tangent_fns(lo, hi, lo)
        return dp.extrema(), dq.extrema()


def derivative(p: ProfileCurve, t, side: str = "auto"):
    """One-sided slope ``q'(t)`` of a profile (``f'`` for graph profiles)."""
    return p.tangent(t, side)[1] if np.ndim(t) else float(p.tangent(t, side)[1])
