"""Numerical checks that a displacement field is an infinitesimal isometry."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .surface import TranslationSurface

__all__ = [
    "ResidualReport",
    "OrderReport",
    "isometry_residual",
    "crease_residual",
    "crease_continuity",
    "perturbation_order",
    "edge_length_check",
    "chord_gradient",
    "twist_periodic_defect",
    "format_report",
]

DEFAULT_EPS = (1e-2, 5e-3, 2.5e-3)


@dataclass
class ResidualReport:
    """Maxima of the three constraint residuals over a grid.

    ``normalized`` divides by ``scale = max(|d_x|, |d_y|)`` on the grid.
    """

    max_abs: tuple
    scale: float
    worst_point: tuple
    points: int

    @property
    def normalized(self) -> float:
        m = max(self.max_abs)
        return m / self.scale if self.scale > 0 else m


def _residuals(surf, fld, X, Y, side_x="right", side_y="right"):
    a1, a2, b1, b2 = surf.tangent_coefficients(X, Y, side_x, side_y)
    dx, dy = fld.adapted_partials(X, Y, side_x, side_y)
    r = np.stack([
        a1 * dx[..., 0] + a2 * dx[..., 2],
        b1 * dy[..., 1] + b2 * dy[..., 2],
        a1 * dy[..., 0] + b1 * dx[..., 1] + a2 * dy[..., 2] + b2 * dx[..., 2],
    ])
    scale = float(max(np.abs(dx).max(initial=0.0), np.abs(dy).max(initial=0.0)))
    return r, scale


def isometry_residual(surf: TranslationSurface, fld, n: int = 41, periods=(2, 2), start=(0.0, 0.0),
                      offset_rtol: float = 1e-6) -> ResidualReport:
    """Evaluate the three linear isometry constraints on a panel-interior grid."""
    X, Y = surf.interior_grid(n, periods, start, offset_rtol)
    r, scale = _residuals(surf, fld, X, Y)
    absr = np.abs(r)
    k = np.unravel_index(np.argmax(absr), absr.shape)
    worst = (float(X[k[1:]]), float(Y[k[1:]]))
    return ResidualReport(tuple(float(m) for m in absr.reshape(3, -1).max(axis=1)), scale, worst, X.size)


def _crease_params(prof, fn, count):
    br = fn.breaks[1:-1]
    if prof.period is None:
        return br[:count]
    creases = [b for b in br if np.any(prof.is_crease(np.array([b])))]
    return np.asarray(creases[:count])


def crease_residual(surf: TranslationSurface, fld, count: int = 10, samples: int = 11) -> float:
    """Normalized constraint residual using one-sided limits exactly on creases."""
    worst = 0.0
    lines = [(0, surf.alpha, surf.a1), (1, surf.beta, surf.b1)]
    for axis, prof, fn in lines:
        cs = _crease_params(prof, fn, count)
        if cs.size == 0:
            continue
        other = surf.interior_grid(samples, (1, 1))[1 - axis]
        other = other[0] if axis == 0 else other[:, 0]
        C, O = np.meshgrid(cs, other, indexing="ij")
        X, Y = (C, O) if axis == 0 else (O, C)
        for side in ("left", "right"):
            sides = (side, "right") if axis == 0 else ("right", side)
            r, scale = _residuals(surf, fld, X, Y, *sides)
            worst = max(worst, float(np.abs(r).max() / (scale or 1.0)))
    return worst


def crease_continuity(surf: TranslationSurface, fld, count: int = 10, samples: int = 11) -> float:
    """Largest ``|d(left) - d(right)|`` across creases."""
    worst = 0.0
    for axis, prof, fn in ((0, surf.alpha, surf.a1), (1, surf.beta, surf.b1)):
        cs = _crease_params(prof, fn, count)
        if cs.size == 0:
            continue
        other = np.linspace(*(surf.domain[1 - axis]), samples)
        C, O = np.meshgrid(cs, other, indexing="ij")
        X, Y = (C, O) if axis == 0 else (O, C)
        if axis == 0:
            jump = fld.adapted(X, Y, "left", "right") - fld.adapted(X, Y, "right", "right")
        else:
            jump = fld.adapted(X, Y, "right", "left") - fld.adapted(X, Y, "right", "right")
        worst = max(worst, float(np.abs(jump).max()))
    return worst


@dataclass
class OrderReport:
    eps: tuple
    metric_change: tuple
    ratios: tuple = field(default_factory=tuple)

    def within(self, lo: float = 3.8, hi: float = 4.2) -> bool:
        return all(lo <= q <= hi for q in self.ratios)


def _fd_metric(func, X, Y, hx, hy):
    rx = (func(X + hx, Y) - func(X - hx, Y)) / (2 * hx)
    ry = (func(X, Y + hy) - func(X, Y - hy)) / (2 * hy)
    return np.stack([np.sum(rx * rx, -1), np.sum(rx * ry, -1), np.sum(ry * ry, -1)])


def perturbation_order(surf: TranslationSurface, fld, eps_list: Sequence[float] = DEFAULT_EPS,
                       n: int = 21, periods=(2, 2), step_rtol: float = 1e-6) -> OrderReport:
    """Metric change of ``r + eps d`` from central differences inside panels.

    For an infinitesimal isometry the change is second order in ``eps``, so
    halving ``eps`` divides it by 4.
    """
    X, Y = surf.interior_grid(n, periods, offset_rtol=1e-3)
    hx, hy = step_rtol * surf.panel_width(0), step_rtol * surf.panel_width(1)
    # difference quotients of r and d separately keep the eps-independent part exact
    Ir = _fd_metric(surf.position, X, Y, hx, hy)
    rx = (surf.position(X + hx, Y) - surf.position(X - hx, Y)) / (2 * hx)
    ry = (surf.position(X, Y + hy) - surf.position(X, Y - hy)) / (2 * hy)
    d = lambda x, y: fld.canonical(surf, x, y)  # noqa: E731
    dx = (d(X + hx, Y) - d(X - hx, Y)) / (2 * hx)
    dy = (d(X, Y + hy) - d(X, Y - hy)) / (2 * hy)
    changes = []
    for eps in eps_list:
        ex, ey = rx + eps * dx, ry + eps * dy
        Ie = np.stack([np.sum(ex * ex, -1), np.sum(ex * ey, -1), np.sum(ey * ey, -1)])
        changes.append(float(np.abs(Ie - Ir).max()))
    ratios = tuple(a / b if b > 0 else float("inf") if a > 0 else 4.0 for a, b in zip(changes, changes[1:]))
    return OrderReport(tuple(float(e) for e in eps_list), tuple(changes), ratios)


def edge_length_check(reference, deflected, eps: float | None = None) -> float:
    """Largest relative edge-length change between two meshes with equal topology.

    Both quad sides and quad diagonals are scanned.  ``eps`` is accepted for
    reporting symmetry and does not enter the computation.
    """
    V0 = np.asarray(reference.vertices, float)
    V1 = np.asarray(deflected.vertices, float)
    Q = np.asarray(reference.quads)
    if V0.shape != V1.shape or not np.array_equal(Q, np.asarray(deflected.quads)):
        raise ValueError("meshes differ in topology")
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]
    i = np.concatenate([Q[:, a] for a, _ in pairs])
    j = np.concatenate([Q[:, b] for _, b in pairs])
    L0 = np.linalg.norm(V0[j] - V0[i], axis=1)
    L1 = np.linalg.norm(V1[j] - V1[i], axis=1)
    return float(np.max(np.abs(L1 - L0) / L0)) if L0.size else 0.0


def chord_gradient(mesh, surf, fld) -> float:
    """Largest ``|d(q) - d(p)| / |r(q) - r(p)|`` over quad sides and diagonals.

    For a chord inside a planar facet the first-order length change vanishes,
    so deflecting by ``eps`` changes its relative length by at most
    ``(eps * chord_gradient)**2 / 2``.
    """
    X, Y = np.meshgrid(mesh.xs, mesh.ys, indexing="ij")
    D = fld.canonical(surf, X, Y).reshape(-1, 3)
    V, Q = mesh.vertices, np.asarray(mesh.quads)
    best = 0.0
    for a, b in ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)):
        num = np.linalg.norm(D[Q[:, b]] - D[Q[:, a]], axis=1)
        den = np.linalg.norm(V[Q[:, b]] - V[Q[:, a]], axis=1)
        best = max(best, float((num / den).max(initial=0.0)))
    return best


def twist_periodic_defect(surf: TranslationSurface, fld, n: int = 9, cells=(2, 2)) -> float:
    """Non-periodicity of twist minus its effective torsion, modulo a rigid rotation.

    The remainder ``d - (-zbar ybar, -zbar xbar, xbar ybar)`` (effective frame,
    ``zbar`` measured from its mean) should repeat from one period to the next
    up to the change produced by a single infinitesimal rotation.  Returns the
    largest leftover after fitting that rotation, in absolute units.
    """
    Px, Py = surf.periods_xy
    u = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(u * Px * cells[0], u * Py * cells[1], indexing="ij")
    frame = surf.effective_frame
    zmean = _mean_height(surf)

    def remainder(x, y):
        xb, yb, zb = np.moveaxis(surf.position_bar(x, y), -1, 0)
        zb = zb - zmean
        local = np.stack([-zb * yb, -zb * xb, xb * yb], -1)
        return fld.canonical(surf, x, y) - local @ frame

    R0 = remainder(X, Y)
    rows, rhs = [], []
    for sx, sy in ((Px, 0.0), (0.0, Py)):
        dR = remainder(X + sx, Y + sy) - R0
        dr = surf.position(X + sx, Y + sy) - surf.position(X, Y)
        # omega x dr = -[dr]_x omega
        M = np.zeros(dr.shape[:-1] + (3, 3))
        M[..., 0, 1], M[..., 0, 2] = dr[..., 2], -dr[..., 1]
        M[..., 1, 0], M[..., 1, 2] = -dr[..., 2], dr[..., 0]
        M[..., 2, 0], M[..., 2, 1] = dr[..., 1], -dr[..., 0]
        rows.append(M.reshape(-1, 3))
        rhs.append(dR.reshape(-1))
    A, b = np.concatenate(rows), np.concatenate(rhs)
    omega, *_ = np.linalg.lstsq(A, b, rcond=None)
    return float(np.abs(A @ omega - b).max())


def _mean_height(surf) -> float:
    from .piecewise import gauss_legendre_nodes

    Px, Py = surf.periods_xy
    x, wx = gauss_legendre_nodes(0.0, Px, surf.a1.breaks)
    y, wy = gauss_legendre_nodes(0.0, Py, surf.b1.breaks)
    X, Y = np.meshgrid(x, y, indexing="ij")
    z = surf.position_bar(X, Y)[..., 2]
    return float(wx @ z @ wy / (Px * Py))


def format_report(items: dict) -> str:
    """Key-value lines, one per entry, floats in repr precision."""
    lines = []
    for k, v in items.items():
        if isinstance(v, float):
            v = repr(v)
        elif isinstance(v, (tuple, list)):
            v = ",".join(repr(float(t)) if isinstance(t, (float, np.floating)) else str(t) for t in v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
