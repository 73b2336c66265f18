"""Cell averages, quadratic fits and secular-term detection on periodic surfaces.

Fields on a periodic surface are "polynomial up to a periodic correction"
when their unit-cell averages are polynomial in the cell-averaged effective
coordinates.  Averaging over whole cells removes the periodic part exactly,
so the fit recovers the polynomial coefficients to rounding; whatever is not
captured shows up as a failure of the remainder to repeat from cell to cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .piecewise import gauss_legendre_nodes

__all__ = ["CellGrid", "FitResult", "quadratic_fit", "linear_fit", "periodicity_defects",
           "secular_free_weights", "InsufficientSupportError", "MONOMIALS"]

MONOMIALS = ("1", "x", "y", "xx", "xy", "yy")
# interior sample fractions of a cell used for periodicity comparisons
_PROBE_FRACTIONS = np.array([0.13, 0.37, 0.61, 0.89])
_MIN_CELLS = 3


class InsufficientSupportError(ValueError):
    pass


@dataclass
class CellGrid:
    """Gauss-Legendre nodes grouped by unit cell over a block of periods."""

    surf: object
    cells: tuple[int, int] = (4, 4)
    start: tuple[float, float] = (0.0, 0.0)
    order: int = 16

    def __post_init__(self):
        if min(self.cells) < _MIN_CELLS:
            raise InsufficientSupportError(
                f"insufficient support for fit: need at least {_MIN_CELLS}x{_MIN_CELLS} periods, got {self.cells}")
        if not self.surf.is_periodic:
            raise InsufficientSupportError("cell averages need a surface periodic in both directions")
        self.periods = self.surf.periods_xy
        nodes, weights = [], []
        for axis in (0, 1):
            P = self.periods[axis]
            fn = self.surf.a1 if axis == 0 else self.surf.b1
            lo, hi = self.start[axis], self.start[axis] + (self.cells[axis] + 1) * P
            if lo < fn.support[0] or hi > fn.support[1]:
                raise InsufficientSupportError(
                    f"insufficient support for fit: cells [{lo:g}, {hi:g}] leave the surface support")
            xs, ws = [], []
            for i in range(self.cells[axis]):
                lo = self.start[axis] + i * P
                x, w = gauss_legendre_nodes(lo, lo + P, fn.breaks, self.order)
                xs.append(x)
                ws.append(w / P)
            nodes.append(np.array(xs))
            weights.append(np.array(ws))
        self.xn, self.yn = nodes
        self.wx, self.wy = weights
        self.X, self.Y = np.meshgrid(self.xn.ravel(), self.yn.ravel(), indexing="ij")

    def average(self, values: np.ndarray) -> np.ndarray:
        """Cell averages of values sampled on ``(X, Y)``; shape ``cells``."""
        ncx, nqx = self.xn.shape
        ncy, nqy = self.yn.shape
        V = values.reshape(ncx, nqx, ncy, nqy)
        return np.einsum("iajb,ia,jb->ij", V, self.wx, self.wy)

    @property
    def design(self) -> np.ndarray:
        """Cell averages of the monomials 1, xbar, ybar, xbar^2, xbar ybar, ybar^2."""
        if not hasattr(self, "_design"):
            bar = self.surf.position_bar(self.X, self.Y)
            xb, yb = bar[..., 0], bar[..., 1]
            cols = [np.ones_like(xb), xb, yb, xb * xb, xb * yb, yb * yb]
            self._design = np.stack([self.average(c).ravel() for c in cols], axis=1)
        return self._design

    def probes(self):
        """Interior probe points of every cell, shape ``(ncx, ncy, k, k)`` each."""
        Px, Py = self.periods
        fx = self.start[0] + (np.arange(self.cells[0])[:, None] + _PROBE_FRACTIONS[None, :]) * Px
        fy = self.start[1] + (np.arange(self.cells[1])[:, None] + _PROBE_FRACTIONS[None, :]) * Py
        X = np.broadcast_to(fx[:, None, :, None], (self.cells[0], self.cells[1], fx.shape[1], fy.shape[1]))
        Y = np.broadcast_to(fy[None, :, None, :], X.shape)
        return X, Y


@dataclass
class FitResult:
    """Least-squares fit of cell averages against low-order monomials."""

    coeffs: dict
    secular_residual: float
    scale: float
    defects: np.ndarray = field(repr=False)

    @property
    def curvature_ratio(self) -> float:
        return self.coeffs["xx"] / self.coeffs["yy"]

    @property
    def kappa_x(self) -> float:
        return 2.0 * self.coeffs["xx"]

    @property
    def kappa_y(self) -> float:
        return 2.0 * self.coeffs["yy"]


def _fit(grid: CellGrid, fn: Callable, ncols: int) -> FitResult:
    values = fn(grid.X, grid.Y)
    A = grid.design[:, :ncols]
    b = grid.average(values).ravel()
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    coeffs = dict(zip(MONOMIALS[:ncols], sol.tolist()))
    defects = _defects(grid, fn, sol)
    scale = float(np.max(np.abs(values)))
    resid = float(np.max(np.abs(defects)) / scale) if scale > 0 else 0.0
    return FitResult(coeffs, resid, scale, defects)


def _defects(grid: CellGrid, fn: Callable, sol: np.ndarray) -> np.ndarray:
    X, Y = grid.probes()
    bar = grid.surf.position_bar(X, Y)
    xb, yb = bar[..., 0], bar[..., 1]
    mono = [np.ones_like(xb), xb, yb, xb * xb, xb * yb, yb * yb][: sol.size]
    R = fn(X, Y) - sum(c * m for c, m in zip(sol, mono))
    dx = R[1:, :] - R[:-1, :]
    dy = R[:, 1:] - R[:, :-1]
    return np.concatenate([dx.ravel(), dy.ravel()])


def quadratic_fit(surf, fn: Callable, cells=(4, 4), start=(0.0, 0.0)) -> FitResult:
    """Fit cell averages of ``fn(x, y)`` by a quadratic in (xbar, ybar).

    ``secular_residual`` is the largest change of the remainder from one cell
    to its neighbour, relative to ``max |fn|``; it vanishes exactly when
    ``fn`` is quadratic up to a periodic correction.
    """
    return _fit(CellGrid(surf, tuple(cells), tuple(start)), fn, 6)


def linear_fit(surf, fn: Callable, cells=(3, 3), start=(0.0, 0.0)) -> FitResult:
    """As :func:`quadratic_fit` with the monomials 1, xbar, ybar only."""
    return _fit(CellGrid(surf, tuple(cells), tuple(start)), fn, 3)


def periodicity_defects(surf, fn: Callable, cells=(4, 4), start=(0.0, 0.0)) -> np.ndarray:
    return quadratic_fit(surf, fn, cells, start).defects


def secular_free_weights(surf, fields: Sequence, cells=(4, 4), rtol: float = 1e-8):
    """Unit weight vector making ``d . N`` of the combination secular-free.

    Solves the homogeneous least-squares problem on the stacked periodicity
    defects.  A near-null space of dimension other than one is reported
    rather than resolved.
    """
    grid = CellGrid(surf, tuple(cells))
    cols = []
    for fld in fields:
        fn = (lambda f: lambda x, y: f.normal_component(surf, x, y))(fld)
        values = fn(grid.X, grid.Y)
        sol, *_ = np.linalg.lstsq(grid.design, grid.average(values).ravel(), rcond=None)
        scale = np.max(np.abs(values)) or 1.0
        cols.append(_defects(grid, fn, sol) / scale)
    M = np.stack(cols, axis=1)
    _, sv, vt = np.linalg.svd(M, full_matrices=False)
    null = np.sum(sv <= rtol * sv[0]) if sv[0] > 0 else len(sv)
    if null == 0:
        raise _secular_error(f"no secular-free combination (singular values {sv})")
    if null > 1:
        raise _secular_error(f"rank deficient: {null}-dimensional family of secular-free combinations")
    w = vt[-1] / np.linalg.norm(vt[-1])
    # undo the per-field normalisation
    scales = np.array([np.max(np.abs(f.normal_component(surf, grid.X, grid.Y))) or 1.0 for f in fields])
    w = w / scales
    w /= np.max(np.abs(w))
    return tuple(float(v) for v in w)


def _secular_error(msg):
    from .isometries import SecularEliminationError

    return SecularEliminationError(msg)
