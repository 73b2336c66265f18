"""Crease-aligned quad meshes of translation surfaces and their OBJ/VTK output."""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .surface import TranslationSurface

__all__ = ["QuadMesh", "sample_mesh", "deflect", "write_mesh", "read_obj", "quad_planarity",
           "grid_lines", "default_resolution", "FORMATS"]

FORMATS = ("obj", "vtk")


@dataclass(frozen=True, eq=False)
class QuadMesh:
    """Structured quad mesh over a parameter grid ``xs x ys``.

    ``quads`` index ``vertices`` (0-based, counter-clockwise in parameter
    space).  ``crease_x[i]`` flags the grid line ``x = xs[i]``, likewise
    ``crease_y``.
    """

    vertices: np.ndarray
    quads: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    crease_x: np.ndarray
    crease_y: np.ndarray
    eps: float = 0.0

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)

    @property
    def quad_crease_edges(self) -> np.ndarray:
        """Number of crease edges bounding each quad (cell scalar)."""
        cx = self.crease_x.astype(int)
        cy = self.crease_y.astype(int)
        per_x = cx[:-1] + cx[1:]
        per_y = cy[:-1] + cy[1:]
        return (per_x[:, None] + per_y[None, :]).ravel()


def grid_lines(surf: TranslationSurface, axis: int, res: int, lo: float, hi: float):
    """Sample parameters along one axis: every break, panels split evenly."""
    prof = surf.alpha if axis == 0 else surf.beta
    fn = surf.a1 if axis == 0 else surf.b1
    period = prof.period or (hi - lo)
    br = np.asarray(fn.breaks)
    inner = br[(br > lo) & (br < hi)]
    knots = np.unique(np.concatenate(([lo], inner, [hi])))
    per_period = max(1, len(prof.crease_points)) if prof.period else max(1, len(knots) - 1)
    if res < per_period:
        raise ValueError(f"resolution too low: {res} quads per period cannot resolve "
                         f"{per_period} panels per period")
    pts = []
    for a, b in zip(knots[:-1], knots[1:]):
        k = max(1, int(round(res * (b - a) / period)))
        pts.extend(a + (b - a) * np.arange(k) / k)
    pts = np.array(pts + [hi])
    return pts, np.asarray(prof.is_crease(pts), dtype=bool)


def default_resolution(surf: TranslationSurface) -> int:
    """Quads per period: 8 when every profile is piecewise linear, 64 otherwise."""
    smooth = {"sinusoid", "closed-smooth"}
    return 64 if {surf.alpha.kind, surf.beta.kind} & smooth else 8


def sample_mesh(surf: TranslationSurface, res: int = 8, periods=None, start=None) -> QuadMesh:
    """Quad mesh with grid lines on every crease.

    ``res`` is the number of quads per period along each axis; ``periods`` and
    ``start`` default to the surface domain.
    """
    (x0, x1), (y0, y1) = surf.domain
    if start is not None:
        x0, y0 = map(float, start)
    if periods is not None:
        Px, Py = surf.periods_xy
        if Px is None or Py is None:
            raise ValueError("periods given for a non-periodic surface")
        x1, y1 = x0 + periods[0] * Px, y0 + periods[1] * Py
    xs, fx = grid_lines(surf, 0, res, x0, x1)
    ys, fy = grid_lines(surf, 1, res, y0, y1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    V = surf.position(X, Y).reshape(-1, 3)
    nx, ny = len(xs), len(ys)
    idx = np.arange(nx * ny).reshape(nx, ny)
    quads = np.stack([idx[:-1, :-1], idx[1:, :-1], idx[1:, 1:], idx[:-1, 1:]], -1).reshape(-1, 4)
    return QuadMesh(V, quads, xs, ys, fx, fy)


def _bbox_diagonal(V: np.ndarray) -> float:
    return float(np.linalg.norm(V.max(axis=0) - V.min(axis=0)))


def deflect(mesh: QuadMesh, surf: TranslationSurface, field, eps: float | None = None) -> QuadMesh:
    """Move vertices to ``r + eps d``.

    Without ``eps`` the amplitude is chosen so the largest displacement is a
    tenth of the bounding-box diagonal.
    """
    X, Y = np.meshgrid(mesh.xs, mesh.ys, indexing="ij")
    D = field.canonical(surf, X, Y).reshape(-1, 3)
    if eps is None:
        dmax = float(np.linalg.norm(D, axis=1).max())
        eps = 0.1 * _bbox_diagonal(mesh.vertices) / dmax if dmax > 0 else 0.0
    return replace(mesh, vertices=mesh.vertices + eps * D, eps=float(eps))


def quad_planarity(mesh: QuadMesh) -> float:
    """Largest distance of a quad's fourth corner from the plane of the other three."""
    P = mesh.vertices[mesh.quads]
    n = np.cross(P[:, 1] - P[:, 0], P[:, 3] - P[:, 0])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    return float(np.abs(np.sum((P[:, 2] - P[:, 0]) * n, axis=1)).max())


def _obj_text(mesh: QuadMesh) -> str:
    lines = [f"# quad mesh {mesh.shape[0]}x{mesh.shape[1]} eps={mesh.eps!r}"]
    lines += ["v %.17g %.17g %.17g" % tuple(v) for v in mesh.vertices]
    lines += ["f %d %d %d %d" % tuple(q + 1) for q in mesh.quads]
    return "\n".join(lines) + "\n"


def _vtk_text(mesh: QuadMesh) -> str:
    n, m = len(mesh.vertices), len(mesh.quads)
    out = ["# vtk DataFile Version 3.0", f"translation surface eps={mesh.eps!r}", "ASCII",
           "DATASET UNSTRUCTURED_GRID", f"POINTS {n} double"]
    out += ["%.17g %.17g %.17g" % tuple(v) for v in mesh.vertices]
    out.append(f"CELLS {m} {5 * m}")
    out += ["4 %d %d %d %d" % tuple(q) for q in mesh.quads]
    out.append(f"CELL_TYPES {m}")
    out += ["9"] * m
    out += [f"CELL_DATA {m}", "SCALARS crease int 1", "LOOKUP_TABLE default"]
    out += [str(v) for v in mesh.quad_crease_edges]
    return "\n".join(out) + "\n"


def atomic_write_text(path, text: str) -> Path:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_mesh(mesh: QuadMesh, path, fmt: str | None = None) -> Path:
    """Write ``mesh`` as OBJ or legacy ASCII VTK (format taken from the suffix by default)."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "obj").lower()
    if fmt in ("vtk-ascii",):
        fmt = "vtk"
    if fmt not in FORMATS:
        raise ValueError(f"unknown mesh format {fmt!r}; choose obj or vtk")
    return atomic_write_text(path, _obj_text(mesh) if fmt == "obj" else _vtk_text(mesh))


def read_obj(path):
    """``(vertices, faces)`` from an OBJ file; faces are 0-based."""
    V, F = [], []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            tok = line.split()
            if not tok:
                continue
            if tok[0] == "v":
                V.append([float(t) for t in tok[1:4]])
            elif tok[0] == "f":
                F.append([int(t.split("/")[0]) - 1 for t in tok[1:]])
    return np.array(V).reshape(-1, 3), np.array(F, dtype=int)

