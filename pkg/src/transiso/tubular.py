"""Tubular surfaces of translation and displacement jumps across their seam.

A tube sweeps a closed cross-section (the y profile, wrapping once over its
perimeter) along a path (the x profile).  A displacement field is single
valued on the tube only if ``d(x, y0 + perimeter) = d(x, y0)``; the
difference is the seam jump.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .isometries import mode_field
from .profiles import ProfileCurve
from .surface import TranslationSurface

__all__ = ["make_tube", "seam_jump", "SeamReport", "ModeJump", "tube_preset", "TUBES",
           "SQUARE", "SKEW_QUAD", "rigid_fit", "seam_report", "closure_defect"]

# square cross-section, edges at 45 degrees so no tangent is vertical
SQUARE = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))
# quadrilateral without centre of symmetry, no vertical edge
SKEW_QUAD = ((1.0, 0.0), (0.2, 0.9), (-0.9, 0.3), (-0.3, -0.8))

TUBES = ("square-zigzag", "square-sinusoid", "skew-sinusoid", "open-square-zigzag")


def make_tube(cross_section: ProfileCurve, path: ProfileCurve, theta: float = 0.0,
              path_periods: int = 4, name: str = "tube") -> TranslationSurface:
    """Tube swept by ``cross_section`` along ``path``; y covers one wrap.

    Open cross-sections are accepted (there is then no seam).
    """
    if cross_section.is_closed:
        y_dom = (0.0, cross_section.period)
    elif cross_section.kind == "open-polygon":
        y_dom = cross_section.support
    else:
        raise ValueError("cross-section must be a closed curve or an open polygon")
    if path.period is None:
        raise ValueError("the tube path must be periodic")
    dom = ((0.0, path_periods * path.period), tuple(map(float, y_dom)))
    return TranslationSurface(path, cross_section, theta, domain=dom, name=name)


def tube_preset(name: str, theta: float = 0.0, path_periods: int = 4) -> TranslationSurface:
    """The three tubes of the dislocation study plus an open square for contrast."""
    zig = ProfileCurve.zigzag(1.0, 1.0)
    sine = ProfileCurve.sinusoid(0.5, 2.0)
    square = ProfileCurve.polygon(SQUARE)
    table = {
        "square-zigzag": (square, zig),
        "square-sinusoid": (square, sine),
        "skew-sinusoid": (ProfileCurve.polygon(SKEW_QUAD), sine),
        "open-square-zigzag": (square.cut(), zig),
    }
    if name not in table:
        raise ValueError(f"unknown tube {name!r}; choose from {', '.join(TUBES)}")
    cs, path = table[name]
    return make_tube(cs, path, theta, path_periods, name)


@dataclass
class ModeJump:
    """Seam jump of one mode.

    ``max_jump`` is normalized by ``max |d|`` over the tube; ``max_jump_nonrigid``
    is the same after removing the best-fit infinitesimal rigid motion.
    """

    mode: str
    stations: np.ndarray = field(repr=False)
    jump_samples: np.ndarray = field(repr=False)
    max_jump: float
    max_jump_nonrigid: float
    scale: float
    closed: bool


@dataclass
class SeamReport:
    tube: str
    modes: dict

    def as_dict(self) -> dict:
        out = {}
        for m, j in self.modes.items():
            out[f"{m}.max_jump"] = j.max_jump
            out[f"{m}.max_jump_nonrigid"] = j.max_jump_nonrigid
            out[f"{m}.stations"] = int(j.stations.size)
        return out


def rigid_fit(points: np.ndarray, vectors: np.ndarray):
    """Least-squares infinitesimal rigid motion ``omega x p + t`` for ``vectors``.

    Returns ``(omega, t, residual)`` with the residual vectors.
    """
    P = np.asarray(points, float).reshape(-1, 3)
    J = np.asarray(vectors, float).reshape(-1, 3)
    n = len(P)
    A = np.zeros((3 * n, 6))
    # omega x p = -[p]_x omega
    A[0::3, 1], A[0::3, 2] = P[:, 2], -P[:, 1]
    A[1::3, 0], A[1::3, 2] = -P[:, 2], P[:, 0]
    A[2::3, 0], A[2::3, 1] = P[:, 1], -P[:, 0]
    A[0::3, 3] = A[1::3, 4] = A[2::3, 5] = 1.0
    sol, *_ = np.linalg.lstsq(A, J.ravel(), rcond=None)
    resid = (J.ravel() - A @ sol).reshape(-1, 3)
    return sol[:3], sol[3:], resid


def seam_jump(tube: TranslationSurface, mode, stations: int = 41, wrap_samples: int = 64) -> ModeJump:
    """Jump ``d(x, y0 + perimeter) - d(x, y0)`` along the seam, canonical basis.

    ``mode`` is a mode name or a ready :class:`DisplacementField`.
    """
    if stations < 20:
        raise ValueError("need at least 20 seam stations")
    fld = mode_field(tube, mode) if isinstance(mode, str) else mode
    label = mode if isinstance(mode, str) else fld.mode
    (x0, x1), (y0, y1) = tube.domain
    xs = np.linspace(x0, x1, stations)
    Xg, Yg = np.meshgrid(xs, np.linspace(y0, y1, wrap_samples), indexing="ij")
    scale = float(np.linalg.norm(fld.canonical(tube, Xg, Yg), axis=-1).max())
    closed = tube.beta.is_closed
    if not closed:
        J = np.zeros((stations, 3))
    else:
        J = fld.canonical(tube, xs, np.full_like(xs, y1)) - fld.canonical(tube, xs, np.full_like(xs, y0))
    _, _, resid = rigid_fit(tube.position(xs, np.full_like(xs, y0)), J)
    norm = scale if scale > 0 else 1.0
    raw = float(np.linalg.norm(J, axis=1).max()) / norm
    nonrigid = float(np.linalg.norm(resid, axis=1).max()) / norm
    return ModeJump(label, xs, J, raw, nonrigid, scale, closed)


def seam_report(tube: TranslationSurface, modes=("twist", "stretch", "bend-s", "bend-p", "bend-pbar"),
                stations: int = 41) -> SeamReport:
    return SeamReport(tube.name, {m: seam_jump(tube, m, stations) for m in modes})


def closure_defect(tube: TranslationSurface, stations: int = 41) -> float:
    """``max |r(x, y0 + perimeter) - r(x, y0)|``; zero for a closed tube."""
    (x0, x1), (y0, y1) = tube.domain
    xs = np.linspace(x0, x1, stations)
    return float(np.abs(tube.position(xs, np.full_like(xs, y1)) - tube.position(xs, np.full_like(xs, y0))).max())

