"""Generalized volume of angled simplices.

The Schläfli 1-form on the space of angle systems of one tetrahedron is

    ω = ½ Σ_e (Re l_e + Im l_e) dα_e

and the volume ``V`` is its primitive vanishing on Euclidean simplices.  ``V``
agrees with the usual volume on spherical and hyperbolic simplices, so it is
positive on both (hyperbolic edge lengths are stored as negative reals, and
moving from the Euclidean locus into the hyperbolic region lowers the angles).

Values are obtained by integrating ω along the straight segment from the
regular Euclidean simplex, which lies in every convex set of angle systems
considered here.  Euclidean-type simplices use exact closed forms instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .geomlib import EPS_CLASS, schlafli_weights
from .quadrature import QuadratureError, gauss_kronrod
from .simplexgeom import (
    EDGES,
    AngleSystem,
    SimplexTag,
    classify_simplex,
    edge_coshes,
    edge_lengths,
    gram_determinant,
    opposite_edge,
    vertex_edges,
    edge_index,
)

REGULAR_EUCLIDEAN_ANGLE = math.acos(1.0 / 3.0)

#: grid used to bracket Euclidean-type crossings along a segment
_SCAN_POINTS = 65


class VolumeConvergenceError(QuadratureError):
    pass


class WrongTypeError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureOptions:
    abs_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class SchlafliCovector:
    weights: dict[tuple[int, int], float]

    def __getitem__(self, edge):
        return self.weights[tuple(sorted(edge))]

    def as_array(self) -> np.ndarray:
        return np.array([self.weights[e] for e in EDGES])


def _weights(c, eps: float) -> np.ndarray:
    # lengths of class Zero / IPi (within eps) get their exact weights 0 / π,
    # so Euclidean-type simplices have exact gradients despite rounding
    w = schlafli_weights(c)
    w = np.where(np.abs(c - 1.0) <= eps, 0.0, w)
    return np.where(np.abs(c + 1.0) <= eps, np.pi, w)


def schlafli_weight_array(angles, eps: float = EPS_CLASS) -> np.ndarray:
    """``∂V/∂α_e`` for a batch ``(..., 6)`` of angle systems."""
    return 0.5 * _weights(edge_coshes(angles, eps), eps)


def schlafli_form(a: AngleSystem, eps: float = EPS_CLASS) -> SchlafliCovector:
    c = edge_lengths(a, eps).coshes()
    return SchlafliCovector(dict(zip(EDGES, (0.5 * _weights(c, eps)).tolist())))


def base_euclidean_point() -> AngleSystem:
    return AngleSystem((REGULAR_EUCLIDEAN_ANGLE,) * 6)


# --------------------------------------------------------------------------
# integration of ω along segments


def euclidean_crossings(start, end, points: int = _SCAN_POINTS) -> list[float]:
    """Parameters in (0, 1) where the segment crosses the Euclidean-type locus.

    Edge cosh values pass through ±1 exactly there, which is where the
    integrand has square-root behaviour.
    """
    start = np.asarray(start, dtype=float)
    d = np.asarray(end, dtype=float) - start
    ts = np.linspace(0.0, 1.0, points)
    D = gram_determinant(start[None, :] + ts[:, None] * d[None, :])
    scale = np.max(np.abs(D)) or 1.0
    tiny = 1e-13 * scale
    sign = np.where(np.abs(D) <= tiny, 0, np.sign(D))
    f = lambda t: float(gram_determinant(start + t * d))
    roots = []
    for i in range(points - 1):
        if sign[i] * sign[i + 1] < 0:
            roots.append(brentq(f, ts[i], ts[i + 1], xtol=1e-15, rtol=1e-15))
        elif sign[i + 1] == 0 and 0 < i + 1 < points - 1:
            roots.append(float(ts[i + 1]))
    return roots


def _smoothstep_piece(g, p: float, q: float):
    """Integrand on [0, 1] after ``t = p + (q-p)(3u² - 2u³)``.

    The substitution has vanishing derivative at both ends, which turns the
    ``√|t - t0|`` behaviour at a Euclidean crossing into a smooth function.
    """
    width = q - p

    def h(u):
        t = p + width * u * u * (3.0 - 2.0 * u)
        return g(t) * (6.0 * width) * u * (1.0 - u)

    return h


def integrate_schlafli(start, end, q: QuadratureOptions = QuadratureOptions(),
                       eps: float = EPS_CLASS) -> tuple[float, float]:
    """∫ ω along the straight segment ``start → end``; returns ``(value, error)``."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    d = end - start
    if not np.any(d):
        return 0.0, 0.0

    def g(t):
        pts = start[None, :] + np.asarray(t)[:, None] * d[None, :]
        return schlafli_weight_array(pts, eps) @ d

    cuts = [0.0, *euclidean_crossings(start, end), 1.0]
    pieces = [(p, r) for p, r in zip(cuts[:-1], cuts[1:]) if r > p]
    total = err = 0.0
    for p, r in pieces:
        try:
            res = gauss_kronrod(_smoothstep_piece(g, p, r), 0.0, 1.0,
                                q.abs_tol / len(pieces), q.max_subdivisions)
        except QuadratureError as exc:
            raise VolumeConvergenceError(
                f"volume quadrature did not converge on [{p:.6g}, {r:.6g}]: {exc}",
                exc.estimate, exc.error,
            ) from exc
        total += res.value
        err += res.error
    return total, err


def integrate_schlafli_path(points, q: QuadratureOptions = QuadratureOptions(),
                            eps: float = EPS_CLASS) -> tuple[float, float]:
    """∫ ω along a piecewise-linear path through ``points``."""
    total = err = 0.0
    for a, b in zip(points[:-1], points[1:]):
        v, e = integrate_schlafli(a, b, q, eps)
        total += v
        err += e
    return total, err


# --------------------------------------------------------------------------
# volumes


def volume_flipped_euclidean(a: AngleSystem, eps: float = EPS_CLASS) -> float:
    """Volume of a flipped Euclidean simplex: a lune over its flipped vertex link.

    With ``v`` the flipped vertex, the three edges at ``v`` have length iπ and
    ``V = (π/2)(Σ_{e ∋ v} α_e - π)``.
    """
    st = classify_simplex(a, eps)
    if st.tag is not SimplexTag.FLIPPED_EUCLIDEAN:
        raise WrongTypeError(f"expected a FlippedEuclidean simplex, got {st.tag.value}")
    (v,) = st.flipped_vertices
    return 0.5 * math.pi * (sum(a[e] for e in vertex_edges(v)) - math.pi)


def volume_doubly_flipped_euclidean(a: AngleSystem, eps: float = EPS_CLASS) -> float:
    """``V = (π/2)(sum of the four angles at the iπ edges - 2π)``."""
    st = classify_simplex(a, eps)
    if st.tag is not SimplexTag.DOUBLY_FLIPPED_EUCLIDEAN:
        raise WrongTypeError(f"expected a DoublyFlippedEuclidean simplex, got {st.tag.value}")
    zero = edge_index(*sorted(st.flipped_vertices))
    cross = set(range(6)) - {zero, opposite_edge(zero)}
    return 0.5 * math.pi * (sum(a[e] for e in cross) - 2.0 * math.pi)


def simplex_volume(a: AngleSystem, q: QuadratureOptions = QuadratureOptions(),
                   eps: float = EPS_CLASS) -> float:
    tag = classify_simplex(a, eps).tag
    if tag is SimplexTag.EUCLIDEAN:
        return 0.0
    if tag is SimplexTag.FLIPPED_EUCLIDEAN:
        return volume_flipped_euclidean(a, eps)
    if tag is SimplexTag.DOUBLY_FLIPPED_EUCLIDEAN:
        return volume_doubly_flipped_euclidean(a, eps)
    value, _ = integrate_schlafli(base_euclidean_point().as_array(), a.as_array(), q, eps)
    return value


def total_volume(T, theta, q: QuadratureOptions = QuadratureOptions(),
                 eps: float = EPS_CLASS) -> float:
    """Sum of simplex volumes, accumulated in tetrahedron order."""
    per_tet = np.asarray(theta, dtype=float).reshape(T.tet_count, 6)
    total = 0.0
    for row in per_tet:
        total += simplex_volume(AngleSystem(tuple(row)), q, eps)
    return total


def total_gradient(T, theta, eps: float = EPS_CLASS) -> np.ndarray:
    """Per-wedge partial derivatives of the total volume, in wedge order."""
    per_tet = np.asarray(theta, dtype=float).reshape(T.tet_count, 6)
    return schlafli_weight_array(per_tet, eps).ravel()
