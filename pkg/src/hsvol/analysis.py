"""Interpretation of critical angle structures.

At a critical point the edge lengths computed in different tetrahedra agree,
all tetrahedra share one coarse type, and the flipped tetrahedra carry a
normal surface Σ: a triangle for each singly flipped simplex and a
quadrilateral for each doubly flipped one, with corners on the edges of
length iπ.  At Euclidean-type points Σ has vertex angle sums 2π, Gauss–Bonnet
gives its area, and the volume is (π/2)·area(Σ).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .geomlib import EPS_CLASS
from .simplexgeom import (
    EDGES,
    CoarseType,
    SimplexType,
    classify_simplices,
    edge_coshes,
    edge_index,
)
from .volume import QuadratureOptions, total_volume

ANGLE_SUM_TOL = 1e-9
AREA_TOL = 1e-8


class StructureError(ValueError):
    """The data contradicts what holds at a consistent critical point."""


# --------------------------------------------------------------------------
# edge lengths


@dataclass(frozen=True)
class EdgeConsistency:
    residuals: tuple[float, ...]  # per edge orbit: max - min of cosh over its wedges
    length_tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.length_tol

    def failing(self) -> list[int]:
        return [k for k, r in enumerate(self.residuals) if r > self.length_tol]


def wedge_coshes(T, theta, eps: float = EPS_CLASS) -> np.ndarray:
    return edge_coshes(np.asarray(theta, dtype=float).reshape(T.tet_count, 6), eps).ravel()


def check_edge_consistency(T, theta, length_tol: float = 1e-7,
                           eps: float = EPS_CLASS) -> EdgeConsistency:
    c = wedge_coshes(T, theta, eps)
    res = tuple(float(np.ptp(c[list(orbit)])) for orbit in T.edge_orbits)
    return EdgeConsistency(res, length_tol)


# --------------------------------------------------------------------------
# structure


class StructureTag(enum.Enum):
    SPHERICAL_METRIC = "SphericalMetric"
    HYPERBOLIC_METRIC = "HyperbolicMetric"
    HS_STRUCTURE = "HSStructure"
    EUCLIDEAN_TYPE = "EuclideanType"


@dataclass(frozen=True)
class StructureClass:
    tag: StructureTag
    per_simplex_types: tuple[SimplexType, ...]
    flip_present: bool

    @property
    def coarse(self) -> CoarseType:
        return self.per_simplex_types[0].coarse


def classify_structure(T, theta, eps: float = EPS_CLASS) -> StructureClass:
    types = tuple(classify_simplices(np.asarray(theta, dtype=float).reshape(T.tet_count, 6), eps))
    coarse = {t.coarse for t in types}
    if len(coarse) > 1:
        detail = ", ".join(f"tet {k}: {t.tag.value}" for k, t in enumerate(types))
        raise StructureError(f"simplices of different coarse types ({detail})")
    (c,) = coarse
    flips = any(t.is_flipped for t in types)
    if c is CoarseType.SPHERICAL_TYPE:
        tag = StructureTag.SPHERICAL_METRIC
    elif c is CoarseType.HYPERBOLIC_TYPE:
        tag = StructureTag.HS_STRUCTURE if flips else StructureTag.HYPERBOLIC_METRIC
    else:
        tag = StructureTag.EUCLIDEAN_TYPE
    return StructureClass(tag, types, flips)


# --------------------------------------------------------------------------
# flip surface


def flipped_edges(st: SimplexType) -> tuple[int, ...]:
    """Edges of length iπ (or iπ + positive) in cyclic order around the Σ piece."""
    F = st.flipped_vertices
    if len(F) == 1:
        (v,) = F
        return tuple(edge_index(v, w) for w in range(4) if w != v)
    if len(F) == 2:
        a, b = sorted(F)
        c, d = (v for v in range(4) if v not in F)
        return edge_index(a, c), edge_index(b, c), edge_index(b, d), edge_index(a, d)
    return ()


def _side_faces(edges) -> list[tuple[int, tuple[int, int]]]:
    """Faces with exactly two of ``edges``, with the two corner positions they join."""
    out = []
    for l in range(4):
        inside = [k for k, e in enumerate(edges) if l not in EDGES[e]]
        if len(inside) == 2:
            out.append((l, tuple(inside)))
    return out


@dataclass(frozen=True)
class SigmaFace:
    tet: int
    corners: tuple[int, ...]  # wedge indices, cyclic
    angles: tuple[float, ...]

    @property
    def sides(self) -> int:
        return len(self.corners)

    @property
    def area(self) -> float:
        """Gauss–Bonnet area of a spherical polygon with these angles."""
        return sum(self.angles) - math.pi * (self.sides - 2)


@dataclass(frozen=True)
class SigmaEdge:
    side: tuple[int, int]  # (tet, face)
    other: tuple[int, int] | None  # None on the boundary (test mode only)


@dataclass(frozen=True)
class SigmaComponent:
    tets: tuple[int, ...]
    vertices: tuple[int, ...]  # edge orbits of T
    edge_count: int
    boundary_sides: int
    area: float

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - self.edge_count + len(self.tets)


@dataclass(frozen=True)
class FlipSurface:
    faces: tuple[SigmaFace, ...]
    edges: tuple[SigmaEdge, ...]
    vertices: tuple[int, ...]
    components: tuple[SigmaComponent, ...]

    @property
    def euler_characteristic(self) -> int:
        return sum(c.euler_characteristic for c in self.components)

    @property
    def area(self) -> float:
        return sum(c.area for c in self.components)

    def summary(self) -> dict:
        return {
            "faces": len(self.faces),
            "triangles": sum(f.sides == 3 for f in self.faces),
            "quadrilaterals": sum(f.sides == 4 for f in self.faces),
            "components": [
                {"tets": list(c.tets), "V": len(c.vertices), "E": c.edge_count, "F": len(c.tets),
                 "chi": c.euler_characteristic, "area": c.area, "boundary_sides": c.boundary_sides}
                for c in self.components
            ],
        }


def extract_flip_surface(T, theta, eps: float = EPS_CLASS,
                         structure: StructureClass | None = None) -> FlipSurface:
    theta = np.asarray(theta, dtype=float)
    structure = structure or classify_structure(T, theta, eps)
    pairing = T.spec.pairing()
    pieces = {t: flipped_edges(st) for t, st in enumerate(structure.per_simplex_types) if st.is_flipped}

    faces = []
    for t, es in pieces.items():
        wedges = tuple(6 * t + e for e in es)
        faces.append(SigmaFace(t, wedges, tuple(float(theta[w]) for w in wedges)))

    tets = DisjointSet(pieces)
    edges = []
    seen = set()
    for t, es in pieces.items():
        for l, (i, j) in _side_faces(es):
            if (t, l) in seen:
                continue
            seen.add((t, l))
            g = pairing.get((t, l))
            if g is None:
                if not T.allow_boundary:
                    raise StructureError(f"face {l} of tet {t} is unglued")
                edges.append(SigmaEdge((t, l), None))
                continue
            u, m = g.to_tet, g.to_face
            if u not in pieces:
                raise StructureError(
                    f"face {l} of tet {t} has two iπ edges but tet {u} across it is not flipped")
            mine = {tuple(sorted((g.perm[a], g.perm[b]))) for a, b in (EDGES[es[i]], EDGES[es[j]])}
            theirs = {EDGES[e] for e in pieces[u] if m not in EDGES[e]}
            if mine != theirs:
                raise StructureError(
                    f"iπ edges of tet {t} face {l} do not match those of tet {u} face {m}")
            seen.add((u, m))
            edges.append(SigmaEdge((t, l), (u, m)))
            tets.merge(t, u)

    def orbit(w):
        return T.edge_of_wedge[w]

    vertices = sorted({orbit(w) for f in faces for w in f.corners})
    by_tet = {f.tet: f for f in faces}
    components = []
    for group in sorted((sorted(s) for s in tets.subsets()), key=lambda s: s[0]):
        members = set(group)
        comp_edges = [e for e in edges if e.side[0] in members]
        components.append(SigmaComponent(
            tuple(group),
            tuple(sorted({orbit(w) for t in group for w in by_tet[t].corners})),
            len(comp_edges),
            sum(e.other is None for e in comp_edges),
            sum(by_tet[t].area for t in group),
        ))
    return FlipSurface(tuple(faces), tuple(edges), tuple(vertices), tuple(components))


# --------------------------------------------------------------------------
# Euclidean-type claims


@dataclass(frozen=True)
class ClaimReport:
    vertex_angle_sums: dict[int, float]  # closed Σ-vertices only
    open_vertices: tuple[int, ...]
    component_chi: tuple[int, ...]
    component_area: tuple[float, ...]
    volume: float
    area: float
    checks: dict[str, bool]

    @property
    def volume_over_2pi2(self) -> float:
        return self.volume / (2 * math.pi ** 2)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "vertex_angle_sums": {str(k): v for k, v in self.vertex_angle_sums.items()},
            "open_vertices": list(self.open_vertices),
            "component_chi": list(self.component_chi),
            "component_area": list(self.component_area),
            "area": self.area,
            "volume": self.volume,
            "volume_over_2pi2": self.volume_over_2pi2,
            "volume_over_pi2": self.volume / math.pi ** 2,
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def _near_integer(x: float, tol: float) -> bool:
    return x > -tol and abs(x - round(x)) <= tol


def verify_euclidean_claims(T, theta, surface: FlipSurface, volume: float | None = None,
                            q: QuadratureOptions = QuadratureOptions(),
                            eps: float = EPS_CLASS) -> ClaimReport:
    """Check angle sums, Gauss–Bonnet areas, χ and volume quantization.

    ``checks`` holds one flag per claim:

    * ``vertex_sums``: Σ-vertex angle sums equal 2π (closed vertices);
    * ``gauss_bonnet``: each component's area is 2πχ;
    * ``chi_range``: each component has χ ∈ {1, 2};
    * ``volume_area``: V = (π/2)·area(Σ);
    * ``quantized_2pi2``: V/(2π²) is a non-negative integer;
    * ``quantized_pi2``: V/π² is a non-negative integer (always implied by the
      first four; projective-plane components contribute odd multiples of π²).
    """
    theta = np.asarray(theta, dtype=float)
    if volume is None:
        volume = total_volume(T, theta, q, eps)
    corner_wedges = {w for f in surface.faces for w in f.corners}
    sums, open_vertices = {}, []
    for k in surface.vertices:
        orbit = T.edge_orbits[k]
        if not T.closed_orbits[k]:
            open_vertices.append(k)
            continue
        missing = set(orbit) - corner_wedges
        if missing:
            raise StructureError(f"edge orbit {k} mixes iπ wedges with others: {sorted(missing)}")
        sums[k] = float(sum(theta[w] for w in orbit))
    chi = tuple(c.euler_characteristic for c in surface.components)
    areas = tuple(c.area for c in surface.components)
    area = float(sum(areas))
    scale = 1.0 + abs(volume)
    checks = {k: bool(v) for k, v in {
        "vertex_sums": all(abs(s - 2 * math.pi) <= ANGLE_SUM_TOL for s in sums.values()),
        "gauss_bonnet": all(abs(a - 2 * math.pi * x) <= AREA_TOL for a, x in zip(areas, chi)),
        "chi_range": all(x in (1, 2) for x in chi),
        "volume_area": abs(volume - 0.5 * math.pi * area) <= AREA_TOL * scale,
        "quantized_2pi2": _near_integer(volume / (2 * math.pi ** 2), AREA_TOL),
        "quantized_pi2": _near_integer(volume / math.pi ** 2, AREA_TOL),
    }.items()}
    return ClaimReport(sums, tuple(open_vertices), chi, areas, float(volume), area, checks)
