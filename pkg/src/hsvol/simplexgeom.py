"""Angle systems on a single tetrahedron.

Vertices are labelled 0..3.  The six dihedral angles are stored in the fixed
edge order :data:`EDGES`; ``angles[..., e]`` is the angle at edge ``EDGES[e]``.
Face ``l`` is the triangle opposite vertex ``l``.
"""
from __future__ import annotations

import enum
import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .geomlib import (
    EPS_CLASS,
    GeneralizedLength,
    TriangleTag,
    classify_triangles,
    triangle_coshes,
)

EDGES: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX: dict[frozenset, int] = {frozenset(e): k for k, e in enumerate(EDGES)}

#: faces as sorted vertex triples; ``FACES[l]`` omits vertex ``l``
FACES: tuple[tuple[int, int, int], ...] = tuple(
    tuple(v for v in range(4) if v != l) for l in range(4)
)

#: relative tolerance on the two per-face cosh values of one edge
WELL_DEFINED_TOL = 1e-9
#: slack when cross-checking edge length families against the simplex type
FAMILY_TOL = 1e-6


def edge_index(i: int, j: int) -> int:
    return EDGE_INDEX[frozenset((i, j))]


def vertex_edges(i: int) -> tuple[int, int, int]:
    return tuple(edge_index(i, j) for j in range(4) if j != i)


def opposite_edge(e: int) -> int:
    i, j = EDGES[e]
    k, l = (v for v in range(4) if v not in (i, j))
    return edge_index(k, l)


def face_edges(l: int) -> tuple[int, int, int]:
    p, q, r = FACES[l]
    return edge_index(p, q), edge_index(p, r), edge_index(q, r)


class AngleSystemError(ValueError):
    """Raised with the full list of violated angle-system conditions."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid angle system: {lines}")


class InternalConsistencyError(RuntimeError):
    """Numerical results contradict an identity that holds exactly."""


@dataclass(frozen=True)
class Violation:
    kind: str  # "range", "vertex_sum" or "triangle_inequality"
    vertex: int | None
    detail: str
    residual: float

    def __str__(self):
        where = "" if self.vertex is None else f" at vertex {self.vertex}"
        return f"{self.kind}{where}: {self.detail} (residual {self.residual:.3g})"


@dataclass(frozen=True)
class AngleSystem:
    angles: tuple[float, ...]

    def __getitem__(self, edge) -> float:
        if isinstance(edge, int):
            return self.angles[edge]
        return self.angles[edge_index(*edge)]

    def as_array(self) -> np.ndarray:
        return np.array(self.angles)

    def as_dict(self) -> dict[tuple[int, int], float]:
        return dict(zip(EDGES, self.angles))


def _as_six(values) -> np.ndarray:
    if isinstance(values, AngleSystem):
        return values.as_array()
    if isinstance(values, Mapping):
        out = np.full(6, np.nan)
        for key, v in values.items():
            out[edge_index(*key)] = v
        if np.isnan(out).any():
            raise ValueError("mapping must give all six edges")
        return out
    out = np.asarray(values, dtype=float)
    if out.shape != (6,):
        raise ValueError(f"expected six angles, got shape {out.shape}")
    return out


def angle_system_violations(values) -> list[Violation]:
    a = _as_six(values)
    out = []
    for e, x in enumerate(a):
        if not (0.0 < x < math.pi):
            out.append(Violation("range", None, f"edge {EDGES[e]} angle {x!r} not in (0, pi)",
                                 min(x, math.pi - x)))
    for i in range(4):
        es = vertex_edges(i)
        s = sum(a[e] for e in es)
        if not s > math.pi:
            out.append(Violation("vertex_sum", i, "sum of the three angles must exceed pi",
                                 s - math.pi))
        for e in es:
            others = [f for f in es if f != e]
            r = a[e] + math.pi - a[others[0]] - a[others[1]]
            if not r > 0.0:
                out.append(Violation(
                    "triangle_inequality", i,
                    f"angles at {EDGES[others[0]]}+{EDGES[others[1]]} must be < angle at {EDGES[e]} + pi",
                    r,
                ))
    return out


def validate_angle_system(values) -> AngleSystem:
    """Return an :class:`AngleSystem` or raise :class:`AngleSystemError`.

    ``values`` is a sequence of six angles in :data:`EDGES` order or a mapping
    from vertex pairs to angles.
    """
    a = _as_six(values)
    bad = angle_system_violations(a)
    if bad:
        raise AngleSystemError(bad)
    return AngleSystem(tuple(float(x) for x in a))


def valid_mask(angles) -> np.ndarray:
    """Vectorised validity test over ``(..., 6)`` arrays."""
    a = np.asarray(angles, dtype=float)
    ok = np.all((a > 0.0) & (a < np.pi), axis=-1)
    for i in range(4):
        x = a[..., list(vertex_edges(i))]
        s = x.sum(axis=-1)
        ok &= s > np.pi
        ok &= np.all(2.0 * x + np.pi - s[..., None] > 0.0, axis=-1)
    return ok


# --------------------------------------------------------------------------
# face angles and edge lengths


def face_angle_array(angles, eps: float = EPS_CLASS) -> np.ndarray:
    """Face angles ``B[..., i, l]`` = angle at vertex ``i`` of the face omitting ``l``.

    The diagonal is NaN.  Uses half-angle forms of the spherical law of
    cosines on the vertex links so that angles near 0 or π stay accurate.
    """
    a = np.asarray(angles, dtype=float)
    shape = a.shape[:-1]
    out = np.full(shape + (4, 4), np.nan)
    sin = np.sin(a)
    for i in range(4):
        vsum = sum(a[..., edge_index(i, m)] for m in range(4) if m != i)
        for l in range(4):
            if l == i:
                continue
            j, k = (m for m in range(4) if m not in (i, l))
            aij, aik, ail = (a[..., edge_index(i, m)] for m in (j, k, l))
            den = sin[..., edge_index(i, j)] * sin[..., edge_index(i, k)]
            one_minus = -2.0 * np.cos(0.5 * vsum) * np.cos(0.5 * (aij + aik - ail)) / den
            one_plus = 2.0 * np.cos(0.5 * (ail + aij - aik)) * np.cos(0.5 * (ail - aij + aik)) / den
            if np.any(one_minus < -eps) or np.any(one_plus < -eps):
                raise InternalConsistencyError(
                    f"face angle at vertex {i} of face {FACES[l]} has cosine outside [-1, 1]; "
                    "the vertex link is not a spherical triangle"
                )
            out[..., i, l] = 2.0 * np.arctan2(
                np.sqrt(np.clip(one_minus, 0.0, None)), np.sqrt(np.clip(one_plus, 0.0, None))
            )
    return out


def face_triangle_angles(B: np.ndarray) -> np.ndarray:
    """``(..., 4, 3)``: angles of each face triangle at its sorted vertices."""
    out = np.empty(B.shape[:-2] + (4, 3))
    for l, verts in enumerate(FACES):
        for pos, v in enumerate(verts):
            out[..., l, pos] = B[..., v, l]
    return out


def _gather_edges(c: np.ndarray) -> np.ndarray:
    """Rearrange per-face coshes ``(..., 4, 3)`` into per-edge pairs ``(..., 6, 2)``."""
    out = np.empty(c.shape[:-2] + (6, 2))
    for e, (i, j) in enumerate(EDGES):
        k, l = (v for v in range(4) if v not in (i, j))
        for slot, omit in enumerate((k, l)):
            verts = FACES[omit]
            apex = next(v for v in verts if v not in (i, j))
            out[..., e, slot] = c[..., omit, verts.index(apex)]
    return out


def edge_cosh_pairs(angles, eps: float = EPS_CLASS) -> np.ndarray:
    """``(..., 6, 2)`` cosh of each edge length computed in its two faces.

    Slot 0 is the face omitting the smaller of the two other labels.
    """
    B = face_angle_array(angles, eps)
    return _gather_edges(triangle_coshes(face_triangle_angles(B)))


def edge_coshes(angles, eps: float = EPS_CLASS) -> np.ndarray:
    return edge_cosh_pairs(angles, eps)[..., 0]


def two_face_discrepancy(pairs: np.ndarray) -> np.ndarray:
    """Relative disagreement of the two per-face cosh values of each edge."""
    c1, c2 = pairs[..., 0], pairs[..., 1]
    return np.abs(c1 - c2) / np.maximum(1.0, np.abs(c1))


@dataclass(frozen=True)
class FaceAngles:
    beta: dict[tuple[int, tuple[int, int]], float]

    def __getitem__(self, key):
        return self.beta[key]


def face_angles(a: AngleSystem, eps: float = EPS_CLASS) -> FaceAngles:
    """The twelve face angles, keyed by ``(apex i, (j, k))`` with ``j < k``."""
    B = face_angle_array(a.as_array(), eps)
    beta = {}
    for i in range(4):
        for l in range(4):
            if l != i:
                j, k = (m for m in range(4) if m not in (i, l))
                beta[(i, (j, k))] = float(B[i, l])
    return FaceAngles(beta)


@dataclass(frozen=True)
class EdgeLengths:
    lengths: dict[tuple[int, int], GeneralizedLength]
    discrepancy: dict[tuple[int, int], float] = field(compare=False)

    def __getitem__(self, key):
        return self.lengths[tuple(sorted(key))]

    def coshes(self) -> np.ndarray:
        return np.array([self.lengths[e].cosh_value for e in EDGES])


def edge_lengths(a: AngleSystem, eps: float = EPS_CLASS) -> EdgeLengths:
    pairs = edge_cosh_pairs(a.as_array(), eps)
    disc = two_face_discrepancy(pairs)
    if np.any(disc > WELL_DEFINED_TOL):
        e = int(np.argmax(disc))
        raise InternalConsistencyError(
            f"edge {EDGES[e]}: face lengths disagree (cosh {pairs[e, 0]!r} vs {pairs[e, 1]!r})"
        )
    return EdgeLengths(
        {e: GeneralizedLength(float(pairs[k, 0])) for k, e in enumerate(EDGES)},
        {e: float(disc[k]) for k, e in enumerate(EDGES)},
    )


# --------------------------------------------------------------------------
# classification


class CoarseType(enum.Enum):
    SPHERICAL_TYPE = "SphericalType"
    HYPERBOLIC_TYPE = "HyperbolicType"
    EUCLIDEAN_TYPE = "EuclideanType"


class SimplexTag(enum.Enum):
    SPHERICAL = "Spherical"
    HYPERBOLIC = "Hyperbolic"
    FLIPPED_HYPERBOLIC = "FlippedHyperbolic"
    DOUBLY_FLIPPED_HYPERBOLIC = "DoublyFlippedHyperbolic"
    EUCLIDEAN = "Euclidean"
    FLIPPED_EUCLIDEAN = "FlippedEuclidean"
    DOUBLY_FLIPPED_EUCLIDEAN = "DoublyFlippedEuclidean"

    @property
    def coarse(self) -> CoarseType:
        return _COARSE[self]

    @property
    def flip_count(self) -> int:
        return _FLIPS[self]


_COARSE = {
    SimplexTag.SPHERICAL: CoarseType.SPHERICAL_TYPE,
    SimplexTag.HYPERBOLIC: CoarseType.HYPERBOLIC_TYPE,
    SimplexTag.FLIPPED_HYPERBOLIC: CoarseType.HYPERBOLIC_TYPE,
    SimplexTag.DOUBLY_FLIPPED_HYPERBOLIC: CoarseType.HYPERBOLIC_TYPE,
    SimplexTag.EUCLIDEAN: CoarseType.EUCLIDEAN_TYPE,
    SimplexTag.FLIPPED_EUCLIDEAN: CoarseType.EUCLIDEAN_TYPE,
    SimplexTag.DOUBLY_FLIPPED_EUCLIDEAN: CoarseType.EUCLIDEAN_TYPE,
}
_FLIPS = {
    SimplexTag.SPHERICAL: 0,
    SimplexTag.HYPERBOLIC: 0,
    SimplexTag.FLIPPED_HYPERBOLIC: 1,
    SimplexTag.DOUBLY_FLIPPED_HYPERBOLIC: 2,
    SimplexTag.EUCLIDEAN: 0,
    SimplexTag.FLIPPED_EUCLIDEAN: 1,
    SimplexTag.DOUBLY_FLIPPED_EUCLIDEAN: 2,
}
_BY_COARSE_AND_FLIPS = {(t.coarse, t.flip_count): t for t in SimplexTag if t is not SimplexTag.SPHERICAL}


@dataclass(frozen=True)
class SimplexType:
    tag: SimplexTag
    flipped_vertices: frozenset = frozenset()

    def __post_init__(self):
        if len(self.flipped_vertices) != self.tag.flip_count:
            raise ValueError(f"{self.tag.value} needs {self.tag.flip_count} flipped vertices")

    @property
    def coarse(self) -> CoarseType:
        return self.tag.coarse

    @property
    def is_flipped(self) -> bool:
        return self.tag.flip_count > 0


def _face_type(tags, apex, l):
    t = TriangleTag(int(tags[l]))
    p = int(apex[l])
    return t, (None if p < 0 else FACES[l][p])


def _tag_from_faces(tags, apex) -> SimplexTag:
    """Case analysis on face (0,1,2) and then one neighbouring face."""
    T = TriangleTag
    first, p = _face_type(tags, apex, 3)
    if first is T.SPHERICAL:
        return SimplexTag.SPHERICAL
    if first is T.HYPERBOLIC:
        second, _ = _face_type(tags, apex, 0)
        outcome = {T.HYPERBOLIC: SimplexTag.HYPERBOLIC, T.FLIPPED_HYPERBOLIC: SimplexTag.FLIPPED_HYPERBOLIC}
    elif first is T.EUCLIDEAN:
        second, _ = _face_type(tags, apex, 2)
        outcome = {T.EUCLIDEAN: SimplexTag.EUCLIDEAN, T.FLIPPED_EUCLIDEAN: SimplexTag.FLIPPED_EUCLIDEAN}
    else:
        # flipped face: the edge opposite its apex is the unflipped one; look at
        # the face through that edge and vertex 3
        second, _ = _face_type(tags, apex, p)
        if first is T.FLIPPED_HYPERBOLIC:
            outcome = {T.HYPERBOLIC: SimplexTag.FLIPPED_HYPERBOLIC,
                       T.FLIPPED_HYPERBOLIC: SimplexTag.DOUBLY_FLIPPED_HYPERBOLIC}
        else:
            outcome = {T.EUCLIDEAN: SimplexTag.FLIPPED_EUCLIDEAN,
                       T.FLIPPED_EUCLIDEAN: SimplexTag.DOUBLY_FLIPPED_EUCLIDEAN}
    if second not in outcome:
        raise InternalConsistencyError(
            f"face types {first.label} then {second.label} match no simplex type"
        )
    return outcome[second]


def _flipped_from_coshes(tag: SimplexTag, c) -> frozenset:
    if tag.flip_count == 0:
        if tag.coarse is not CoarseType.SPHERICAL_TYPE and np.any(c < 0.0):
            raise InternalConsistencyError(f"{tag.value} simplex with a flipped edge: cosh {c}")
        return frozenset()
    flipped = {e for e in range(6) if c[e] < 0.0}
    if tag.flip_count == 1:
        for v in range(4):
            if flipped == set(vertex_edges(v)):
                return frozenset({v})
    else:
        for e in (0, 1, 2):  # pairs containing vertex 0
            if flipped == set(range(6)) - {e, opposite_edge(e)}:
                return frozenset(EDGES[e])
    raise InternalConsistencyError(
        f"edge pattern {sorted(EDGES[e] for e in flipped)} does not fit {tag.value}"
    )


def _check_families(tag: SimplexTag, c) -> None:
    ac = np.abs(c)
    coarse = tag.coarse
    if coarse is CoarseType.SPHERICAL_TYPE:
        bad = ac >= 1.0 + FAMILY_TOL
    elif coarse is CoarseType.HYPERBOLIC_TYPE:
        bad = ac <= 1.0 - FAMILY_TOL
    else:
        bad = np.abs(ac - 1.0) > FAMILY_TOL * np.maximum(1.0, ac)
    if np.any(bad):
        e = int(np.argmax(bad))
        raise InternalConsistencyError(
            f"edge {EDGES[e]} has cosh {c[e]!r}, outside the {coarse.value} family"
        )


def _classify_one(tags, apex, c) -> SimplexType:
    tag = _tag_from_faces(tags, apex)
    _check_families(tag, c)
    return SimplexType(tag, _flipped_from_coshes(tag, c))


def classify_simplices(angles, eps: float = EPS_CLASS) -> list[SimplexType]:
    """Classify a batch ``(n, 6)`` of valid angle systems."""
    a = np.atleast_2d(np.asarray(angles, dtype=float))
    tri = face_triangle_angles(face_angle_array(a, eps))
    tags, apex = classify_triangles(tri, eps)
    # Euclidean type needs all four faces inside the band.  Near the locus
    # the face residuals differ in size, so a row can be split; those rows
    # are decided by the signs of the residuals instead.
    euclid = (tags == TriangleTag.EUCLIDEAN) | (tags == TriangleTag.FLIPPED_EUCLIDEAN)
    split = euclid.any(axis=-1) & ~euclid.all(axis=-1)
    if split.any():
        tags[split], apex[split] = classify_triangles(tri[split], 0.0)
    ec = _gather_edges(triangle_coshes(tri))[..., 0]
    return [_classify_one(tags[n], apex[n], ec[n]) for n in range(a.shape[0])]


def classify_simplex(a: AngleSystem, eps: float = EPS_CLASS) -> SimplexType:
    return classify_simplices(a.as_array()[None, :], eps)[0]


# --------------------------------------------------------------------------
# flips


def flip_array(angles, vertices) -> np.ndarray:
    """Flip at each vertex in ``vertices`` in turn (order does not matter)."""
    a = np.array(angles, dtype=float, copy=True)
    for v in vertices:
        for e, (i, j) in enumerate(EDGES):
            if v not in (i, j):
                a[..., e] = np.pi - a[..., e]
    return a


def flip(a: AngleSystem, i: int) -> AngleSystem:
    return validate_angle_system(flip_array(a.as_array(), (i,)))


def gram_determinant(angles) -> np.ndarray:
    """Determinant of the face Gram matrix ``G[k, l] = -cos(angle at edge ⟂ {k, l})``.

    Positive on spherical-type, zero on Euclidean-type and negative on
    hyperbolic-type angle systems.  Flips conjugate ``G`` by a sign matrix.
    """
    a = np.asarray(angles, dtype=float)
    G = np.zeros(a.shape[:-1] + (4, 4))
    for k, l in itertools.combinations(range(4), 2):
        e = edge_index(*(v for v in range(4) if v not in (k, l)))
        G[..., k, l] = G[..., l, k] = -np.cos(a[..., e])
    for k in range(4):
        G[..., k, k] = 1.0
    return np.linalg.det(G)


def regular_angles(x: float) -> np.ndarray:
    return np.full(6, float(x))


def as_angle_array(a) -> np.ndarray:
    if isinstance(a, AngleSystem):
        return a.as_array()
    if isinstance(a, Sequence) or isinstance(a, np.ndarray):
        return np.asarray(a, dtype=float)
    return _as_six(a)
