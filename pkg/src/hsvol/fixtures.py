"""Reference triangulations and angle structures.

Besides the boundary of the 4-simplex, these build small complexes whose
angle structures are critical points of Euclidean type.  Angles are taken
from explicit Euclidean tetrahedra (cones from the centre of a polyhedron to
its faces, or disphenoids), so the Euclidean-type conditions hold up to
rounding rather than by construction.
"""
from __future__ import annotations

import itertools
import math
from importlib import resources

import numpy as np
from scipy.optimize import brentq

from .simplexgeom import EDGES, flip_array
from .triangulation import Gluing, GluingSpec, Triangulation, build, make_spec


def fixture_path(name: str):
    """Path of a JSON fixture shipped with the package (``boundary_4simplex.json`` ...)."""
    return resources.files("hsvol") / "data" / name


def dihedral_angles(points) -> np.ndarray:
    """Interior dihedral angles of a Euclidean tetrahedron, in edge order."""
    P = np.asarray(points, dtype=float)
    out = np.empty(6)
    for e, (i, j) in enumerate(EDGES):
        k, l = (v for v in range(4) if v not in (i, j))
        axis = P[j] - P[i]
        axis = axis / np.linalg.norm(axis)
        u = P[k] - P[i]
        v = P[l] - P[i]
        u = u - (u @ axis) * axis
        v = v - (v @ axis) * axis
        out[e] = math.acos(np.clip(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)), -1.0, 1.0))
    return out


# --------------------------------------------------------------------------
# closed triangulations


def boundary_of_4simplex() -> GluingSpec:
    """∂Δ⁴: tetrahedron ``k`` omits vertex ``k`` of {0..4}; local labels sorted."""
    verts = [[g for g in range(5) if g != k] for k in range(5)]
    gluings = []
    for k, g in itertools.combinations(range(5), 2):
        face = verts[k].index(g)
        perm = tuple(verts[g].index(k if G == g else G) for G in verts[k])
        gluings.append(Gluing(k, face, g, verts[g].index(k), perm))
    return make_spec(5, gluings)


def identity_double() -> GluingSpec:
    """Two tetrahedra glued along all four faces by the identity."""
    return make_spec(2, [Gluing(0, f, 1, f, (0, 1, 2, 3)) for f in range(4)])


def single_tetrahedron() -> GluingSpec:
    return make_spec(1, [], allow_boundary=True)


# --------------------------------------------------------------------------
# cones and suspensions over triangulated spheres


TETRAHEDRON_FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
TETRAHEDRON_POINTS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)

OCTAHEDRON_POINTS = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
OCTAHEDRON_FACES = tuple(
    (a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)
)


def _cone_gluings(faces, offset: int):
    """Glue cone tetrahedra (apex label 0, face vertices 1..3) along shared sides."""
    gluings = []
    for t, tri in enumerate(faces):
        for k in (1, 2, 3):
            side = {tri[m - 1] for m in (1, 2, 3) if m != k}
            (u,) = [s for s, other in enumerate(faces) if s != t and side <= set(other)]
            other = faces[u]
            perm = [0] * 4
            for m in (1, 2, 3):
                g = tri[m - 1]
                perm[m] = other.index(g) + 1 if g in other else None
            missing = ({1, 2, 3} - {p for p in perm[1:] if p is not None}).pop()
            perm[k] = missing
            gluings.append(Gluing(offset + t, k, offset + u, missing, tuple(perm)))
    return gluings


def _cone_angles(points, faces) -> np.ndarray:
    centre = points.mean(axis=0)
    return np.array([dihedral_angles([centre, *points[list(f)]]) for f in faces])


def suspension(points, faces):
    """Suspension of a convex triangulated polyhedron's boundary (an S³).

    Returns ``(spec, theta)``: tetrahedra ``0..F-1`` are cones from the north
    pole, flipped at the pole; ``F..2F-1`` are the unflipped Euclidean cones
    from the south pole.  The result is a critical point whose flip surface is
    the link of the north pole.
    """
    points = np.asarray(points, dtype=float)
    n = len(faces)
    gluings = _cone_gluings(faces, 0) + _cone_gluings(faces, n)
    gluings += [Gluing(t, 0, n + t, 0, (0, 1, 2, 3)) for t in range(n)]
    spec = make_spec(2 * n, gluings)
    euclid = _cone_angles(points, faces)
    theta = np.concatenate([flip_array(euclid, (0,)), euclid]).ravel()
    return spec, theta


def cone(points, faces):
    """Only the flipped north cones of :func:`suspension`; base faces left open."""
    points = np.asarray(points, dtype=float)
    spec = make_spec(len(faces), _cone_gluings(faces, 0), allow_boundary=True)
    theta = flip_array(_cone_angles(points, faces), (0,)).ravel()
    return spec, theta


def projective_plane_cone():
    """Cone over the hemi-octahedron (RP² with 4 triangles), flipped at the apex.

    Tetrahedron ``(s1, s2)`` is the cone over the octahedron face
    ``(s1 e1, s2 e2, e3)``; label ``m`` is the antipodal class of ``e_m``.
    Apex edges have orbit size 4 and angle π/2, so the RP² link has vertex
    angle sums 2π.
    """
    signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    index = {s: k for k, s in enumerate(signs)}
    ident = (0, 1, 2, 3)
    gluings = []
    for (s1, s2), t in index.items():
        gluings.append(Gluing(t, 3, index[(-s1, -s2)], 3, ident))
        gluings.append(Gluing(t, 2, index[(s1, -s2)], 2, ident))
        gluings.append(Gluing(t, 1, index[(-s1, s2)], 1, ident))
    spec = make_spec(4, gluings, allow_boundary=True)
    corner = dihedral_angles([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    theta = np.tile(flip_array(corner, (0,)), 4)
    return spec, theta


# --------------------------------------------------------------------------
# doubly flipped pieces


def disphenoid(h: float) -> np.ndarray:
    """Angles of the tetrahedron ``(±1, 0, -h), (0, ±1, h)``: edges 01 and 23 opposite."""
    return dihedral_angles([[1, 0, -h], [-1, 0, -h], [0, 1, h], [0, -1, h]])


def disphenoid_with_cross_angle(gamma: float) -> np.ndarray:
    """Euclidean disphenoid whose four edges 02, 03, 12, 13 have dihedral ``gamma``."""
    f = lambda h: disphenoid(h)[1] - gamma
    h = brentq(f, 1e-6, 1e3, xtol=1e-15)
    return disphenoid(h)


# quad corner -> cross edge of the tetrahedron, in cyclic order A, B, C, D
_QUAD_CORNER_EDGES = ((0, 2), (1, 2), (1, 3), (0, 3))


def quad_complex(quads, allow_boundary: bool = True) -> GluingSpec:
    """One tetrahedron per quadrilateral ``(A, B, C, D)`` of a quad surface.

    Corner ``X`` of the quad sits on cross edge ``_QUAD_CORNER_EDGES[X]``; the
    side between consecutive corners is the face containing both edges.
    Sides shared by two quads are glued so that corners match.
    """
    def side_face(corner_edges, x, y):
        ex, ey = set(corner_edges[x]), set(corner_edges[y])
        (m,) = ex & ey
        (omit,) = set(range(4)) - ex - ey
        return m, (ex - {m}).pop(), (ey - {m}).pop(), omit

    sides = {}
    for t, quad in enumerate(quads):
        for x in range(4):
            y = (x + 1) % 4
            key = frozenset((quad[x], quad[y]))
            sides.setdefault(key, []).append((t, quad[x], quad[y], side_face(_QUAD_CORNER_EDGES, x, y)))
    gluings = []
    for key, entries in sides.items():
        if len(entries) == 1:
            continue
        if len(entries) != 2:
            raise ValueError(f"side {set(key)} used {len(entries)} times")
        (t1, x1, y1, f1), (t2, x2, y2, f2) = entries
        m1, a1, b1, o1 = f1
        m2, a2, b2, o2 = f2
        if (x1, y1) != (x2, y2):  # the second quad traverses the side backwards
            a2, b2 = b2, a2
        perm = [0] * 4
        perm[m1], perm[a1], perm[b1], perm[o1] = m2, a2, b2, o2
        gluings.append(Gluing(t1, o1, t2, o2, tuple(perm)))
    return make_spec(len(quads), gluings, allow_boundary=allow_boundary)


CUBE_QUADS = (
    (0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3),
)


def cube_quad_complex():
    """Six doubly flipped Euclidean tetrahedra whose flip surface is a cube.

    Every cube vertex has three quads, so cross angles are 2π/3.
    """
    spec = quad_complex(CUBE_QUADS)
    euclid = disphenoid_with_cross_angle(math.pi / 3)
    theta = np.tile(flip_array(euclid, (0, 1)), len(CUBE_QUADS))
    return spec, theta


def flipped_pair():
    """Two flipped Euclidean simplices glued along their three faces at vertex 0."""
    ident = (0, 1, 2, 3)
    spec = make_spec(2, [Gluing(0, f, 1, f, ident) for f in (1, 2, 3)], allow_boundary=True)
    regular = np.full(6, math.acos(1.0 / 3.0))
    return spec, np.tile(flip_array(regular, (0,)), 2)


def doubly_flipped_pair():
    """Two doubly flipped Euclidean simplices glued along all four faces."""
    regular = np.full(6, math.acos(1.0 / 3.0))
    return identity_double(), np.tile(flip_array(regular, (0, 1)), 2)


def built(spec_and_theta) -> tuple[Triangulation, np.ndarray]:
    spec, theta = spec_and_theta
    return build(spec), theta
