"""Combinatorics of triangulated 3-manifolds given by face pairings.

Face ``f`` of a tetrahedron is the face opposite its vertex ``f``.  A gluing
``(tet, face, to_tet, to_face, perm)`` identifies vertex ``v`` of ``tet`` with
vertex ``perm[v]`` of ``to_tet``; ``perm[face] == to_face``.

Input format (UTF-8 JSON)::

    {"tet_count": N,
     "gluings": [{"tet": t, "face": f, "to_tet": t2, "to_face": f2,
                  "perm": [p0, p1, p2, p3]}, ...]}

Each pairing may be listed once or in both directions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from scipy.cluster.hierarchy import DisjointSet

from .simplexgeom import EDGES, edge_index


class TriangulationError(ValueError):
    """Bad gluing data; ``kind`` names the problem, ``location`` where it is."""

    def __init__(self, kind: str, message: str, location=None):
        self.kind = kind
        self.location = location
        where = "" if location is None else f" [{location}]"
        super().__init__(f"{kind}: {message}{where}")


@dataclass(frozen=True)
class Gluing:
    tet: int
    face: int
    to_tet: int
    to_face: int
    perm: tuple[int, int, int, int]

    def inverse(self) -> "Gluing":
        inv = [0] * 4
        for v, w in enumerate(self.perm):
            inv[w] = v
        return Gluing(self.to_tet, self.to_face, self.tet, self.face, tuple(inv))

    def as_dict(self) -> dict:
        return {"tet": self.tet, "face": self.face, "to_tet": self.to_tet,
                "to_face": self.to_face, "perm": list(self.perm)}


@dataclass(frozen=True)
class GluingSpec:
    tet_count: int
    gluings: tuple[Gluing, ...]
    allow_boundary: bool = False

    def pairing(self) -> dict[tuple[int, int], Gluing]:
        out = {}
        for g in self.gluings:
            out[(g.tet, g.face)] = g
            out[(g.to_tet, g.to_face)] = g.inverse()
        return out

    def to_json(self) -> str:
        return json.dumps({"tet_count": self.tet_count,
                           "gluings": [g.as_dict() for g in self.gluings]}, indent=1)


def _check_gluing(k, g: Gluing, n: int) -> None:
    loc = f"gluing {k}"
    for name in ("tet", "to_tet"):
        v = getattr(g, name)
        if not 0 <= v < n:
            raise TriangulationError("bad index", f"{name}={v} outside 0..{n - 1}", loc)
    for name in ("face", "to_face"):
        v = getattr(g, name)
        if not 0 <= v < 4:
            raise TriangulationError("bad index", f"{name}={v} outside 0..3", loc)
    if sorted(g.perm) != [0, 1, 2, 3]:
        raise TriangulationError("bad perm", f"{list(g.perm)} is not a bijection of 0..3", loc)
    if g.perm[g.face] != g.to_face:
        raise TriangulationError(
            "bad perm", f"perm[{g.face}] = {g.perm[g.face]} but to_face = {g.to_face}", loc)


def make_spec(tet_count: int, gluings, allow_boundary: bool = False) -> GluingSpec:
    """Validate raw gluings and return a spec with one entry per face pair."""
    if not isinstance(tet_count, int) or isinstance(tet_count, bool) or tet_count < 1:
        raise TriangulationError("bad value", f"tet_count must be a positive integer, got {tet_count!r}")
    seen: dict[tuple[int, int], tuple[int, Gluing]] = {}
    for k, g in enumerate(gluings):
        _check_gluing(k, g, tet_count)
        for entry in (g, g.inverse()):
            key = (entry.tet, entry.face)
            if key in seen:
                k0, old = seen[key]
                if (old.to_tet, old.to_face) != (entry.to_tet, entry.to_face):
                    raise TriangulationError(
                        "duplicate face",
                        f"face {entry.face} of tet {entry.tet} glued to both "
                        f"({old.to_tet}, {old.to_face}) and ({entry.to_tet}, {entry.to_face})",
                        f"gluings {k0} and {k}",
                    )
                if old.perm != entry.perm:
                    raise TriangulationError(
                        "non-involutive",
                        f"face {entry.face} of tet {entry.tet}: perms {list(old.perm)} and "
                        f"{list(entry.perm)} disagree",
                        f"gluings {k0} and {k}",
                    )
            else:
                seen[key] = (k, entry)
    if not allow_boundary:
        for t in range(tet_count):
            for f in range(4):
                if (t, f) not in seen:
                    raise TriangulationError(
                        "unmatched face", f"face {f} of tet {t} is not glued", f"tet {t}")
    canonical = []
    for key in sorted(seen):
        g = seen[key][1]
        if key <= (g.to_tet, g.to_face):
            canonical.append(g)
    return GluingSpec(tet_count, tuple(canonical), allow_boundary)


def parse_triangulation(text, allow_boundary: bool = False) -> GluingSpec:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TriangulationError("syntax error", exc.msg, f"line {exc.lineno} col {exc.colno}") from exc
    if not isinstance(data, dict) or "tet_count" not in data:
        raise TriangulationError("syntax error", "expected an object with 'tet_count' and 'gluings'")
    raw = data.get("gluings", [])
    if not isinstance(raw, list):
        raise TriangulationError("syntax error", "'gluings' must be a list")
    gluings = []
    for k, item in enumerate(raw):
        try:
            g = Gluing(int(item["tet"]), int(item["face"]), int(item["to_tet"]),
                       int(item["to_face"]), tuple(int(p) for p in item["perm"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise TriangulationError("syntax error", f"malformed gluing: {exc!r}", f"gluing {k}") from exc
        if len(g.perm) != 4:
            raise TriangulationError("bad perm", f"perm must have four entries, got {list(g.perm)}",
                                     f"gluing {k}")
        gluings.append(g)
    return make_spec(data["tet_count"], gluings, allow_boundary)


@dataclass(frozen=True)
class Triangulation:
    spec: GluingSpec
    wedges: tuple[tuple[int, tuple[int, int]], ...]
    edge_orbits: tuple[tuple[int, ...], ...]
    vertex_orbits: tuple[tuple[tuple[int, int], ...], ...]
    closed_orbits: tuple[bool, ...]
    face_count: int
    edge_of_wedge: tuple[int, ...] = field(repr=False)

    @property
    def tet_count(self) -> int:
        return self.spec.tet_count

    @property
    def allow_boundary(self) -> bool:
        return self.spec.allow_boundary

    @property
    def counts(self) -> dict[str, int]:
        return {"V": len(self.vertex_orbits), "E": len(self.edge_orbits),
                "F": self.face_count, "S": self.tet_count}

    @property
    def is_closed(self) -> bool:
        return self.face_count * 2 == self.tet_count * 4 and all(self.closed_orbits)

    def wedge(self, tet: int, i: int, j: int) -> int:
        return 6 * tet + edge_index(i, j)


def build(spec: GluingSpec) -> Triangulation:
    n = spec.tet_count
    wedges = tuple((t, e) for t in range(n) for e in EDGES)
    pairing = spec.pairing()
    wedge_sets = DisjointSet(range(6 * n))
    vertex_sets = DisjointSet((t, v) for t in range(n) for v in range(4))
    for g in spec.gluings:
        p = g.perm
        for a, b in EDGES:
            if g.face not in (a, b):
                wedge_sets.merge(6 * g.tet + edge_index(a, b), 6 * g.to_tet + edge_index(p[a], p[b]))
        for v in range(4):
            if v != g.face:
                vertex_sets.merge((g.tet, v), (g.to_tet, p[v]))

    orbits = sorted((tuple(sorted(s)) for s in wedge_sets.subsets()), key=lambda s: s[0])
    edge_of_wedge = [0] * (6 * n)
    for k, orbit in enumerate(orbits):
        for w in orbit:
            edge_of_wedge[w] = k

    def wedge_closed(w):
        t, (a, b) = wedges[w]
        return all((t, f) in pairing for f in range(4) if f not in (a, b))

    closed = tuple(all(wedge_closed(w) for w in orbit) for orbit in orbits)
    vorbits = sorted((tuple(sorted(s)) for s in vertex_sets.subsets()), key=lambda s: s[0])
    glued = {frozenset({(g.tet, g.face), (g.to_tet, g.to_face)}) for g in spec.gluings}
    face_count = len(glued) + (4 * n - len(pairing))
    return Triangulation(spec, wedges, tuple(orbits), tuple(vorbits), closed, face_count,
                         tuple(edge_of_wedge))


def load(path, allow_boundary: bool = False) -> Triangulation:
    with open(path, "rb") as fh:
        return build(parse_triangulation(fh.read(), allow_boundary))


@dataclass(frozen=True)
class OrbitReport:
    tet_count: int
    edge_orbit_sizes: tuple[int, ...]
    vertex_orbit_sizes: tuple[int, ...]
    counts: dict
    euler_characteristic: int
    closed: bool

    def summary(self) -> str:
        sizes = {}
        for s in self.edge_orbit_sizes:
            sizes[s] = sizes.get(s, 0) + 1
        size_text = ", ".join(f"{s}×{c}" for s, c in sorted(sizes.items()))
        return (f"{self.tet_count} tets, {len(self.edge_orbit_sizes)} edges, "
                f"orbit sizes [{size_text}]")


def edge_orbit_report(T: Triangulation) -> OrbitReport:
    c = T.counts
    return OrbitReport(
        T.tet_count,
        tuple(len(o) for o in T.edge_orbits),
        tuple(len(o) for o in T.vertex_orbits),
        c,
        c["V"] - c["E"] + c["F"] - c["S"],
        T.is_closed,
    )
