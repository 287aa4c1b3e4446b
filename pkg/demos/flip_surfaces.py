"""Euclidean-type structures with flips, and the surface the flips cut out.

Each flipped piece contributes a spherical polygon; glued together they form a
closed surface whose area fixes the volume.  The sphere gives 2π² and the
projective plane gives π².

Run: python3 demos/flip_surfaces.py
"""
import math

from hsvol.analysis import classify_structure, extract_flip_surface, verify_euclidean_claims
from hsvol.fixtures import (
    OCTAHEDRON_FACES,
    OCTAHEDRON_POINTS,
    TETRAHEDRON_FACES,
    TETRAHEDRON_POINTS,
    built,
    cone,
    cube_quad_complex,
    projective_plane_cone,
    suspension,
)

cases = {
    "suspension of tetrahedron": suspension(TETRAHEDRON_POINTS, TETRAHEDRON_FACES),
    "suspension of octahedron": suspension(OCTAHEDRON_POINTS, OCTAHEDRON_FACES),
    "cone over tetrahedron": cone(TETRAHEDRON_POINTS, TETRAHEDRON_FACES),
    "cube of quads": cube_quad_complex(),
    "cone over RP2": projective_plane_cone(),
}

for name, fixture in cases.items():
    T, theta = built(fixture)
    sc = classify_structure(T, theta)
    S = extract_flip_surface(T, theta, structure=sc)
    r = verify_euclidean_claims(T, theta, S)
    shape = ", ".join(f"{len(c.tets)} faces chi={c.euler_characteristic}" for c in S.components)
    failed = [k for k, ok in r.checks.items() if not ok]
    print(f"{name:<26} {sc.tag.value}: {shape}, area/2pi = {S.area / (2 * math.pi):.10f}, "
          f"V/pi^2 = {r.volume / math.pi ** 2:.10f}" + (f"  (fails: {', '.join(failed)})" if failed else ""))
