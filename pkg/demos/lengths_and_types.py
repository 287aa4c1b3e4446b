"""Edge lengths and the type of a tetrahedron, read off from its six angles.

Run: python3 demos/lengths_and_types.py
"""
import math

import numpy as np

from hsvol.geomlib import MobiusTriangle, classify_triangle, triangle_edge_lengths
from hsvol.simplexgeom import AngleSystem, classify_simplex, edge_lengths, flip, regular_angles

EUC = math.acos(1 / 3)

# A vertex link is a triangle of angles; its side lengths can be real, imaginary
# or iπ plus something, depending on how the angle sum compares to π.
for angles in [(1.2, 1.2, 1.2), (math.pi / 3,) * 3, (0.4, 0.5, 0.6), (math.pi / 6, 5 * math.pi / 6, 5 * math.pi / 6)]:
    t = MobiusTriangle(angles)
    kind = classify_triangle(t)
    lengths = ", ".join(f"{l.as_complex():.4f}" for l in triangle_edge_lengths(t))
    print(f"{np.round(angles, 4)} -> {kind.tag.name:<20} lengths {lengths}")

print()
# The regular tetrahedron moves from hyperbolic through Euclidean to spherical
# as its angle grows past arccos(1/3).
for x in (1.1, EUC, 1.5, 2 * math.pi / 3):
    a = AngleSystem(tuple(regular_angles(x)))
    l = edge_lengths(a)[(0, 1)]
    print(f"regular angle {x:.5f}: {classify_simplex(a).tag.value:<12} edge length {l.as_complex():.5f}")

print()
# Flipping a vertex replaces the three angles there by their supplements.
a = AngleSystem(tuple(regular_angles(1.1)))
for vs in [(0,), (0, 1)]:
    b = a
    for v in vs:
        b = flip(b, v)
    st = classify_simplex(b)
    print(f"flip at {vs}: {st.tag.value}, flipped vertices {sorted(st.flipped_vertices)}")
    print("   edge lengths:", {e: f"{l.as_complex():.4f}" for e, l in edge_lengths(b).lengths.items()})
