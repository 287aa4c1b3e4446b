"""Volumes by integrating the Schläfli form from a Euclidean base point.

Run: python3 demos/volume_by_integration.py
"""
import math

from hsvol.simplexgeom import AngleSystem, classify_simplex, flip_array, regular_angles
from hsvol.volume import (
    base_euclidean_point,
    integrate_schlafli,
    integrate_schlafli_path,
    simplex_volume,
    volume_doubly_flipped_euclidean,
    volume_flipped_euclidean,
)

PI = math.pi
EUC = math.acos(1 / 3)
base = base_euclidean_point().as_array()

# Spherical tetrahedra of known volume: the all-right-angle one is 1/16 of S³.
for x, known in [(PI / 2, PI ** 2 / 8), (2 * PI / 3, 2 * PI ** 2 / 5)]:
    v = simplex_volume(AngleSystem(tuple(regular_angles(x))))
    print(f"regular {x:.4f}: V = {v:.15f}  (expected {known:.15f})")

# Hyperbolic ones get close to the regular ideal tetrahedron, 1.0149416...
for d in (1e-1, 1e-2, 1e-3):
    print(f"regular pi/3 + {d:g}: V = {simplex_volume(AngleSystem(tuple(regular_angles(PI / 3 + d)))):.10f}")

print()
# Flipped Euclidean pieces have closed forms; the integral agrees with them.
fe = AngleSystem(tuple(flip_array(regular_angles(EUC), (0,))))
dfe = AngleSystem(tuple(flip_array(regular_angles(EUC), (0, 1))))
print(f"flipped regular:        closed form {volume_flipped_euclidean(fe):.12f}, "
      f"integral {integrate_schlafli(base, fe.as_array())[0]:.12f}")
print(f"doubly flipped regular: closed form {volume_doubly_flipped_euclidean(dfe):.12f}, "
      f"integral {integrate_schlafli(base, dfe.as_array())[0]:.12f}")

print()
# The form is closed, so the path does not matter.
target = flip_array(regular_angles(1.2), (2,))
via = regular_angles(1.9)
straight = integrate_schlafli(base, target)[0]
bent = integrate_schlafli_path([base, via, target])[0]
print(f"target is {classify_simplex(AngleSystem(tuple(target))).tag.value}")
print(f"straight path {straight:.13f}, via a spherical point {bent:.13f}, difference {abs(straight - bent):.1e}")
