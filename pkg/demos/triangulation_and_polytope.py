"""Gluing data, edge orbits and the polytope of angle structures.

Run: python3 demos/triangulation_and_polytope.py
"""
import numpy as np

from hsvol.fixtures import boundary_of_4simplex, fixture_path, identity_double
from hsvol.optimizer import InfeasibleError, feasible_point, max_slack, polytope_constraints, random_feasible_point
from hsvol.triangulation import TriangulationError, build, edge_orbit_report, parse_triangulation
from hsvol.simplexgeom import EDGES

T = build(boundary_of_4simplex())
rep = edge_orbit_report(T)
print(rep.summary(), "| chi =", rep.euler_characteristic, "| closed:", rep.closed)
for k, orbit in enumerate(T.edge_orbits[:3]):
    print(f"  edge {k}: " + ", ".join(f"tet {w // 6} edge {EDGES[w % 6]}" for w in orbit))

# Bad input is reported with the kind of problem and where it is.
for name in ("duplicate_face.json", "unmatched_face.json"):
    try:
        parse_triangulation(fixture_path(name).read_text())
    except TriangulationError as exc:
        print(f"{name}: {exc}")

print()
C = polytope_constraints(T)
theta, t = max_slack(C)
print(f"{C.A.shape[0]} edge equations, {C.G.shape[0]} strict inequalities, max-min slack {t:.6f}")
print("LP point is the symmetric one:", np.allclose(theta, 2 * np.pi / 3))
theta = random_feasible_point(T, 0, C)
print(f"random feasible point: min slack {C.slack(theta).min():.4f}, "
      f"equation residual {C.equality_residual(theta):.1e}")

# Two tetrahedra glued by the identity on all faces have no angle structure.
try:
    feasible_point(build(identity_double()))
except InfeasibleError as exc:
    print("identity double:", exc)
