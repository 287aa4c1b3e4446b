"""Search for a critical point of the volume on ∂Δ⁴ and inspect the result.

From the symmetric start nothing moves. From random starts the search lands
on the round S³, volume 2π², with edge lengths that agree across tetrahedra.

Run: python3 demos/maximize_volume.py
"""
import math
import time

from hsvol.analysis import check_edge_consistency, classify_structure
from hsvol.fixtures import boundary_of_4simplex
from hsvol.optimizer import feasible_point, find_critical, polytope_constraints, random_feasible_point
from hsvol.triangulation import build

T = build(boundary_of_4simplex())
C = polytope_constraints(T)
starts = [("LP point", feasible_point(T, C))] + [(f"seed {s}", random_feasible_point(T, s, C)) for s in (0, 2)]

for name, theta0 in starts:
    t0 = time.perf_counter()
    cp = find_critical(T, theta0, C=C)
    ec = check_edge_consistency(T, cp.theta)
    print(f"{name:<9} {cp.status} in {cp.iterations:>3} iterations ({time.perf_counter() - t0:.2f} s): "
          f"V/2pi^2 = {cp.volume / (2 * math.pi ** 2):.12f}, "
          f"length residual {ec.max_residual:.1e}, {classify_structure(T, cp.theta).tag.value}")

# Round S³ is not a local maximum here: an ascent can leave it.  Seed 1 climbs
# past 2π² until it meets the boundary of the polytope, and is reported as stalled.
cp = find_critical(T, random_feasible_point(T, 1, C), C=C)
print(f"seed 1    {cp.status}: V - 2pi^2 = {cp.volume - 2 * math.pi ** 2:.2e}, "
      f"|Pg| = {cp.projected_gradient_norm:.2f}, min slack {C.slack(cp.theta).min():.1e}")
