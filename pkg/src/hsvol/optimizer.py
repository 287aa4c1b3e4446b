"""Angle structures as points of a polytope, and critical points of the volume.

The space of angle structures on a triangulation is cut out by one affine
equation per closed edge orbit (angles around the edge sum to 2π) and strict
inequalities per wedge and per vertex link.  A strictly feasible point comes
from a max-min-slack linear program; critical points of the total volume are
then found by projected gradient ascent followed by Newton refinement on the
projected gradient.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .geomlib import EPS_CLASS
from .simplexgeom import EDGES, InternalConsistencyError, classify_simplices, vertex_edges
from .volume import QuadratureOptions, integrate_schlafli, total_gradient, total_volume

log = logging.getLogger(__name__)

#: LP slack below which the strict system is declared empty
FEASIBILITY_TOL = 1e-9
ARMIJO_C = 1e-4
SHRINK = 0.5
#: iterates keep at least this much slack in every strict inequality; closer to
#: the boundary the face triangles degenerate and edge lengths lose all accuracy
MIN_SLACK = 1e-10
#: relative cutoff for small Hessian eigenvalues (critical sets can be positive
#: dimensional, e.g. a 9-parameter family of round metrics on ∂Δ⁴)
HESSIAN_RCOND = 1e-6


class InfeasibleError(ValueError):
    """The strict system has no solution; ``t_star`` is the optimal LP slack."""

    def __init__(self, t_star: float, message: str = ""):
        self.t_star = t_star
        super().__init__(message or f"no angle structure: polytope empty or degenerate, max-min slack t* = {t_star:.3g}")


@dataclass(frozen=True)
class Constraints:
    """``A θ = b`` and strict ``G θ > h``; ``labels`` names each row of ``G``."""

    A: np.ndarray
    b: np.ndarray
    G: np.ndarray
    h: np.ndarray
    labels: tuple[str, ...] = field(repr=False)

    def slack(self, theta) -> np.ndarray:
        return self.G @ np.asarray(theta, dtype=float) - self.h

    def equality_residual(self, theta) -> float:
        if not len(self.b):
            return 0.0
        return float(np.max(np.abs(self.A @ np.asarray(theta, dtype=float) - self.b)))

    def strictly_feasible(self, theta) -> bool:
        """Strict inequalities only; see :meth:`equality_residual` for the rest."""
        return bool(np.all(self.slack(theta) > 0.0))

    def violations(self, theta, eq_tol: float = 1e-9) -> list[str]:
        out = []
        theta = np.asarray(theta, dtype=float)
        if len(self.b):
            r = self.A @ theta - self.b
            for k in np.flatnonzero(np.abs(r) > eq_tol):
                out.append(f"edge equation {k}: angle sum off 2*pi by {r[k]:.3g}")
        s = self.slack(theta)
        for k in np.flatnonzero(s <= 0.0):
            out.append(f"{self.labels[k]}: slack {s[k]:.3g}")
        return out


def polytope_constraints(T) -> Constraints:
    n = 6 * T.tet_count
    closed = [o for o, c in zip(T.edge_orbits, T.closed_orbits) if c]
    A = np.zeros((len(closed), n))
    for k, orbit in enumerate(closed):
        A[k, list(orbit)] = 1.0
    b = np.full(len(closed), 2.0 * math.pi)

    rows, h, labels = [], [], []
    eye = np.eye(n)
    for w in range(n):
        rows.append(eye[w]); h.append(0.0); labels.append(f"wedge {w} > 0")
        rows.append(-eye[w]); h.append(-math.pi); labels.append(f"wedge {w} < pi")
    for t in range(T.tet_count):
        for v in range(4):
            ws = [6 * t + e for e in vertex_edges(v)]
            r = np.zeros(n)
            r[ws] = 1.0
            rows.append(r); h.append(math.pi); labels.append(f"tet {t} vertex {v}: sum > pi")
            for w in ws:
                r = np.zeros(n)
                r[ws] = -1.0
                r[w] = 1.0
                rows.append(r); h.append(-math.pi)
                labels.append(f"tet {t} vertex {v}: triangle inequality at edge {EDGES[w - 6 * t]}")
    return Constraints(A, b, np.array(rows), np.array(h), tuple(labels))


def max_slack(C: Constraints):
    """Optimal ``(θ, t*)`` of the max-min-slack LP over normalised rows."""
    n = C.G.shape[1]
    norms = np.linalg.norm(C.G, axis=1)
    # variables (θ, t): maximise t with (G θ - h)/|G| >= t
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-C.G / norms[:, None], np.ones((len(norms), 1))])
    b_ub = -C.h / norms
    A_eq = np.hstack([C.A, np.zeros((C.A.shape[0], 1))]) if len(C.b) else None
    bounds = [(0.0, math.pi)] * n + [(None, math.pi)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=C.b if len(C.b) else None,
                  bounds=bounds, method="highs")
    if res.status == 2:
        return None, -math.inf
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return res.x[:n], float(res.x[-1]) + 0.0


def feasible_point(T, C: Constraints | None = None) -> np.ndarray:
    """A strictly feasible angle structure, or :class:`InfeasibleError`."""
    C = C or polytope_constraints(T)
    theta, t_star = max_slack(C)
    if t_star <= FEASIBILITY_TOL:
        raise InfeasibleError(t_star)
    return project_affine(C, theta)


def project_affine(C: Constraints, theta) -> np.ndarray:
    """Closest point of the affine subspace ``A θ = b``."""
    theta = np.asarray(theta, dtype=float)
    if not len(C.b):
        return theta.copy()
    for _ in range(2):
        r = C.A @ theta - C.b
        theta = theta - np.linalg.lstsq(C.A, r, rcond=None)[0]
    return theta


def _tangent_basis(C: Constraints) -> np.ndarray:
    n = C.G.shape[1]
    return null_space(C.A) if len(C.b) else np.eye(n)


def random_feasible_point(T, seed: int, C: Constraints | None = None) -> np.ndarray:
    """Move from the LP point a random fraction of the way to the boundary."""
    C = C or polytope_constraints(T)
    theta0 = feasible_point(T, C)
    rng = np.random.default_rng(seed)
    Z = _tangent_basis(C)
    if Z.shape[1] == 0:
        return theta0
    d = Z @ rng.standard_normal(Z.shape[1])
    rate = C.G @ d
    slack = C.slack(theta0)
    limits = slack[rate < 0] / -rate[rate < 0]
    s_max = float(limits.min()) if len(limits) else 1.0
    return project_affine(C, theta0 + rng.uniform(0.3, 0.7) * s_max * d)


@dataclass(frozen=True)
class OptimizerOptions:
    grad_tol: float = 1e-9
    max_iter: int = 10000
    refine: bool = True
    #: try Newton steps once the projected-gradient max-norm is below this
    refine_below: float = math.inf
    fd_step: float = 1e-6
    quadrature: QuadratureOptions = QuadratureOptions()
    eps: float = EPS_CLASS

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")


@dataclass(frozen=True)
class CriticalPoint:
    theta: np.ndarray
    projected_gradient_norm: float
    iterations: int
    converged: bool
    volume: float
    status: str  # "converged", "max_iter" or "stalled"
    #: volume after each accepted ascent step, starting with the initial point
    ascent_trace: tuple[float, ...] = field(default=(), repr=False)


def _volume_change(T, old, new, q, eps) -> float:
    a = old.reshape(T.tet_count, 6)
    b = new.reshape(T.tet_count, 6)
    return sum(integrate_schlafli(x, y, q, eps)[0] for x, y in zip(a, b))


class _Problem:
    def __init__(self, T, C: Constraints, opts: OptimizerOptions):
        self.T, self.C, self.opts = T, C, opts
        self.Z = _tangent_basis(C)

    def reduced_gradient(self, theta) -> np.ndarray:
        return self.Z.T @ total_gradient(self.T, theta, self.opts.eps)

    def projected_gradient(self, theta) -> np.ndarray:
        return self.Z @ self.reduced_gradient(theta)

    def feasible(self, theta) -> bool:
        if not np.all(self.C.slack(theta) > MIN_SLACK):
            return False
        try:
            classify_simplices(theta.reshape(-1, 6), self.opts.eps)
        except (InternalConsistencyError, ValueError):
            return False
        return True

    def reduced_hessian(self, theta) -> np.ndarray:
        h = self.opts.fd_step
        k = self.Z.shape[1]
        H = np.empty((k, k))
        for j in range(k):
            step = h * self.Z[:, j]
            H[:, j] = (self.reduced_gradient(theta + step) - self.reduced_gradient(theta - step)) / (2 * h)
        return 0.5 * (H + H.T)


def _ascent_step(P: _Problem, theta, d):
    """Armijo backtracking along ``d``; returns ``(theta, dV)`` or ``None`` on stall."""
    q, eps = P.opts.quadrature, P.opts.eps
    norm2 = float(d @ d)
    s = 1.0 / math.sqrt(norm2)
    while s * math.sqrt(norm2) > 1e-15 * (1.0 + np.linalg.norm(theta)):
        cand = project_affine(P.C, theta + s * d)
        if P.feasible(cand):
            dV = _volume_change(P.T, theta, cand, q, eps)
            if dV >= ARMIJO_C * s * norm2:
                return cand, dV
        s *= SHRINK
    return None


def _newton_step(P: _Problem, theta, r):
    """Damped Newton step on the reduced gradient; ``None`` if no step helps."""
    try:
        H = P.reduced_hessian(theta)
    except Exception:  # a stencil point left the valid region
        return None
    delta = -np.linalg.lstsq(H, r, rcond=HESSIAN_RCOND)[0]
    current = float(np.linalg.norm(r))
    s = 1.0
    for _ in range(30):
        cand = project_affine(P.C, theta + s * (P.Z @ delta))
        if P.feasible(cand):
            if float(np.linalg.norm(P.reduced_gradient(cand))) < current:
                return cand
        s *= SHRINK
    return None


def find_critical(T, theta0, opts: OptimizerOptions = OptimizerOptions(),
                  C: Constraints | None = None) -> CriticalPoint:
    C = C or polytope_constraints(T)
    theta = project_affine(C, theta0)
    if not C.strictly_feasible(theta):
        raise ValueError("starting point is not strictly feasible: "
                         + "; ".join(C.violations(theta)[:5]))
    P = _Problem(T, C, opts)
    V = total_volume(T, theta, opts.quadrature, opts.eps)
    trace = [V]
    status = "max_iter"
    it = 0
    newton_failed_at = None
    while True:
        r = P.reduced_gradient(theta)
        g = P.Z @ r
        gnorm = float(np.max(np.abs(g))) if len(g) else 0.0
        if gnorm <= opts.grad_tol:
            status = "converged"
            break
        if it >= opts.max_iter:
            break
        it += 1
        if opts.refine and gnorm < opts.refine_below and newton_failed_at != it - 1:
            new = _newton_step(P, theta, r)
            if new is not None:
                theta = new
                continue
            newton_failed_at = it
        step = _ascent_step(P, theta, g)
        if step is None:
            new = _newton_step(P, theta, r) if opts.refine else None
            if new is None:
                status = "stalled"
                break
            theta = new
            continue
        theta, dV = step
        V += dV
        trace.append(V)
        log.debug("iter %d: |Pg| = %.3e, V = %.15g", it, gnorm, V)
    volume = total_volume(T, theta, opts.quadrature, opts.eps)
    return CriticalPoint(theta, gnorm, it, status == "converged", volume, status, tuple(trace))
