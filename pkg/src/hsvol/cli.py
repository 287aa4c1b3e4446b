"""``hsvol``: angle structures, volume critical points and their geometry.

Exit codes: 0 success, 1 invalid input, 2 no angle structure exists,
3 the search did not reach a consistent critical point.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .analysis import (
    StructureError,
    StructureTag,
    check_edge_consistency,
    classify_structure,
    extract_flip_surface,
    verify_euclidean_claims,
)
from .geomlib import EPS_CLASS
from .optimizer import (
    InfeasibleError,
    OptimizerOptions,
    feasible_point,
    find_critical,
    max_slack,
    polytope_constraints,
    random_feasible_point,
)
from .simplexgeom import EDGES
from .triangulation import TriangulationError, build, edge_orbit_report, parse_triangulation
from .volume import QuadratureOptions, total_volume

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_NOT_CONVERGED = 0, 1, 2, 3
COMMANDS = ("check", "feasible", "maximize", "classify", "report")

log = logging.getLogger("hsvol")


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str
    output_path: str | None = None
    grad_tol: float = 1e-9
    length_tol: float = 1e-7
    eps_class: float = EPS_CLASS
    abs_tol: float = 1e-10
    max_iter: int = 10000
    seed: int | None = None
    test_mode: bool = False
    theta_path: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        for name in ("grad_tol", "length_tol", "eps_class", "abs_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.max_iter < 0:
            raise InputError("max_iter must be non-negative")

    def optimizer_options(self) -> OptimizerOptions:
        return OptimizerOptions(grad_tol=self.grad_tol, max_iter=self.max_iter,
                                quadrature=QuadratureOptions(self.abs_tol), eps=self.eps_class)

    def options_dict(self) -> dict:
        return {"grad_tol": self.grad_tol, "length_tol": self.length_tol, "eps_class": self.eps_class,
                "abs_tol": self.abs_tol, "max_iter": self.max_iter, "seed": self.seed}


# --------------------------------------------------------------------------
# JSON with 17 significant digits


def _has_dict(obj) -> bool:
    if isinstance(obj, dict):
        return True
    if isinstance(obj, (list, tuple, np.ndarray)):
        return any(_has_dict(v) for v in obj)
    return False


def _format(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        if not any(ch in text for ch in ".eE"):
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k), ensure_ascii=False)}: {_format(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [_format(v, indent, level + 1) for v in obj]
        if not _has_dict(obj):
            flat = "[" + ", ".join(items) + "]"
            if "\n" not in flat:
                return flat
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _format(obj, indent, 0) + "\n"


# --------------------------------------------------------------------------
# report pieces


def _read_json(path: str):
    try:
        with open(path, "rb") as fh:
            return json.loads(fh.read().decode("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: not valid UTF-8 JSON ({exc})") from exc


def _load_triangulation(cfg: RunConfig):
    try:
        with open(cfg.input_path, "rb") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {cfg.input_path}: {exc.strerror}") from exc
    return build(parse_triangulation(text, allow_boundary=cfg.test_mode)), text


def _triangulation_summary(T) -> dict:
    r = edge_orbit_report(T)
    return {
        "summary": r.summary(),
        "tet_count": T.tet_count,
        "counts": r.counts,
        "euler_characteristic": r.euler_characteristic,
        "closed": r.closed,
        "edge_orbit_sizes": list(r.edge_orbit_sizes),
        "edge_orbits": [[[w // 6, list(EDGES[w % 6])] for w in orbit] for orbit in T.edge_orbits],
    }


def _analyse(T, theta, cfg: RunConfig, volume: float) -> tuple[dict, bool]:
    """Consistency, structure, flip surface and claims; returns (fields, consistent)."""
    out = {}
    ec = check_edge_consistency(T, theta, cfg.length_tol, cfg.eps_class)
    out["edge_consistency"] = {"length_tol": cfg.length_tol, "max_residual": ec.max_residual,
                               "passed": ec.passed, "residuals": list(ec.residuals)}
    out["structure"] = None
    out["per_simplex_types"] = None
    out["flip_surface"] = None
    out["euclidean_claims"] = None
    try:
        sc = classify_structure(T, theta, cfg.eps_class)
    except (StructureError, ArithmeticError, RuntimeError) as exc:
        out["structure_error"] = str(exc)
        return out, False
    out["structure"] = sc.tag.value
    out["flip_present"] = sc.flip_present
    out["per_simplex_types"] = [{"tag": st.tag.value, "flipped_vertices": sorted(st.flipped_vertices)}
                                for st in sc.per_simplex_types]
    consistent = ec.passed
    if sc.flip_present and sc.tag in (StructureTag.EUCLIDEAN_TYPE, StructureTag.HS_STRUCTURE):
        try:
            surface = extract_flip_surface(T, theta, cfg.eps_class, sc)
        except StructureError as exc:
            out["structure_error"] = str(exc)
            return out, False
        out["flip_surface"] = surface.summary()
        if sc.tag is StructureTag.EUCLIDEAN_TYPE:
            out["euclidean_claims"] = verify_euclidean_claims(T, theta, surface, volume).as_dict()
    elif sc.tag is StructureTag.EUCLIDEAN_TYPE:
        out["euclidean_claims"] = {"volume": volume, "volume_over_2pi2": volume / (2 * math.pi ** 2),
                                   "passed": abs(volume) <= 1e-8}
    return out, consistent


def _theta_from_input(cfg: RunConfig, raw_input, n: int) -> np.ndarray:
    if cfg.theta_path:
        data = _read_json(cfg.theta_path)
        theta = data.get("theta") if isinstance(data, dict) else data
    else:
        theta = raw_input.get("theta") if isinstance(raw_input, dict) else None
    if theta is None:
        raise InputError("no angle vector: add a 'theta' list to the input or pass --theta")
    try:
        arr = np.asarray(theta, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"theta is not a list of numbers: {exc}") from exc
    if arr.shape != (6 * n,):
        raise InputError(f"theta must have {6 * n} entries (6 per tetrahedron), got shape {arr.shape}")
    return arr


def _base_report(cfg: RunConfig, T) -> dict:
    return {"command": cfg.command, "test_mode": cfg.test_mode, "triangulation": _triangulation_summary(T)}


# --------------------------------------------------------------------------
# commands


def cmd_check(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> tuple[int, dict]:
    T, _ = _load_triangulation(cfg)
    rep = _base_report(cfg, T)
    print(rep["triangulation"]["summary"], file=out)
    if not T.is_closed and not cfg.test_mode:
        print("triangulation has boundary", file=err)
        return EXIT_INVALID, rep
    return EXIT_OK, rep


def cmd_feasible(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> tuple[int, dict]:
    T, _ = _load_triangulation(cfg)
    C = polytope_constraints(T)
    rep = _base_report(cfg, T)
    theta, t_star = max_slack(C)
    t_star += 0.0  # no "-0" in reports
    rep["max_min_slack"] = t_star
    rep["feasible"] = t_star > 0 and theta is not None and C.strictly_feasible(theta)
    rep["theta"] = None if theta is None else list(theta)
    if not rep["feasible"]:
        print(InfeasibleError(t_star), file=err)
        return EXIT_INFEASIBLE, rep
    print(f"max-min slack t* = {t_star:.6g}", file=out)
    return EXIT_OK, rep


def cmd_maximize(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> tuple[int, dict]:
    T, _ = _load_triangulation(cfg)
    C = polytope_constraints(T)
    rep = _base_report(cfg, T)
    rep["options"] = cfg.options_dict()
    try:
        if cfg.seed is None:
            theta0 = feasible_point(T, C)
            rep["start"] = "max-min-slack point"
        else:
            theta0 = random_feasible_point(T, cfg.seed, C)
            rep["start"] = f"random point, seed {cfg.seed}"
    except InfeasibleError as exc:
        rep["max_min_slack"] = exc.t_star
        rep["feasible"] = False
        print(exc, file=err)
        return EXIT_INFEASIBLE, rep
    cp = find_critical(T, theta0, cfg.optimizer_options(), C)
    rep["converged"] = cp.converged
    rep["status"] = cp.status
    rep["iterations"] = cp.iterations
    rep["projected_gradient_norm"] = cp.projected_gradient_norm
    rep["volume"] = cp.volume
    rep["abs_volume"] = abs(cp.volume)
    rep["theta"] = list(cp.theta)
    analysis, consistent = _analyse(T, cp.theta, cfg, cp.volume)
    rep.update(analysis)
    print(f"{cp.status} after {cp.iterations} iterations, |Pg|max = {cp.projected_gradient_norm:.3g}, "
          f"V = {cp.volume:.12g}, structure {rep['structure']}", file=out)
    if not cp.converged or not consistent:
        return EXIT_NOT_CONVERGED, rep
    return EXIT_OK, rep


def cmd_classify(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> tuple[int, dict]:
    T, text = _load_triangulation(cfg)
    raw = json.loads(text)
    theta = _theta_from_input(cfg, raw, T.tet_count)
    C = polytope_constraints(T)
    rep = _base_report(cfg, T)
    bad = C.violations(theta)
    if bad:
        rep["violations"] = bad
        for line in bad:
            print(line, file=err)
        return EXIT_INVALID, rep
    q = QuadratureOptions(cfg.abs_tol)
    volume = total_volume(T, theta, q, cfg.eps_class)
    rep["theta"] = list(theta)
    rep["volume"] = volume
    rep["abs_volume"] = abs(volume)
    analysis, consistent = _analyse(T, theta, cfg, volume)
    rep.update(analysis)
    rep["consistent"] = consistent
    print(f"structure {rep['structure']}, V = {volume:.12g}, "
          f"edge consistency {'passed' if analysis['edge_consistency']['passed'] else 'FAILED'}", file=out)
    return EXIT_OK, rep


def cmd_report(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> tuple[int, None]:
    """Human-readable summary of a report written by another command."""
    rep = _read_json(cfg.input_path)
    if not isinstance(rep, dict) or "command" not in rep or "triangulation" not in rep:
        raise InputError(f"{cfg.input_path} is not an hsvol report")
    lines = [f"{rep['command']} report{' (test mode)' if rep.get('test_mode') else ''}",
             f"  triangulation: {rep['triangulation']['summary']}"]
    if "status" in rep:
        lines.append(f"  search: {rep['status']} after {rep['iterations']} iterations, "
                     f"|Pg|max = {rep['projected_gradient_norm']:.3g}")
    if "max_min_slack" in rep:
        lines.append(f"  max-min slack: {rep['max_min_slack']:.6g}")
    if rep.get("volume") is not None:
        v = rep["volume"]
        lines.append(f"  volume: {v:.12g} = {v / (2 * math.pi ** 2):.10g} x 2pi^2")
    if rep.get("structure"):
        lines.append(f"  structure: {rep['structure']}")
        tags = {}
        for st in rep["per_simplex_types"]:
            tags[st["tag"]] = tags.get(st["tag"], 0) + 1
        lines.append("  simplices: " + ", ".join(f"{n} {t}" for t, n in sorted(tags.items())))
    if rep.get("structure_error"):
        lines.append(f"  structure error: {rep['structure_error']}")
    if rep.get("edge_consistency"):
        ec = rep["edge_consistency"]
        lines.append(f"  edge consistency: max residual {ec['max_residual']:.3g} "
                     f"({'passed' if ec['passed'] else 'FAILED'} at {ec['length_tol']:.3g})")
    if rep.get("flip_surface"):
        for k, c in enumerate(rep["flip_surface"]["components"]):
            lines.append(f"  flip surface component {k}: V-E+F = {c['V']}-{c['E']}+{c['F']} = {c['chi']}, "
                         f"area {c['area']:.12g}")
    if rep.get("euclidean_claims") and "checks" in rep["euclidean_claims"]:
        checks = rep["euclidean_claims"]["checks"]
        lines.append("  claims: " + ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items()))
    print("\n".join(lines), file=out)
    return EXIT_OK, None


_HANDLERS = {"check": cmd_check, "feasible": cmd_feasible, "maximize": cmd_maximize,
             "classify": cmd_classify, "report": cmd_report}


# --------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsvol", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="triangulation JSON (a report for 'report')")
    p.add_argument("--output", help="write the JSON report here instead of stdout")
    p.add_argument("--config", help="JSON file with option defaults (keys as the long flags, '_' for '-')")
    p.add_argument("--grad-tol", type=float)
    p.add_argument("--length-tol", type=float)
    p.add_argument("--eps-class", type=float)
    p.add_argument("--abs-tol", type=float, help="volume quadrature absolute tolerance")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--seed", type=int, help="start from a random feasible point instead of the LP point")
    p.add_argument("--theta", dest="theta_path", help="angle vector JSON for 'classify'")
    p.add_argument("--test-mode", action="store_true", default=None,
                   help="allow unglued faces (kernel testing only; marked in reports)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"command", "input_path", "output_path"}


def make_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        data = _read_json(args.config)
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    try:
        return RunConfig(command=args.command, input_path=args.input, output_path=args.output, **values)
    except TypeError as exc:
        raise InputError(str(exc)) from exc


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = make_config(args)
        # stdout carries the JSON report unless it goes to a file
        out = stdout if cfg.output_path or cfg.command == "report" else stderr
        code, rep = _HANDLERS[cfg.command](cfg, out, stderr)
    except (InputError, TriangulationError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    if rep is not None:
        text = dumps(rep)
        if cfg.output_path:
            with open(cfg.output_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
