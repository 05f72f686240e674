"""Command-line surface: solve, curve, bound, check, verify, energy-sign.

Potential shapes are described by JSON documents; curves are written as
CSV with a fixed "E,v,status" header and 17 significant digits.  Exit
codes: 0 success, 2 invalid input, 3 no bound state, 4 numeric failure,
5 ordering violation (a genuine counterexample signal).  All commands are
deterministic given the spec document and flags.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from . import comparison, potentials, solver
from .errors import (
    BoundBuilderError,
    ClassViolation,
    ConditionInapplicable,
    GroundStateRequired,
    InvalidBracket,
    InvalidQuery,
    KgError,
    NoBoundState,
    NotCoulombLike,
    SingularEvaluation,
    StateIdentificationFailure,
    SupercriticalCoupling,
)
from .solver import SolverSettings, SpectralCurve, SpectralQuery

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NO_BOUND_STATE = 3
EXIT_NUMERIC_FAILURE = 4
EXIT_ORDERING_VIOLATION = 5

_INPUT_ERRORS = (
    InvalidQuery,
    ClassViolation,
    BoundBuilderError,
    NotCoulombLike,
    ConditionInapplicable,
    GroundStateRequired,
    SingularEvaluation,
    ValueError,
    KeyError,
    json.JSONDecodeError,
    OSError,
)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, _INPUT_ERRORS):
        return EXIT_INVALID_INPUT
    if isinstance(exc, NoBoundState):
        return EXIT_NO_BOUND_STATE
    if isinstance(exc, (KgError, ArithmeticError)):
        return EXIT_NUMERIC_FAILURE
    raise exc


def atomic_write(path: Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_spec(path: str):
    with open(path) as handle:
        doc = json.load(handle)
    return doc


def curve_to_csv(curve: SpectralCurve) -> str:
    lines = ["E,v,status"]
    for p in curve.points:
        v = "" if p.coupling is None else format(p.coupling, ".17g")
        lines.append(f"{format(p.energy, '.17g')},{v},{p.status}")
    return "\n".join(lines) + "\n"


def csv_to_curve(text: str) -> SpectralCurve:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != "E,v,status":
        raise ValueError("curve file must start with the header 'E,v,status'")
    points = []
    for ln in lines[1:]:
        e, v, status = ln.split(",", 2)
        points.append(
            solver.CurvePoint(float(e), float(v) if v else None, status)
        )
    return SpectralCurve(points)


def _settings_from_args(args) -> SolverSettings:
    kwargs = {}
    if getattr(args, "mesh_step", None) is not None:
        kwargs["core_step"] = args.mesh_step
    if getattr(args, "dv", None) is not None:
        kwargs["bracket_dv"] = args.dv
    if getattr(args, "tol", None) is not None:
        kwargs["root_tol"] = args.tol
    if getattr(args, "max_coupling", None) is not None:
        kwargs["max_coupling"] = args.max_coupling
    return SolverSettings(**kwargs)


def _query_from_args(args, dimension: int, energy: float) -> SpectralQuery:
    return SpectralQuery(
        energy=energy,
        mass=args.mass,
        dimension=dimension,
        angular_index=getattr(args, "l", 0) or 0,
        parity=getattr(args, "parity", None) if dimension == 1 else None,
        node_target=getattr(args, "nodes", 0) or 0,
    )


def _resolve_spec(args, path: str):
    """Load, apply a --dim override, and validate a potential document."""
    doc = load_spec(path)
    dim_override = getattr(args, "dim", None)
    if dim_override is not None:
        doc = dict(doc)
        doc["dimension"] = dim_override
        doc["class"] = "P" if dim_override == 1 else "Pd"
    shape, class_name, dimension = potentials.from_document(doc)
    return shape, doc, dimension


def _energy_grid(args) -> list[float]:
    if args.points < 1:
        raise ValueError("--points must be >= 1")
    if not (-args.mass < args.emin < args.emax < args.mass):
        raise ValueError("energy grid must satisfy -m < emin < emax < m")
    return [float(E) for E in np.linspace(args.emin, args.emax, args.points)]


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")
    p.add_argument("--mesh-step", type=float, default=None, help="core mesh step")
    p.add_argument("--dv", type=float, default=None, help="coupling scan step")
    p.add_argument("--tol", type=float, default=None, help="root tolerance (relative)")
    p.add_argument("--max-coupling", type=float, default=None, help="scan cap for v")


def cmd_solve(args) -> int:
    shape, doc, dimension = _resolve_spec(args, args.spec)
    query = _query_from_args(args, dimension, args.energy)
    settings = _settings_from_args(args)
    sol = solver.solve_coupling(shape, query, settings)

    if args.wavefunction:
        rows = ["x,phi"]
        rows += [
            f"{format(float(x), '.17g')},{format(float(w), '.17g')}"
            for x, w in zip(sol.x, sol.wavefunction)
        ]
        atomic_write(Path(args.wavefunction), "\n".join(rows) + "\n")

    if args.format == "json":
        payload = {
            "input": {
                "potential": doc,
                "energy": args.energy,
                "mass": args.mass,
                "dimension": dimension,
                "angular_index": query.angular_index,
                "parity": query.parity,
                "node_target": query.node_target,
            },
            "result": {
                "coupling": sol.coupling,
                "kappa": sol.kappa,
                "node_count": sol.node_count,
                "residual": sol.residual,
                "norm": sol.diagnostics.norm,
                "tail_slope": sol.diagnostics.tail_slope,
            },
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"v = {sol.coupling:.12g}")
        print(
            f"kappa = {sol.kappa:.12g}  nodes = {sol.node_count}  "
            f"residual = {sol.residual:.3g}  norm = {sol.diagnostics.norm:.12g}"
        )
    return EXIT_OK


def cmd_curve(args) -> int:
    shape, _, dimension = _resolve_spec(args, args.spec)
    energies = _energy_grid(args)
    settings = _settings_from_args(args)
    curve = solver.sweep_curve(
        shape,
        energies,
        mass=args.mass,
        dimension=dimension,
        parity=args.parity if dimension == 1 else None,
        angular_index=args.l if dimension > 1 else 0,
        node_target=args.nodes,
        settings=settings,
    )
    atomic_write(Path(args.out), curve_to_csv(curve))
    failures = sum(1 for p in curve.points if p.status != "ok")
    print(f"wrote {len(curve)} points to {args.out} ({failures} failures)")
    return EXIT_OK


def cmd_bound(args) -> int:
    shape, doc, dimension = _resolve_spec(args, args.spec)
    if dimension != 1:
        raise ValueError("bound construction applies to the one-dimensional class")
    if args.energy is not None:
        energies = [args.energy]
    else:
        energies = _energy_grid(args)
    settings = _settings_from_args(args)
    report = comparison.build_bound_report(shape, energies, mass=args.mass, settings=settings)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write(out / "lower.json", json.dumps(
        potentials.to_document(report.lower_shape), indent=2, sort_keys=True) + "\n")
    atomic_write(out / "upper.json", json.dumps(
        potentials.to_document(report.upper_shape), indent=2, sort_keys=True) + "\n")

    def one_curve(get) -> str:
        pts = [solver.CurvePoint(r.energy, get(r), "ok" if get(r) is not None else "failed")
               for r in report.rows]
        return curve_to_csv(SpectralCurve(pts))

    atomic_write(out / "curve_lower.csv", one_curve(lambda r: r.v_lower))
    atomic_write(out / "curve.csv", one_curve(lambda r: r.v))
    atomic_write(out / "curve_upper.csv", one_curve(lambda r: r.v_upper))

    summary = {
        "lower": potentials.to_document(report.lower_shape),
        "upper": potentials.to_document(report.upper_shape),
        "equal_area_residuals": {
            "lower": report.lower_residual,
            "upper": report.upper_residual,
        },
        "rows": [
            {"E": r.energy, "v_lower": r.v_lower, "v": r.v, "v_upper": r.v_upper,
             "status": r.status}
            for r in report.rows
        ],
        "ordered": report.ordered,
    }
    atomic_write(out / "report.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for r in report.rows:
        fmt = lambda v: "-" if v is None else f"{v:.6g}"
        print(f"E = {r.energy:+.6g}: {fmt(r.v_lower)} <= {fmt(r.v)} <= {fmt(r.v_upper)}")
    print(f"ordered: {report.ordered}")
    return EXIT_OK


def _load_pair(args) -> comparison.ComparisonPair:
    shape1, _, dim1 = _resolve_spec(args, args.spec1)
    shape2, _, dim2 = _resolve_spec(args, args.spec2)
    if dim1 != dim2:
        raise ValueError(f"class mismatch: dimensions {dim1} and {dim2}")
    return comparison.ComparisonPair(shape1, shape2, dimension=dim1)


def cmd_check(args) -> int:
    pair = _load_pair(args)
    if args.condition == "mu":
        profile = comparison.condition_mu(pair)
    elif args.condition == "eta":
        profile = comparison.condition_eta(pair)
    else:
        if args.energy is None:
            raise ValueError("rho/sigma conditions need --energy for the ground state")
        query = SpectralQuery(energy=args.energy, mass=args.mass, dimension=pair.dimension)
        ground_shape = pair.f1 if args.ground_of == 1 else pair.f2
        sol = solver.solve_coupling(ground_shape, query, _settings_from_args(args))
        profile = comparison.condition_rho_sigma(pair, args.ground_of, sol)

    if args.profile:
        rows = ["x,value"]
        rows += [
            f"{format(float(x), '.17g')},{format(float(v), '.17g')}"
            for x, v in zip(profile.x, profile.values)
        ]
        atomic_write(Path(args.profile), "\n".join(rows) + "\n")

    crossings = ", ".join(f"{c:.6g}" for c in profile.crossings) or "none"
    print(f"condition {profile.kind}: {profile.verdict}")
    print(f"min = {profile.min_value:.6g}  total = {profile.total:.6g}  crossings: {crossings}")
    return EXIT_OK


def cmd_verify(args) -> int:
    pair = _load_pair(args)
    energies = _energy_grid(args)
    report = comparison.verify_ordering(
        pair, args.condition, energies, mass=args.mass,
        settings=_settings_from_args(args),
    )
    print(f"condition {args.condition}: {report.condition.verdict}")
    for row in report.rows:
        fmt = lambda v: "-" if v is None else f"{v:.8g}"
        status = "vacuous" if row.ordered is None else ("ok" if row.ordered else "VIOLATED")
        print(f"E = {row.energy:+.6g}: v1 = {fmt(row.v1)}  v2 = {fmt(row.v2)}  {status}")
    if not report.all_ordered:
        print(f"ordering violated at {len(report.violations)} point(s)")
        return EXIT_ORDERING_VIOLATION
    print("ordering holds at every solvable point")
    return EXIT_OK


def cmd_energy_sign(args) -> int:
    shape, _, dimension = _resolve_spec(args, args.spec)
    if getattr(args, "dim", None) is not None:
        dimension = args.dim
    if not (args.emin < args.emax <= 0.0):
        raise ValueError("energy-sign scan needs emin < emax <= 0")
    if args.points < 1:
        raise ValueError("--points must be >= 1")
    energies = [float(E) for E in np.linspace(args.emin, args.emax, args.points)]
    report = comparison.energy_sign_scan(
        shape, dimension, energies, _settings_from_args(args)
    )
    print(f"threshold (d-2)/2 = {report.threshold:g}")
    for row in report.rows:
        if row.violation_coupling is None:
            print(f"E = {row.energy:+.6g}: no state with v <= {row.certified_above:g}")
        else:
            print(f"E = {row.energy:+.6g}: VIOLATION, bound state at v = {row.violation_coupling:.8g}")
    if not report.confirmed:
        return EXIT_ORDERING_VIOLATION
    print(f"confirmed: G(E) > {report.threshold:g} on the grid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgcouple",
        description="Coupling eigenvalues and spectral comparison bounds for "
        "attractive Klein-Gordon potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="coupling eigenvalue at fixed energy")
    p.add_argument("spec", help="potential spec JSON")
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--l", type=int, default=0, help="angular index (d >= 2)")
    p.add_argument("--parity", choices=("even", "odd"), default=None)
    p.add_argument("--nodes", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--wavefunction", default=None, help="write (x, phi) samples to CSV")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("curve", help="coupling curve over an energy grid")
    p.add_argument("spec")
    p.add_argument("--emin", type=float, required=True)
    p.add_argument("--emax", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--parity", choices=("even", "odd"), default=None)
    p.add_argument("--nodes", type=int, default=0)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("bound", help="equal-area square-well/exponential bounds")
    p.add_argument("spec")
    p.add_argument("--energy", type=float, default=None)
    p.add_argument("--emin", type=float, default=None)
    p.add_argument("--emax", type=float, default=None)
    p.add_argument("--points", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dim", type=int, default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("check", help="condition-integral profile for a pair")
    p.add_argument("spec1")
    p.add_argument("spec2")
    p.add_argument("--condition", choices=("mu", "eta", "rho", "sigma"), required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--energy", type=float, default=None, help="for rho/sigma")
    p.add_argument("--ground-of", type=int, choices=(1, 2), default=1)
    p.add_argument("--profile", default=None, help="write profile samples to CSV")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="coupling ordering across an energy grid")
    p.add_argument("spec1")
    p.add_argument("spec2")
    p.add_argument("--condition", choices=("mu", "eta"), required=True)
    p.add_argument("--emin", type=float, required=True)
    p.add_argument("--emax", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--dim", type=int, default=None)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("energy-sign", help="coupling floor for Coulomb-like shapes at E <= 0")
    p.add_argument("spec")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--emin", type=float, required=True)
    p.add_argument("--emax", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_energy_sign)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the input-error code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single exit-code funnel
        code = exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


def entry() -> None:  # console-script wrapper
    sys.exit(main())


if __name__ == "__main__":
    entry()
