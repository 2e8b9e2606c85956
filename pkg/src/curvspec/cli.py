"""Command-line front end: ``curvspec <command> [options]``.

Exit status is 0 on success, 1 when ``check`` finds a deviation, 2 on
input errors and 3 on numerical failures such as a singular point.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .cases import builtin, catalog_names, run_checks
from .errors import CurvspecError, InputError, NumericalError
from .geometry import MetricSpec, invariants, load_metric, metric_to_dict, riemann, sectional
from .jacobi import integrate_geodesic, integrate_jacobi
from .meig import SolveOptions, distinct_thetas, solve_meig
from .spectra import assemble_pencil, classical_eigen, vacuum_block_check

COMMANDS = ("curvature", "classical", "meig", "sectional", "jacobi", "check")
STARTS_ENV = "CURVSPEC_STARTS"


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="curvspec", description="Curvature tensors and their eigenproblems.")
    parser.add_argument("--version", action="version", version=f"curvspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    common = _ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", metavar="NAME", help=f"catalog metric: {', '.join(catalog_names())}")
    source.add_argument("--metric", metavar="FILE", help="metric file (JSON document)")
    common.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="repeatable")
    common.add_argument("--at", metavar="C=V,...", help="point, e.g. t=0,r=3,theta=1.2,phi=0")
    common.add_argument("--format", choices=("text", "json"), default="text")

    solver = _ArgumentParser(add_help=False)
    solver.add_argument("--starts", type=int, default=None, help=f"multi-start count (env {STARTS_ENV})")
    solver.add_argument("--seed", type=int, default=0)
    solver.add_argument("--tol", type=float, default=1e-12)
    solver.add_argument("--max-iter", type=int, default=100)
    solver.add_argument("--modified", action="store_true", help="require g(u,v)=0")
    solver.add_argument("--sigma-u", type=int, choices=(-1, 1), default=1)
    solver.add_argument("--sigma-v", type=int, choices=(-1, 1), default=1)

    sub.add_parser("curvature", parents=[common], help="Ricci, scalar, Kretschmann, Riemann components")
    sub.add_parser("classical", parents=[common], help="pair-index pencil eigenvalues")
    sub.add_parser("meig", parents=[common, solver], help="M-eigenpairs by multi-start Newton")
    sec = sub.add_parser("sectional", parents=[common], help="sectional curvature of span{u,v}")
    sec.add_argument("--u", required=True, metavar="V0,V1,...")
    sec.add_argument("--v", required=True, metavar="V0,V1,...")
    jac = sub.add_parser("jacobi", parents=[common], help="geodesic and Jacobi field by RK4")
    jac.add_argument("--u0", required=True, metavar="V0,V1,...", help="initial tangent")
    jac.add_argument("--v0", required=True, metavar="V0,V1,...", help="initial deviation")
    jac.add_argument("--w0", required=True, metavar="V0,V1,...", help="initial covariant derivative of v")
    jac.add_argument("--t-max", type=float, required=True)
    jac.add_argument("--steps", type=int, default=1000)
    jac.add_argument("--csv", metavar="FILE", help="write the trajectory as CSV")
    sub.add_parser("check", parents=[common, solver], help="compare a catalog metric with its closed forms")
    return parser


# --------------------------------------------------------------------------
# Argument decoding
# --------------------------------------------------------------------------


def _parse_params(items: Sequence[str]) -> dict[str, float]:
    params: dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise InputError(f"--param {item!r}: expected KEY=VALUE")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"--param {item!r}: {value!r} is not a number") from None
    return params


def _parse_vector(flag: str, text: str, n: int) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise InputError(f"{flag} {text!r}: expected {n} comma-separated numbers") from None
    if len(values) != n:
        raise InputError(f"{flag}: expected {n} components, got {len(values)}")
    return np.array(values)


def _parse_point(text: str | None, spec: MetricSpec, default) -> np.ndarray:
    if text is None:
        if default is None:
            raise InputError(f"--at is required; coordinates are {', '.join(spec.coords)}")
        return np.asarray(default, dtype=float)
    values: dict[str, float] = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep:
            raise InputError(f"--at item {item!r}: expected COORD=VALUE")
        if key not in spec.coords:
            raise InputError(f"--at: {key!r} is not a coordinate of {spec.name} ({', '.join(spec.coords)})")
        if key in values:
            raise InputError(f"--at: coordinate {key!r} given twice")
        try:
            values[key] = float(value)
        except ValueError:
            raise InputError(f"--at {key}={value!r}: not a number") from None
    missing = [c for c in spec.coords if c not in values]
    if missing:
        raise InputError(f"--at: missing coordinates {', '.join(missing)}")
    return np.array([values[c] for c in spec.coords])


def _load(args) -> tuple[MetricSpec, Any, dict]:
    params = _parse_params(args.param)
    if args.builtin is not None:
        entry = builtin(args.builtin, params)
        return entry.spec, entry, {"source": "builtin", "builtin": args.builtin}
    spec = load_metric(args.metric)
    if params:
        spec = spec.with_params(**params)
    return spec, None, {"source": "file", "path": args.metric}


def _solve_options(args) -> SolveOptions:
    starts = args.starts
    if starts is None:
        env = os.environ.get(STARTS_ENV)
        if env:
            try:
                starts = int(env)
            except ValueError:
                raise InputError(f"{STARTS_ENV}={env!r} is not an integer") from None
        else:
            starts = SolveOptions.starts
    return SolveOptions(
        starts=starts,
        seed=args.seed,
        tol=args.tol,
        max_iter=args.max_iter,
        sigma_u=args.sigma_u,
        sigma_v=args.sigma_v,
        modified=args.modified,
    )


# --------------------------------------------------------------------------
# Commands. Each returns (results, residuals, exit code).
# --------------------------------------------------------------------------


def _independent_components(r_down: np.ndarray, tiny: float = 1e-14) -> list[list]:
    n = r_down.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rows = []
    for a, (i, j) in enumerate(pairs):
        for k, l in pairs[a:]:
            value = float(r_down[i, j, k, l])
            if abs(value) > tiny:
                rows.append([i, j, k, l, value])
    return rows


def _cmd_curvature(args, spec, entry, x):
    rt = riemann(spec, x)
    inv = invariants(rt)
    results = {
        "metric": rt.g.tolist(),
        "det": rt.metric_jet.det,
        "scalar": inv.scalar,
        "kretschmann": inv.kretschmann,
        "ricci": inv.ricci.tolist(),
        "ricci_max_abs": float(np.max(np.abs(inv.ricci))),
        "riemann_down": _independent_components(rt.r_down),
    }
    return results, rt.symmetry.as_dict(), 0


def _cmd_classical(args, spec, entry, x):
    rt = riemann(spec, x)
    pencil = assemble_pencil(rt)
    pairs = classical_eigen(pencil)
    results: dict[str, Any] = {
        "pairs": [list(p) for p in pencil.basis.pairs],
        "zeta": [[p.zeta.real, p.zeta.imag] for p in pairs],
    }
    residuals = {"max_eigen_residual": max((p.residual for p in pairs), default=0.0)}
    if rt.n == 4:
        report = vacuum_block_check(rt)
        results["vacuum_block"] = {
            "signs": report.signs.tolist(),
            "kappa": report.kappa,
            "m_block": report.m_block.tolist(),
            "n_block": report.n_block.tolist(),
        }
        residuals.update(
            structure=report.max_structure_residual,
            trace_n=report.trace_n,
            trace_m_plus_kappa=report.trace_m_plus_kappa,
        )
    return results, residuals, 0


def _cmd_meig(args, spec, entry, x):
    rt = riemann(spec, x)
    pairs = solve_meig(rt, _solve_options(args))
    results = {
        "modified": args.modified,
        "count": len(pairs),
        "theta": distinct_thetas(pairs),
        "pairs": [
            {
                "theta": p.theta,
                "u": p.u.tolist(),
                "v": p.v.tolist(),
                "norm_u": p.norm_u,
                "norm_v": p.norm_v,
                "ortho": p.ortho,
                "lambda_mu_gap": p.lambda_mu_gap,
            }
            for p in pairs
        ],
    }
    residuals = {"max_residual": max((p.residual for p in pairs), default=0.0)}
    return results, residuals, 0


def _cmd_sectional(args, spec, entry, x):
    rt = riemann(spec, x)
    u = _parse_vector("--u", args.u, spec.n)
    v = _parse_vector("--v", args.v, spec.n)
    return {"sectional": sectional(rt, u, v)}, rt.symmetry.as_dict(), 0


def _cmd_jacobi(args, spec, entry, x):
    n = spec.n
    u0 = _parse_vector("--u0", args.u0, n)
    v0 = _parse_vector("--v0", args.v0, n)
    w0 = _parse_vector("--w0", args.w0, n)
    if args.steps < 1:
        raise InputError("--steps must be >= 1")
    geo = integrate_geodesic(spec, x, u0, args.t_max, args.steps)
    traj = integrate_jacobi(spec, geo, v0, w0)
    if args.csv:
        traj.to_csv(args.csv)
    norms = traj.geodesic.norms()
    results = {
        "t_max": args.t_max,
        "steps": args.steps,
        "x_final": traj.geodesic.x[-1].tolist(),
        "u_final": traj.geodesic.u[-1].tolist(),
        "v_final": traj.v[-1].tolist(),
        "norm_v_final": float(traj.norm_v[-1]),
        "norm_v_max": float(np.max(traj.norm_v)),
    }
    residuals = {"tangent_norm_drift": float(np.max(np.abs(norms - norms[0])))}
    return results, residuals, 0


def _cmd_check(args, spec, entry, x):
    if entry is None:
        raise InputError("check needs --builtin; metric files carry no closed-form values")
    # catalog M-eigen oracles refer to the modified problem
    args.modified = True
    report = run_checks(entry, x, _solve_options(args))
    ok = report.ok()
    results = {
        "ok": ok,
        "rows": [
            {"name": r.name, "expected": r.expected, "computed": r.computed, "abs_dev": r.abs_dev}
            for r in report.rows
        ],
    }
    residuals = dict(report.symmetry)
    residuals["max_abs_dev"] = report.max_abs_dev
    return results, residuals, 0 if ok else 1


_COMMANDS = {
    "curvature": _cmd_curvature,
    "classical": _cmd_classical,
    "meig": _cmd_meig,
    "sectional": _cmd_sectional,
    "jacobi": _cmd_jacobi,
    "check": _cmd_check,
}


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in value.items()) + "}"
    return str(value)


_TEXT_PAIRS = 8


def _emit_text(doc: dict, out) -> None:
    meta = doc["metric"]
    point = ", ".join(f"{k}={_fmt(v)}" for k, v in doc["point"].items())
    print(f"{doc['command']}: {meta['name']} at {point}", file=out)
    for section in ("results", "residuals"):
        print(f"[{section}]", file=out)
        for key, value in doc[section].items():
            if key == "rows":
                for row in value:
                    print(
                        f"  {row['name']:<28} expected {_fmt(row['expected']):>20}"
                        f"  computed {_fmt(row['computed']):>20}  |dev| {_fmt(row['abs_dev'])}",
                        file=out,
                    )
            elif key == "pairs" and value and isinstance(value[0], dict):
                for p in value[:_TEXT_PAIRS]:
                    print(f"  theta={_fmt(p['theta'])} u={_fmt(p['u'])} v={_fmt(p['v'])}", file=out)
                if len(value) > _TEXT_PAIRS:
                    print(f"  ... {len(value) - _TEXT_PAIRS} more (use --format json)", file=out)
            else:
                print(f"  {key}: {_fmt(value)}", file=out)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        spec, entry, origin = _load(args)
        x = _parse_point(args.at, spec, entry.default_point if (entry is not None and args.command == "check") else None)
        results, residuals, code = _COMMANDS[args.command](args, spec, entry, x)
    except InputError as exc:
        print(f"curvspec: input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"curvspec: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (OSError, CurvspecError) as exc:
        print(f"curvspec: {exc}", file=sys.stderr)
        return 2
    doc = {
        "command": args.command,
        "metric": {**metric_to_dict(spec), **origin},
        "point": {c: float(v) for c, v in zip(spec.coords, x)},
        "results": results,
        "residuals": {k: float(v) for k, v in residuals.items()},
        "version": __version__,
    }
    if args.format == "json":
        json.dump(doc, sys.stdout, default=_json_default, indent=2)
        sys.stdout.write("\n")
    else:
        _emit_text(doc, sys.stdout)
    return code


def run() -> None:
    sys.exit(main())
