"""Command-line front-end.

Every subcommand reads one JSON document (a path, or standard input when
the path is omitted or ``-``) and writes one JSON document to standard
output. Exit status: 0 success, 2 bad input, 3 pipelines disagree or a
numeric result failed its certificate, 4 internal error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from fractions import Fraction
from itertools import combinations
from typing import Callable

from . import io
from .cayley import assemble_delta, build_cayley, repair_problem
from .critpoints import LogLikelihood, solve_critical, stationary_sum
from .dual_volume import amplitude_dual_volume, amplitude_triangulation, minkowski_polytope
from .errors import InputError, NotSaturated, ParseError, StringyError, VerificationError
from .exact import det_int, format_rational, parse_rational
from .gamma_series import DEFAULT_R, ghm_identity_check
from .polytope import dual_polytope
from .quadrature import DEFAULT_SCHEDULE, exponential_limit, extrapolate_amplitude, extrapolate_exponential
from .residue_pairing import Arrangement, arrangement_vertices, intersection_matrix, matrix_to_json
from .triangulate import Configuration, random_regular_triangulation, regular_triangulation, volume_check

log = logging.getLogger("stringy")

GROTHENDIECK_TOL = 1e-6
QUADRATURE_TOL = 1e-2
ALL_PIPELINES = ("triangulation", "dual_volume", "grothendieck", "quadrature")


def _read(path: str | None):
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return io.load_json(text)


def _schedule(text: str | None, options: dict) -> tuple[float, ...]:
    raw = text if text is not None else options.get("eps")
    if raw is None:
        return DEFAULT_SCHEDULE
    if isinstance(raw, str):
        raw = raw.split(",")
    try:
        return tuple(float(x) for x in raw)
    except (TypeError, ValueError):
        raise ParseError(f"cannot read epsilon schedule {raw!r}") from None


def _seed(args, options: dict) -> int:
    return args.seed if args.seed is not None else int(options.get("seed", 0))


def _exact(value: Fraction) -> dict:
    return {"exact": format_rational(value), "float": float(value)}


def _saturated(problem: io.Problem, repair: bool):
    """Cayley data for the triangulation route, repairing the lattice if asked."""
    try:
        return build_cayley(problem.qs), problem.qs, problem.u, 1
    except NotSaturated:
        if not repair:
            raise
    qs, u, q_mat = repair_problem(problem.qs, problem.v, problem.u)
    return build_cayley(qs), qs, u, abs(det_int(q_mat))


def _triangulation_pipeline(problem, seed, repair, options):
    cfg, _, u, index = _saturated(problem, repair)
    delta = assemble_delta(problem.v, u)
    if "lift" in options:
        t = regular_triangulation(cfg.configuration, [int(x) for x in options["lift"]])
    else:
        t = random_regular_triangulation(cfg.configuration, seed)
    result = amplitude_triangulation(cfg, delta, t)
    out = result.to_json()
    if index != 1:
        value = result.value / index
        out.update(_exact(value))
        out["lattice_index"] = index
    else:
        value = result.value
    return value, out


def _grothendieck_pipeline(problem, seed, exact):
    L = LogLikelihood(problem.qs, problem.u, problem.v)
    points = solve_critical(L, seed=seed, target=exact)
    total = stationary_sum(L, points)
    return total.real, {
        "value": total.real,
        "imag": total.imag,
        "points": len(points),
        "certified": exact is not None,
    }


def _guard(fn: Callable, *args):
    """Run one pipeline, turning its failure into a report entry."""
    start = time.perf_counter()
    try:
        value, entry = fn(*args)
        return value, entry, time.perf_counter() - start
    except VerificationError as exc:
        return None, {"error": type(exc).__name__, "message": str(exc)}, time.perf_counter() - start


def cmd_amplitude(args) -> tuple[dict, int]:
    problem = io.parse_problem(_read(args.file))
    seed = _seed(args, problem.options)
    if args.pipelines:
        wanted = [p.strip() for p in args.pipelines.split(",") if p.strip()]
        unknown = set(wanted) - set(ALL_PIPELINES)
        if unknown:
            raise ParseError(f"unknown pipelines {sorted(unknown)}")
    else:
        wanted = ["triangulation", "dual_volume"] + (["grothendieck"] if problem.n <= 2 else [])
    pipelines: dict = {}
    values: dict = {}
    timings: dict = {}
    # the dual-volume route checks interiority first, so bad input fails fast
    start = time.perf_counter()
    dual = amplitude_dual_volume(problem.qs, problem.v, problem.u)
    timings["dual_volume"] = time.perf_counter() - start
    exact = dual.value
    if "dual_volume" in wanted:
        pipelines["dual_volume"] = dual.to_json()
        values["dual_volume"] = exact
    if "triangulation" in wanted:
        value, entry, timings["triangulation"] = _guard(
            _triangulation_pipeline, problem, seed, args.repair, problem.options
        )
        pipelines["triangulation"] = entry
        values["triangulation"] = value
    if "grothendieck" in wanted:
        value, entry, timings["grothendieck"] = _guard(_grothendieck_pipeline, problem, seed, exact)
        pipelines["grothendieck"] = entry
        values["grothendieck"] = value
    if "quadrature" in wanted:
        schedule = _schedule(args.eps, problem.options)

        def run():
            report = extrapolate_amplitude(problem.qs, problem.v, problem.u, schedule, seed=seed)
            return report.extrapolated, report.to_json()

        value, entry, timings["quadrature"] = _guard(run)
        pipelines["quadrature"] = entry
        values["quadrature"] = value

    agree = _agreement(exact, values)
    report = {
        **_exact(exact),
        "pipelines": pipelines,
        "agreement": agree,
        "provenance": {"seed": seed},
        "timings": timings,
    }
    if "triangulation" in pipelines and "triangulation" in pipelines["triangulation"]:
        report["provenance"]["lift"] = pipelines["triangulation"]["triangulation"]["lift"]
    return report, 0 if agree else 3


def _agreement(exact: Fraction, values: dict) -> bool:
    for name, value in values.items():
        if value is None:
            return False
        if name in ("triangulation", "dual_volume"):
            if value != exact:
                return False
        else:
            tol = GROTHENDIECK_TOL if name == "grothendieck" else QUADRATURE_TOL
            if abs(value - float(exact)) > tol * abs(float(exact)):
                return False
    return True


def cmd_dual_volume(args) -> tuple[dict, int]:
    problem = io.parse_problem(_read(args.file))
    result = amplitude_dual_volume(problem.qs, problem.v, problem.u)
    poly = minkowski_polytope(problem.qs, problem.v)
    return {
        **_exact(result.value),
        "polytope": poly.to_json(),
        "dual": dual_polytope(poly, problem.u).to_json(),
    }, 0


def cmd_triangulate(args) -> tuple[dict, int]:
    data = _read(args.file)
    if isinstance(data, dict) and "points" in data:
        try:
            config = Configuration([[int(x) for x in p] for p in data["points"]])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise ParseError("'points' must be a list of integer vectors") from None
        options = data.get("options", {})
    else:
        problem = io.parse_problem(data)
        config = build_cayley(problem.qs).configuration
        options = problem.options
    seed = _seed(args, options)
    lift = data.get("lift") if isinstance(data, dict) else None
    if lift is not None:
        t = regular_triangulation(config, [int(x) for x in lift])
    else:
        t = random_regular_triangulation(config, seed)
    return {
        "columns": [list(p) for p in config.points],
        "triangulation": t.to_json(),
        "volume": volume_check(t),
        "provenance": {"seed": seed},
    }, 0


def cmd_crit(args) -> tuple[dict, int]:
    problem = io.parse_problem(_read(args.file))
    seed = _seed(args, problem.options)
    exact = amplitude_dual_volume(problem.qs, problem.v, problem.u).value
    L = LogLikelihood(problem.qs, problem.u, problem.v)
    points = solve_critical(L, seed=seed, target=exact)
    total = stationary_sum(L, points)
    certified = abs(total - float(exact)) <= GROTHENDIECK_TOL * float(exact)
    return {
        "points": [p.to_json() for p in points],
        "stationary_sum": total.real,
        "stationary_sum_imag": total.imag,
        "exact": format_rational(exact),
        "certified": certified,
        "provenance": {"seed": seed},
    }, 0 if certified else 3


def cmd_arrangement(args) -> tuple[dict, int]:
    data = _read(args.file)
    try:
        arr = Arrangement.from_json(data)
        if "basis" in data:
            basis = [tuple(int(h) - 1 for h in form) for form in data["basis"]]
        else:
            finite = [h for h in range(len(arr.hyperplanes)) if h != arr.infinity]
            basis = list(combinations(finite, arr.n))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed arrangement file: {exc}") from None
    matrix = intersection_matrix(arr, basis)
    size = len(matrix)
    return {
        "n": arr.n,
        "basis": [[h + 1 for h in form] for form in basis],
        "vertices": len(arrangement_vertices(arr)),
        "matrix": matrix_to_json(matrix),
        "symmetric": all(matrix[i][j] == matrix[j][i] for i in range(size) for j in range(size)),
    }, 0


def cmd_stringy(args) -> tuple[dict, int]:
    problem = io.parse_problem(_read(args.file))
    schedule = _schedule(args.eps, problem.options)
    report = extrapolate_amplitude(problem.qs, problem.v, problem.u, schedule, seed=_seed(args, problem.options))
    return report.to_json(), 0


def cmd_exp_volume(args) -> tuple[dict, int]:
    data = _read(args.file)
    try:
        n = int(data["n"])
        p = io.parse_poly(n, data["p"]["terms"], "p")
        x = [parse_rational(c) for c in data["X"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"exp-volume file needs 'n', 'p' with 'terms' and 'X': {exc}") from None
    if len(x) != n:
        raise ParseError(f"'X' must list {n} rationals")
    options = data.get("options", {})
    factor, volume = exponential_limit(p, x, _seed(args, options))
    report = extrapolate_exponential(p, x, _schedule(args.eps, options))
    return {
        **report.to_json(),
        "limit": {"exp_factor": factor, "cone_volume": format_rational(volume), "float": factor * float(volume)},
    }, 0


def cmd_gamma_series(args) -> tuple[dict, int]:
    problem = io.parse_problem(_read(args.file))
    options = problem.options
    cfg = build_cayley(problem.qs)
    if "lift" in options:
        t = regular_triangulation(cfg.configuration, [int(x) for x in options["lift"]])
    else:
        t = random_regular_triangulation(cfg.configuration, _seed(args, options))
    if "z" in options:
        z = [io.parse_complex(c) for c in options["z"]]
    else:
        z = [complex(float(c)) for c in cfg.coefficients]
    if len(z) != len(cfg):
        raise ParseError(f"'z' must have {len(cfg)} entries, one per Cayley column")
    order = args.order if args.order is not None else int(options.get("order", 20))
    radius = parse_rational(options["R"]) if "R" in options else DEFAULT_R
    check = ghm_identity_check(problem.qs, problem.v, problem.u, z, t, order, radius)
    return {
        **check.to_json(),
        "order": order,
        "R": format_rational(radius),
        "triangulation": t.to_json(),
    }, 0


COMMANDS = {
    "amplitude": cmd_amplitude,
    "dual-volume": cmd_dual_volume,
    "triangulate": cmd_triangulate,
    "crit": cmd_crit,
    "arrangement": cmd_arrangement,
    "stringy": cmd_stringy,
    "exp-volume": cmd_exp_volume,
    "gamma-series": cmd_gamma_series,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stringy", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file", nargs="?", help="problem JSON (default: standard input)")
        p.add_argument("--seed", type=int, help="seed for triangulations and root finding")
        p.add_argument("--pretty", action="store_true", help="print a human-readable table instead of JSON")
        if name in ("amplitude", "stringy", "exp-volume"):
            p.add_argument("--eps", help="comma-separated decreasing epsilon schedule")
        if name == "amplitude":
            p.add_argument("--pipelines", help=f"comma-separated subset of {','.join(ALL_PIPELINES)}")
            p.add_argument("--repair", action="store_true", help="repair a non-saturated lattice instead of failing")
        if name == "gamma-series":
            p.add_argument("--order", type=int, help="truncation order of the series")
    return parser


def _pretty(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            lines.extend(_pretty(v, f"{prefix}{k}."))
        return lines
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        lines = []
        for i, v in enumerate(obj):
            lines.extend(_pretty(v, f"{prefix}{i + 1}."))
        return lines
    return [f"{prefix[:-1]:<40} {io.dumps(obj, indent=None)}"]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    args.__dict__.setdefault("eps", None)
    args.__dict__.setdefault("pipelines", None)
    args.__dict__.setdefault("repair", False)
    args.__dict__.setdefault("order", None)
    try:
        report, code = COMMANDS[args.command](args)
    except StringyError as exc:
        report, code = {"error": type(exc).__name__, "message": str(exc)}, exc.exit_code
        print(f"stringy: {type(exc).__name__}: {exc}", file=sys.stderr)
    except Exception as exc:  # noqa: BLE001 - the exit-code contract needs a catch-all
        log.exception("internal error")
        report, code = {"error": "InternalError", "message": str(exc)}, 4
    if args.pretty:
        print("\n".join(_pretty(report)))
    else:
        print(io.dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
