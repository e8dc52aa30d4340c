"""Command-line front end.

Every command reads one JSON problem file and prints a JSON report with
sorted keys and exact ``"p/q"`` scalars.  Exit codes: 0 answered/verified,
1 hypothesis failure or inconclusive, 2 input error.
"""

from __future__ import annotations

import argparse
import sys

from . import problem
from .diffcalc import DiffChain, GridFunction, GridWindow, apply_chain_exppoly, apply_chain_grid
from .exppoly import ExpPoly, Frequency
from .groups import INFINITE, GroupSpec, element_from_json, snf_divisors, subgroup_index
from .montel import (DEFAULT_DEGREE_CAP, DEFAULT_MAX_TUPLES, HypothesisError, MontelSystem,
                     TupleLimitError, counterexample, reduction_trace, verify_montel)
from .scalar import Scalar
from .solver import ansatz_functions, window_kernel, polynomial_ansatz_solve

EXIT_OK, EXIT_FINDING, EXIT_INPUT = 0, 1, 2


def _exppoly(data, num_vars: int | None = None) -> ExpPoly:
    return ExpPoly.from_json(data, num_vars)


def cmd_generates(doc: dict, args) -> tuple[int, dict]:
    group = GroupSpec.from_json(doc["group"])
    steps = [element_from_json(group, h) for h in doc["steps"]]
    index = subgroup_index(group, steps)
    return EXIT_OK, {
        "generates": index == 1,
        "index": "infinite" if index == INFINITE else index,
        "snf_divisors": snf_divisors(group, steps),
    }


def cmd_apply(doc: dict, args) -> tuple[int, dict]:
    chain_steps = doc["chain"]
    if "function" in doc:
        f = _exppoly(doc["function"], doc.get("num_vars"))
        chain = DiffChain(chain_steps, f.num_vars)
        result = apply_chain_exppoly(chain, f)
        out = {"chain": chain.to_json(), "result": result.to_json(), "text": str(result)}
        if "at" in doc:
            out["values"] = [{"point": p, "value": result.evaluate(p).to_json()} for p in doc["at"]]
        return EXIT_OK, out
    if "grid" in doc:
        grid = GridFunction.from_json(doc["grid"])
        chain = DiffChain(chain_steps, grid.window.num_vars)
        return EXIT_OK, {"chain": chain.to_json(), "grid": apply_chain_grid(chain, grid).to_json()}
    raise problem.ProblemError("apply-query needs either 'function' or 'grid'")


def cmd_solve(doc: dict, args) -> tuple[int, dict]:
    d = doc["num_vars"]
    equations = []
    for eq in doc["equations"]:
        rhs = eq.get("rhs")
        equations.append((DiffChain(eq["chain"], d), _exppoly(rhs, d) if rhs else None))
    if doc["mode"] == "window":
        if "window" in doc:
            window = GridWindow.from_json(doc["window"])
        elif args.window:
            window = GridWindow.sized(args.window)
        else:
            raise problem.ProblemError("window mode needs a window (in the file or via --window)")
        space = window_kernel(equations, window)
        out = space.to_json()
        out["window"] = window.to_json()
    else:
        if "max_degree" not in doc:
            raise problem.ProblemError("ansatz mode needs max_degree")
        space = polynomial_ansatz_solve(equations, doc["max_degree"], d)
        out = space.to_json()
        part, kernel = ansatz_functions(space, d)
        out["monomials"] = [list(m) for m in space.labels]
        out["particular_text"] = None if part is None else str(part)
        out["kernel_text"] = [str(k) for k in kernel]
    return (EXIT_OK if space.consistent else EXIT_FINDING), out


def cmd_verify_montel(doc: dict, args) -> tuple[int, dict]:
    sys_ = MontelSystem.from_json(doc)
    window = None
    if args.window:
        window = GridWindow.sized(args.window)
    elif "window" in doc:
        window = GridWindow.from_json(doc["window"])
    freqs = None
    if "frequencies" in doc:
        freqs = [Frequency.from_json(f) for f in doc["frequencies"]]
    report = verify_montel(sys_, window=window, degree_cap=args.degree_cap,
                           max_tuples=args.max_tuples, frequencies=freqs, jobs=args.jobs)
    return report.exit_code, report.to_json()


def cmd_counterexample(doc: dict, args) -> tuple[int, dict]:
    group = GroupSpec.from_json(doc["group"])
    steps = [element_from_json(group, h) for h in doc["steps"]]
    window = GridWindow.from_json(doc["window"]) if "window" in doc else (
        GridWindow.sized(args.window) if args.window else None)
    try:
        ce = counterexample(group, steps, window, doc.get("max_order", 8))
    except HypothesisError as exc:
        return EXIT_FINDING, {"error": str(exc), "index": 1}
    return EXIT_OK, ce.to_json()


def cmd_trace(doc: dict, args) -> tuple[int, dict]:
    f = _exppoly(doc["f"], doc["system"]["group"]["free_rank"])
    sys_ = MontelSystem.from_json(doc["system"], derive_from=f)
    try:
        trace = reduction_trace(sys_, f, doc.get("tuple"), doc.get("full", False))
    except HypothesisError as exc:
        return EXIT_FINDING, {"error": str(exc)}
    return (EXIT_OK if trace.ok else EXIT_FINDING), trace.to_json()


COMMANDS = {
    "generates": ("generates-query", cmd_generates, "decide whether steps generate a group"),
    "apply": ("apply-query", cmd_apply, "apply a difference chain to an ExpPoly or grid"),
    "solve": ("solve-query", cmd_solve, "exact window kernel or polynomial ansatz"),
    "verify-montel": ("montel-system", cmd_verify_montel, "check the generating condition "
                      "and certify solutions as exponential polynomials"),
    "counterexample": ("counterexample-query", cmd_counterexample,
                       "periodic non-polynomial solution for non-generating steps"),
    "trace": ("trace-query", cmd_trace, "replay the induction on a concrete solution"),
}


# -- output -----------------------------------------------------------------

def _is_scalar(obj) -> bool:
    return isinstance(obj, dict) and {"re", "im"} <= set(obj) <= {"re", "im", "approx"}


def _is_exppoly(obj) -> bool:
    return isinstance(obj, list) and obj and all(
        isinstance(p, dict) and set(p) == {"freq", "poly"} for p in obj)


def add_approximations(obj):
    """Attach decimal approximations next to every exact scalar (display only)."""
    if _is_scalar(obj):
        return {**obj, "approx": "~" + Scalar.from_json(obj).approx()}
    if isinstance(obj, dict):
        return {k: add_approximations(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [add_approximations(v) for v in obj]
    return obj


def _exact(obj):
    if isinstance(obj, dict):
        return {k: _exact(v) for k, v in obj.items() if k != "approx"}
    if isinstance(obj, list):
        return [_exact(v) for v in obj]
    return obj


def _short(obj) -> str:
    if _is_scalar(obj):
        text = str(Scalar.from_json(_exact(obj)))
        return f"{text} ({obj['approx']})" if "approx" in obj else text
    if _is_exppoly(obj):
        return str(ExpPoly.from_json(_exact(obj)))
    if isinstance(obj, list) and all(not isinstance(v, (dict, list)) or _is_scalar(v) for v in obj):
        return "[" + ", ".join(_short(v) for v in obj) + "]"
    if obj is None:
        return "-"
    if isinstance(obj, bool):
        return "yes" if obj else "no"
    return str(obj)


def render_pretty(obj, indent: int = 0) -> str:
    """Aligned human-readable rendering of a report document."""
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        simple = {k: v for k, v in obj.items()
                  if not isinstance(v, (dict, list)) or _is_scalar(v) or _is_exppoly(v)
                  or (isinstance(v, list) and all(not isinstance(x, (dict, list)) or _is_scalar(x) for x in v))}
        width = max((len(k) for k in simple), default=0)
        for k in sorted(obj):
            v = obj[k]
            if k in simple:
                lines.append(f"{pad}{k.ljust(width)}  {_short(v)}")
            else:
                lines.append(f"{pad}{k}:")
                lines.append(render_pretty(v, indent + 1))
    elif isinstance(obj, list):
        if not obj:
            lines.append(f"{pad}(none)")
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)) and not _is_scalar(v) and not _is_exppoly(v):
                lines.append(f"{pad}[{i}]")
                lines.append(render_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}[{i}] {_short(v)}")
    else:
        lines.append(pad + _short(obj))
    return "\n".join(line for line in lines if line)


def _window_sizes(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--window expects comma-separated sizes, got {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("window sizes must be positive")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="JSON problem file ('-' for stdin)")
    common.add_argument("--window", type=_window_sizes, metavar="A,B",
                        help="per-axis window sizes starting at the origin")
    common.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
    common.add_argument("--max-tuples", type=int, default=DEFAULT_MAX_TUPLES)
    common.add_argument("--pretty", action="store_true", help="aligned human-readable output")
    common.add_argument("--jobs", type=int, default=1, help="parallel kernel-vector fits")
    common.add_argument("--float", dest="approx", action="store_true",
                        help="add decimal approximations next to exact values")
    parser = argparse.ArgumentParser(prog="frechet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    kind, handler, _ = COMMANDS[args.command]
    try:
        doc = problem.load(args.problem, kind)
        code, out = handler(doc, args)
    except (problem.ProblemError, TupleLimitError, ValueError, KeyError, TypeError,
            ZeroDivisionError) as exc:
        print(f"frechet {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.approx:
        out = add_approximations(out)
    if args.pretty:
        sys.stdout.write(render_pretty(out) + "\n")
    else:
        sys.stdout.write(problem.dumps(out))
    return code


if __name__ == "__main__":
    sys.exit(main())
