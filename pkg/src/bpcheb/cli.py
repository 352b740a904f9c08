"""Command-line interface: solve problem files, emit solution tables.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import exprlang
from .exprlang import ExprEvalError, ExprSyntaxError
from .linalg import SingularMatrixError
from .problem import Problem, ProblemError, load
from .solver import SolveError, hybrid_solve

__all__ = ["main", "entry", "emit_csv", "emit_text_table"]


def _fmt(v: float) -> str:
    """14 significant digits, matching the precision of the printed tables.

    Magnitudes below 1e-15 are chopped to 0; they sit beneath the precision
    the tables carry and would otherwise print as rounding noise.
    """
    if abs(v) < 1e-15:
        return "0"
    return f"{v:.14g}"


def _meta_line(problem: Problem) -> str:
    bp = "uniform" if problem.breakpoints is None else "explicit"
    return f"# n={problem.n} r={problem.r} K={problem.K} M={problem.M} breakpoints={bp}"


def _exact_values(problem: Problem, ts) -> np.ndarray | None:
    if problem.output.exact is None:
        return None
    fns = [exprlang.as_function(e) for e in problem.output.exact]
    return np.array([[f(t) for f in fns] for t in ts])


def emit_csv(ts, values: np.ndarray, exact: np.ndarray | None = None, meta: str = "") -> str:
    """Deterministic CSV: t,x1..xn and, when a reference is given, the
    reference columns plus the per-row max error."""
    n = values.shape[1]
    header = ["t"] + [f"x{i + 1}" for i in range(n)]
    if exact is not None:
        header += [f"exact{i + 1}" for i in range(n)] + ["err_max"]
    lines = []
    if meta:
        lines.append(meta)
    lines.append(",".join(header))
    for i, t in enumerate(ts):
        row = [_fmt(t)] + [_fmt(v) for v in values[i]]
        if exact is not None:
            row += [_fmt(v) for v in exact[i]]
            row.append(_fmt(float(np.max(np.abs(values[i] - exact[i])))))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def emit_text_table(ts, values: np.ndarray, exact: np.ndarray | None = None,
                    meta: str = "") -> str:
    """Aligned plain-text rendering of the same data as emit_csv."""
    csv = emit_csv(ts, values, exact, meta)
    lines = csv.strip().split("\n")
    rows = [line.split(",") for line in lines if not line.startswith("#")]
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    out = [line for line in lines if line.startswith("#")]
    for r in rows:
        out.append("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
    return "\n".join(out) + "\n"


def _solve_problem(problem: Problem):
    sol = hybrid_solve(problem.system_spec(), problem.basis_config())
    ts = problem.output.resolve_points(problem.t0, problem.tf)
    values = sol.evaluate_many(ts)
    return ts, values


def _cmd_solve(args) -> int:
    problem = load(args.config).with_overrides(K=args.K, M=args.M, fmt=args.format)
    ts, values = _solve_problem(problem)
    exact = _exact_values(problem, ts)
    emit = emit_text_table if problem.output.fmt == "table" else emit_csv
    text = emit(ts, values, exact, _meta_line(problem))
    if exact is not None:
        err = float(np.max(np.abs(values - exact)))
        print(f"max error vs exact: {_fmt(err)}", file=sys.stderr)
    _write_output(text, args.out)
    return 0


def _cmd_table(args) -> int:
    problem = load(args.config).with_overrides(K=args.K)
    try:
        m_list = [int(m) for m in args.M_list.split(",") if m.strip()]
    except ValueError as exc:
        raise ProblemError(f"--M-list: {exc}") from exc
    if not m_list:
        raise ProblemError("--M-list: need at least one M value")
    ts = problem.output.resolve_points(problem.t0, problem.tf)
    exact = _exact_values(problem, ts)
    runs = []
    for m in m_list:
        _, values = _solve_problem(problem.with_overrides(M=m))
        runs.append(values)

    header = ["t"]
    for c in range(problem.n):
        if exact is not None:
            header.append(f"x{c + 1}_exact")
        header += [f"x{c + 1}_M{m}" for m in m_list]
    lines = [f"{_meta_line(problem)} M_list={','.join(str(m) for m in m_list)}",
             ",".join(header)]
    for i, t in enumerate(ts):
        row = [_fmt(t)]
        for c in range(problem.n):
            if exact is not None:
                row.append(_fmt(exact[i][c]))
            row += [_fmt(values[i][c]) for values in runs]
        lines.append(",".join(row))
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def _write_output(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bpcheb",
        description="Solve linear integrodifferential initial-value systems "
        "on a hybrid block-pulse/Chebyshev basis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file and print the solution")
    p_solve.add_argument("--config", required=True, help="problem file to solve")
    p_solve.add_argument("--K", type=int, default=None, help="override block count")
    p_solve.add_argument("--M", type=int, default=None, help="override polynomial count")
    p_solve.add_argument("--out", default=None, help="write output here instead of stdout")
    p_solve.add_argument("--format", choices=("csv", "table"), default=None,
                         help="override the output format")
    p_solve.set_defaults(func=_cmd_solve)

    p_table = sub.add_parser(
        "table", help="compare several M values (and the exact solution, if given)"
    )
    p_table.add_argument("--config", required=True, help="problem file to solve")
    p_table.add_argument("--M-list", required=True, dest="M_list",
                         help="comma-separated M values, e.g. 5,7,9")
    p_table.add_argument("--K", type=int, default=None, help="override block count")
    p_table.add_argument("--out", default=None, help="write output here instead of stdout")
    p_table.set_defaults(func=_cmd_table)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, ExprSyntaxError, ExprEvalError, ValueError) as exc:
        print(f"bpcheb: input error: {exc}", file=sys.stderr)
        return 1
    except (SingularMatrixError, SolveError) as exc:
        print(f"bpcheb: numerical failure: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
