"""Command-line front end.

Exit status: 0 on success, otherwise one of ``EXIT_CODES``; failures also
print a one-line JSON error record to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import unitary_group

from . import states
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    InternalInequalityViolation,
    StateValidationError,
)
from .interferometer import general_distribution
from .measures import holevo_rhs, mutual_information
from .optimizer import (
    VIOLATION_TOL,
    OptimizerConfig,
    grid_oracle,
    optimize_single_visibility,
    optimize_two_particle_visibility,
    verify_inequality,
)
from .qcore import BipartiteState
from .stateio import StateFileError, load_reduced, load_state, rows_to_csv, to_json

log = logging.getLogger("interfvis")

EXIT_CODES = {
    "ParseError": 2,
    "IoError": 3,
    "DimensionMismatch": 4,
    "BudgetExceeded": 5,
    "StateValidationError": 6,
    "InternalInequalityViolation": 9,
}

SWEEP_HEADER = ["lambda", "v_a", "v_b", "v_ab", "margin_a", "margin_b"]
VERIFY_HEADER = [
    "seed", "kind", "n_paths", "v_a", "v_b", "v_ab",
    "v_a_tilde", "v_b_tilde", "v_ab_tilde", "margin_a", "margin_b", "violation",
]
HOLEVO_HEADER = ["sample", "mutual_information", "holevo_rhs", "slack"]
ORACLE_HEADER = ["objective", "resolution", "oracle_value", "optimizer_value", "difference"]
DEFAULT_LAMBDA_GRID = "0:1:11"


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("ParseError", message)


@dataclass
class RunSpec:
    command: str
    state_source: str | None
    n_paths: int | None
    optimizer: OptimizerConfig
    output: str | None
    fmt: str
    plot: str | None
    args: argparse.Namespace


# ---------------------------------------------------------------------------
# argument helpers


def parse_lambda_grid(text: str) -> list[float]:
    """``a,b,c`` lists values; ``start:stop:count`` is an inclusive linspace."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            grid = np.linspace(float(start), float(stop), int(count))
            return [round(float(x), 12) for x in grid]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError("ParseError", f"bad lambda grid {text!r}") from None


def parse_seeds(text: str) -> list[int]:
    """``K`` means seeds 0..K-1; ``a:b`` a half-open range; ``a,b,c`` an explicit list."""
    try:
        if ":" in text:
            a, b = text.split(":")
            return list(range(int(a), int(b)))
        if "," in text:
            return [int(x) for x in text.split(",") if x.strip()]
        return list(range(int(text)))
    except ValueError:
        raise CliError("ParseError", f"bad seed list {text!r}") from None


def resolve_state(source: str, n_paths: int | None) -> BipartiteState:
    name, _, arg = source.partition(":")

    def need_n() -> int:
        if n_paths is None:
            raise CliError("ParseError", f"state {source!r} needs --n")
        return n_paths

    try:
        if name == "max-entangled":
            return states.max_entangled(need_n())
        if name == "chaotic":
            return states.chaotic(need_n())
        if name == "lambda":
            return states.lambda_state(states.LambdaParams(need_n(), float(arg)))
        if name == "random-pure":
            return states.random_pure(need_n(), int(arg))
        if name == "random-mixed":
            rank, seed = arg.split(",")
            return states.random_mixed(need_n(), int(rank), int(seed))
        if name == "product":
            file_a, file_b = arg.split(",")
            state = states.product_state(load_reduced(file_a), load_reduced(file_b))
        else:
            state = load_state(source)
    except (OSError, StateFileError) as exc:
        kind = "ParseError" if isinstance(exc, StateFileError) else "IoError"
        raise CliError(kind, str(exc)) from None
    except StateValidationError:
        raise
    except DimensionMismatch:
        raise
    except ValueError as exc:
        raise CliError("ParseError", f"bad state spec {source!r}: {exc}") from None
    if n_paths is not None and state.n_paths != n_paths:
        raise DimensionMismatch(f"state has N={state.n_paths} but --n {n_paths} was given")
    return state


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="interfvis", description="Entropic interference visibilities for N-path interferometers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, state=True):
        if state:
            p.add_argument("--state", required=True, help="builtin name or state file")
        p.add_argument("--n", type=int, help="number of paths per side")
        p.add_argument("--grid-points", type=int, default=8)
        p.add_argument("--restarts", type=int, default=16)
        p.add_argument("--refine-iterations", type=int, default=200)
        p.add_argument("--seed", type=int, default=0, help="optimizer seed")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("visibility", help="all visibilities and margins for one state")
    common(p)
    p.add_argument("--no-tilde", action="store_true", help="skip the general-unitary search")

    p = sub.add_parser("sweep-lambda", help="visibilities along the lambda family")
    common(p, state=False)
    p.add_argument("--lambda-grid", default=DEFAULT_LAMBDA_GRID)
    p.add_argument("--plot", help="write an SVG of visibilities vs lambda")

    p = sub.add_parser("verify", help="random-state inequality campaign")
    common(p, state=False)
    p.add_argument("--seeds", default="50")
    p.add_argument("--kinds", default="pure", help="comma list of pure, mixed")
    p.add_argument("--rank", type=int, help="rank of mixed states (default N^2)")
    p.add_argument("--no-tilde", action="store_true")

    p = sub.add_parser("holevo", help="mutual information vs Holevo quantity over random unitaries")
    common(p)
    p.add_argument("--seeds", default="20", help="unitary samples")

    p = sub.add_parser("oracle", help="grid oracle vs optimizer")
    common(p)
    p.add_argument("--objective", choices=("single-A", "single-B", "two-particle"), default="two-particle")
    p.add_argument("--resolution", type=int, default=32)
    p.add_argument("--budget", type=int, default=10**7)
    return parser


def parse_args(argv) -> RunSpec:
    args = build_parser().parse_args(argv)
    try:
        cfg = OptimizerConfig(
            grid_points_per_phase=args.grid_points,
            refine_iterations=args.refine_iterations,
            restarts=args.restarts,
            seed=args.seed,
        )
    except ValueError as exc:
        raise CliError("ParseError", str(exc)) from None
    return RunSpec(
        command=args.command,
        state_source=getattr(args, "state", None),
        n_paths=args.n,
        optimizer=cfg,
        output=args.out,
        fmt=args.format,
        plot=getattr(args, "plot", None),
        args=args,
    )


# ---------------------------------------------------------------------------
# commands; each returns (rows, header, extra json fields, violation flag)


def _visibility(spec: RunSpec):
    state = resolve_state(spec.state_source, spec.n_paths)
    report = verify_inequality(state, spec.optimizer, include_tilde=not spec.args.no_tilde)
    row = report.as_dict()
    header = ["n_paths", "v_a", "v_b", "v_ab", "v_a_tilde", "v_b_tilde", "v_ab_tilde", "margin_a", "margin_b", "violation"]
    if spec.fmt == "json":
        return None, None, row, report.violation
    return [row], header, None, report.violation


def _sweep(spec: RunSpec):
    if spec.n_paths is None:
        raise CliError("ParseError", "sweep-lambda needs --n")
    rows = []
    for lam in parse_lambda_grid(spec.args.lambda_grid):
        try:
            params = states.LambdaParams(spec.n_paths, lam)
        except ValueError as exc:
            raise CliError("ParseError", str(exc)) from None
        r = verify_inequality(states.lambda_state(params), spec.optimizer, include_tilde=False)
        rows.append({"lambda": lam, "v_a": r.v_a, "v_b": r.v_b, "v_ab": r.v_ab, "margin_a": r.margin_a, "margin_b": r.margin_b})
    violation = any(min(r["margin_a"], r["margin_b"]) < -VIOLATION_TOL for r in rows)
    return rows, SWEEP_HEADER, None, violation


def _verify(spec: RunSpec):
    args = spec.args
    if spec.n_paths is None:
        raise CliError("ParseError", "verify needs --n")
    n = spec.n_paths
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    if not kinds or any(k not in ("pure", "mixed") for k in kinds):
        raise CliError("ParseError", f"bad --kinds {args.kinds!r}")
    rank = args.rank or n * n
    rows = []
    for kind in kinds:
        for seed in parse_seeds(args.seeds):
            try:
                state = states.random_pure(n, seed) if kind == "pure" else states.random_mixed(n, rank, seed)
            except ValueError as exc:
                raise CliError("ParseError", str(exc)) from None
            r = verify_inequality(state, spec.optimizer, include_tilde=not args.no_tilde)
            rows.append({
                "seed": seed, "kind": kind, "n_paths": n,
                "v_a": r.v_a, "v_b": r.v_b, "v_ab": r.v_ab,
                "v_a_tilde": r.v_a_tilde, "v_b_tilde": r.v_b_tilde,
                "v_ab_tilde": "" if r.v_ab_tilde is None else r.v_ab_tilde,
                "margin_a": r.margin_a, "margin_b": r.margin_b, "violation": r.violation,
            })
    worst_a = min(r["margin_a"] for r in rows)
    worst_b = min(r["margin_b"] for r in rows)
    log.info("worst margin_a=%r margin_b=%r over %d states", worst_a, worst_b, len(rows))
    summary = {"worst_margin_a": worst_a, "worst_margin_b": worst_b, "states": len(rows)}
    return rows, VERIFY_HEADER, summary, min(worst_a, worst_b) < -VIOLATION_TOL


def _holevo(spec: RunSpec):
    state = resolve_state(spec.state_source, spec.n_paths)
    n = state.n_paths
    rows = []
    for sample in parse_seeds(spec.args.seeds):
        rng = np.random.default_rng([spec.optimizer.seed, sample])
        u_a = unitary_group.rvs(n, random_state=rng)
        u_b = unitary_group.rvs(n, random_state=rng)
        mi = mutual_information(general_distribution(state, u_a, u_b))
        bound = holevo_rhs(state, u_b)
        rows.append({"sample": sample, "mutual_information": mi, "holevo_rhs": bound, "slack": bound - mi})
    violation = any(r["slack"] < -1e-8 for r in rows)
    return rows, HOLEVO_HEADER, {"min_slack": min(r["slack"] for r in rows)}, violation


def _oracle(spec: RunSpec):
    args = spec.args
    state = resolve_state(spec.state_source, spec.n_paths)
    try:
        oracle = grid_oracle(state, args.objective, args.resolution, budget=args.budget)
    except ValueError as exc:
        raise CliError("ParseError", str(exc)) from None
    if args.objective == "two-particle":
        value, _ = optimize_two_particle_visibility(state, spec.optimizer)
    else:
        value, _ = optimize_single_visibility(state, args.objective[-1], spec.optimizer)
    row = {
        "objective": args.objective, "resolution": args.resolution,
        "oracle_value": oracle, "optimizer_value": value, "difference": value - oracle,
    }
    return [row], ORACLE_HEADER, None, False


COMMANDS = {
    "visibility": _visibility,
    "sweep-lambda": _sweep,
    "verify": _verify,
    "holevo": _holevo,
    "oracle": _oracle,
}


def render(rows, header, extra, fmt: str) -> str:
    if fmt == "csv":
        return rows_to_csv(rows, header)
    if rows is None:
        return to_json(extra)
    payload = {"rows": rows}
    if extra:
        payload.update(extra)
    return to_json(payload)


def write_plot(rows: list[dict], path) -> None:
    """SVG of the sweep rows already emitted; no recomputation."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "interfvis"
    lam = [r["lambda"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for key, label in (("v_a", "V(A)"), ("v_b", "V(B)"), ("v_ab", "V(AB)")):
        ax.plot(lam, [r[key] for r in rows], marker="o", label=label)
    ax.plot(lam, [r["v_a"] + r["v_ab"] for r in rows], "k--", label="V(A)+V(AB)")
    ax.set_xlabel("lambda")
    ax.set_ylabel("visibility")
    ax.set_ylim(-0.05, 1.1)
    ax.legend(loc="center right")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run(spec: RunSpec) -> int:
    rows, header, extra, violation = COMMANDS[spec.command](spec)
    text = render(rows, header, extra, spec.fmt)
    try:
        if spec.output:
            Path(spec.output).write_text(text)
        else:
            sys.stdout.write(text)
        if spec.plot and rows is not None and spec.command == "sweep-lambda":
            write_plot(rows, spec.plot)
    except OSError as exc:
        raise CliError("IoError", str(exc)) from None
    if violation:
        raise InternalInequalityViolation("a margin fell below -1e-6; see output rows")
    return 0


def _error_record(kind: str, exc: Exception) -> int:
    record = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    deviation = getattr(exc, "deviation", None)
    if deviation is not None:
        record["deviation"] = deviation
        record["violations"] = [list(v) for v in exc.violations]
    sys.stderr.write(json.dumps(record) + "\n")
    return EXIT_CODES[kind]


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return run(parse_args(argv))
    except CliError as exc:
        return _error_record(exc.kind, exc)
    except StateValidationError as exc:
        return _error_record("StateValidationError", exc)
    except DimensionMismatch as exc:
        return _error_record("DimensionMismatch", exc)
    except BudgetExceeded as exc:
        return _error_record("BudgetExceeded", exc)
    except InternalInequalityViolation as exc:
        return _error_record("InternalInequalityViolation", exc)


if __name__ == "__main__":
    sys.exit(main())
