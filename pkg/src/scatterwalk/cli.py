"""Command-line entry point: ``scatterwalk <subcommand> [options]``.

Exit status is 0 on success, 2 when a verification subcommand fails and 1 on
invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import Optional, Sequence

import numpy as np

from . import classical, search
from .circuit import verify_circuit
from .collapsed import collapsed_trajectory
from .config import TOL
from .errors import ScatterWalkError
from .graph import Graph, bipartite_graph, complete_graph, mpartite_graph
from .walkcore import Criterion, StepOperator, trajectory, uniform_initial_state

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

_PHI_RE = re.compile(r"^\s*([-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_phi(text: str) -> float:
    """Accept plain floats and multiples of pi such as ``pi``, ``pi/2``, ``3pi/2``, ``-0.5*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PHI_RE.match(text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse phase {text!r}")
    coef = m.group(1)
    coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    den = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / den


def build_graph(args: argparse.Namespace) -> Graph:
    if args.graph_file:
        with open(args.graph_file) as fh:
            return Graph.from_json(fh.read())
    if args.family == "complete":
        return complete_graph(args.n, args.v)
    if args.family == "bipartite":
        return bipartite_graph(args.n1, args.n2, args.v1, args.v2)
    return mpartite_graph(args.m_sets, args.n, args.v)


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_simulate(args) -> int:
    g = build_graph(args)
    outcome = search.probability_trace(g, args.phi, args.steps, args.criterion, args.init,
                                       args.cost_model, fast=args.fast)
    if args.out == "csv":
        buf = io.StringIO()
        outcome.trace.write_csv(buf)
        _emit(args, buf.getvalue())
    else:
        t = outcome.trace
        report = outcome.to_dict() | {
            "phi": args.phi,
            "trace": {"step": t.steps.tolist(), "p_incident": t.incident.tolist(),
                      "p_entering": t.entering.tolist(), "p_leaving": t.leaving.tolist()},
        }
        _emit(args, _dump_json(report))
    return EXIT_OK


def cmd_sweep(args) -> int:
    phis = search.default_phase_grid(args.points)
    m_max = args.steps if args.steps is not None else None
    grid = search.phase_sweep(args.n, args.v, phis, m_max, fast=args.fast, workers=args.workers)
    if args.out == "csv":
        buf = io.StringIO()
        grid.write_csv(buf)
        _emit(args, buf.getvalue())
        return EXIT_OK
    curve = search.average_vs_phase(args.n, args.v, criterion=args.criterion, cost_model=args.cost_model, grid=grid)
    _emit(args, _dump_json({
        "N": args.n, "v": args.v, "criterion": Criterion(args.criterion).value,
        "cost_model": search.CostModel(args.cost_model).value,
        "phi": curve.phis.tolist(), "m_opt": curve.m_opt.tolist(), "n_bar": curve.n_bar.tolist(),
        "blind_average": curve.blind_average, "memory_average": curve.memory_average,
    }))
    return EXIT_OK


def cmd_compare_classical(args) -> int:
    rows, ok = [], True
    for variant in classical.Variant:
        spec = classical.ClassicalSearchSpec(args.n, args.v, variant)
        exact = classical.average(spec)
        mean, stderr = classical.monte_carlo_average(spec, args.trials, args.seed)
        ok &= abs(mean - exact) <= 3 * stderr
        rows.append({"variant": variant.value, "N": args.n, "v": args.v, "closed_form_avg": exact,
                     "mc_avg": mean, "mc_stderr": stderr, "seed": args.seed})
    if args.out == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _emit(args, buf.getvalue())
    else:
        _emit(args, _dump_json({"rows": rows, "passed": bool(ok)}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_collapse(args) -> int:
    g = build_graph(args)
    model = search.model_for(g, args.phi, validate=False)
    matrix_dev = model.validate(tol=math.inf)
    psi0 = uniform_initial_state(g)
    c0, residual = model.project(psi0)
    mult = model.step_multiplicity
    comps = collapsed_trajectory(model, c0, args.steps)
    op = StepOperator(g, args.phi)
    evo_dev = 0.0
    for n, psi in enumerate(trajectory(op, psi0, args.steps * mult)):
        if n % mult == 0:
            evo_dev = max(evo_dev, float(np.max(np.abs(model.project(psi)[0] - comps[n // mult]))))
    passed = matrix_dev <= TOL.collapse and evo_dev <= TOL.collapse and residual <= TOL.residual_refuse
    report = {"family": model.family, "labels": model.labels, "phi": args.phi, "steps": args.steps,
              "matrix_max_dev": matrix_dev, "evolution_max_dev": evo_dev, "initial_residual": residual,
              "passed": bool(passed)}
    if args.out == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=[k for k in report if k != "labels"], lineterminator="\n")
        w.writeheader()
        w.writerow({k: v for k, v in report.items() if k != "labels"})
        _emit(args, buf.getvalue())
    else:
        _emit(args, _dump_json(report))
    return EXIT_OK if passed else EXIT_FAIL


def cmd_verify_circuit(args) -> int:
    g = build_graph(args)
    report = verify_circuit(g, args.phi, args.steps)
    if args.out == "csv":
        buf = io.StringIO()
        flat = {k: v for k, v in report.items() if k != "params"}
        w = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
        w.writeheader()
        w.writerow(flat)
        _emit(args, buf.getvalue())
    else:
        _emit(args, _dump_json(report))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=["complete", "bipartite", "mpartite"], default="complete")
    common.add_argument("--n", type=int, default=64, help="vertex count (complete) or set size (M-partite)")
    common.add_argument("--n1", type=int, default=64)
    common.add_argument("--n2", type=int, default=64)
    common.add_argument("--m-sets", type=int, default=3, help="number of sets for the M-partite family")
    common.add_argument("--v", type=int, default=1)
    common.add_argument("--v1", type=int, default=1)
    common.add_argument("--v2", type=int, default=1)
    common.add_argument("--phi", type=parse_phi, default=math.pi, help="phase, e.g. pi, pi/2, 3pi/2 or 1.57")
    common.add_argument("--criterion", choices=[c.value for c in Criterion], default=Criterion.INCIDENT.value)
    common.add_argument("--cost-model", choices=[c.value for c in search.CostModel],
                        default=search.CostModel.WALK_ONLY.value)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", choices=["csv", "json"], default="json")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--graph-file", help="JSON graph description; overrides the family flags")

    p = argparse.ArgumentParser(prog="scatterwalk", description="Scattering quantum walk search experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="probability trace and optimal measurement step")
    s.add_argument("--steps", type=int, default=50, help="largest step count m_max")
    s.add_argument("--init", default="uniform", choices=["uniform", "entering1", "entering2"])
    s.add_argument("--fast", action="store_true", help="use the collapsed model")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[common], help="phase x step grid on the complete graph")
    s.add_argument("--steps", type=int, default=None, help="m_max (default 4*ceil(pi/(2 theta)))")
    s.add_argument("--points", type=int, default=128, help="phase grid points over [0, 2pi)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--full", dest="fast", action="store_false", help="evolve in the full edge space")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("compare-classical", parents=[common], help="classical averages vs Monte Carlo")
    s.add_argument("--trials", type=int, default=100_000)
    s.set_defaults(func=cmd_compare_classical)

    s = sub.add_parser("verify-collapse", parents=[common], help="collapsed model vs full-space evolution")
    s.add_argument("--steps", type=int, default=50)
    s.set_defaults(func=cmd_verify_collapse)

    s = sub.add_parser("verify-circuit", parents=[common], help="oracle circuit vs direct walk steps")
    s.add_argument("--steps", type=int, default=20)
    s.set_defaults(func=cmd_verify_circuit)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScatterWalkError, ValueError, NotImplementedError, MemoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
