"""Command-line front end: synthesize / verify / export / gates / cost.

Exit codes: 0 success, 1 quality threshold missed, 2 invalid configuration
or IO/parse failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .gates import BUILTIN_GATES, TargetGate, builtin_gate, read_matrix_file, su_project, write_matrix_file
from .register import RegisterModel
from .schedule import (
    cost_report,
    loop_to_schedule,
    read_result,
    report_is_healthy,
    verify,
    write_result,
    write_schedule,
)
from .synthesis import SynthesisConfig, rescan_phase_roots, synthesize, vertex_condition


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gateloop",
        description="Find control loops realizing multiqubit gates on an "
        "inductively coupled charge-qubit register.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    syn = sub.add_parser("synthesize", help="search for a loop implementing a gate")
    syn.add_argument("--gate", required=True,
                     help="builtin gate name (cnot, qft2, qft3, identity) or matrix file path")
    syn.add_argument("--qubits", type=int, default=None,
                     help="register size; inferred from the gate when possible")
    syn.add_argument("--vertices", type=int, default=None,
                     help="adjustable polygon vertices nu (default: 4 for N=2, 12 for N=3)")
    syn.add_argument("--points", type=int, default=100,
                     help="midpoint discretization steps per edge (default 100)")
    syn.add_argument("--restarts", type=int, default=8,
                     help="independent random restarts (default 8)")
    syn.add_argument("--max-evals", type=int, default=20000,
                     help="objective evaluation budget per restart (default 20000)")
    syn.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
    syn.add_argument("--init-range", type=float, default=1.5,
                     help="half-width of the random vertex initialization box (default 1.5)")
    syn.add_argument("--coupling", type=float, default=1.0,
                     help="inductive coupling constant C (default 1)")
    syn.add_argument("--success-threshold", type=float, default=1e-4,
                     help="relative error declaring success (default 1e-4)")
    syn.add_argument("--adaptive", action="store_true",
                     help="dimension-scaled simplex coefficients (recommended for N=3)")
    syn.add_argument("--f-tol", type=float, default=1e-12,
                     help="simplex function-spread stopping tolerance (default 1e-12)")
    syn.add_argument("--x-tol", type=float, default=1e-10,
                     help="simplex diameter stopping tolerance (default 1e-10)")
    syn.add_argument("--max-field", type=float, default=None,
                     help="clamp every field strength into [-B, B] during the search")
    syn.add_argument("--chain-slice", type=int, default=None,
                     help="re-kick the simplex from the best point every this many "
                          "evaluations (helps large N; default: only on convergence)")
    syn.add_argument("--scan-phase-roots", action="store_true",
                     help="synthesize against every SU phase root and keep the best")
    syn.add_argument("--threads", type=int, default=1,
                     help="workers for per-edge propagator evaluation (never changes results)")
    syn.add_argument("--out", default=None,
                     help="result file path (default <gate>_result.json)")

    ver = sub.add_parser("verify", help="re-check a result file at a finer discretization")
    ver.add_argument("result_file")
    ver.add_argument("--points-multiplier", type=int, default=10,
                     help="fine discretization multiplier (default 10)")
    ver.add_argument("--threads", type=int, default=1)

    exp = sub.add_parser("export", help="export a result's control schedule as CSV")
    exp.add_argument("result_file")
    exp.add_argument("--samples-per-edge", type=int, default=50,
                     help="samples per polygon edge (default 50)")
    exp.add_argument("--out", default=None,
                     help="schedule file path (default <result>.csv)")

    gat = sub.add_parser("gates", help="list builtin target gates or write one to a file")
    gat.add_argument("--name", default=None, help="gate to show or export")
    gat.add_argument("--qubits", type=int, default=None, help="register size for identity")
    gat.add_argument("--out", default=None, help="write the gate as a matrix file")

    cst = sub.add_parser("cost", help="edge-count comparison: direct loop vs two-qubit sequence")
    cst.add_argument("--qubits", type=int, default=3)
    cst.add_argument("--direct-vertices", type=int, default=12,
                     help="nu of the direct multiqubit loop (default 12)")
    cst.add_argument("--gate-count", type=int, default=4,
                     help="number of sequential two-qubit gates (default 4)")
    cst.add_argument("--sequential-vertices", type=int, default=4,
                     help="nu of each two-qubit loop (default 4)")
    return parser


def _resolve_target(args) -> TargetGate:
    """Turn --gate/--qubits into a TargetGate; raises ValueError on bad input."""
    name = args.gate
    if name in BUILTIN_GATES or name == "identity":
        gate = builtin_gate(name, args.qubits)
        return gate
    if os.path.exists(name):
        u = read_matrix_file(name)
        n_qubits = u.shape[0].bit_length() - 1
        if args.qubits is not None and args.qubits != n_qubits:
            raise ValueError(
                f"matrix in {name} acts on {n_qubits} qubits, not {args.qubits}"
            )
        stem = os.path.splitext(os.path.basename(name))[0]
        return TargetGate(name=stem, matrix=su_project(u), n_qubits=n_qubits)
    raise ValueError(f"--gate {name!r} is neither a builtin gate nor an existing file")


def _cmd_synthesize(args) -> int:
    try:
        target = _resolve_target(args)
        n_qubits = target.n_qubits
        nu = args.vertices if args.vertices is not None else (12 if n_qubits == 3 else 4)
        if not vertex_condition(n_qubits, nu):
            print(
                f"error: nu={nu} violates the vertex condition "
                f"2*N*nu >= 2^(2N)-1 (need {4**n_qubits - 1} free parameters, "
                f"have {2 * n_qubits * nu})",
                file=sys.stderr,
            )
            return 2
        model = RegisterModel(n_qubits=n_qubits, coupling_c=args.coupling)
        cfg = SynthesisConfig(
            n_vertices=nu,
            m_points=args.points,
            max_evals=args.max_evals,
            n_restarts=args.restarts,
            seed=args.seed,
            init_range=args.init_range,
            f_tol=args.f_tol,
            x_tol=args.x_tol,
            success_threshold=args.success_threshold,
            adaptive=args.adaptive,
            max_field=args.max_field,
            chain_slice_evals=args.chain_slice,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(f"target: {target.name} on N={n_qubits} qubits, C={args.coupling}")
    print(f"config: {cfg}")
    runner = rescan_phase_roots if args.scan_phase_roots else synthesize
    result = runner(model, target, cfg, threads=args.threads)

    out = args.out or f"{target.name}_result.json"
    try:
        write_result(out, result, model)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return 2
    print(f"abs_error (Frobenius): {result.abs_error:.6e}")
    print(f"rel_error (abs / sqrt(2^N)): {result.rel_error:.6e}")
    print(f"evals_used: {result.evals_used}  restart_index_of_best: "
          f"{result.restart_index_of_best}")
    print(f"result written to {out}")
    if result.rel_error <= cfg.success_threshold:
        return 0
    print(
        f"threshold missed: rel_error {result.rel_error:.3e} > "
        f"{cfg.success_threshold:.3e}",
        file=sys.stderr,
    )
    return 1


def _cmd_verify(args) -> int:
    try:
        result, model = read_result(args.result_file)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    from concurrent.futures import ThreadPoolExecutor

    executor = ThreadPoolExecutor(args.threads) if args.threads > 1 else None
    try:
        report = verify(
            model, result.target, result.best_loop, result.config.m_points,
            multiplier=args.points_multiplier, executor=executor,
        )
    finally:
        if executor is not None:
            executor.shutdown()
    m = result.config.m_points
    print(f"abs_error at m={m}: {report.abs_error_at_m:.6e}")
    print(f"abs_error at m={m * args.points_multiplier}: {report.abs_error_at_10m:.6e}")
    print(f"unitarity residual: {report.unitarity_residual:.3e}")
    print(f"det residual: {report.det_residual:.3e}")
    healthy = report_is_healthy(report)
    print("verdict: " + ("healthy" if healthy else "UNHEALTHY"))
    return 0 if healthy else 1


def _cmd_export(args) -> int:
    try:
        result, _model = read_result(args.result_file)
        schedule = loop_to_schedule(result.best_loop, args.samples_per_edge)
        out = args.out or os.path.splitext(args.result_file)[0] + ".csv"
        write_schedule(out, schedule)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"schedule with {len(schedule.times)} rows written to {out}")
    return 0


def _cmd_gates(args) -> int:
    if args.name is None:
        print("builtin gates:")
        for name, (n, factory) in sorted(BUILTIN_GATES.items()):
            det = np.linalg.det(factory())
            print(f"  {name:8s} N={n}  |det-1|={abs(det - 1):.2e}")
        print("  identity N=<--qubits>")
        return 0
    try:
        gate = builtin_gate(args.name, args.qubits)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{gate.name}: N={gate.n_qubits}, dim={2 ** gate.n_qubits}")
    with np.printoptions(precision=4, suppress=True, linewidth=120):
        print(gate.matrix)
    if args.out:
        try:
            write_matrix_file(args.out, gate.matrix)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
        print(f"matrix written to {args.out}")
    return 0


def _cmd_cost(args) -> int:
    try:
        report = cost_report(
            args.qubits, args.direct_vertices, args.gate_count, args.sequential_vertices
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"direct {args.qubits}-qubit loop: nu={args.direct_vertices} -> "
        f"{report.direct_edges} edges"
    )
    print(
        f"sequential: {args.gate_count} two-qubit gates x "
        f"(nu={args.sequential_vertices} + 1) -> {report.sequential_edges} edges"
    )
    print(f"sequential/direct edge ratio: {report.ratio:.3f}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "synthesize": _cmd_synthesize,
        "verify": _cmd_verify,
        "export": _cmd_export,
        "gates": _cmd_gates,
        "cost": _cmd_cost,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
