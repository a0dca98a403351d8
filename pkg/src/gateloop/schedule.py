"""Time-domain schedules, solution verification, cost reports, result files.

A solved loop is turned into explicit field-versus-time rows for plotting
or pulse programming, checked against a finer discretization to rule out
discretization artifacts in the reported error, and serialized together
with everything needed to reproduce the run.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .gates import BUILTIN_GATES, TargetGate, builtin_gate
from .register import (
    ControlLoop,
    RegisterModel,
    det_residual,
    propagate_loop,
    unitarity_residual,
)
from .synthesis import SynthesisConfig, SynthesisResult, error_functional, pack_loop, unpack_loop

SCHEDULE_FLOAT_FMT = ".17g"


@dataclass(frozen=True)
class ControlSchedule:
    """Sampled piecewise-linear control trajectory of a closed loop.

    `values` holds one row per sample in (Bz_1..Bz_N, Bx_1..Bx_N) layout;
    row 0 and the last row are exactly zero (loop closure).
    """

    n_qubits: int
    duration: float
    samples_per_edge: int
    times: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class VerificationReport:
    abs_error_at_m: float
    abs_error_at_10m: float
    unitarity_residual: float
    det_residual: float


@dataclass(frozen=True)
class CostReport:
    """Edge-count comparison: one direct multiqubit loop versus a sequence
    of two-qubit loops.  Every edge costs the same unit of operation time,
    so fewer edges means a faster gate."""

    direct_edges: int
    sequential_edges: int
    ratio: float


def loop_to_schedule(loop: ControlLoop, samples_per_edge: int) -> ControlSchedule:
    """Sample the polygon trajectory with `samples_per_edge` points per edge.

    Samples are endpoint-inclusive; breakpoints shared by two edges appear
    once, so the row count is (nu + 1) * samples_per_edge - nu.
    """
    if samples_per_edge < 2:
        raise ValueError(f"samples_per_edge must be >= 2, got {samples_per_edge}")
    path = loop.waypoints()
    s = samples_per_edge
    times, rows = [], []
    for k in range(len(path) - 1):
        a, b = path[k], path[k + 1]
        start_j = 0 if k == 0 else 1
        for j in range(start_j, s):
            t = j / (s - 1)
            times.append(k + t)
            # two-sided form hits both endpoints exactly
            rows.append(a * (1.0 - t) + b * t)
    return ControlSchedule(
        n_qubits=loop.n_qubits,
        duration=loop.duration,
        samples_per_edge=s,
        times=np.array(times),
        values=np.array(rows),
    )


def schedule_to_loop(schedule: ControlSchedule) -> ControlLoop:
    """Recover the polygon vertices from a schedule's breakpoint rows."""
    s = schedule.samples_per_edge
    breakpoints = schedule.values[:: s - 1]
    return ControlLoop.from_vectors(breakpoints[1:-1], schedule.n_qubits)


def _schedule_header(n_qubits: int) -> str:
    cols = ["t"]
    cols += [f"bz{i + 1}" for i in range(n_qubits)]
    cols += [f"bx{i + 1}" for i in range(n_qubits)]
    return ",".join(cols)


def write_schedule(path, schedule: ControlSchedule) -> None:
    """Write a schedule as CSV: header `t,bz1..bzN,bx1..bxN`, 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(_schedule_header(schedule.n_qubits) + "\n")
        for t, row in zip(schedule.times, schedule.values):
            cells = [format(t, SCHEDULE_FLOAT_FMT)]
            cells += [format(v, SCHEDULE_FLOAT_FMT) for v in row]
            fh.write(",".join(cells) + "\n")


def read_schedule(path) -> ControlSchedule:
    """Read a schedule CSV written by `write_schedule`."""
    with open(path) as fh:
        header = fh.readline().strip()
        data = [line.strip().split(",") for line in fh if line.strip()]
    cols = header.split(",")
    if not cols or cols[0] != "t" or (len(cols) - 1) % 2:
        raise ValueError(f"{path}: malformed schedule header {header!r}")
    n_qubits = (len(cols) - 1) // 2
    if cols != _schedule_header(n_qubits).split(","):
        raise ValueError(f"{path}: unexpected schedule columns {header!r}")
    arr = np.array([[float(c) for c in row] for row in data])
    if arr.ndim != 2 or arr.shape[1] != len(cols):
        raise ValueError(f"{path}: ragged schedule rows")
    times, values = arr[:, 0], arr[:, 1:]
    duration = float(times[-1])
    n_edges = round(duration)
    # rows = (nu+1)*s - nu  =>  s = (rows + nu) / (nu+1)
    s, rem = divmod(len(times) + n_edges - 1, n_edges)
    if rem or s < 2:
        raise ValueError(f"{path}: row count {len(times)} does not fit any sampling rate")
    return ControlSchedule(
        n_qubits=n_qubits, duration=duration, samples_per_edge=s,
        times=times, values=values,
    )


def verify(
    model: RegisterModel,
    target: TargetGate,
    loop: ControlLoop,
    m: int,
    multiplier: int = 10,
    executor: ThreadPoolExecutor | None = None,
) -> VerificationReport:
    """Evaluate a solution at m and at m*multiplier midpoint steps per edge.

    A solution whose reported error is a discretization artifact shows a
    large drift between the two error values; a healthy one does not.
    """
    u = propagate_loop(model, loop, m, executor=executor)
    e_m = float(np.linalg.norm(target.matrix - u))
    e_fine = error_functional(model, target, loop, m * multiplier, executor=executor)
    return VerificationReport(
        abs_error_at_m=e_m,
        abs_error_at_10m=e_fine,
        unitarity_residual=unitarity_residual(u),
        det_residual=det_residual(u),
    )


def report_is_healthy(
    report: VerificationReport,
    unitarity_tol: float = 1e-10,
    det_tol: float = 1e-8,
    drift_tol: float = 1e-4,
) -> bool:
    """Pass/fail rule for a verification report.

    The error drift between the two discretizations must stay below
    `drift_tol` or below half the coarse error itself; the propagator must
    be unitary and special unitary within tolerance.
    """
    drift = abs(report.abs_error_at_m - report.abs_error_at_10m)
    drift_ok = drift <= max(drift_tol, 0.5 * report.abs_error_at_m)
    return (
        report.unitarity_residual < unitarity_tol
        and report.det_residual < det_tol
        and drift_ok
    )


def cost_report(
    n_qubits: int,
    nu_direct: int,
    two_qubit_gate_count: int,
    nu_two_qubit: int,
) -> CostReport:
    """Compare edge counts: direct N-qubit loop vs sequential two-qubit loops.

    Each loop with nu vertices costs nu + 1 edges, and sequential gates
    cannot overlap, so the two-qubit route costs count * (nu_2q + 1).
    """
    if n_qubits < 1 or two_qubit_gate_count < 1:
        raise ValueError("n_qubits and two_qubit_gate_count must be >= 1")
    if nu_direct < 0 or nu_two_qubit < 0:
        raise ValueError("vertex counts must be >= 0")
    direct = nu_direct + 1
    sequential = two_qubit_gate_count * (nu_two_qubit + 1)
    return CostReport(
        direct_edges=direct,
        sequential_edges=sequential,
        ratio=sequential / direct,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _matrix_doc(matrix: np.ndarray) -> dict:
    return {
        "dim": matrix.shape[0],
        "entries": [[z.real, z.imag] for z in np.asarray(matrix, dtype=complex).ravel()],
    }


def _target_descriptor(target: TargetGate) -> dict:
    if target.name in BUILTIN_GATES or target.name == "identity":
        return {"name": target.name, "n_qubits": target.n_qubits}
    return {
        "name": target.name,
        "n_qubits": target.n_qubits,
        "matrix": _matrix_doc(target.matrix),
    }


def _target_from_descriptor(doc: dict) -> TargetGate:
    name = doc["name"]
    n_qubits = int(doc["n_qubits"])
    if "matrix" in doc:
        flat = np.array([complex(re, im) for re, im in doc["matrix"]["entries"]])
        dim = int(doc["matrix"]["dim"])
        return TargetGate(name=name, matrix=flat.reshape(dim, dim), n_qubits=n_qubits)
    return builtin_gate(name, n_qubits)


def _json_17g(obj, indent: int = 0) -> str:
    """Serialize to JSON with every float at 17 significant digits."""
    pad = "  " * indent
    if isinstance(obj, dict):
        items = [f'{pad}  "{k}": {_json_17g(v, indent + 1).lstrip()}' for k, v in obj.items()]
        return pad + "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return pad + "[" + ", ".join(_json_17g(v).strip() for v in obj) + "]"
        items = [_json_17g(v, indent + 1) for v in obj]
        return pad + "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return pad + json.dumps(obj)
    if isinstance(obj, float):
        return pad + _fmt(obj)
    if isinstance(obj, (int, np.integer)):
        return pad + str(int(obj))
    return pad + json.dumps(obj)


def write_result(path, result: SynthesisResult, model: RegisterModel,
                 check_multiplier: int = 10) -> None:
    """Serialize a synthesis result losslessly, with reproduction metadata.

    The file also embeds the error re-evaluated at `check_multiplier` times
    the search discretization, so the reported number can be audited
    against discretization artifacts without re-running anything.
    """
    cfg = result.config
    abs_check = error_functional(
        model, result.target, result.best_loop, cfg.m_points * check_multiplier
    )
    doc = {
        "format": "gateloop-result-v1",
        "n_qubits": model.n_qubits,
        "coupling_c": model.coupling_c,
        "coupling_pairs": [list(p) for p in model.coupling_pairs],
        "nu": cfg.n_vertices,
        "m": cfg.m_points,
        "seed": cfg.seed,
        "config": asdict(cfg),
        "vertices": list(pack_loop(result.best_loop)),
        "abs_error": result.abs_error,
        "rel_error": result.rel_error,
        "abs_error_check": {"m": cfg.m_points * check_multiplier, "value": abs_check},
        "evals_used": result.evals_used,
        "restart_index_of_best": result.restart_index_of_best,
        "target": _target_descriptor(result.target),
    }
    with open(path, "w") as fh:
        fh.write(_json_17g(doc) + "\n")


def read_result(path) -> tuple[SynthesisResult, RegisterModel]:
    """Read a result file; returns the result and the register model it solved."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a valid result file ({exc})") from exc
    try:
        if doc.get("format") != "gateloop-result-v1":
            raise ValueError(f"{path}: not a gateloop result file")
        model = RegisterModel(
            n_qubits=int(doc["n_qubits"]),
            coupling_c=doc["coupling_c"],
            coupling_pairs=tuple(tuple(p) for p in doc["coupling_pairs"]),
        )
        cfg_doc = dict(doc["config"])
        cfg = SynthesisConfig(**cfg_doc)
        loop = unpack_loop(np.array(doc["vertices"]), model.n_qubits, cfg.n_vertices)
        target = _target_from_descriptor(doc["target"])
        result = SynthesisResult(
            best_loop=loop,
            abs_error=float(doc["abs_error"]),
            rel_error=float(doc["rel_error"]),
            target=target,
            config=cfg,
            evals_used=int(doc["evals_used"]),
            restart_index_of_best=int(doc["restart_index_of_best"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed result file ({exc})") from exc
    if target.n_qubits != model.n_qubits:
        raise ValueError(
            f"{path}: target acts on {target.n_qubits} qubits but the register "
            f"model has {model.n_qubits}"
        )
    return result, model
