"""Gate synthesis as polytope minimization over polygon vertex coordinates.

The optimization variable is the flat vector of all vertex field values
(vertex-major, each vertex ordered Bz_1..Bz_N, Bx_1..Bx_N).  The objective
is the Frobenius distance between the target gate and the loop propagator,
f(X) = ||U_target - U_loop(X)||_F; relative error divides by ||U_target||_F
= sqrt(2^N).

A synthesis run performs `n_restarts` independent searches from seeded
random starting points.  Within one restart the simplex search is chained:
whenever it converges with budget to spare, a fresh simplex is rebuilt
around the best point and descent continues, which digs much deeper than a
single simplex collapse.  Restart k derives its starting point from child
seed k of the run seed, so results are reproducible and independent of how
many worker threads evaluate polygon edges.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .gates import TargetGate
from .optimize import nelder_mead
from .register import ControlLoop, RegisterModel, _edge_propagator_vec

# A chained simplex run must improve the restart's best value by this
# relative fraction, otherwise the restart is considered dug out.
CHAIN_IMPROVEMENT = 0.01


def vertex_condition(n_qubits: int, n_vertices: int) -> bool:
    """True iff 2 N nu >= 2^(2N) - 1, i.e. the polygon has enough free
    coordinates to parameterize SU(2^N)."""
    if n_qubits < 1 or n_vertices < 1:
        raise ValueError("n_qubits and n_vertices must be positive")
    return 2 * n_qubits * n_vertices >= 4**n_qubits - 1


@dataclass(frozen=True)
class SynthesisConfig:
    """Knobs of one synthesis run.

    `init_range` is the half-width w of the uniform [-w, w] box the random
    starting vertices are drawn from.  `max_field`, if set, clamps every
    vertex coordinate into [-max_field, max_field] during the search
    (hardware realism; off by default).  `adaptive` selects
    dimension-scaled simplex coefficients, recommended for three qubits
    where the search space has 72 dimensions.
    """

    n_vertices: int
    m_points: int = 100
    max_evals: int = 20000
    n_restarts: int = 1
    seed: int = 0
    init_range: float = 1.5
    f_tol: float = 1e-12
    x_tol: float = 1e-10
    success_threshold: float = 1e-4
    adaptive: bool = False
    max_field: float | None = None
    chain_slice_evals: int | None = None

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("n_vertices must be >= 1")
        if self.m_points < 1:
            raise ValueError("m_points must be >= 1")
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be >= 1")
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")
        for name in ("init_range", "f_tol", "x_tol", "success_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_field is not None and self.max_field <= 0:
            raise ValueError("max_field must be positive when set")
        if self.chain_slice_evals is not None and self.chain_slice_evals < 1:
            raise ValueError("chain_slice_evals must be positive when set")


@dataclass(frozen=True)
class SynthesisResult:
    best_loop: ControlLoop
    abs_error: float
    rel_error: float
    target: TargetGate
    config: SynthesisConfig
    evals_used: int
    restart_index_of_best: int


def pack_loop(loop: ControlLoop) -> np.ndarray:
    """Flatten a loop's adjustable vertices into the optimization vector."""
    if loop.n_vertices == 0:
        return np.zeros(0)
    return np.concatenate([v.as_vector() for v in loop.vertices])


def unpack_loop(x: np.ndarray, n_qubits: int, n_vertices: int) -> ControlLoop:
    """Inverse of `pack_loop`; exact round-trip."""
    x = np.asarray(x, dtype=float)
    if x.shape != (2 * n_qubits * n_vertices,):
        raise ValueError(
            f"expected vector of length {2 * n_qubits * n_vertices}, got shape {x.shape}"
        )
    return ControlLoop.from_vectors(x.reshape(n_vertices, 2 * n_qubits), n_qubits)


def _loop_error(
    model: RegisterModel,
    target_matrix: np.ndarray,
    vertex_rows: np.ndarray,
    m: int,
    executor: ThreadPoolExecutor | None = None,
) -> float:
    """Frobenius error of the loop with the given (nu, 2N) vertex rows.

    Shared by the public error functional and the optimizer objective so
    that the two always agree bitwise.
    """
    path = np.zeros((len(vertex_rows) + 2, 2 * model.n_qubits))
    path[1:-1] = vertex_rows
    edges = [(path[k], path[k + 1]) for k in range(len(path) - 1)]
    if executor is None:
        factors = [_edge_propagator_vec(model, a, b, m) for a, b in edges]
    else:
        factors = list(
            executor.map(lambda ab: _edge_propagator_vec(model, ab[0], ab[1], m), edges)
        )
    u = factors[0]
    for f in factors[1:]:
        u = f @ u
    return float(np.linalg.norm(target_matrix - u))


def error_functional(
    model: RegisterModel,
    target: TargetGate,
    loop: ControlLoop,
    m: int,
    executor: ThreadPoolExecutor | None = None,
) -> float:
    """f(X) = ||U_target - U_loop||_F with m midpoint steps per edge."""
    if target.n_qubits != model.n_qubits:
        raise ValueError(
            f"target acts on {target.n_qubits} qubits, model has {model.n_qubits}"
        )
    if loop.n_qubits != model.n_qubits:
        raise ValueError(f"loop has {loop.n_qubits} qubits, model has {model.n_qubits}")
    rows = loop.waypoints()[1:-1]
    return _loop_error(model, target.matrix, rows, m, executor)


def _run_restart(objective, x0, cfg: SynthesisConfig) -> tuple[np.ndarray, float, int]:
    """Chained simplex descent spending at most cfg.max_evals evaluations.

    Each inner run either converges or exhausts its slice of the budget;
    afterwards a fresh simplex is built around the best point and descent
    continues.  Without `chain_slice_evals` the slice is the whole
    remaining budget, so only converged runs chain; with it, long
    non-converging descents in high dimension are re-kicked periodically,
    which counters simplex degeneration.
    """
    d = len(x0)
    budget = cfg.max_evals
    best_x, best_f = None, math.inf
    x_start = x0
    while budget >= d + 2:
        if cfg.chain_slice_evals is None:
            cap = budget
        else:
            cap = max(min(budget, cfg.chain_slice_evals), d + 2)
        res = nelder_mead(
            objective,
            x_start,
            max_evals=cap,
            f_tol=cfg.f_tol,
            x_tol=cfg.x_tol,
            adaptive=cfg.adaptive,
            bound=cfg.max_field,
        )
        budget -= res.evals
        if not res.fun < best_f:
            # a re-kick from the same point would retrace this run exactly
            break
        small_gain = (
            not math.isinf(best_f)
            and res.fun >= best_f - CHAIN_IMPROVEMENT * abs(best_f)
        )
        best_x, best_f = res.x, res.fun
        if best_f == 0.0 or (res.converged and small_gain):
            break
        x_start = best_x
    return best_x, best_f, cfg.max_evals - budget


def synthesize(
    model: RegisterModel,
    target: TargetGate,
    cfg: SynthesisConfig,
    threads: int = 1,
) -> SynthesisResult:
    """Search for a control loop whose propagator matches the target gate.

    Runs cfg.n_restarts independent chained simplex searches and keeps the
    best loop found.  `threads` only controls how many workers evaluate
    polygon edges inside one objective call; it never changes the result.
    """
    if target.n_qubits != model.n_qubits:
        raise ValueError(
            f"target acts on {target.n_qubits} qubits, model has {model.n_qubits}"
        )
    if not vertex_condition(model.n_qubits, cfg.n_vertices):
        n, nu = model.n_qubits, cfg.n_vertices
        raise ValueError(
            f"too few vertices: need 2*N*nu >= 2^(2N)-1, got "
            f"2*{n}*{nu} = {2 * n * nu} < {4**n - 1}"
        )
    if threads < 1:
        raise ValueError("threads must be >= 1")

    n_qubits = model.n_qubits
    d = 2 * n_qubits * cfg.n_vertices
    if cfg.max_evals < d + 2:
        raise ValueError(
            f"max_evals={cfg.max_evals} cannot evaluate one simplex of dimension {d}"
        )
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_restarts)
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:

        def objective(x: np.ndarray) -> float:
            rows = x.reshape(cfg.n_vertices, 2 * n_qubits)
            return _loop_error(model, target.matrix, rows, cfg.m_points, executor)

        best_x, best_f = None, math.inf
        best_restart = -1
        evals_total = 0
        for k in range(cfg.n_restarts):
            rng = np.random.default_rng(children[k])
            x0 = rng.uniform(-cfg.init_range, cfg.init_range, d)
            if cfg.max_field is not None:
                x0 = np.clip(x0, -cfg.max_field, cfg.max_field)
            x, f, used = _run_restart(objective, x0, cfg)
            evals_total += used
            if f < best_f:
                best_x, best_f, best_restart = x, f, k
    finally:
        if executor is not None:
            executor.shutdown()

    loop = unpack_loop(best_x, n_qubits, cfg.n_vertices)
    return SynthesisResult(
        best_loop=loop,
        abs_error=best_f,
        rel_error=best_f / math.sqrt(2**n_qubits),
        target=target,
        config=cfg,
        evals_used=evals_total,
        restart_index_of_best=best_restart,
    )


def rescan_phase_roots(
    model: RegisterModel,
    target: TargetGate,
    cfg: SynthesisConfig,
    threads: int = 1,
) -> SynthesisResult:
    """Synthesize against every SU phase root of the target, keep the best.

    The 2^N roots are physically the same gate up to global phase, but the
    optimizer chases one fixed matrix; some representatives are easier to
    reach than others.
    """
    from .gates import su_project

    dim = 2**target.n_qubits
    best = None
    for root in range(dim):
        rooted = TargetGate(
            name=f"{target.name}#root{root}",
            matrix=su_project(target.matrix, root),
            n_qubits=target.n_qubits,
        )
        res = synthesize(model, rooted, cfg, threads=threads)
        if best is None or res.abs_error < best.abs_error:
            best = res
    return best
