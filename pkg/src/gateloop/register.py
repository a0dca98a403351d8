"""Charge-qubit register model: control-field Hamiltonians and loop propagators.

An N-qubit register is driven through its control-parameter space along a
closed polygon that starts and ends at the degeneracy point (all fields
zero).  Each qubit i contributes -(1/2) Bz_i sigma_z - (1/2) Bx_i sigma_x;
the shared inductor couples every pair (i, j) through
-C Bx_i Bx_j sigma_y sigma_y.  All of these operators are real, so the
register Hamiltonian is a real symmetric (hence Hermitian, traceless)
matrix and its propagators live in SU(2^N).

Propagators are evaluated with the midpoint rule: each unit-time polygon
edge is split into m sub-intervals and the exact exponential of the
midpoint Hamiltonian is taken on each.  Edges are independent units of
work; a loop propagator is always the time-ordered sequential product of
its edge propagators, so results do not depend on how many workers
computed the edges.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
SIGMA_YY = np.real(np.kron(SIGMA_Y, SIGMA_Y))  # imaginary parts cancel

MAX_QUBITS = 4


def _single_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a one-qubit operator at tensor factor `site` of an n-qubit register."""
    out = np.array([[1.0]])
    for k in range(n):
        out = np.kron(out, op if k == site else np.eye(2))
    return out


def _pair_yy(i: int, j: int, n: int) -> np.ndarray:
    """sigma_y on sites i and j (i < j), identity elsewhere; real-valued."""
    ops = [np.eye(2)] * n
    ops[i] = np.imag(SIGMA_Y)  # store the real factor i*sigma_y = [[0,-1],[1,0]]
    ops[j] = np.imag(SIGMA_Y)
    out = np.array([[1.0]])
    for op in ops:
        out = np.kron(out, op)
    # (i sy)(i sy) = -sy sy, so flip the sign back
    return -out


@dataclass(frozen=True)
class RegisterModel:
    """Inductively coupled charge-qubit register.

    Parameters
    ----------
    n_qubits : int
        Register size N, 1 <= N <= 4.
    coupling_c : float
        Positive inductive coupling constant C (default 1).
    coupling_pairs : tuple of (int, int), optional
        Qubit pairs joined by the sigma_y sigma_y term.  Defaults to all
        pairs i < j, which is what a single shared inductor gives; override
        only to experiment with other wiring.
    """

    n_qubits: int
    coupling_c: float = 1.0
    coupling_pairs: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        if not self.coupling_c > 0:
            raise ValueError(f"coupling_c must be positive, got {self.coupling_c}")
        if self.coupling_pairs is None:
            pairs = tuple(
                (i, j) for i in range(self.n_qubits) for j in range(i + 1, self.n_qubits)
            )
            object.__setattr__(self, "coupling_pairs", pairs)
        else:
            for i, j in self.coupling_pairs:
                if not 0 <= i < j < self.n_qubits:
                    raise ValueError(f"bad coupling pair ({i}, {j}) for N={self.n_qubits}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def n_controls(self) -> int:
        """Number of control fields, 2N (one Bz and one Bx per qubit)."""
        return 2 * self.n_qubits

    def _term_stack(self) -> np.ndarray:
        """Stack of Hamiltonian basis terms, shape (2N + n_pairs, dim, dim).

        Order: sigma_z terms per qubit, sigma_x terms per qubit, then the
        sigma_y sigma_y coupling terms per pair.  All entries are real.
        """
        cached = _TERM_CACHE.get(self)
        if cached is not None:
            return cached
        n = self.n_qubits
        terms = [_single_site(SIGMA_Z, i, n) for i in range(n)]
        terms += [_single_site(SIGMA_X, i, n) for i in range(n)]
        terms += [_pair_yy(i, j, n) for i, j in self.coupling_pairs]
        stack = np.stack(terms)
        _TERM_CACHE[self] = stack
        return stack


_TERM_CACHE: dict[RegisterModel, np.ndarray] = {}


@dataclass(frozen=True)
class ControlVertex:
    """One polygon vertex: instantaneous field strengths (hbar = 1 units).

    `bz` and `bx` are length-N vectors holding the gate-voltage fields
    Bz_1..Bz_N and the SQUID-flux fields Bx_1..Bx_N.
    """

    bz: np.ndarray
    bx: np.ndarray

    def __post_init__(self):
        bz = np.atleast_1d(np.asarray(self.bz, dtype=float))
        bx = np.atleast_1d(np.asarray(self.bx, dtype=float))
        if bz.ndim != 1 or bx.ndim != 1 or bz.shape != bx.shape:
            raise ValueError("bz and bx must be 1-D vectors of equal length")
        if not (np.all(np.isfinite(bz)) and np.all(np.isfinite(bx))):
            raise ValueError("field strengths must be finite")
        object.__setattr__(self, "bz", bz)
        object.__setattr__(self, "bx", bx)

    @property
    def n_qubits(self) -> int:
        return len(self.bz)

    def as_vector(self) -> np.ndarray:
        """Concatenated control vector (Bz_1..Bz_N, Bx_1..Bx_N)."""
        return np.concatenate([self.bz, self.bx])

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "ControlVertex":
        vec = np.asarray(vec, dtype=float)
        if vec.ndim != 1 or len(vec) % 2:
            raise ValueError("control vector must be 1-D with even length 2N")
        n = len(vec) // 2
        return cls(bz=vec[:n], bx=vec[n:])

    @classmethod
    def origin(cls, n_qubits: int) -> "ControlVertex":
        """The degeneracy point: every field switched off."""
        return cls(bz=np.zeros(n_qubits), bx=np.zeros(n_qubits))


@dataclass(frozen=True)
class ControlLoop:
    """Closed polygon in control space with nu adjustable vertices.

    The loop implicitly starts and ends at the origin (degeneracy point);
    only the adjustable vertices are stored.  Traversing each edge takes
    one time unit, so the loop has nu + 1 edges and duration nu + 1.
    """

    vertices: tuple[ControlVertex, ...]
    n_qubits: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        for v in self.vertices:
            if v.n_qubits != self.n_qubits:
                raise ValueError(
                    f"vertex has {v.n_qubits} qubits, loop expects {self.n_qubits}"
                )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.vertices) + 1

    @property
    def duration(self) -> float:
        return float(self.n_edges)

    def waypoints(self) -> np.ndarray:
        """Full vertex path including the origin endpoints, shape (nu + 2, 2N)."""
        rows = np.zeros((self.n_vertices + 2, 2 * self.n_qubits))
        for k, v in enumerate(self.vertices):
            rows[k + 1] = v.as_vector()
        return rows

    @classmethod
    def from_vectors(cls, vectors: np.ndarray, n_qubits: int) -> "ControlLoop":
        """Build a loop from an (nu, 2N) array of vertex control vectors."""
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != 2 * n_qubits:
            raise ValueError(f"expected shape (nu, {2 * n_qubits}), got {vectors.shape}")
        return cls(
            vertices=tuple(ControlVertex.from_vector(row) for row in vectors),
            n_qubits=n_qubits,
        )


def hermiticity_residual(h: np.ndarray) -> float:
    """Max-abs deviation of h from its conjugate transpose."""
    return float(np.max(np.abs(h - h.conj().T)))


def unitarity_residual(u: np.ndarray) -> float:
    """Frobenius norm of U^dag U - I."""
    d = u.shape[0]
    return float(np.linalg.norm(u.conj().T @ u - np.eye(d)))


def det_residual(u: np.ndarray) -> float:
    """|det(U) - 1|; zero for exact SU matrices."""
    return float(abs(np.linalg.det(u) - 1.0))


def build_hamiltonian(model: RegisterModel, fields: ControlVertex) -> np.ndarray:
    """Register Hamiltonian for one instantaneous set of control fields.

    H = sum_i [-(1/2) Bz_i sigma_z^(i) - (1/2) Bx_i sigma_x^(i)]
        - C sum_{i<j} Bx_i Bx_j sigma_y^(i) sigma_y^(j)

    Returned as a real symmetric (dim x dim) array; every term above is a
    real matrix, so no imaginary parts arise.  The result is traceless.
    """
    if fields.n_qubits != model.n_qubits:
        raise ValueError(
            f"fields have {fields.n_qubits} qubits, model has {model.n_qubits}"
        )
    coeffs = _term_coefficients(model, fields.as_vector()[None, :])[0]
    stack = model._term_stack()
    return np.tensordot(coeffs, stack, axes=(0, 0))


def _term_coefficients(model: RegisterModel, points: np.ndarray) -> np.ndarray:
    """Coefficients of each Hamiltonian term for a batch of control vectors.

    `points` has shape (m, 2N) in (Bz..., Bx...) layout; returns
    (m, 2N + n_pairs) matching RegisterModel._term_stack ordering.
    """
    n = model.n_qubits
    bz = points[:, :n]
    bx = points[:, n:]
    cols = [-0.5 * bz, -0.5 * bx]
    if model.coupling_pairs:
        pair_cols = np.stack(
            [-model.coupling_c * bx[:, i] * bx[:, j] for i, j in model.coupling_pairs],
            axis=1,
        )
        cols.append(pair_cols)
    return np.concatenate(cols, axis=1)


def step_propagator(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) via eigendecomposition of the Hermitian matrix h.

    Exact up to the accuracy of the eigensolver, so the result is unitary
    to machine precision regardless of dt.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    h = np.asarray(h)
    if hermiticity_residual(h) > 1e-12 * max(1.0, np.max(np.abs(h))):
        raise ValueError("step_propagator requires a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * dt * w)) @ v.conj().T


def edge_midpoints(start: ControlVertex, end: ControlVertex, m: int) -> list[ControlVertex]:
    """Control vectors at the m sub-interval midpoints of one polygon edge.

    The edge is the linear interpolation from `start` to `end` over one
    time unit; midpoint i sits at t_i = (i - 1/2)/m for i = 1..m.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if start.n_qubits != end.n_qubits:
        raise ValueError("start and end vertices must have the same qubit count")
    points = _midpoint_vectors(start.as_vector(), end.as_vector(), m)
    return [ControlVertex.from_vector(row) for row in points]


def _midpoint_vectors(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    ts = (np.arange(m) + 0.5) / m
    return a[None, :] + ts[:, None] * (b - a)[None, :]


def _edge_propagator_vec(model: RegisterModel, a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Midpoint-rule propagator of the edge a -> b, on (2N,) control vectors."""
    points = _midpoint_vectors(a, b, m)
    coeffs = _term_coefficients(model, points)
    stack = model._term_stack()
    d = model.dim
    hams = (coeffs @ stack.reshape(len(stack), d * d)).reshape(m, d, d)
    w, v = np.linalg.eigh(hams)
    steps = (v * np.exp(-1j * w / m)[:, None, :]) @ v.transpose(0, 2, 1)
    return _ordered_product(steps)


def _ordered_product(steps: np.ndarray) -> np.ndarray:
    """Time-ordered product steps[-1] @ ... @ steps[0] by pairwise reduction.

    The reduction tree is a fixed function of len(steps), so the result is
    bit-for-bit reproducible for given inputs.
    """
    while len(steps) > 1:
        odd = steps[-1:] if len(steps) % 2 else None
        paired = steps[1::2] if odd is None else steps[1:-1:2]
        steps = paired @ steps[0 : 2 * len(paired) : 2]
        if odd is not None:
            steps = np.concatenate([steps, odd])
    return steps[0]


def propagate_edge(
    model: RegisterModel, start: ControlVertex, end: ControlVertex, m: int
) -> np.ndarray:
    """Unitary generated while traversing one polygon edge in unit time.

    Ordered product of the m midpoint step propagators (later times on the
    left).  This is the unit of parallel work when evaluating loops.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if start.n_qubits != model.n_qubits or end.n_qubits != model.n_qubits:
        raise ValueError("vertex dimensions do not match the model")
    return _edge_propagator_vec(model, start.as_vector(), end.as_vector(), m)


def propagate_loop(
    model: RegisterModel,
    loop: ControlLoop,
    m: int,
    executor: ThreadPoolExecutor | None = None,
) -> np.ndarray:
    """Propagator of a full control loop: origin -> v_1 -> ... -> v_nu -> origin.

    Each of the nu + 1 edges is discretized with m midpoint steps.  Edge
    propagators may be computed concurrently via `executor`; the final
    product is always assembled sequentially in time order, so the result
    is independent of the worker count.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if loop.n_qubits != model.n_qubits:
        raise ValueError(
            f"loop has {loop.n_qubits} qubits, model has {model.n_qubits}"
        )
    path = loop.waypoints()
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
    return u
