"""Target gates in SU(2^N): builtins, global-phase projection, matrix file IO.

The register Hamiltonian is traceless, so loop propagators can only reach
SU(2^N).  Any target unitary must therefore be rescaled by a 2^N-th root
of 1/det before synthesis; the different roots are physically equivalent
(a global phase only redefines the zero of energy).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .register import unitarity_residual

UNITARY_TOL = 1e-10
SU_TOL = 1e-12


@dataclass(frozen=True)
class TargetGate:
    """A named SU(2^N) matrix handed to the synthesizer."""

    name: str
    matrix: np.ndarray
    n_qubits: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        dim = 2**self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match N={self.n_qubits}")
        r = unitarity_residual(m)
        if r > SU_TOL:
            raise ValueError(f"target matrix is not unitary (residual {r:.3e})")
        dr = abs(np.linalg.det(m) - 1.0)
        if dr > SU_TOL:
            raise ValueError(
                f"target matrix is not special unitary (|det-1| = {dr:.3e}); "
                "apply su_project first"
            )


def su_project(u: np.ndarray, root_index: int = 0) -> np.ndarray:
    """Rescale a unitary by a global phase so its determinant is exactly 1.

    With theta = arg det(u) and dim = 2^N, returns
    exp(-i (theta + 2 pi root_index) / dim) * u.  Each root_index in
    [0, dim) picks one of the dim physically equivalent SU representatives.
    """
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    if u.ndim != 2 or u.shape[1] != dim:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if not 0 <= root_index < dim:
        raise ValueError(f"root_index must be in [0, {dim}), got {root_index}")
    r = unitarity_residual(u)
    if r > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (residual {r:.3e} > {UNITARY_TOL})")
    theta = np.angle(np.linalg.det(u))
    return np.exp(-1j * (theta + 2 * np.pi * root_index) / dim) * u


def _cnot() -> np.ndarray:
    perm = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    # det of the bare permutation is -1; the pi/4 phase lands it in SU(4)
    return np.exp(1j * np.pi / 4) * perm


def _qft(n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * np.pi * j * k / dim) / math.sqrt(dim)


def _qft2() -> np.ndarray:
    # det(F2) = -i, so exp(i pi/8) F2 is in SU(4)
    return np.exp(1j * np.pi / 8) * _qft(2)


def _qft3() -> np.ndarray:
    # det(F3) = i, so exp(-i pi/16) F3 is in SU(8)
    return np.exp(-1j * np.pi / 16) * _qft(3)


BUILTIN_GATES = {
    "cnot": (2, _cnot),
    "qft2": (2, _qft2),
    "qft3": (3, _qft3),
}


def builtin_gate(name: str, n_qubits: int | None = None) -> TargetGate:
    """Look up a built-in SU-projected target gate.

    Known names: ``cnot``, ``qft2``, ``qft3`` and ``identity`` (the latter
    needs `n_qubits`).  The fixed global phases of the builtins are
    hard-coded: exp(i pi/4) CNOT, exp(i pi/8) F2, exp(-i pi/16) F3.
    """
    if name == "identity":
        if n_qubits is None:
            raise ValueError("identity gate needs an explicit n_qubits")
        return TargetGate(name="identity", matrix=np.eye(2**n_qubits, dtype=complex), n_qubits=n_qubits)
    try:
        gate_qubits, factory = BUILTIN_GATES[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_GATES) + ["identity"])
        raise ValueError(f"unknown gate {name!r}; builtins: {known}") from None
    if n_qubits is not None and n_qubits != gate_qubits:
        raise ValueError(f"gate {name!r} acts on {gate_qubits} qubits, not {n_qubits}")
    return TargetGate(name=name, matrix=factory(), n_qubits=gate_qubits)


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_matrix_file(path, u: np.ndarray) -> None:
    """Write a complex matrix as JSON with row-major [real, imag] entry pairs."""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    entries = ",\n    ".join(
        f"[{_format_float(z.real)}, {_format_float(z.imag)}]" for z in u.ravel()
    )
    with open(path, "w") as fh:
        fh.write('{\n  "dim": %d,\n  "entries": [\n    %s\n  ]\n}\n' % (dim, entries))


def read_matrix_file(path) -> np.ndarray:
    """Read a matrix file written by `write_matrix_file` and validate it.

    Raises ValueError if the document does not parse, the dimension is not
    a power of two, the entry count is wrong, or the matrix is not unitary
    (the error message reports the unitarity residual).
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a valid matrix file ({exc})") from exc
    try:
        dim = int(doc["dim"])
        entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: missing 'dim' or 'entries' field") from exc
    if dim < 2 or dim & (dim - 1):
        raise ValueError(f"{path}: dimension {dim} is not a power of two")
    if len(entries) != dim * dim:
        raise ValueError(f"{path}: expected {dim * dim} entries, found {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    u = flat.reshape(dim, dim)
    r = unitarity_residual(u)
    if r > UNITARY_TOL:
        raise ValueError(f"{path}: matrix is not unitary (residual {r:.3e})")
    return u
