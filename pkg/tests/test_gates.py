"""Tests for target gates, SU projection, and matrix file IO."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gateloop.gates import (
    BUILTIN_GATES,
    TargetGate,
    builtin_gate,
    read_matrix_file,
    su_project,
    write_matrix_file,
)
from gateloop.register import unitarity_residual


def random_unitary(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


CNOT_PERM = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
F2 = 0.5 * np.array(
    [[1, 1, 1, 1], [1, 1j, -1, -1j], [1, -1, 1, -1], [1, -1j, -1, 1j]]
)
OMEGA = np.exp(1j * np.pi / 4)
F3 = np.array([[OMEGA ** ((j * k) % 8) for k in range(8)] for j in range(8)]) / np.sqrt(8)


class TestSuProject:
    def test_identity_is_fixed_point(self):
        assert np.allclose(su_project(np.eye(4)), np.eye(4), atol=1e-15)

    def test_cnot_root_three_gives_printed_phase(self):
        # det(CNOT) = -1; root 3 recovers the published exp(i pi/4) factor
        projected = su_project(CNOT_PERM, root_index=3)
        assert np.allclose(projected, np.exp(1j * np.pi / 4) * CNOT_PERM, atol=1e-14)

    def test_qft2_root_zero_gives_printed_phase(self):
        projected = su_project(F2, root_index=0)
        assert np.allclose(projected, np.exp(1j * np.pi / 8) * F2, atol=1e-14)

    def test_qft3_root_zero_gives_printed_phase(self):
        projected = su_project(F3, root_index=0)
        assert np.allclose(projected, np.exp(-1j * np.pi / 16) * F3, atol=1e-13)

    @pytest.mark.parametrize("dim", [2, 4, 8])
    def test_determinant_is_one_for_every_root(self, dim):
        rng = np.random.default_rng(dim)
        for trial in range(5):
            u = random_unitary(dim, rng)
            for k in range(dim):
                assert abs(np.linalg.det(su_project(u, k)) - 1) < 1e-12

    def test_idempotent_at_root_zero(self):
        rng = np.random.default_rng(2)
        u = su_project(random_unitary(4, rng))
        assert np.allclose(su_project(u), u, atol=1e-13)

    @given(st.integers(0, 7), st.integers(0, 7))
    @settings(max_examples=20, deadline=None)
    def test_roots_differ_by_fixed_scalar(self, k, j):
        rng = np.random.default_rng(99)
        u = random_unitary(8, rng)
        a = su_project(u, k)
        b = su_project(u, j)
        assert np.allclose(a, np.exp(-2j * np.pi * (k - j) / 8) * b, atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            su_project(np.eye(4) * 1.5)

    def test_rejects_bad_root(self):
        with pytest.raises(ValueError):
            su_project(np.eye(4), root_index=4)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            su_project(np.ones((2, 3)))


class TestBuiltinGates:
    def test_cnot_matches_printed_matrix(self):
        gate = builtin_gate("cnot")
        assert np.allclose(gate.matrix, np.exp(1j * np.pi / 4) * CNOT_PERM, atol=1e-15)
        # spot-check the printed entries (rows/columns counted from 1)
        assert gate.matrix[0, 0] == pytest.approx(np.exp(1j * np.pi / 4))
        assert gate.matrix[2, 3] == pytest.approx(np.exp(1j * np.pi / 4))
        assert gate.matrix[2, 2] == 0

    def test_qft2_matches_printed_matrix(self):
        gate = builtin_gate("qft2")
        assert np.allclose(gate.matrix, np.exp(1j * np.pi / 8) * F2, atol=1e-15)

    def test_qft3_entry_and_structure(self):
        gate = builtin_gate("qft3")
        assert gate.matrix[1, 1] == pytest.approx(
            np.exp(-1j * np.pi / 16) * OMEGA / np.sqrt(8)
        )
        assert np.allclose(gate.matrix, np.exp(-1j * np.pi / 16) * F3, atol=1e-14)

    def test_phases_land_in_su(self):
        # the published factors are exactly the SU-projection phases
        assert abs(np.linalg.det(np.exp(1j * np.pi / 8) * F2) - 1) < 1e-13
        assert abs(np.linalg.det(np.exp(-1j * np.pi / 16) * F3) - 1) < 1e-13
        assert abs(np.linalg.det(np.exp(1j * np.pi / 4) * CNOT_PERM) - 1) < 1e-13

    def test_identity(self):
        gate = builtin_gate("identity", 3)
        assert gate.n_qubits == 3
        assert np.array_equal(gate.matrix, np.eye(8))

    def test_identity_needs_qubits(self):
        with pytest.raises(ValueError):
            builtin_gate("identity")

    def test_unknown_gate(self):
        with pytest.raises(ValueError, match="unknown gate"):
            builtin_gate("toffoli")

    def test_qubit_count_mismatch(self):
        with pytest.raises(ValueError):
            builtin_gate("qft3", 2)

    @pytest.mark.parametrize("name", sorted(BUILTIN_GATES))
    def test_builtins_satisfy_target_invariants(self, name):
        gate = builtin_gate(name)
        assert unitarity_residual(gate.matrix) < 1e-12
        assert abs(np.linalg.det(gate.matrix) - 1) < 1e-12


class TestTargetGate:
    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="not unitary"):
            TargetGate(name="bad", matrix=np.ones((4, 4)), n_qubits=2)

    def test_rejects_non_special_unitary(self):
        with pytest.raises(ValueError, match="special"):
            TargetGate(name="bad", matrix=CNOT_PERM, n_qubits=2)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            TargetGate(name="bad", matrix=np.eye(4), n_qubits=3)


class TestMatrixFiles:
    def test_round_trip_qft2(self, tmp_path):
        path = tmp_path / "qft2.json"
        u = builtin_gate("qft2").matrix
        write_matrix_file(path, u)
        back = read_matrix_file(path)
        assert np.max(np.abs(back - u)) < 1e-15

    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(4)
        u = random_unitary(8, rng)
        path = tmp_path / "u.json"
        write_matrix_file(path, u)
        assert np.array_equal(read_matrix_file(path), u)

    def test_rejects_non_power_of_two(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            '{"dim": 3, "entries": ' + str([[1.0, 0.0]] * 9).replace("(", "[") + "}"
        )
        with pytest.raises(ValueError, match="power of two"):
            read_matrix_file(path)

    def test_rejects_non_unitary_with_residual(self, tmp_path):
        u = np.eye(4, dtype=complex)
        u[0, 0] = 1.1  # unitarity residual becomes ~0.21
        path = tmp_path / "nonunitary.json"
        write_matrix_file(path, u)
        with pytest.raises(ValueError, match="residual") as err:
            read_matrix_file(path)
        assert "e-" in str(err.value) or "0.2" in str(err.value)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("this is not json")
        with pytest.raises(ValueError, match="not a valid matrix file"):
            read_matrix_file(path)

    def test_rejects_wrong_entry_count(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text('{"dim": 2, "entries": [[1.0, 0.0], [0.0, 0.0]]}')
        with pytest.raises(ValueError, match="entries"):
            read_matrix_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_matrix_file(tmp_path / "nope.json")
