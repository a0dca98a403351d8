"""Acceptance suite: one test per release criterion, each printing a
PASS line with the measured value (run with -s to see them live).

The synthesis criteria (5-8) perform the real desk-scale searches and are
marked slow; deselect with `pytest -m "not slow"` for a quick pass.
"""

import math

import numpy as np
import pytest

from gateloop.cli import main
from gateloop.gates import builtin_gate
from gateloop.register import (
    SIGMA_X,
    SIGMA_Z,
    ControlLoop,
    ControlVertex,
    RegisterModel,
    build_hamiltonian,
    det_residual,
    hermiticity_residual,
    propagate_edge,
    propagate_loop,
    step_propagator,
    unitarity_residual,
)
from gateloop.schedule import cost_report, read_result, report_is_healthy, verify
from gateloop.synthesis import SynthesisConfig, synthesize, vertex_condition

# Fixed loop used by the discretization-order criterion.
DISCRETIZATION_SEED = 42

# CLI configuration shared by the CNOT run of criterion 5 and the
# determinism check of criterion 8 (which must reuse the same run).
CNOT_ARGS = [
    "synthesize", "--gate", "cnot", "--qubits", "2", "--vertices", "4",
    "--points", "100", "--restarts", "20", "--seed", "7",
    "--max-evals", "15000", "--adaptive",
]


def test_criterion_1_model_invariants():
    """1000 random field draws: Hermitian, traceless, unitary propagators."""
    rng = np.random.default_rng(1)
    draws_per_n = {1: 334, 2: 333, 3: 333}
    for n, draws in draws_per_n.items():
        model = RegisterModel(n)
        for _ in range(draws):
            v = ControlVertex(bz=rng.uniform(-3, 3, n), bx=rng.uniform(-3, 3, n))
            h = build_hamiltonian(model, v)
            assert hermiticity_residual(h) < 1e-14
            assert abs(np.trace(h)) < 1e-14
            u = step_propagator(h, 1.0)
            assert unitarity_residual(u) < 1e-10
            assert det_residual(u) < 1e-8
        for _ in range(8):
            loop = ControlLoop.from_vectors(rng.uniform(-2, 2, (3, 2 * n)), n)
            for m in (1, 100):
                u = propagate_loop(model, loop, m)
                assert unitarity_residual(u) < 1e-10
                assert det_residual(u) < 1e-8
    print("PASS criterion 1: model invariants over 1000 draws, N in {1,2,3}")


def test_criterion_2_discretization_order():
    """Midpoint rule converges at second order; m=100 is accurate to 1e-4."""
    model = RegisterModel(2)
    rng = np.random.default_rng(DISCRETIZATION_SEED)
    loop = ControlLoop.from_vectors(rng.uniform(-1.5, 1.5, (4, 4)), 2)
    oracle = propagate_loop(model, loop, 10_000)
    e = {m: np.linalg.norm(propagate_loop(model, loop, m) - oracle)
         for m in (25, 50, 100, 200)}
    ratios = [e[25] / e[50], e[50] / e[100], e[100] / e[200]]
    for r in ratios:
        assert 3.0 <= r <= 5.0
    assert e[100] < 1e-4
    print(
        "PASS criterion 2: e(m)/e(2m) = "
        + ", ".join(f"{r:.3f}" for r in ratios)
        + f"; e(100) = {e[100]:.3e}"
    )


def test_criterion_3_constant_edge_exactness():
    """Constant edges are m-independent and match the analytic 2x2 rotation."""
    model2 = RegisterModel(2)
    v = ControlVertex(bz=[0.7, -0.4], bx=[0.9, 0.3])
    baseline = propagate_edge(model2, v, v, 1)
    for m in (2, 13, 100):
        drift = np.max(np.abs(propagate_edge(model2, v, v, m) - baseline))
        assert drift < 1e-13

    model1 = RegisterModel(1)
    bz, bx = 0.8, -1.1
    w = ControlVertex(bz=[bz], bx=[bx])
    u = propagate_edge(model1, w, w, 17)
    # exp(i (bz sz + bx sx) / 2) over unit time
    b = math.hypot(bz, bx)
    axis = (bz * SIGMA_Z + bx * SIGMA_X) / b
    analytic = math.cos(b / 2) * np.eye(2) + 1j * math.sin(b / 2) * axis
    assert np.max(np.abs(u - analytic)) < 1e-12
    print("PASS criterion 3: constant-edge propagators m-independent to 1e-13")


def test_criterion_4_identity_synthesis():
    """The known global optimum X = 0 is found to rel_error < 1e-8."""
    model = RegisterModel(2)
    cfg = SynthesisConfig(
        n_vertices=4, m_points=100, max_evals=8000, n_restarts=1, seed=0,
        adaptive=True,
    )
    res = synthesize(model, builtin_gate("identity", 2), cfg)
    assert res.rel_error < 1e-8
    print(f"PASS criterion 4: identity rel_error = {res.rel_error:.3e}")


@pytest.fixture(scope="session")
def cnot_threads1_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance") / "cnot_threads1.json"
    code = main(CNOT_ARGS + ["--threads", "1", "--out", str(out)])
    return code, out


@pytest.mark.slow
def test_criterion_5_cnot_synthesis(cnot_threads1_file):
    """CNOT at N=2, nu=4, m=100, best of 20 restarts: rel_error <= 1e-4."""
    code, out = cnot_threads1_file
    result, model = read_result(out)
    assert result.rel_error <= 1e-4
    assert code == 0
    # the reported error must not be a discretization artifact
    report = verify(model, result.target, result.best_loop, 100)
    assert abs(report.abs_error_at_10m - report.abs_error_at_m) <= 1e-4
    assert report_is_healthy(report)
    print(f"PASS criterion 5: cnot rel_error = {result.rel_error:.3e} "
          f"(paper-scale best achievable ~1e-11 with extended budget)")


@pytest.mark.slow
def test_criterion_6_qft2_synthesis(tmp_path):
    """Two-qubit Fourier transform at the same desk-scale configuration."""
    out = tmp_path / "qft2.json"
    argv = ["synthesize", "--gate", "qft2", "--qubits", "2", "--vertices", "4",
            "--points", "100", "--restarts", "20", "--seed", "7",
            "--max-evals", "15000", "--adaptive", "--out", str(out)]
    code = main(argv)
    result, _ = read_result(out)
    assert result.rel_error <= 1e-4
    assert code == 0
    print(f"PASS criterion 6: qft2 rel_error = {result.rel_error:.3e}")


@pytest.mark.slow
def test_criterion_7_qft3_synthesis(tmp_path):
    """Three-qubit Fourier transform: rel_error <= 1e-2 (extended run)."""
    out = tmp_path / "qft3.json"
    argv = ["synthesize", "--gate", "qft3", "--vertices", "12",
            "--points", "100", "--restarts", "2", "--seed", "1",
            "--max-evals", "220000", "--adaptive",
            "--f-tol", "1e-5", "--x-tol", "1e-3",
            "--success-threshold", "1e-2", "--out", str(out)]
    code = main(argv)
    result, _ = read_result(out)
    assert result.rel_error <= 1e-2
    assert code == 0
    print(f"PASS criterion 7: qft3 rel_error = {result.rel_error:.3e} "
          f"(paper-scale ~1e-5 is a stretch goal, not gated)")


@pytest.mark.slow
def test_criterion_8_thread_determinism(cnot_threads1_file, tmp_path):
    """The criterion-5 run gives byte-identical files for 1 or 8 workers."""
    _, t1 = cnot_threads1_file
    t8 = tmp_path / "cnot_threads8.json"
    main(CNOT_ARGS + ["--threads", "8", "--out", str(t8)])
    assert t1.read_bytes() == t8.read_bytes()
    print("PASS criterion 8: --threads 1 and --threads 8 result files identical")


def test_criterion_9_cost_report():
    """Edge-count comparison matches the published 13 vs 20."""
    report = cost_report(3, 12, 4, 4)
    assert report.direct_edges == 13
    assert report.sequential_edges == 20
    print("PASS criterion 9: direct 13 edges vs sequential 20 edges")


def test_criterion_10_vertex_condition():
    """2 N nu >= 2^(2N) - 1 decides which polygon sizes are admissible."""
    assert vertex_condition(2, 4) is True
    assert vertex_condition(3, 12) is True
    assert vertex_condition(2, 3) is False
    print("PASS criterion 10: vertex condition matches 2N*nu >= 2^(2N)-1")
