"""gateloop: numerical synthesis of multiqubit gates for inductively
coupled Josephson charge qubits via polygon control loops."""

from .register import (
    ControlLoop,
    ControlVertex,
    RegisterModel,
    build_hamiltonian,
    det_residual,
    edge_midpoints,
    hermiticity_residual,
    propagate_edge,
    propagate_loop,
    step_propagator,
    unitarity_residual,
)
from .gates import (
    BUILTIN_GATES,
    TargetGate,
    builtin_gate,
    read_matrix_file,
    su_project,
    write_matrix_file,
)
from .optimize import NelderMeadResult, nelder_mead
from .synthesis import (
    SynthesisConfig,
    SynthesisResult,
    error_functional,
    pack_loop,
    rescan_phase_roots,
    synthesize,
    unpack_loop,
    vertex_condition,
)
from .schedule import (
    ControlSchedule,
    CostReport,
    VerificationReport,
    cost_report,
    loop_to_schedule,
    read_result,
    read_schedule,
    report_is_healthy,
    schedule_to_loop,
    verify,
    write_result,
    write_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_GATES",
    "ControlLoop",
    "ControlSchedule",
    "ControlVertex",
    "CostReport",
    "NelderMeadResult",
    "RegisterModel",
    "SynthesisConfig",
    "SynthesisResult",
    "TargetGate",
    "VerificationReport",
    "build_hamiltonian",
    "builtin_gate",
    "cost_report",
    "det_residual",
    "edge_midpoints",
    "error_functional",
    "hermiticity_residual",
    "loop_to_schedule",
    "nelder_mead",
    "pack_loop",
    "propagate_edge",
    "propagate_loop",
    "read_matrix_file",
    "read_result",
    "read_schedule",
    "report_is_healthy",
    "rescan_phase_roots",
    "schedule_to_loop",
    "step_propagator",
    "su_project",
    "synthesize",
    "unitarity_residual",
    "unpack_loop",
    "verify",
    "vertex_condition",
    "write_matrix_file",
    "write_result",
    "write_schedule",
]
