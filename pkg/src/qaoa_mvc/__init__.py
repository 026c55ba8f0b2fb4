"""QAOA benchmarking stack for the minimum vertex cover problem."""

__version__ = "0.1.0"

from .errors import CalibrationError, ConfigError, ContractViolation, GraphParseError
from .graphs import (
    CoverSolution,
    Graph,
    bits_to_index,
    canonical_form,
    enumerate_connected_graphs,
    index_to_bits,
    is_vertex_cover,
    min_vertex_covers,
)
from .hamiltonian import IsingHamiltonian, PenaltyWeights, build_ising, classical_cost, diagonal
from .circuits import Circuit, Gate, QaoaParams, build_qaoa_circuit
from .kernels import kernel_backend
from .noise import NoiseModel, load_calibration
from .simulator import (
    QuantumState,
    ShotCounts,
    apply_depolarizing,
    apply_thermal_relaxation,
    expectation_exact,
    expectation_from_counts,
    run_density_matrix,
    run_statevector,
    sample,
)
from .gradients import Objective, finite_difference_grad, parameter_shift_grad
from .optimizers import (
    METHODS,
    OptimizationTrace,
    OptimizerConfig,
    minimize,
    spsa_gradient_estimate,
)
from .harness import (
    ExperimentConfig,
    RunRecord,
    aggregate,
    run_depth_sweep,
    run_experiment,
    run_optimizer_comparison,
    run_single,
    run_success_probability,
)

__all__ = [
    "CalibrationError",
    "Circuit",
    "ConfigError",
    "ContractViolation",
    "CoverSolution",
    "ExperimentConfig",
    "Gate",
    "Graph",
    "GraphParseError",
    "IsingHamiltonian",
    "METHODS",
    "NoiseModel",
    "Objective",
    "OptimizationTrace",
    "OptimizerConfig",
    "PenaltyWeights",
    "QaoaParams",
    "QuantumState",
    "RunRecord",
    "ShotCounts",
    "aggregate",
    "apply_depolarizing",
    "apply_thermal_relaxation",
    "bits_to_index",
    "build_ising",
    "build_qaoa_circuit",
    "canonical_form",
    "classical_cost",
    "diagonal",
    "enumerate_connected_graphs",
    "expectation_exact",
    "expectation_from_counts",
    "finite_difference_grad",
    "index_to_bits",
    "is_vertex_cover",
    "kernel_backend",
    "load_calibration",
    "min_vertex_covers",
    "minimize",
    "parameter_shift_grad",
    "run_density_matrix",
    "run_depth_sweep",
    "run_experiment",
    "run_optimizer_comparison",
    "run_single",
    "run_statevector",
    "run_success_probability",
    "sample",
    "spsa_gradient_estimate",
]
