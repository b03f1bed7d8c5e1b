"""openspin: open quantum spin systems under Pauli dissipation.

Three routes to the same dissipated dynamics, built to be compared:

- an exact Lindblad reference integrator (RK4) and the first-order Euler
  Kraus channel it bounds,
- a trace-preserving mixed-unitary surrogate channel applied exactly to
  density matrices or sampled as pure-state trajectories,
- classical reconstruction of the true dissipated state from the surrogate
  series via stable binomial weights.

Benchmark models (XY chain/grid, disordered Heisenberg chain), the physical
observables reported for them, and a config-driven CLI harness round out the
package.
"""

__version__ = "0.1.0"

from .adjoint import (
    AdjointChannel,
    TrajectoryBatch,
    apply_adjoint,
    build_adjoint,
    iterate_adjoint,
    sample_trajectories,
    sample_trajectory_combinations,
    steady_state_defect,
)
from .config import (
    ExperimentConfig,
    build_system,
    initial_state_vector,
    parse_config,
    parse_observable,
)
from .errors import ConfigError, DimensionError, NumericError, OpenspinError
from .lindblad import (
    EvolutionParams,
    euler_kraus_step,
    integrate_reference,
    kraus_completeness_defect,
    lindblad_rhs,
)
from .models import (
    DisorderRealization,
    DissipatorSet,
    Geometry,
    build_heisenberg_disordered,
    build_uniform_dephasing,
    build_xy,
    chain,
    grid,
)
from .observables import (
    ObservableSpec,
    correlation,
    imbalance,
    partial_trace,
    von_neumann_entropy,
)
from .paulis import (
    PauliString,
    apply_pauli,
    check_density_matrix,
    check_state_vector,
    conjugate_pauli,
    expectation,
    expectation_pauli,
    hermitian_exponential,
    pauli_action,
    pauli_matrix,
    single_site_string,
    statevector_expectation_pauli,
)
from .policy import DEFAULT_POLICY, NumericPolicy
from .reconstruct import (
    BinomialWeights,
    ReconstructionLedger,
    Strategy,
    binomial_weights,
    reconstruct_expectation,
    reconstruct_state,
    run_with_strategy,
)
from .runner import compare_methods, run_experiment, sweep_dt
from .series import Record, TimeSeries

__all__ = [
    "AdjointChannel", "TrajectoryBatch", "apply_adjoint", "build_adjoint",
    "iterate_adjoint", "sample_trajectories", "sample_trajectory_combinations",
    "steady_state_defect",
    "ExperimentConfig", "build_system", "initial_state_vector", "parse_config",
    "parse_observable",
    "ConfigError", "DimensionError", "NumericError", "OpenspinError",
    "EvolutionParams", "euler_kraus_step", "integrate_reference",
    "kraus_completeness_defect", "lindblad_rhs",
    "DisorderRealization", "DissipatorSet", "Geometry",
    "build_heisenberg_disordered", "build_uniform_dephasing", "build_xy",
    "chain", "grid",
    "ObservableSpec", "correlation", "imbalance", "partial_trace",
    "von_neumann_entropy",
    "PauliString", "apply_pauli", "check_density_matrix", "check_state_vector",
    "conjugate_pauli", "expectation", "expectation_pauli",
    "hermitian_exponential", "pauli_action", "pauli_matrix",
    "single_site_string", "statevector_expectation_pauli",
    "DEFAULT_POLICY", "NumericPolicy",
    "BinomialWeights", "ReconstructionLedger", "Strategy", "binomial_weights",
    "reconstruct_expectation", "reconstruct_state", "run_with_strategy",
    "compare_methods", "run_experiment", "sweep_dt",
    "Record", "TimeSeries",
    "__version__",
]
