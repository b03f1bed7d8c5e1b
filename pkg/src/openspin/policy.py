"""Numeric policy: every tolerance and size guard in one record.

Functions that check state validity accept a policy argument and default to
DEFAULT_POLICY, so a whole run can be tightened or loosened in one place.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    # structural tolerances (exact linear algebra should hold to rounding)
    operator_hermitian_tol: float = 1e-12   # H == H.conj().T entrywise for tagged operators
    unitary_tol: float = 1e-10              # max |U U^dag - I|
    state_hermitian_tol: float = 1e-10      # density matrices
    trace_tol: float = 1e-10
    norm_tol: float = 1e-10                 # state vector normalization
    # physical tolerances (accumulated integrator noise allowed)
    psd_floor: float = -1e-8                # min eigenvalue for a valid density input
    psd_abort: float = -1e-6                # integrator abort threshold
    imag_expectation_tol: float = 1e-8      # residual imaginary part of Tr[rho O]
    trace_drift_abort: float = 1e-6         # per-step pre-renormalization drift
    reconstruction_tol: float = 1e-8        # hermiticity/trace of reconstructed states
    # misc
    entropy_cutoff: float = 1e-14           # eigenvalues below this contribute 0 to S
    max_qubits: int = 14                    # dense-representation guard


DEFAULT_POLICY = NumericPolicy()
