"""Ground-truth integrators for the Lindblad equation with Pauli jump operators.

Two routes: a classic RK4 integrator used as the reference oracle, and the
first-order Euler Kraus step whose operator set is complete only to O(dt^2).
Because every jump operator P satisfies P^2 = I, the anticommutator part of
the dissipator collapses to -Gamma rho, which both routes exploit.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .models import DissipatorSet
from .paulis import conjugate_pauli
from .policy import DEFAULT_POLICY, NumericPolicy

log = logging.getLogger(__name__)

_METHODS = ("rk4", "euler_kraus")


@dataclass(frozen=True)
class EvolutionParams:
    """Time grid: step dt, horizon T, and integrator choice."""

    dt: float
    T: float
    method: str = "rk4"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.T < self.dt:
            raise ValueError(f"T={self.T} shorter than one step dt={self.dt}")
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {_METHODS}")
        if abs(self.steps * self.dt - self.T) > 1e-9:
            raise ValueError(f"T={self.T} is not a whole number of dt={self.dt} steps")

    @property
    def steps(self) -> int:
        return round(self.T / self.dt)


def lindblad_rhs(rho: np.ndarray, H: np.ndarray, diss: DissipatorSet) -> np.ndarray:
    """-i[H, rho] + sum_k gamma_k (P_k rho P_k - rho), valid for Pauli jumps."""
    out = -1j * (H @ rho - rho @ H)
    Gamma = diss.Gamma
    if Gamma > 0:
        out -= Gamma * rho
        for ps, rate in diss.terms:
            if rate > 0:
                out += rate * conjugate_pauli(ps, rho)
    return out


def integrate_reference(
    rho0: np.ndarray,
    H: np.ndarray,
    diss: DissipatorSet,
    params: EvolutionParams,
    record_every: int = 1,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> list:
    """RK4 time series: states after steps record_every, 2*record_every, ...

    Trace is renormalized each step; the pre-renormalization drift is logged and
    must stay below the abort threshold. Hermiticity and positivity are checked
    at recorded states only (an eigendecomposition per substep would dominate).
    """
    if params.method != "rk4":
        raise ValueError(f"reference integrator requires method='rk4', got {params.method!r}")
    if params.steps % record_every != 0:
        raise ValueError(f"record_every={record_every} does not divide {params.steps} steps")
    dt = params.dt
    rho = rho0.astype(complex).copy()
    states = []
    worst_drift = 0.0
    for step in range(1, params.steps + 1):
        k1 = lindblad_rhs(rho, H, diss)
        k2 = lindblad_rhs(rho + 0.5 * dt * k1, H, diss)
        k3 = lindblad_rhs(rho + 0.5 * dt * k2, H, diss)
        k4 = lindblad_rhs(rho + dt * k3, H, diss)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tr = np.trace(rho).real
        drift = abs(tr - 1.0)
        worst_drift = max(worst_drift, drift)
        if drift > policy.trace_drift_abort:
            raise NumericError(f"trace drift {drift:.3e} at step {step} exceeds abort threshold")
        rho = rho / tr
        if step % record_every == 0:
            if np.max(np.abs(rho - rho.conj().T)) > policy.state_hermitian_tol:
                raise NumericError(f"hermiticity lost at step {step}")
            lo = float(np.linalg.eigvalsh(rho)[0])
            if lo < policy.psd_abort:
                raise NumericError(
                    f"PSD violation at step {step} (t={step * dt:g}): min eigenvalue {lo:.3e}"
                )
            states.append(rho.copy())
    log.debug("rk4: %d steps, worst per-step trace drift %.3e", params.steps, worst_drift)
    return states


def euler_kraus_step(
    rho: np.ndarray, H: np.ndarray, diss: DissipatorSet, dt: float
) -> np.ndarray:
    """One step of the first-order Kraus channel, renormalized in trace.

    M_0 = I + (-iH - Gamma/2) dt, M_k = sqrt(dt gamma_k) P_k. The set is
    complete only to O(dt^2), so the output trace is 1 + O(dt^2); it is divided
    out and the defect logged, never hidden.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dim = rho.shape[0]
    Gamma = diss.Gamma
    M0 = np.eye(dim, dtype=complex) + (-1j * H - 0.5 * Gamma * np.eye(dim)) * dt
    out = M0 @ rho @ M0.conj().T
    for ps, rate in diss.terms:
        if rate > 0:
            out += (dt * rate) * conjugate_pauli(ps, rho)
    tr = np.trace(out).real
    log.debug("euler_kraus_step: trace defect %.3e", abs(tr - 1.0))
    return out / tr


def kraus_completeness_defect(H: np.ndarray, diss: DissipatorSet, dt: float) -> float:
    """max | sum_a M_a^dag M_a - I |, the O(dt^2) incompleteness of the Euler set."""
    dim = H.shape[0]
    Gamma = diss.Gamma
    M0 = np.eye(dim, dtype=complex) + (-1j * H - 0.5 * Gamma * np.eye(dim)) * dt
    total = M0.conj().T @ M0
    # each jump contributes dt gamma_k P^dag P = dt gamma_k I exactly
    total += dt * Gamma * np.eye(dim)
    return float(np.max(np.abs(total - np.eye(dim))))
