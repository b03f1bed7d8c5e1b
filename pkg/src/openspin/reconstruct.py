"""Classical recovery of the dissipated state from the adjoint channel series.

m applications of the channel mix the whole history:

    F^m(rho0) = (1+Gamma dt)^{-m} sum_{x=0}^{m} C(m,x) (Gamma dt)^{m-x} rho_x,

so the true rho_m follows from F^m(rho0) and the already-reconstructed
rho_0..rho_{m-1}. The inversion is evaluated in difference form,

    rho_m = F^m + sum_{x<m} C(m,x) (Gamma dt)^{m-x} (F^m - rho_x),

which keeps every term a small correction to F^m instead of a difference of
two exponentially large sums. Weights are a Binomial(m, p) pmf with
p = Gamma dt/(1+Gamma dt), computed by the multiplicative recurrence anchored
at the mode, never by raw factorials.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .adjoint import AdjointChannel, apply_adjoint
from .errors import DimensionError, NumericError
from .paulis import expectation_pauli
from .policy import DEFAULT_POLICY, NumericPolicy
from .series import TimeSeries

_STRATEGIES = ("reconstructed", "adjoint_direct")


@dataclass(frozen=True)
class Strategy:
    """Pipeline choice: undo the mixing (short time) or report F^t as-is (long time)."""

    kind: str = "reconstructed"
    truncation_eps: float = 1e-12

    def __post_init__(self):
        if self.kind not in _STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}, expected one of {_STRATEGIES}")
        if not 0.0 <= self.truncation_eps < 1.0:
            raise ValueError(f"truncation_eps must be in [0, 1), got {self.truncation_eps}")


@dataclass(frozen=True, eq=False)
class BinomialWeights:
    """w[x] = C(m,x) p^{m-x} (1-p)^x for x = 0..m; sums to 1."""

    m: int
    p: float
    w: np.ndarray


def binomial_weights(m: int, Gamma: float, dt: float) -> BinomialWeights:
    """Stable binomial pmf for the reconstruction at step m."""
    if m < 0:
        raise ValueError(f"need m >= 0, got {m}")
    if Gamma < 0 or dt <= 0:
        raise ValueError(f"need Gamma >= 0 and dt > 0, got Gamma={Gamma}, dt={dt}")
    a = Gamma * dt
    p = a / (1.0 + a)
    q = 1.0 - p
    if m == 0:
        return BinomialWeights(m=0, p=p, w=np.array([1.0]))
    if a == 0.0:
        w = np.zeros(m + 1)
        w[m] = 1.0  # no dissipation: F^m(rho0) is rho_m itself
        return BinomialWeights(m=m, p=p, w=w)
    # anchor at the mode of Binomial(m, q), fill outward by the term ratio
    x0 = min(m, int((m + 1) * q))
    logw0 = (
        gammaln(m + 1) - gammaln(x0 + 1) - gammaln(m - x0 + 1)
        + (m - x0) * math.log(p) + x0 * math.log(q)
    )
    w = np.zeros(m + 1)
    w[x0] = math.exp(logw0)
    if x0 < m:
        x = np.arange(x0, m)
        w[x0 + 1:] = w[x0] * np.cumprod((m - x) / (x + 1) * (q / p))
    if x0 > 0:
        x = np.arange(x0, 0, -1)
        w[x0 - 1::-1] = w[x0] * np.cumprod(x / (m - x + 1) * (p / q))
    s = math.fsum(w)
    if abs(s - 1.0) > 1e-9:
        raise NumericError(f"binomial weight recurrence lost normalization: sum={s!r}")
    return BinomialWeights(m=m, p=p, w=w / s)


def _scale(m: int, Gamma: float, dt: float) -> float:
    """(1+Gamma dt)^m with an overflow guard naming the way out."""
    log_scale = m * math.log1p(Gamma * dt)
    if log_scale > 700.0:
        raise NumericError(
            f"(1+Gamma dt)^m overflows at m={m}; reconstruction is unstable this deep, "
            "use the adjoint_direct strategy"
        )
    return math.exp(log_scale)


class ReconstructionLedger:
    """Ordered history rho_0, rho_1, ... needed to reconstruct the next step.

    Entry 0 is the initial state exactly; reconstruct_state appends entry m.
    Sequential by construction: entry m requires all entries below it.
    """

    def __init__(self, rho0: np.ndarray, Gamma: float, dt: float):
        self.Gamma = float(Gamma)
        self.dt = float(dt)
        self.entries = [np.array(rho0, dtype=complex, copy=True)]

    def __len__(self) -> int:
        return len(self.entries)


def reconstruct_state(
    adjoint_m: np.ndarray,
    ledger: ReconstructionLedger,
    m: int,
    truncation_eps: float = 1e-12,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """Recover rho_m from F^m(rho0) and the ledger; appends the result.

    Terms with binomial weight below truncation_eps are dropped; their total
    contribution is bounded by (1+Gamma dt)^m * eps each. The output is checked
    for hermiticity and unit trace but deliberately not projected to PSD;
    slight negativity is a quality signal, not something to hide.
    """
    if len(ledger) < m:
        raise DimensionError(f"ledger holds {len(ledger)} entries, step m={m} needs {m}")
    bw = binomial_weights(m, ledger.Gamma, ledger.dt)
    scale = _scale(m, ledger.Gamma, ledger.dt)
    out = adjoint_m.astype(complex).copy()
    # weights are unimodal, so the retained indices form one contiguous window
    active = np.nonzero(bw.w[:m] >= truncation_eps)[0]
    for x in active:
        out += (bw.w[x] * scale) * (adjoint_m - ledger.entries[x])
    if np.max(np.abs(out - out.conj().T)) > policy.reconstruction_tol:
        raise NumericError(f"reconstructed state lost hermiticity at m={m}")
    tr = np.trace(out).real
    if abs(tr - 1.0) > policy.reconstruction_tol:
        raise NumericError(f"reconstructed state trace {tr!r} deviates from 1 at m={m}")
    ledger.entries.append(out)
    return out


def reconstruct_expectation(
    adjoint_value: float,
    ledger_values,
    m: int,
    Gamma: float,
    dt: float,
    truncation_eps: float = 1e-12,
) -> float:
    """Scalar analogue of reconstruct_state for a single observable's history.

    ledger_values holds Tr[rho_x O] for x = 0..m-1; the caller keeps the list
    and appends the returned value to advance.
    """
    if len(ledger_values) != m:
        raise DimensionError(f"expected {m} ledger values, got {len(ledger_values)}")
    bw = binomial_weights(m, Gamma, dt)
    scale = _scale(m, Gamma, dt)
    out = float(adjoint_value)
    active = np.nonzero(bw.w[:m] >= truncation_eps)[0]
    for x in active:
        out += (bw.w[x] * scale) * (adjoint_value - ledger_values[x])
    return out


def run_with_strategy(
    ch: AdjointChannel,
    rho0: np.ndarray,
    m: int,
    obs,
    strat: Strategy,
    ledger_mode: str = "auto",
    policy: NumericPolicy = DEFAULT_POLICY,
) -> TimeSeries:
    """Evolve m channel steps and report observables under the chosen strategy.

    obs: list of ObservableSpec. Rows carry t = 0..m*dt and method = strat.kind.
    ledger_mode: "state" keeps full matrices (supports entropy), "scalar" keeps
    one number per observable (the measured-hardware setting), "auto" picks
    "state" up to 10 qubits.
    """
    if ledger_mode not in ("auto", "state", "scalar"):
        raise ValueError(f"unknown ledger_mode {ledger_mode!r}")
    for o in obs:
        o.check_sites(ch.n)
    series = TimeSeries()

    def emit(t, rho):
        for o in obs:
            series.add(t * ch.dt, o.label, o.evaluate(rho, policy), strat.kind)

    if strat.kind == "adjoint_direct":
        emit(0, rho0)
        rho = rho0
        for t in range(1, m + 1):
            rho = apply_adjoint(ch, rho)
            emit(t, rho)
        return series

    mode = ledger_mode
    if mode == "auto":
        mode = "state" if ch.n <= 10 else "scalar"
    if mode == "state":
        emit(0, rho0)
        ledger = ReconstructionLedger(rho0, ch.Gamma, ch.dt)
        F = rho0
        for t in range(1, m + 1):
            F = apply_adjoint(ch, F)
            rec = reconstruct_state(F, ledger, t, strat.truncation_eps, policy)
            emit(t, rec)
        return series

    nonlinear = [o.label for o in obs if not o.linear]
    if nonlinear:
        raise ValueError(
            f"observables {nonlinear} are nonlinear; a scalar ledger cannot carry them"
        )
    terms = {o.label: o.pauli_terms(ch.n) for o in obs}
    histories = {}
    for o in obs:
        v0 = o.evaluate(rho0, policy)
        histories[o.label] = [v0]
        series.add(0.0, o.label, v0, strat.kind)
    F = rho0
    for t in range(1, m + 1):
        F = apply_adjoint(ch, F)
        for o in obs:
            adj_val = math.fsum(
                c * expectation_pauli(F, ps, policy) for c, ps in terms[o.label]
            )
            rec_val = reconstruct_expectation(
                adj_val, histories[o.label], t, ch.Gamma, ch.dt, strat.truncation_eps
            )
            histories[o.label].append(rec_val)
            series.add(t * ch.dt, o.label, rec_val, strat.kind)
    return series
