"""The adjoint mixed-unitary channel: exact application and trajectory sampling.

One Euler step of the dissipated dynamics is replaced by the exactly
trace-preserving convex mixture

    F(rho) = p0 U0 rho U0^dag + sum_k p_k P_k rho P_k,
    U0 = e^{-iH dt}, p0 = 1/(1 + Gamma dt), p_k = gamma_k dt / (1 + Gamma dt).

Exact application composes densities; the sampler realizes the same channel as
a Monte Carlo average over pure-state trajectories, one random unitary per
step, with per-trajectory RNG streams so results do not depend on execution
order.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .models import DissipatorSet
from .paulis import check_state_vector, hermitian_exponential, pauli_action
from .policy import DEFAULT_POLICY, NumericPolicy

_CHUNK = 16384  # trajectories per batch; fixed so reductions are reproducible


@dataclass(frozen=True, eq=False)
class AdjointChannel:
    """Probability-weighted unitaries {(p0, U0)} + {(p_k, P_k)} for one step dt."""

    U0: np.ndarray
    jumps: tuple          # ((p_k, PauliString), ...) with p_k > 0
    p0: float
    Gamma: float
    dt: float
    n: int
    jump_actions: tuple   # precomputed (perm, phases) per jump

    @property
    def dim(self) -> int:
        return 1 << self.n


def build_adjoint(
    H: np.ndarray,
    diss: DissipatorSet,
    dt: float,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> AdjointChannel:
    """Assemble the channel; zero-rate dissipator terms are dropped (they never fire)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n = diss.n
    if H.shape != (1 << n, 1 << n):
        raise DimensionError(f"H shape {H.shape} does not match n={n} sites")
    U0 = hermitian_exponential(H, dt, policy)
    Gamma = diss.Gamma
    denom = 1.0 + Gamma * dt
    p0 = 1.0 / denom
    jumps = tuple((rate * dt / denom, ps) for ps, rate in diss.terms if rate > 0)
    total = math.fsum([p0] + [p for p, _ in jumps])
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"channel weights sum to {total}, not 1")
    actions = tuple(pauli_action(ps) for _, ps in jumps)
    return AdjointChannel(
        U0=U0, jumps=jumps, p0=p0, Gamma=Gamma, dt=dt, n=n, jump_actions=actions
    )


def apply_adjoint(ch: AdjointChannel, rho: np.ndarray) -> np.ndarray:
    """Exact dense evaluation of F(rho); exactly trace-preserving."""
    if rho.shape != (ch.dim, ch.dim):
        raise DimensionError(f"state shape {rho.shape} does not match channel dim {ch.dim}")
    out = ch.p0 * (ch.U0 @ rho @ ch.U0.conj().T)
    for (p, _), (perm, phases) in zip(ch.jumps, ch.jump_actions):
        q = phases[perm]
        out += p * ((q[:, None] * rho[np.ix_(perm, perm)]) * q.conj()[None, :])
    return out


def iterate_adjoint(ch: AdjointChannel, rho0: np.ndarray, m: int) -> list:
    """[F(rho0), F^2(rho0), ..., F^m(rho0)]."""
    if m < 1:
        raise ValueError(f"need m >= 1 steps, got {m}")
    out = []
    rho = rho0
    for _ in range(m):
        rho = apply_adjoint(ch, rho)
        out.append(rho)
    return out


def steady_state_defect(ch: AdjointChannel, rho: np.ndarray) -> float:
    """max |F(rho) - rho|, zero exactly at a fixed point of the channel."""
    return float(np.max(np.abs(apply_adjoint(ch, rho) - rho)))


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    """Monte Carlo estimate of Tr[F^t(rho0) O] for t = 0..m and each observable.

    means/stderrs have shape (m+1, len(labels)); row t is after t channel steps.
    stderr is the sample standard deviation (ddof=1) over M trajectories divided
    by sqrt(M), defined as 0.0 when M = 1 or when all trajectories coincide.
    """

    M: int
    seed: int
    labels: tuple
    means: np.ndarray
    stderrs: np.ndarray


def _kahan_add(total: np.ndarray, comp: np.ndarray, delta: np.ndarray) -> None:
    y = delta - comp
    t = total + y
    comp[...] = (t - total) - y
    total[...] = t


def _trajectory_uniforms(seed: int, first: int, count: int, m: int) -> np.ndarray:
    """Row j holds the m draws of trajectory first + j from its own PCG64 stream."""
    u = np.empty((count, m))
    for j in range(count):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(first + j,))
        u[j] = np.random.Generator(np.random.PCG64(ss)).random(m)
    return u


def sample_trajectory_combinations(
    ch: AdjointChannel,
    psi0: np.ndarray,
    m: int,
    M: int,
    seed: int,
    combos,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> TrajectoryBatch:
    """Sampler core taking observables as weighted Pauli sums.

    combos: sequence of (label, ((coef, PauliString), ...)); each combination is
    evaluated per trajectory, so its standard error includes the cross terms.
    """
    if m < 1:
        raise ValueError(f"need m >= 1 steps, got {m}")
    if M < 1:
        raise ValueError(f"need M >= 1 trajectories, got {M}")
    if psi0.shape != (ch.dim,):
        raise DimensionError(f"state shape {psi0.shape} does not match channel dim {ch.dim}")
    check_state_vector(psi0, policy)

    cum = np.cumsum([ch.p0] + [p for p, _ in ch.jumps])
    cum[-1] = 1.0  # guard the top edge against accumulated rounding
    kernels = []
    labels = []
    for label, terms in combos:
        labels.append(label)
        kernels.append([(float(c), *pauli_action(ps)) for c, ps in terms])
    K = len(kernels)

    if not ch.jumps:
        # no jump operators: every trajectory is the same unitary path, so a
        # single pass gives the exact mean and an exactly zero standard error
        psi = psi0.astype(complex).copy()
        means = np.zeros((m + 1, K))

        def record_one(t):
            for j, terms in enumerate(kernels):
                means[t, j] = math.fsum(
                    coef * np.sum(psi[perm].conj() * phases * psi).real
                    for coef, perm, phases in terms
                )

        record_one(0)
        for t in range(1, m + 1):
            psi = ch.U0 @ psi
            record_one(t)
        return TrajectoryBatch(M=M, seed=seed, labels=tuple(labels),
                               means=means, stderrs=np.zeros_like(means))

    sums = np.zeros((m + 1, K))
    sums_c = np.zeros((m + 1, K))
    sq = np.zeros((m + 1, K))
    sq_c = np.zeros((m + 1, K))

    for start in range(0, M, _CHUNK):
        count = min(_CHUNK, M - start)
        u = _trajectory_uniforms(seed, start, count, m)
        psi = np.repeat(psi0.astype(complex)[:, None], count, axis=1)
        cs = np.empty((m + 1, K))
        cq = np.empty((m + 1, K))

        def record(t):
            for j, terms in enumerate(kernels):
                v = np.zeros(count)
                for coef, perm, phases in terms:
                    v += coef * np.einsum(
                        "ic,i,ic->c", psi[perm, :].conj(), phases, psi
                    ).real
                cs[t, j] = v.sum()
                cq[t, j] = (v * v).sum()

        record(0)
        for t in range(1, m + 1):
            alpha = np.searchsorted(cum, u[:, t - 1], side="right")
            unit = alpha == 0
            if np.any(unit):
                psi[:, unit] = ch.U0 @ psi[:, unit]
            for k, (perm, phases) in enumerate(ch.jump_actions):
                cols = np.nonzero(alpha == k + 1)[0]
                if cols.size:
                    psi[np.ix_(perm, cols)] = phases[:, None] * psi[:, cols]
            record(t)

        _kahan_add(sums, sums_c, cs)
        _kahan_add(sq, sq_c, cq)

    means = sums / M
    if M > 1:
        var = np.maximum(sq - M * means * means, 0.0) / (M - 1)
        stderrs = np.sqrt(var / M)
    else:
        stderrs = np.zeros_like(means)
    return TrajectoryBatch(
        M=M, seed=seed, labels=tuple(labels), means=means, stderrs=stderrs
    )


def sample_trajectories(
    ch: AdjointChannel,
    psi0: np.ndarray,
    m: int,
    M: int,
    seed: int,
    obs,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> TrajectoryBatch:
    """Estimate Tr[F^t(rho0) O] for each Pauli-string observable O, t = 0..m."""
    combos = [(ps.letters, ((1.0, ps),)) for ps in obs]
    return sample_trajectory_combinations(ch, psi0, m, M, seed, combos, policy)
