import math

import numpy as np
import pytest
from scipy.stats import binom

import openspin as osp
from openspin.errors import DimensionError, NumericError


def random_density(n, seed):
    rng = np.random.default_rng(seed)
    dim = 1 << n
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def test_weights_base_cases():
    assert osp.binomial_weights(0, 0.4, 0.05).w.tolist() == [1.0]
    w = osp.binomial_weights(7, 0.0, 0.05).w
    assert w[-1] == 1.0 and np.all(w[:-1] == 0.0)


def test_weights_m2_closed_form():
    # w_x = C(2,x) a^(2-x) / (1+a)^2 with a = Gamma dt
    a = 0.1 * 0.05  # one dephasing qubit
    w = osp.binomial_weights(2, 0.1, 0.05).w
    want = np.array([a * a, 2 * a, 1.0]) / (1 + a) ** 2
    assert np.allclose(w, want, atol=1e-16)


def test_weights_match_binom_pmf():
    # w_x = pmf(m - x) for the success probability Gamma dt / (1 + Gamma dt)
    m, Gamma, dt = 137, 0.6, 0.02
    p = Gamma * dt / (1 + Gamma * dt)
    w = osp.binomial_weights(m, Gamma, dt).w
    want = binom.pmf(m - np.arange(m + 1), m, p)
    assert np.allclose(w, want, rtol=1e-10, atol=1e-300)


def test_weights_normalized_at_scale():
    for m, Gamma, dt in [(1, 0.4, 0.05), (100, 0.4, 0.05), (10_000, 1.0, 0.05),
                         (100_000, 0.4, 0.05)]:
        w = osp.binomial_weights(m, Gamma, dt).w
        assert abs(math.fsum(w.tolist()) - 1.0) < 1e-12
        assert np.all(w >= 0.0)


def test_scale_overflow_guarded():
    from openspin.reconstruct import _scale
    assert np.isclose(_scale(2, 0.4, 0.05), 1.02 ** 2, atol=1e-14)
    with pytest.raises(NumericError):
        _scale(40_000, 0.4, 0.05)  # (1.02)^40000 overflows; use adjoint_direct


def test_strategy_validation():
    osp.Strategy("adjoint_direct")
    with pytest.raises(ValueError):
        osp.Strategy("euler")
    with pytest.raises(ValueError):
        osp.Strategy("reconstructed", truncation_eps=1.5)


def test_ledger_identity():
    # reconstruction inverts the channel mixing: the recovered rho_x iterate
    # the one-step map G(rho) = (1 + Gamma dt) F(rho) - Gamma dt rho exactly
    n, gamma, dt, m = 2, 0.3, 0.05, 25
    H = osp.build_xy(osp.chain(n), -1.0)
    diss = osp.build_uniform_dephasing(n, gamma)
    ch = osp.build_adjoint(H, diss, dt)
    rho0 = random_density(n, 21)
    a = ch.Gamma * dt

    ledger = osp.ReconstructionLedger(rho0, ch.Gamma, dt)
    F = rho0.copy()
    G = rho0.copy()
    worst = 0.0
    for t in range(1, m + 1):
        F = osp.apply_adjoint(ch, F)
        rec = osp.reconstruct_state(F, ledger, t, truncation_eps=0.0)
        G = (1 + a) * osp.apply_adjoint(ch, G) - a * G
        worst = max(worst, np.max(np.abs(rec - G)))
    assert worst < 1e-9  # measured ~1e-15


def test_reconstruct_requires_full_ledger():
    ch = osp.build_adjoint(np.zeros((2, 2)), osp.build_uniform_dephasing(1, 0.1), 0.05)
    rho0 = np.eye(2, dtype=complex) / 2
    ledger = osp.ReconstructionLedger(rho0, ch.Gamma, 0.05)
    with pytest.raises(DimensionError):
        osp.reconstruct_state(rho0, ledger, 2)


def test_dephasing_step_closed_form():
    # H=0: the recovered <X> obeys x_m = (1 - 2 gamma dt) x_{m-1} exactly
    gamma, dt, m = 0.1, 0.05, 200
    ch = osp.build_adjoint(np.zeros((2, 2)), osp.build_uniform_dephasing(1, gamma), dt)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    rho0 = np.outer(plus, plus.conj())
    ts = osp.run_with_strategy(ch, rho0, m, [osp.ObservableSpec(kind="pauli", letters="X")],
                               osp.Strategy("reconstructed"))
    _, x, _ = ts.column("X", "reconstructed")
    assert np.isclose(x[1], 0.99, atol=1e-12)
    want = (1 - 2 * gamma * dt) ** np.arange(m + 1)
    assert np.max(np.abs(x - want)) < 1e-10


def test_truncation_changes_nothing_at_default():
    n, gamma, dt, m = 2, 0.2, 0.05, 40
    H = osp.build_xy(osp.chain(n), -1.0)
    ch = osp.build_adjoint(H, osp.build_uniform_dephasing(n, gamma), dt)
    rho0 = random_density(n, 5)
    obs = [osp.ObservableSpec(kind="pauli", letters="ZI")]
    _, exact, _ = osp.run_with_strategy(
        ch, rho0, m, obs, osp.Strategy("reconstructed", truncation_eps=0.0)
    ).column("ZI", "reconstructed")
    _, trunc, _ = osp.run_with_strategy(
        ch, rho0, m, obs, osp.Strategy("reconstructed", truncation_eps=1e-12)
    ).column("ZI", "reconstructed")
    assert np.max(np.abs(exact - trunc)) < 1e-10


def test_state_and_scalar_ledgers_agree():
    # linear observables: carrying numbers must equal carrying matrices
    n, gamma, dt, m = 3, 0.15, 0.05, 30
    H = osp.build_xy(osp.chain(n), -1.0)
    ch = osp.build_adjoint(H, osp.build_uniform_dephasing(n, gamma), dt)
    rho0 = random_density(n, 8)
    obs = [osp.ObservableSpec(kind="correlation", sites=(0, 2)),
           osp.ObservableSpec(kind="pauli", letters="ZII")]
    strat = osp.Strategy("reconstructed")
    a = osp.run_with_strategy(ch, rho0, m, obs, strat, ledger_mode="state")
    b = osp.run_with_strategy(ch, rho0, m, obs, strat, ledger_mode="scalar")
    for o in obs:
        _, va, _ = a.column(o.label, "reconstructed")
        _, vb, _ = b.column(o.label, "reconstructed")
        assert np.max(np.abs(va - vb)) < 1e-10


def test_scalar_ledger_rejects_entropy():
    ch = osp.build_adjoint(np.zeros((4, 4)), osp.build_uniform_dephasing(2, 0.1), 0.05)
    rho0 = np.eye(4, dtype=complex) / 4
    with pytest.raises(ValueError):
        osp.run_with_strategy(ch, rho0, 3, [osp.ObservableSpec(kind="entropy")],
                              osp.Strategy("reconstructed"), ledger_mode="scalar")


def test_adjoint_direct_strategy_reports_channel_iterates():
    n, gamma, dt, m = 2, 0.2, 0.05, 12
    H = osp.build_xy(osp.chain(n), -1.0)
    ch = osp.build_adjoint(H, osp.build_uniform_dephasing(n, gamma), dt)
    rho0 = random_density(n, 30)
    spec = osp.ObservableSpec(kind="pauli", letters="ZI")
    ts = osp.run_with_strategy(ch, rho0, m, [spec], osp.Strategy("adjoint_direct"))
    t, v, _ = ts.column("ZI", "adjoint_direct")
    states = osp.iterate_adjoint(ch, rho0, m)
    assert np.isclose(v[0], spec.evaluate(rho0), atol=1e-13)
    for k, rho in enumerate(states, start=1):
        assert np.isclose(v[k], spec.evaluate(rho), atol=1e-12)
    assert np.allclose(t, dt * np.arange(m + 1), atol=1e-12)


def test_reconstruction_tracks_rk4():
    # the recovered dynamics is a first-order scheme: O(T dt) against the oracle
    n, gamma, dt, T = 2, 0.2, 0.05, 2.0
    m = round(T / dt)
    H = osp.build_xy(osp.chain(n), -1.0)
    diss = osp.build_uniform_dephasing(n, gamma)
    ch = osp.build_adjoint(H, diss, dt)
    v = np.zeros(4, dtype=complex); v[1] = 1.0
    rho0 = np.outer(v, v.conj())
    spec = osp.ObservableSpec(kind="pauli", letters="ZI")
    ts = osp.run_with_strategy(ch, rho0, m, [spec], osp.Strategy("reconstructed"))
    _, rec, _ = ts.column("ZI", "reconstructed")
    states = osp.integrate_reference(rho0, H, diss,
                                     osp.EvolutionParams(dt=dt / 10, T=T), record_every=10)
    for k, rho in enumerate(states, start=1):
        assert abs(rec[k] - spec.evaluate(rho)) < T * dt
