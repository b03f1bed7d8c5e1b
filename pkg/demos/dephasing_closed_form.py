"""Single dephasing qubit against its closed form.

With H = 0 and a Z dissipator at rate gamma, coherences obey
<X>(t) = exp(-2 gamma t). One channel application contracts X by
1/(1 + 2 gamma dt); the reconstruction turns that into the Euler factor
(1 - 2 gamma dt) per step, so the recovered curve tracks the exponential
to O(T dt).
"""

import math

import numpy as np

import openspin as osp


def main():
    gamma, dt, T = 0.1, 0.05, 10.0
    m = round(T / dt)
    diss = osp.build_uniform_dephasing(1, gamma)
    ch = osp.build_adjoint(np.zeros((2, 2), dtype=complex), diss, dt)
    psi0 = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)  # +1 eigenvector of X
    rho0 = np.outer(psi0, psi0.conj())

    obs = [osp.ObservableSpec(kind="pauli", letters="X")]
    recon = osp.run_with_strategy(ch, rho0, m, obs, osp.Strategy())
    direct = osp.run_with_strategy(ch, rho0, m, obs, osp.Strategy(kind="adjoint_direct"))
    t, x_rec, _ = recon.column("X", "reconstructed")
    _, x_dir, _ = direct.column("X", "adjoint_direct")
    exact = np.exp(-2.0 * gamma * t)

    print(f"dephasing qubit: gamma={gamma}, dt={dt}, {m} steps")
    print(f"{'t':>6} {'exact':>10} {'reconstructed':>14} {'channel F^t':>12}")
    for k in range(0, m + 1, 20):
        print(f"{t[k]:6.1f} {exact[k]:10.6f} {x_rec[k]:14.6f} {x_dir[k]:12.6f}")
    print(f"\nmax |reconstructed - exact| = {np.max(np.abs(x_rec - exact)):.3e}"
          f"  (bound T*dt = {T * dt:g})")
    print(f"max |channel      - exact| = {np.max(np.abs(x_dir - exact)):.3e}")
    print("with H = 0 the channel is itself a dephasing map at a slightly shifted"
          " rate, so F^t also hugs the exponential here; the reconstruction's"
          " O(dt) offset is the general-purpose Euler recovery at work, and it"
          " shrinks linearly with dt")


if __name__ == "__main__":
    main()
