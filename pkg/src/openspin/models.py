"""Benchmark Hamiltonians and dissipator sets.

Two model families: the XY model on an open chain or open rectangular grid,
H = -J sum_<ij> (X_i X_j + Y_i Y_j), and the disordered Heisenberg chain,
H = -J sum_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + sum_i V_i Z_i with
V_i uniform in [-h, h]. Dissipation is uniform Z dephasing. Both Hamiltonians
commute with the total magnetization sum_i Z_i, and so do the dissipators, so
the evolution conserves <sum Z_i>; tests lean on that.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .paulis import PauliString, pauli_matrix, single_site_string


@dataclass(frozen=True)
class Geometry:
    """Open-boundary site layout: a chain (n,) or a row-major grid (rows, cols)."""

    kind: str
    extents: tuple

    def __post_init__(self):
        if self.kind not in ("chain", "grid"):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.kind == "chain":
            if len(self.extents) != 1 or self.extents[0] < 1:
                raise ValueError("chain geometry needs extents (n,) with n >= 1")
        else:
            if len(self.extents) != 2 or min(self.extents) < 1:
                raise ValueError("grid geometry needs extents (rows, cols) >= 1")

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.extents))

    def edges(self):
        """Nearest-neighbor pairs (i < j), each edge exactly once."""
        if self.kind == "chain":
            n = self.extents[0]
            return [(i, i + 1) for i in range(n - 1)]
        rows, cols = self.extents
        out = []
        for r in range(rows):
            for c in range(cols):
                s = r * cols + c
                if c + 1 < cols:
                    out.append((s, s + 1))
                if r + 1 < rows:
                    out.append((s, s + cols))
        return out


def chain(n: int) -> Geometry:
    return Geometry("chain", (n,))


def grid(rows: int, cols: int) -> Geometry:
    return Geometry("grid", (rows, cols))


@dataclass(frozen=True, eq=False)
class DissipatorSet:
    """Jump operators with rates: terms (P_k, gamma_k), all gamma_k >= 0."""

    n: int
    terms: tuple = ()

    def __post_init__(self):
        for ps, rate in self.terms:
            if ps.n != self.n:
                raise DimensionError(f"dissipator {ps} has length {ps.n}, expected {self.n}")
            if rate < 0:
                raise ValueError(f"negative dissipation rate {rate} on {ps}")

    @property
    def Gamma(self) -> float:
        return math.fsum(rate for _, rate in self.terms)


@dataclass(frozen=True)
class DisorderRealization:
    """On-site fields drawn once from a seeded generator, kept for reproducibility."""

    V: tuple
    seed: int
    h: float
    algorithm: str = "numpy default_rng (PCG64)"


def build_xy(geometry: Geometry, J: float) -> np.ndarray:
    """XY Hamiltonian -J sum_<ij> (X_i X_j + Y_i Y_j) over the geometry's edges."""
    n = geometry.n_sites
    dim = 1 << n
    H = np.zeros((dim, dim), dtype=complex)
    for i, j in geometry.edges():
        for letter in ("X", "Y"):
            H -= J * pauli_matrix(single_site_string(n, {i: letter, j: letter}))
    return H


def build_heisenberg_disordered(n: int, J: float, h: float, seed: int):
    """Heisenberg chain with seeded on-site disorder; returns (H, realization)."""
    if n < 2:
        raise ValueError(f"need n >= 2 sites, got {n}")
    rng = np.random.default_rng(seed)
    V = rng.uniform(-h, h, size=n)
    dim = 1 << n
    H = np.zeros((dim, dim), dtype=complex)
    for i in range(n - 1):
        for letter in ("X", "Y", "Z"):
            H -= J * pauli_matrix(single_site_string(n, {i: letter, i + 1: letter}))
    for i in range(n):
        H += V[i] * pauli_matrix(single_site_string(n, {i: "Z"}))
    return H, DisorderRealization(V=tuple(float(v) for v in V), seed=seed, h=h)


def build_uniform_dephasing(n: int, gamma: float) -> DissipatorSet:
    """One Z jump operator per site, all at rate gamma; Gamma = n * gamma."""
    if gamma < 0:
        raise ValueError(f"negative dephasing rate {gamma}")
    terms = tuple((single_site_string(n, {k: "Z"}), float(gamma)) for k in range(n))
    return DissipatorSet(n=n, terms=terms)
