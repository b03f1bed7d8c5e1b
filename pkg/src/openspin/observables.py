"""Reported physical quantities: correlations, entropy, partial trace, imbalance.

Correlation and imbalance are linear in rho (weighted Pauli expectations), so
they survive both the reconstruction pipeline and trajectory sampling. Entropy
is nonlinear and is only computed from full density matrices.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError
from .paulis import PauliString, expectation_pauli, single_site_string
from .policy import DEFAULT_POLICY, NumericPolicy


def _n_of(rho: np.ndarray) -> int:
    n = int(np.log2(rho.shape[0]) + 0.5)
    if rho.shape != (1 << n, 1 << n):
        raise DimensionError(f"shape {rho.shape} is not a square power-of-two matrix")
    return n


def partial_trace(rho: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrix on the kept sites (sorted site indices)."""
    n = _n_of(rho)
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one site")
    if keep != sorted(set(keep)) or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep={keep} must be sorted unique sites in 0..{n - 1}")
    if len(keep) == n:
        return rho.copy()
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise DimensionError(f"n={n} too large for subscript-based partial trace")
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for site in range(n):
        if site not in keep:
            col[site] = row[site]  # repeated index is summed over
    out_sub = "".join(row[s] for s in keep) + "".join(letters[n + s] for s in keep)
    sub = "".join(row) + "".join(col) + "->" + out_sub
    dim_keep = 1 << len(keep)
    return np.einsum(sub, rho.reshape((2,) * (2 * n))).reshape(dim_keep, dim_keep)


def von_neumann_entropy(rho: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """-sum lambda ln lambda; eigenvalues at or below the cutoff contribute 0."""
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < policy.psd_abort:
        raise NumericError(f"entropy of an indefinite matrix: min eigenvalue {evals[0]:.3e}")
    kept = evals[evals > policy.entropy_cutoff]
    return max(0.0, float(-np.sum(kept * np.log(kept))))


def correlation(rho: np.ndarray, i: int, j: int) -> float:
    """<Z_i Z_j>, in [-1, 1]."""
    n = _n_of(rho)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"need two distinct sites in 0..{n - 1}, got ({i}, {j})")
    return expectation_pauli(rho, single_site_string(n, {i: "Z", j: "Z"}))


def imbalance(rho: np.ndarray) -> float:
    """(1/n) sum_i (-1)^i <Z_i>; +1 on |0101...> for even n."""
    n = _n_of(rho)
    if n % 2 != 0:
        raise ValueError(f"imbalance is defined for even n, got {n}")
    total = 0.0
    for i in range(n):
        sign = 1.0 if i % 2 == 0 else -1.0
        total += sign * expectation_pauli(rho, single_site_string(n, {i: "Z"}))
    return total / n


@dataclass(frozen=True)
class ObservableSpec:
    """One requested output column: what to measure and on which sites.

    kinds: "pauli" (letters), "correlation" (sites=(i, j)), "imbalance",
    "entropy" (sites = kept subsystem, or () for the full system).
    """

    kind: str
    sites: tuple = ()
    letters: str = ""

    def __post_init__(self):
        if self.kind not in ("pauli", "correlation", "imbalance", "entropy"):
            raise ValueError(f"unknown observable kind {self.kind!r}")
        if self.kind == "pauli" and not self.letters:
            raise ValueError("pauli observable needs letters")
        if self.kind == "correlation" and len(self.sites) != 2:
            raise ValueError("correlation needs exactly two sites")

    @property
    def label(self) -> str:
        if self.kind == "pauli":
            return self.letters
        if self.kind == "correlation":
            return f"Z{self.sites[0]}Z{self.sites[1]}"
        if self.kind == "imbalance":
            return "imbalance"
        if self.sites:
            return "entropy_" + "-".join(str(s) for s in self.sites)
        return "entropy"

    @property
    def linear(self) -> bool:
        return self.kind != "entropy"

    def check_sites(self, n: int) -> None:
        for s in self.sites:
            if not 0 <= s < n:
                raise ValueError(f"site {s} outside 0..{n - 1} in {self.label}")
        if self.kind == "pauli" and len(self.letters) != n:
            raise ValueError(f"pauli observable {self.letters} has wrong length for n={n}")
        if self.kind == "imbalance" and n % 2 != 0:
            raise ValueError("imbalance needs even n")

    def pauli_terms(self, n: int):
        """Weighted Pauli strings summing to this observable; None for entropy."""
        self.check_sites(n)
        if self.kind == "pauli":
            return ((1.0, PauliString(self.letters)),)
        if self.kind == "correlation":
            i, j = self.sites
            return ((1.0, single_site_string(n, {i: "Z", j: "Z"})),)
        if self.kind == "imbalance":
            return tuple(
                ((-1.0) ** i / n, single_site_string(n, {i: "Z"})) for i in range(n)
            )
        return None

    def evaluate(self, rho: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY) -> float:
        n = _n_of(rho)
        self.check_sites(n)
        if self.kind == "entropy":
            reduced = partial_trace(rho, self.sites) if self.sites else rho
            return von_neumann_entropy(reduced, policy)
        return math.fsum(
            coef * expectation_pauli(rho, ps, policy) for coef, ps in self.pauli_terms(n)
        )
