"""Pauli strings and dense linear algebra on n-qubit spaces.

Convention used by the whole package: qubit 0 is the most significant bit of
the computational-basis index, equivalently the leftmost Kronecker factor.
All operators are dense complex arrays; n is capped by the numeric policy.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionError, NumericError
from .policy import DEFAULT_POLICY, NumericPolicy

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_VALID = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-site Paulis, written as a word like "ZIIZ".

    Every Pauli string is Hermitian, unitary, and its own inverse.
    """

    letters: str

    def __post_init__(self):
        if len(self.letters) < 1:
            raise DimensionError("PauliString needs at least one site")
        bad = set(self.letters) - _VALID
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)}; expected I, X, Y, Z")

    @property
    def n(self) -> int:
        return len(self.letters)

    def weight(self) -> int:
        """Number of non-identity sites."""
        return sum(c != "I" for c in self.letters)

    def __str__(self) -> str:
        return self.letters


def single_site_string(n: int, assignments: dict) -> PauliString:
    """Pauli string that is identity except at the given site -> letter entries."""
    letters = ["I"] * n
    for site, letter in assignments.items():
        if not 0 <= site < n:
            raise DimensionError(f"site {site} outside 0..{n - 1}")
        letters[site] = letter
    return PauliString("".join(letters))


def _parity(a: np.ndarray) -> np.ndarray:
    """Bitwise parity (popcount mod 2) of each entry, for indices up to 2^63."""
    a = a.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        a ^= a >> shift
    return a & 1


def pauli_action(ps: PauliString):
    """Permutation and phase arrays realizing the string without a matrix.

    Returns (perm, phases) with (P v)[perm[i]] = phases[i] * v[i]; perm is an
    involution (bit flips at X/Y sites) and phases collects the Y/Z signs.
    """
    flip = 0
    select = 0
    n_y = 0
    n = ps.n
    for site, c in enumerate(ps.letters):
        bit = 1 << (n - 1 - site)
        if c in ("X", "Y"):
            flip |= bit
        if c in ("Y", "Z"):
            select |= bit
        if c == "Y":
            n_y += 1
    idx = np.arange(1 << n)
    signs = 1.0 - 2.0 * _parity(idx & select)
    # (1, 1j, -1, -1j)[k] rather than 1j**k, which picks up exp/log rounding
    phases = (1, 1j, -1, -1j)[n_y % 4] * signs.astype(complex)
    return idx ^ flip, phases


def pauli_matrix(ps: PauliString, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the string, qubit 0 as the leftmost factor."""
    if ps.n > policy.max_qubits:
        raise DimensionError(
            f"n={ps.n} exceeds the dense-representation cap of {policy.max_qubits} qubits"
        )
    return reduce(np.kron, (PAULI_1Q[c] for c in ps.letters))


def apply_pauli(ps: PauliString, v: np.ndarray) -> np.ndarray:
    """Matrix-free P v for a state vector (or a batch with states as columns)."""
    dim = 1 << ps.n
    if v.shape[0] != dim:
        raise DimensionError(f"vector length {v.shape[0]} does not match 2^{ps.n}")
    perm, phases = pauli_action(ps)
    out = np.empty(v.shape, dtype=complex)
    if v.ndim == 1:
        out[perm] = phases * v
    else:
        out[perm, :] = phases[:, None] * v
    return out


def conjugate_pauli(ps: PauliString, rho: np.ndarray) -> np.ndarray:
    """P rho P for Hermitian P, evaluated through the permutation/phase form."""
    dim = 1 << ps.n
    if rho.shape != (dim, dim):
        raise DimensionError(f"matrix shape {rho.shape} does not match 2^{ps.n}")
    perm, phases = pauli_action(ps)
    q = phases[perm]
    return (q[:, None] * rho[np.ix_(perm, perm)]) * q.conj()[None, :]


def expectation_pauli(
    rho: np.ndarray, ps: PauliString, policy: NumericPolicy = DEFAULT_POLICY
) -> float:
    """Re Tr[rho P] through the permutation/phase form; checks the imaginary residue."""
    dim = 1 << ps.n
    if rho.shape != (dim, dim):
        raise DimensionError(f"matrix shape {rho.shape} does not match 2^{ps.n}")
    perm, phases = pauli_action(ps)
    tr = np.sum(rho[np.arange(dim), perm] * phases)
    if abs(tr.imag) > policy.imag_expectation_tol:
        raise NumericError(f"Tr[rho P] has imaginary residue {tr.imag:.3e}")
    return float(tr.real)


def statevector_expectation_pauli(psi: np.ndarray, ps: PauliString) -> np.ndarray:
    """<psi|P|psi> for a vector or a batch of column vectors; returns real values."""
    perm, phases = pauli_action(ps)
    if psi.ndim == 1:
        return float(np.sum(psi[perm].conj() * phases * psi).real)
    return np.einsum("ic,i,ic->c", psi[perm, :].conj(), phases, psi).real


def hermitian_exponential(
    H: np.ndarray, t: float, policy: NumericPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """e^{-iHt} for Hermitian H via eigendecomposition, exactly unitary up to rounding."""
    if H.shape[0] != H.shape[1]:
        raise DimensionError(f"operator shape {H.shape} is not square")
    if np.max(np.abs(H - H.conj().T)) > policy.operator_hermitian_tol:
        raise NumericError("hermitian_exponential called on a non-Hermitian operator")
    try:
        evals, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed at dim {H.shape[0]}: {exc}") from exc
    return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T


def expectation(
    rho: np.ndarray, O: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY
) -> float:
    """Re Tr[rho O] for a Hermitian observable; the imaginary residue must be noise."""
    if rho.shape != O.shape:
        raise DimensionError(f"state shape {rho.shape} vs observable shape {O.shape}")
    if np.max(np.abs(O - O.conj().T)) > policy.operator_hermitian_tol:
        raise NumericError("expectation called with a non-Hermitian observable")
    tr = np.trace(rho @ O)
    if abs(tr.imag) > policy.imag_expectation_tol:
        raise NumericError(f"Tr[rho O] has imaginary residue {tr.imag:.3e}")
    return float(tr.real)


def check_state_vector(v: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY) -> None:
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > policy.norm_tol:
        raise NumericError(f"state vector norm {nrm} deviates from 1")


def check_density_matrix(rho: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY) -> None:
    """Hermiticity, unit trace, and PSD-up-to-noise checks for a density matrix."""
    if np.max(np.abs(rho - rho.conj().T)) > policy.state_hermitian_tol:
        raise NumericError("density matrix is not Hermitian within tolerance")
    tr = np.trace(rho)
    if abs(tr - 1.0) > policy.trace_tol:
        raise NumericError(f"density matrix trace {tr} deviates from 1")
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < policy.psd_floor:
        raise NumericError(f"density matrix minimum eigenvalue {lo:.3e} below PSD floor")
