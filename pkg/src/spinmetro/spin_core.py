"""Dicke-basis collective spin operators and symmetric-sector states.

Basis convention used throughout the package: amplitudes of a spin-j state
are stored in descending magnetization order m = j, j-1, ..., -j, so index 0
is the fully excited component.  Half-integer quantum numbers are carried as
doubled integers (2j, 2m) to keep parity checks exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, sqrt

import numpy as np
import scipy.sparse as sp

FULL_SPACE_VECTOR_CAP = 14   # largest N for 2^N state vectors
FULL_SPACE_MATRIX_CAP = 12   # largest N for 2^N density-matrix evolution

_AXES = ("x", "y", "z")


def _as_two_j(j) -> int:
    two_j = int(round(2 * j))
    if abs(2 * j - two_j) > 1e-12:
        raise ValueError(f"j={j} is not half-integer")
    if two_j < 1:
        raise ValueError(f"j={j} must be positive")
    return two_j


def dicke_dim(j) -> int:
    """Dimension 2j+1 of the spin-j multiplet."""
    return _as_two_j(j) + 1


def m_values(j) -> np.ndarray:
    """Magnetizations m = j, j-1, ..., -j (descending)."""
    two_j = _as_two_j(j)
    return (two_j - 2 * np.arange(two_j + 1)) / 2.0


@dataclass(frozen=True)
class CollectiveOps:
    """Dense spin-j matrices satisfying [J_x, J_y] = i J_z and cyclic."""

    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    jsq: np.ndarray

    def for_tag(self, tag: str) -> np.ndarray:
        return operator_from_tag(tag, self)


@lru_cache(maxsize=None)
def _collective_ops_cached(two_j: int) -> CollectiveOps:
    j = two_j / 2.0
    m = m_values(j)
    dim = two_j + 1
    jz = np.diag(m).astype(complex)
    jplus = np.zeros((dim, dim), dtype=complex)
    # row index of m+1 is idx(m)-1 in descending order
    for idx in range(1, dim):
        mm = m[idx]
        jplus[idx - 1, idx] = sqrt(j * (j + 1) - mm * (mm + 1))
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    jsq = jx @ jx + jy @ jy + jz @ jz
    return CollectiveOps(jx=jx, jy=jy, jz=jz, jplus=jplus, jminus=jminus, jsq=jsq)


def collective_ops(j) -> CollectiveOps:
    """Build the dense collective operator set for total spin j."""
    return _collective_ops_cached(_as_two_j(j))


def operator_from_tag(tag: str, ops: CollectiveOps) -> np.ndarray:
    """Resolve a collective polynomial tag ('J_z', 'J_x^2', ...) to a matrix."""
    atoms = {"J_x": ops.jx, "J_y": ops.jy, "J_z": ops.jz}
    if tag in atoms:
        return atoms[tag]
    if tag == "J_x^2":
        return ops.jx @ ops.jx
    if tag == "J_x^2-J_y^2":
        return ops.jx @ ops.jx - ops.jy @ ops.jy
    if tag == "J_x^2+J_z^2":
        return ops.jx @ ops.jx + ops.jz @ ops.jz
    raise ValueError(f"unknown operator tag {tag!r}")


@dataclass(frozen=True)
class SymmetricState:
    """Pure state in the symmetric (j = N/2) Dicke sector.

    amplitudes[k] multiplies |j, m=j-k>.
    """

    two_j: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.two_j + 1,):
            raise ValueError("amplitude vector length must be 2j+1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def n_spins(self) -> int:
        return self.two_j

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "SymmetricState":
        return SymmetricState(self.two_j, self.amplitudes / self.norm())

    def inner(self, other: "SymmetricState") -> complex:
        if other.two_j != self.two_j:
            raise ValueError("mismatched sector dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def expectation(self, op: np.ndarray) -> float:
        return float(np.real(np.vdot(self.amplitudes, op @ self.amplitudes)))


def basis_state(j, m) -> SymmetricState:
    """|j, m> as a symmetric-sector state."""
    two_j = _as_two_j(j)
    two_m = int(round(2 * m))
    if abs(2 * m - two_m) > 1e-12 or (two_j - two_m) % 2 or abs(two_m) > two_j:
        raise ValueError(f"invalid m={m} for j={j}")
    amps = np.zeros(two_j + 1, dtype=complex)
    amps[(two_j - two_m) // 2] = 1.0
    return SymmetricState(two_j, amps)


def coherent_amplitudes(j, theta: float, phi: float) -> np.ndarray:
    """Amplitudes of exp(-i phi J_z) exp(-i theta J_y) |j, j>.

    Closed form: <j,m|...|j,j> = sqrt(C(2j, j+m)) cos(theta/2)^(j+m)
    sin(theta/2)^(j-m) e^(-i m phi), exact for any half-integer j.
    """
    two_j = _as_two_j(j)
    m = m_values(j)
    k_up = np.arange(two_j, -1, -1)          # j+m as an integer: 2j .. 0
    binom = np.array([sqrt(comb(two_j, int(k))) for k in k_up])
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    amps = binom * c ** k_up * s ** (two_j - k_up) * np.exp(-1j * m * phi)
    return amps


def spin_coherent_state(j, theta: float, phi: float) -> SymmetricState:
    """Spin coherent state pointing along (theta, phi)."""
    return SymmetricState(_as_two_j(j), coherent_amplitudes(j, theta, phi))


@lru_cache(maxsize=None)
def _extremal_axis_amplitudes(two_j: int, axis: str) -> tuple[np.ndarray, np.ndarray]:
    """Dicke-basis amplitudes of |j,+j>_axis and |j,-j>_axis.

    Phase fixed by making each eigenvector's largest-magnitude Dicke
    amplitude real positive.
    """
    ops = _collective_ops_cached(two_j)
    if axis == "z":
        dim = two_j + 1
        top = np.zeros(dim, dtype=complex)
        top[0] = 1.0
        bot = np.zeros(dim, dtype=complex)
        bot[-1] = 1.0
        return top, bot
    op = {"x": ops.jx, "y": ops.jy}[axis]
    evals, evecs = np.linalg.eigh(op)
    top = evecs[:, np.argmax(evals)]
    bot = evecs[:, np.argmin(evals)]

    def fix(v):
        k = np.argmax(np.abs(v))
        return v * (np.abs(v[k]) / v[k])

    return fix(top), fix(bot)


def ghz_axis(n_spins: int, axis: str = "z", rel_phase: float = 0.0) -> SymmetricState:
    """GHZ state (|j,+j>_axis + e^{i rel_phase} |j,-j>_axis)/sqrt(2)."""
    if n_spins < 2:
        raise ValueError("GHZ state needs n_spins >= 2")
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}")
    top, bot = _extremal_axis_amplitudes(n_spins, axis)
    amps = (top + np.exp(1j * rel_phase) * bot) / sqrt(2.0)
    state = SymmetricState(n_spins, amps)
    return state.normalized()


def multi_ghz(n_spins: int) -> SymmetricState:
    """Normalized sum of the GHZ states along x, y and z.

    The normalization comes from the exact Gram matrix of the three
    components (they are not mutually orthogonal).
    """
    if n_spins < 2:
        raise ValueError("multi-GHZ state needs n_spins >= 2")
    comps = [ghz_axis(n_spins, ax).amplitudes for ax in _AXES]
    total = comps[0] + comps[1] + comps[2]
    nrm = np.linalg.norm(total)
    if nrm < 1e-12:
        raise ValueError("GHZ components interfere destructively to zero")
    return SymmetricState(n_spins, total / nrm)


def multi_ghz_norm_sq(n_spins: int) -> float:
    """Squared normalization constant of the multi-GHZ superposition."""
    comps = [ghz_axis(n_spins, ax).amplitudes for ax in _AXES]
    total = comps[0] + comps[1] + comps[2]
    return float(np.vdot(total, total).real)


# ---------------------------------------------------------------------------
# full 2^N product space
# ---------------------------------------------------------------------------

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
    "i": np.eye(2, dtype=complex),
}


def pauli_site(n_spins: int, site: int, which: str) -> sp.csr_matrix:
    """sigma_which acting on `site` (0-based) of an N-spin register.

    Computational basis ordering: bit 0 of the index is spin 0, bit value 0
    means up (m=+1/2).
    """
    if n_spins > FULL_SPACE_VECTOR_CAP:
        raise ValueError(f"n_spins={n_spins} exceeds full-space cap")
    if not 0 <= site < n_spins:
        raise ValueError("site out of range")
    op = sp.csr_matrix(_PAULI[which])
    left = sp.identity(2 ** site, format="csr", dtype=complex)
    right = sp.identity(2 ** (n_spins - site - 1), format="csr", dtype=complex)
    return sp.kron(sp.kron(left, op), right, format="csr")


@lru_cache(maxsize=None)
def collective_full(n_spins: int, which: str) -> sp.csr_matrix:
    """Collective operator J_which = (1/2) sum_i sigma_which^(i) in 2^N space.

    For which in {'+', '-'} returns sum_i sigma_pm^(i) (no 1/2)."""
    total = sp.csr_matrix((2 ** n_spins, 2 ** n_spins), dtype=complex)
    for site in range(n_spins):
        total = total + pauli_site(n_spins, site, which)
    if which in ("x", "y", "z"):
        total = total * 0.5
    return total.tocsr()


@lru_cache(maxsize=None)
def embedding_isometry(n_spins: int) -> sp.csr_matrix:
    """Isometry from the symmetric sector (N+1) into the 2^N product space.

    Column k holds the permutation-sum expansion of |N/2, m=N/2-k> with
    weights 1/sqrt(C(N, N/2+m)).
    """
    if n_spins > FULL_SPACE_VECTOR_CAP:
        raise ValueError(f"n_spins={n_spins} exceeds full-space cap")
    dim_full = 2 ** n_spins
    rows, cols, vals = [], [], []
    for idx in range(dim_full):
        n_down = bin(idx).count("1")           # bit 1 = down
        k = n_down                             # column index: m = N/2 - k
        rows.append(idx)
        cols.append(k)
        vals.append(1.0 / sqrt(comb(n_spins, n_down)))
    mat = sp.csr_matrix(
        (vals, (rows, cols)), shape=(dim_full, n_spins + 1), dtype=complex
    )
    return mat


def embed_symmetric(state: SymmetricState, n_spins: int) -> np.ndarray:
    """Expand a symmetric-sector state into the full 2^N product basis."""
    if state.two_j != n_spins:
        raise ValueError("state.j must equal n_spins/2")
    iso = embedding_isometry(n_spins)
    return iso @ state.amplitudes
